#include "oracles.hpp"
#include "organoid/error.hpp"
#include "organoid/partition.hpp"

#include <doctest.h>

using namespace organoid;

TEST_CASE("partition canonical form") {
    const Partition p({{"c", "a"}, {"b"}});
    CHECK(p.clusters() == std::vector<std::vector<std::string>>{{"a", "c"}, {"b"}});
    CHECK(p == Partition({{"b"}, {"a", "c"}}));
    CHECK(p.cluster_count() == 2);
    CHECK(p.element_count() == 3);
    CHECK(p.ground_set() == std::vector<std::string>{"a", "b", "c"});
    CHECK(p.labels_for({"b", "c", "a"}) == std::vector<std::size_t>{1, 0, 0});
    CHECK_THROWS_AS(p.labels_for({"a", "b"}), ValidationError);
    CHECK_THROWS_AS(Partition({{"a"}, {"a"}}), ValidationError);
    CHECK_THROWS_AS(Partition({{"a"}, {}}), ValidationError);
    CHECK(Partition::from_labels({"x", "y", "z"}, {7, 3, 7}) == Partition({{"x", "z"}, {"y"}}));
}

TEST_CASE("partition to cuts") {
    const std::vector<std::string> ids{"a", "b", "c"};
    CHECK(partition_to_cuts(Partition({ids})).cut == std::vector<std::uint8_t>{0, 0, 0});
    CHECK(partition_to_cuts(Partition({{"a"}, {"b"}, {"c"}})).cut == std::vector<std::uint8_t>{1, 1, 1});
    const auto y = partition_to_cuts(Partition({{"a", "b"}, {"c"}}));
    CHECK_FALSE(y.is_cut(0, 1));
    CHECK(y.is_cut(0, 2));
    CHECK(y.is_cut(1, 2));
    CHECK(y.is_cut(2, 1));

    const auto reordered = partition_to_cuts(Partition({{"a", "b"}, {"c"}}), {"c", "a", "b"});
    CHECK(reordered.cut == std::vector<std::uint8_t>{1, 1, 0});
}

TEST_CASE("cuts to partition") {
    const std::vector<std::string> ids{"a", "b", "c"};
    CHECK(cuts_to_partition({ids, {0, 0, 0}}) == Partition({ids}));
    CHECK(cuts_to_partition({ids, {1, 1, 1}}) == Partition({{"a"}, {"b"}, {"c"}}));
    CHECK_THROWS_WITH_AS(cuts_to_partition({ids, {0, 1, 0}}), "not a partition encoding",
                         ValidationError);
    CHECK_FALSE(CutVector{ids, {0, 1, 0}}.satisfies_transitivity());
}

TEST_CASE("every partition survives the cut encoding") {
    for (std::size_t n = 1; n <= 7; ++n) {
        std::vector<std::string> ids;
        for (std::size_t i = 0; i < n; ++i)
            ids.push_back("v" + std::to_string(i));
        oracle::for_each_partition(n, [&](const std::vector<std::size_t>& labels) {
            const auto p = Partition::from_labels(ids, labels);
            const auto y = partition_to_cuts(p, ids);
            REQUIRE(y.satisfies_transitivity());
            REQUIRE(cuts_to_partition(y) == p);
        });
    }
}

TEST_CASE("only transitive cut vectors decode") {
    // All 2^6 cut vectors over four elements: exactly the 15 partitions are valid.
    const std::vector<std::string> ids{"a", "b", "c", "d"};
    int valid = 0;
    for (unsigned mask = 0; mask < 64; ++mask) {
        CutVector y{ids, {}};
        for (int b = 0; b < 6; ++b)
            y.cut.push_back((mask >> b) & 1u);
        if (y.satisfies_transitivity()) {
            ++valid;
            CHECK(partition_to_cuts(cuts_to_partition(y), ids).cut == y.cut);
        } else {
            CHECK_THROWS_AS(cuts_to_partition(y), ValidationError);
        }
    }
    CHECK(valid == 15);
}

TEST_CASE("labeling from a partition") {
    const auto l = partition_to_labeling(Partition({{"a", "c"}, {"b"}}), {"a", "b", "c"});
    CHECK(l.join == std::vector<std::uint8_t>{0, 1, 0});
}

TEST_CASE("pair index enumerates row-major") {
    std::size_t k = 0;
    for (std::size_t i = 0; i < 9; ++i)
        for (std::size_t j = i + 1; j < 9; ++j)
            CHECK(pair_index(9, i, j) == k++);
}
