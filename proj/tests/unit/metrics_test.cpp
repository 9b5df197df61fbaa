#include "oracles.hpp"
#include "organoid/error.hpp"
#include "organoid/metrics.hpp"

#include <doctest.h>

using namespace organoid;
using namespace organoid::metrics;

namespace {

const Partition ab_c({{"a", "b"}, {"c"}});
const Partition singles({{"a"}, {"b"}, {"c"}});

} // namespace

TEST_CASE("pair confusion") {
    CHECK(pair_confusion(ab_c, ab_c) == PairConfusion{1, 0, 2, 0});
    CHECK(pair_confusion(ab_c, singles) == PairConfusion{0, 1, 2, 0});
    const auto all = pair_confusion(singles, Partition(std::vector<std::vector<std::string>>{{"a", "b", "c"}}));
    CHECK(all.false_joins == 3);
    CHECK(all.total() == 3);
    CHECK_THROWS_AS(pair_confusion(ab_c, Partition(std::vector<std::vector<std::string>>{{"a", "b"}})), ValidationError);
}

TEST_CASE("pair confusion of an intransitive labeling") {
    const PairLabeling l{{"a", "b", "c"}, {1, 1, 0}};
    CHECK(pair_confusion(ab_c, l) == PairConfusion{1, 0, 1, 1});
}

TEST_CASE("scores") {
    const auto perfect = scores(pair_confusion(ab_c, ab_c));
    CHECK(perfect.accuracy == 1.0);
    CHECK(*perfect.precision_cuts == 1.0);
    CHECK(*perfect.recall_cuts == 1.0);
    CHECK(*perfect.precision_joins == 1.0);
    CHECK(*perfect.recall_joins == 1.0);
    CHECK(*perfect.f1_joins == 1.0);
    CHECK(*perfect.f1_cuts == 1.0);

    const auto s = scores(pair_confusion(ab_c, singles));
    CHECK(s.rand_index == doctest::Approx(2.0 / 3));
    CHECK(s.accuracy == s.rand_index);
    CHECK(*s.recall_cuts == 1.0);
    CHECK(*s.precision_cuts == doctest::Approx(2.0 / 3));
    CHECK(*s.recall_joins == 0.0);
    CHECK_FALSE(s.precision_joins.has_value());
    CHECK_FALSE(s.f1_joins.has_value());

    const auto none = scores(pair_confusion(singles, singles));
    CHECK_FALSE(none.recall_joins.has_value());
}

TEST_CASE("variation of information examples") {
    const auto same = variation_of_information(ab_c, ab_c);
    CHECK(same.vi == 0.0);
    CHECK(same.vi_cuts == 0.0);
    CHECK(same.vi_joins == 0.0);

    const auto split = variation_of_information(ab_c, singles);
    CHECK(split.vi_cuts == doctest::Approx(2.0 / 3));
    CHECK(split.vi_joins == doctest::Approx(0.0));
    CHECK(split.vi == doctest::Approx(2.0 / 3));

    const auto merged = variation_of_information(ab_c, Partition(std::vector<std::vector<std::string>>{{"a", "b", "c"}}));
    CHECK(merged.vi_cuts == doctest::Approx(0.0));
    CHECK(merged.vi_joins > 0.0);
}

TEST_CASE("variation of information against singletons and the single cluster") {
    std::mt19937_64 rng(41);
    for (int t = 0; t < 30; ++t) {
        const std::size_t n = 2 + t % 12;
        const auto truth = oracle::random_partition(rng, n, 4);
        const auto ids = truth.ground_set();
        std::vector<std::vector<std::string>> single_sets;
        for (const auto& id : ids)
            single_sets.push_back({id});
        const double h = entropy(truth);
        CHECK(variation_of_information(truth, Partition(single_sets)).vi ==
              doctest::Approx(std::log2(static_cast<double>(n)) - h));
        CHECK(variation_of_information(truth, Partition({ids})).vi == doctest::Approx(h));
    }
}

TEST_CASE("metrics agree with independent oracles") {
    std::mt19937_64 rng(43);
    for (int t = 0; t < 300; ++t) {
        const std::size_t n = 1 + t % 15;
        const auto truth = oracle::random_partition(rng, n, 1 + t % 5);
        const auto pred = oracle::random_partition(rng, n, 1 + (t / 5) % 5);
        const auto ids = truth.ground_set();
        const auto tl = truth.labels_for(ids), pl = pred.labels_for(ids);

        const auto vi = variation_of_information(truth, pred);
        const auto ref = oracle::vi_oracle(tl, pl);
        CHECK(std::abs(vi.vi - (vi.vi_cuts + vi.vi_joins)) <= 1e-12);
        CHECK(vi.vi == doctest::Approx(ref.vi).epsilon(1e-9));
        CHECK(vi.vi_cuts == doctest::Approx(ref.vi_cuts).epsilon(1e-9));
        CHECK(vi.vi_joins == doctest::Approx(ref.vi_joins).epsilon(1e-9));

        const auto swapped = variation_of_information(pred, truth);
        CHECK(swapped.vi == doctest::Approx(vi.vi));
        CHECK(swapped.vi_cuts == doctest::Approx(vi.vi_joins));

        const auto c = pair_confusion(truth, pred);
        const auto s = scores(c);
        CHECK(s.rand_index == doctest::Approx(oracle::rand_index_oracle(tl, pl)));
        if (c.total() > 0)
            CHECK(s.rand_index == doctest::Approx(1.0 - static_cast<double>(c.false_cuts + c.false_joins) /
                                                            static_cast<double>(c.total())));
    }
}

TEST_CASE("variation of information is a metric") {
    std::mt19937_64 rng(47);
    for (int t = 0; t < 100; ++t) {
        const std::size_t n = 3 + t % 10;
        const auto a = oracle::random_partition(rng, n, 4);
        const auto b = oracle::random_partition(rng, n, 4);
        const auto c = oracle::random_partition(rng, n, 4);
        const double ab = variation_of_information(a, b).vi;
        CHECK((ab == 0.0) == (a == b));
        CHECK(variation_of_information(a, c).vi <= ab + variation_of_information(b, c).vi + 1e-12);
    }
}

TEST_CASE("refinement zeroes one side") {
    const Partition coarse({{"a", "b", "c"}, {"d", "e"}});
    const Partition fine({{"a", "b"}, {"c"}, {"d"}, {"e"}});
    CHECK(variation_of_information(coarse, fine).vi_joins == doctest::Approx(0.0));
    CHECK(variation_of_information(fine, coarse).vi_cuts == doctest::Approx(0.0));
}

TEST_CASE("relabeling does not change metrics") {
    const Partition p({{"x", "y"}, {"z", "w"}});
    const Partition q({{"w", "z"}, {"y", "x"}});
    CHECK(pair_confusion(ab_c, ab_c) == pair_confusion(Partition({{"c"}, {"b", "a"}}), ab_c));
    CHECK(variation_of_information(p, q).vi == 0.0);
}
