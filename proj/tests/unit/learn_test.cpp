#include "oracles.hpp"
#include "organoid/error.hpp"
#include "organoid/learn.hpp"

#include <doctest.h>

using namespace organoid;
using namespace organoid::learn;

namespace {

LabeledDataset planted(std::uint64_t seed, int classes, int per_class, std::size_t points) {
    std::mt19937_64 rng(seed);
    LabeledDataset d;
    std::vector<std::string> ids;
    std::vector<std::size_t> labels;
    for (int c = 0; c < classes; ++c) {
        const auto proto = oracle::random_model(rng, "proto", points);
        for (int i = 0; i < per_class; ++i) {
            const std::string id = "c" + std::to_string(c) + "_" + std::to_string(i);
            d.models.push_back(oracle::consistent_copy(rng, proto, 75, id));
            ids.push_back(id);
            labels.push_back(c);
        }
    }
    d.truth = Partition::from_labels(ids, labels);
    return d;
}

} // namespace

TEST_CASE("pair classification by sign") {
    CostMatrix q({"a", "b", "c"});
    q.set(0, 1, 0.0);
    q.set(0, 2, -0.1);
    q.set(1, 2, 0.3);
    CHECK(classify_pairs(q).join == std::vector<std::uint8_t>{1, 0, 1});

    std::mt19937_64 rng(71);
    const auto r = oracle::random_costs(rng, 9);
    const auto l = classify_pairs(r);
    for (std::size_t i = 0; i < 9; ++i)
        for (std::size_t j = i + 1; j < 9; ++j)
            CHECK((l.join[pair_index(9, i, j)] != 0) == (r.at(i, j) >= 0.0));
}

TEST_CASE("join F1 treats an undefined score as zero") {
    CHECK(join_f1(metrics::PairConfusion{0, 0, 5, 0}) == 0.0);
    CHECK(join_f1(metrics::PairConfusion{2, 0, 5, 0}) == 1.0);
    CHECK(join_f1(metrics::PairConfusion{1, 1, 0, 0}) == doctest::Approx(2.0 / 3));
}

TEST_CASE("acceptance probability") {
    CHECK(acceptance_probability(0.6, 0.5, 0.1) == 1.0);
    CHECK(acceptance_probability(0.5, 0.5, 0.1) == 1.0);
    const double hot = acceptance_probability(0.4, 0.5, 0.3);
    const double cold = acceptance_probability(0.4, 0.5, 0.1);
    CHECK(hot == doctest::Approx(std::exp(-0.1 / 0.3)));
    CHECK(cold < hot);
    CHECK(cold > 0.0);
}

TEST_CASE("clamping") {
    pqap::PqapParams p{-1.0, 3.0, 0.5, 0.0, 1.0, 1.5};
    const auto c = clamp(p);
    CHECK(c.color_threshold == 0.0);
    CHECK(c.radius_threshold == 2.0);
    CHECK(c.angle_threshold == 0.5);
    CHECK(c.unary_mix == 0.01);
    CHECK(c.pairwise_weight == 0.99);
    CHECK(c.cut_threshold == 1.0);
}

TEST_CASE("annealing with zero step size keeps the initial parameters") {
    const auto data = planted(1, 2, 3, 8);
    AnnealConfig cfg;
    cfg.kappa = 0.0;
    cfg.t_max = 5;
    const pqap::PqapParams init;
    const auto r = anneal_pqap(data, init, cfg, pqap::SolverConfig{});
    CHECK(r.best == init);
    CHECK(r.trace.size() == 6);
    for (const auto& s : r.trace)
        CHECK(s.current_f1 == r.trace.front().current_f1);
    CHECK(r.best_f1 == r.trace.front().current_f1);
}

TEST_CASE("annealing is reproducible and monotone in the best score") {
    const auto data = planted(2, 3, 3, 8);
    AnnealConfig cfg;
    cfg.t_max = 30;
    cfg.seed = 99;
    const auto a = anneal_pqap(data, pqap::PqapParams{}, cfg, pqap::SolverConfig{});
    const auto b = anneal_pqap(data, pqap::PqapParams{}, cfg, pqap::SolverConfig{}, 3);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        CHECK(a.trace[i].proposal == b.trace[i].proposal);
        CHECK(a.trace[i].current_f1 == b.trace[i].current_f1);
    }
    for (std::size_t i = 1; i < a.trace.size(); ++i) {
        CHECK(a.trace[i].best_f1 >= a.trace[i - 1].best_f1);
        CHECK(a.trace[i].temperature == doctest::Approx(cfg.t0 * std::pow(cfg.beta, i)));
        if (!a.trace[i].accepted)
            CHECK(a.trace[i].current == a.trace[i - 1].current);
    }
    CHECK(a.best_f1 == a.trace.back().best_f1);
}

TEST_CASE("annealing keeps a perfect initialization perfect") {
    const auto data = planted(3, 3, 3, 8);
    const pqap::PqapParams init; // consistent copies score phi = 1 within a class
    AnnealConfig cfg;
    cfg.t_max = 10;
    const auto r = anneal_pqap(data, init, cfg, pqap::SolverConfig{});
    CHECK(r.trace.front().current_f1 == 1.0);
    CHECK(r.best_f1 == 1.0);
}

TEST_CASE("annealing improves a mis-set initialization") {
    const auto data = planted(4, 3, 3, 8);
    pqap::PqapParams init;
    init.cut_threshold = 0.0; // joins every pair
    AnnealConfig cfg;
    cfg.t_max = 140;
    cfg.seed = 5;
    const auto r = anneal_pqap(data, init, cfg, pqap::SolverConfig{});
    CHECK(r.best_f1 > r.trace.front().current_f1);
}

TEST_CASE("annealing needs at least two true clusters") {
    auto data = planted(5, 1, 3, 6);
    CHECK_THROWS_AS(anneal_pqap(data, pqap::PqapParams{}, AnnealConfig{}, pqap::SolverConfig{}),
                    ValidationError);
}
