#include "organoid/learn.hpp"

#include "organoid/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace organoid::learn {

void AnnealConfig::validate() const {
    if (!(kappa >= 0.0) || !std::isfinite(kappa))
        throw ValidationError("kappa must be >= 0");
    if (!(t0 > 0.0))
        throw ValidationError("initial temperature must be positive");
    if (!(beta > 0.0 && beta < 1.0))
        throw ValidationError("beta must lie in (0,1)");
    if (t_max < 0)
        throw ValidationError("iteration limit must be >= 0");
}

void LabeledDataset::validate() const {
    validate_unique_ids(models);
    std::vector<std::string> ids;
    for (const auto& m : models)
        ids.push_back(m.image_id);
    truth.labels_for(ids);
}

PairLabeling classify_pairs(const CostMatrix& q) {
    const std::size_t n = q.size();
    PairLabeling out{q.ids(), std::vector<std::uint8_t>(n * (n - (n > 0)) / 2)};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            out.join[pair_index(n, i, j)] = q.at(i, j) >= 0.0;
    return out;
}

double join_f1(const metrics::PairConfusion& c) {
    return metrics::scores(c).f1_joins.value_or(0.0);
}

double acceptance_probability(double f1_new, double f1_old, double temperature) {
    if (f1_new > f1_old)
        return 1.0;
    return std::exp((f1_new - f1_old) / temperature);
}

pqap::PqapParams clamp(pqap::PqapParams p) {
    p.color_threshold = std::clamp(p.color_threshold, 0.0, 2.0);
    p.radius_threshold = std::clamp(p.radius_threshold, 0.0, 2.0);
    p.angle_threshold = std::clamp(p.angle_threshold, 0.0, 2.0);
    p.unary_mix = std::clamp(p.unary_mix, 0.01, 0.99);
    p.pairwise_weight = std::clamp(p.pairwise_weight, 0.01, 0.99);
    p.cut_threshold = std::clamp(p.cut_threshold, 0.0, 1.0);
    return p;
}

namespace {

bool same_assignment_params(const pqap::PqapParams& a, const pqap::PqapParams& b) {
    return a.color_threshold == b.color_threshold && a.radius_threshold == b.radius_threshold &&
           a.angle_threshold == b.angle_threshold && a.unary_mix == b.unary_mix &&
           a.pairwise_weight == b.pairwise_weight;
}

/// Evaluates join F1 for a parameter vector. The similarities only depend on
/// the five assignment parameters, so they are reused when only the cut
/// threshold differs from the previous evaluation.
class Evaluator {
public:
    Evaluator(const LabeledDataset& data, const pqap::SolverConfig& solver, unsigned threads)
        : data_(data), solver_(solver), threads_(threads) {}

    double f1(const pqap::PqapParams& p) {
        if (!cached_ || !same_assignment_params(p, cached_params_)) {
            // An all-zero threshold vector has no normalization; it is scored as F1 = 0.
            if (!(p.normalizer() > 0.0))
                return 0.0;
            phi_ = pqap::similarities(data_.models, p, solver_, threads_);
            cached_params_ = p;
            cached_ = true;
        }
        const auto q = pqap::costs_from_similarities(data_.models, phi_, p.cut_threshold);
        return join_f1(metrics::pair_confusion(data_.truth, classify_pairs(q)));
    }

private:
    const LabeledDataset& data_;
    pqap::SolverConfig solver_;
    unsigned threads_;
    bool cached_ = false;
    pqap::PqapParams cached_params_;
    std::vector<double> phi_;
};

} // namespace

AnnealResult anneal_pqap(const LabeledDataset& data, const pqap::PqapParams& init,
                         const AnnealConfig& config, const pqap::SolverConfig& solver,
                         unsigned threads) {
    config.validate();
    data.validate();
    init.validate();
    if (data.truth.cluster_count() < 2)
        throw ValidationError("annealing needs at least two true clusters");

    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    Evaluator evaluator(data, solver, threads);

    AnnealResult result;
    pqap::PqapParams current = init;
    double current_f1 = evaluator.f1(current);
    result.best = current;
    result.best_f1 = current_f1;
    result.trace.push_back({0, config.t0, current, current_f1, true, current, current_f1, current_f1});

    double temperature = config.t0;
    for (int t = 1; t <= config.t_max; ++t) {
        temperature *= config.beta;

        pqap::PqapParams proposal = current;
        for (double* field : {&proposal.color_threshold, &proposal.radius_threshold,
                              &proposal.angle_threshold, &proposal.unary_mix,
                              &proposal.pairwise_weight, &proposal.cut_threshold})
            *field += config.kappa * normal(rng);
        proposal = clamp(proposal);

        const double proposal_f1 = evaluator.f1(proposal);
        bool accepted = proposal_f1 > current_f1;
        if (!accepted)
            accepted = uniform(rng) < acceptance_probability(proposal_f1, current_f1, temperature);
        if (accepted) {
            current = proposal;
            current_f1 = proposal_f1;
        }
        if (current_f1 > result.best_f1) {
            result.best = current;
            result.best_f1 = current_f1;
        }
        result.trace.push_back({t, temperature, proposal, proposal_f1, accepted, current,
                                current_f1, result.best_f1});
    }
    return result;
}

} // namespace organoid::learn
