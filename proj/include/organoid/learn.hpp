#pragma once

#include "organoid/cost_matrix.hpp"
#include "organoid/metrics.hpp"
#include "organoid/model.hpp"
#include "organoid/partition.hpp"
#include "organoid/pqap.hpp"

#include <cstdint>
#include <vector>

namespace organoid::learn {

struct AnnealConfig {
    double kappa = 0.1;  ///< std-dev of the Gaussian proposal per parameter
    double t0 = 0.3;     ///< initial temperature
    double beta = 0.99;  ///< geometric cooling factor
    int t_max = 140;     ///< number of proposals
    std::uint64_t seed = 0;

    void validate() const;
};

struct LabeledDataset {
    std::vector<OrganoidModel> models;
    Partition truth;

    /// Unique ids, and truth covers exactly the model ids.
    void validate() const;
};

/// Join iff q >= 0 (costs already include the cut threshold).
PairLabeling classify_pairs(const CostMatrix& q);

/// F1 score of the join class; 0 when it is undefined.
double join_f1(const metrics::PairConfusion& c);

/// Metropolis acceptance: 1 for an improvement, exp((f1_new - f1_old) / T) otherwise.
double acceptance_probability(double f1_new, double f1_old, double temperature);

/// Clamps thresholds to [0,2], mixing weights to [0.01,0.99] and the cut
/// threshold to [0,1].
pqap::PqapParams clamp(pqap::PqapParams p);

struct AnnealStep {
    int iteration = 0;
    double temperature = 0.0;
    pqap::PqapParams proposal;
    double proposal_f1 = 0.0;
    bool accepted = false;
    pqap::PqapParams current; ///< parameters kept after the accept/reject decision
    double current_f1 = 0.0;
    double best_f1 = 0.0;
};

struct AnnealResult {
    pqap::PqapParams best;
    double best_f1 = 0.0;
    std::vector<AnnealStep> trace; ///< iteration 0 is the initial evaluation
};

/// Simulated annealing of all six parameters against the join F1 of the
/// independent pair classification. Every proposal perturbs every parameter
/// by an independent N(0, kappa) draw, recomputes all pairwise similarities
/// and is accepted by the Metropolis rule at T_t = beta^t T_0. Returns the
/// parameters with the highest F1 seen (the earliest on ties).
AnnealResult anneal_pqap(const LabeledDataset& data, const pqap::PqapParams& init,
                         const AnnealConfig& config, const pqap::SolverConfig& solver,
                         unsigned threads = 1);

} // namespace organoid::learn
