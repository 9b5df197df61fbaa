#pragma once

#include "organoid/cost_matrix.hpp"
#include "organoid/partition.hpp"

#include <cstddef>
#include <vector>

namespace organoid::cc {

struct ClusteringResult {
    Partition partition;
    double objective = 0.0;
};

struct ExactConfig {
    /// Largest instance solve_exact accepts.
    std::size_t max_size = 16;
};

/// Sum of q over the pairs that the partition cuts. Throws ValidationError if
/// the partition is not over exactly q.ids().
double cc_objective(const CostMatrix& q, const Partition& p);

/// Same, for a labelling indexed like q.ids(). Pairs are summed in row-major
/// order so that equal labellings give bit-identical values.
double cc_objective(const CostMatrix& q, const std::vector<std::size_t>& labels);

/// Globally optimal partition by branch-and-bound.
///
/// The instance is first split into the connected components of the graph of
/// pairs with q >= 0; an optimal partition never joins two such components
/// because every pair between them has negative cost. Each component is then
/// solved by a depth-first search that places elements one at a time into an
/// existing cluster or a new one. The bound adds, for every unplaced element,
/// its cheapest placement against the placed ones, and the negative costs
/// among unplaced elements. Among optimal partitions, clusters whose mutual
/// cost sum is zero are merged.
///
/// Throws SolverSizeError when q has more than config.max_size ids.
ClusteringResult solve_exact(const CostMatrix& q, const ExactConfig& config = {});

/// Greedy additive edge contraction followed by Kernighan-Lin refinement.
/// Deterministic.
ClusteringResult solve_heuristic(const CostMatrix& q);

/// Repeatedly merges the two clusters with the largest positive cost sum
/// between them. Returns one label per id.
std::vector<std::size_t> greedy_additive_edge_contraction(const CostMatrix& q);

/// Improves a labelling in place by two-cluster Kernighan-Lin move sequences
/// (including moves into a new cluster) and whole-cluster merges until no
/// accepted move decreases the objective.
void kernighan_lin(const CostMatrix& q, std::vector<std::size_t>& labels);

} // namespace organoid::cc
