#pragma once

#include "organoid/cost_matrix.hpp"
#include "organoid/model.hpp"

#include <cstddef>
#include <utility>
#include <vector>

namespace organoid::pqap {

/// Thresholds and mixing weights of the assignment model, plus the cut
/// threshold that turns a normalized similarity into a clustering cost.
struct PqapParams {
    double color_threshold = 0.2;  ///< delta
    double radius_threshold = 0.2; ///< delta'
    double angle_threshold = 0.2;  ///< delta''
    double unary_mix = 0.5;        ///< theta in (0,1), color vs. radius
    double pairwise_weight = 0.5;  ///< lambda in (0,1), unary vs. pairwise
    double cut_threshold = 0.5;    ///< delta''' in [0,1]

    /// Throws ValidationError if any parameter is out of range.
    void validate() const;

    /// (1-lambda)(theta delta + (1-theta) delta') + lambda delta''.
    /// Magnitude of the most negative objective any instance can reach.
    double normalizer() const;

    friend bool operator==(const PqapParams&, const PqapParams&) = default;
};

/// A partial one-to-one matching between source and target key points.
struct Assignment {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::size_t source_size = 0;
    std::size_t target_size = 0;

    /// Indices in bounds and every index used at most once on each side.
    bool is_feasible() const;
};

struct SolverConfig {
    int rotation_steps = 75;   ///< N, number of grid angles
    int candidate_divisor = 10; ///< M, candidates per source point = max(1, |V_k| / M)

    void validate() const;
};

/// One directed assignment problem between two models with all geometric
/// quantities precomputed.
class PqapInstance {
public:
    /// Throws ValidationError on invalid models or parameters.
    PqapInstance(const OrganoidModel& source, const OrganoidModel& target, const PqapParams& params);

    const OrganoidModel& source() const { return *source_; }
    const OrganoidModel& target() const { return *target_; }
    const PqapParams& params() const { return params_; }

    std::size_t source_size() const { return source_->points.size(); }
    std::size_t target_size() const { return target_->points.size(); }

    /// min(|V_j|, |V_k|)
    std::size_t n1() const { return n1_; }
    /// n1 (n1 - 1) / 2
    std::size_t n2() const { return n2_; }

    /// theta (d - delta) + (1 - theta)(d' - delta')
    double unary_cost(std::size_t v, std::size_t w) const { return unary_[v * target_size() + w]; }

    /// |alpha_j(v,v2) - alpha_k(w,w2)| - delta''. Zero when any of the four
    /// points coincides with its barycenter (the angle is undefined there).
    double pairwise_cost(std::size_t v, std::size_t v2, std::size_t w, std::size_t w2) const;

    /// |sigma_v - sigma_w|
    double radius_difference(std::size_t v, std::size_t w) const;

    /// |alpha_j(v,v2) - alpha_k(w,w2)|, requires all four points off-barycenter.
    double angle_difference(std::size_t v, std::size_t v2, std::size_t w, std::size_t w2) const;

    /// Weighted objective: (1-lambda)/n1 * sum of unary costs plus
    /// lambda/n2 * sum of pairwise costs over unordered pairs of assigned pairs.
    /// Throws ValidationError("infeasible assignment") when x is not feasible.
    double objective(const Assignment& x) const;

    /// Weight applied to each unary cost, (1-lambda)/n1.
    double unary_weight() const { return unary_weight_; }
    /// Weight applied to each pairwise cost, lambda/n2 (0 when n2 == 0).
    double pairwise_weight() const { return pairwise_weight_; }

private:
    const OrganoidModel* source_;
    const OrganoidModel* target_;
    PqapParams params_;
    std::size_t n1_;
    std::size_t n2_;
    double unary_weight_;
    double pairwise_weight_;
    std::vector<double> source_radius_;
    std::vector<double> target_radius_;
    std::vector<bool> source_on_center_;
    std::vector<bool> target_on_center_;
    std::vector<double> source_angle_; // |V_j| x |V_j|
    std::vector<double> target_angle_; // |V_k| x |V_k|
    std::vector<double> unary_;        // |V_j| x |V_k|
};

struct Solution {
    Assignment assignment;
    double objective = 0.0;
};

/// Greedy construction for one rotation angle. When trace is non-null it
/// receives the objective after every accepted pair (starting from 0).
Solution solve_at_angle(const PqapInstance& instance, double angle, const SolverConfig& config,
                        std::vector<double>* trace = nullptr);

/// Best greedy assignment over the rotation grid 2 pi n / N, n = 0..N-1.
/// The returned objective is never positive.
Solution solve_local(const PqapInstance& instance, const SolverConfig& config);

/// Normalized similarity phi in [0,1] from the objectives of both directions.
/// Throws ValidationError("degenerate normalization") if the normalizer is not positive.
double normalize(double cost_forward, double cost_backward, const PqapParams& params);

/// phi for one unordered pair: solves both directions and normalizes.
double similarity(const OrganoidModel& a, const OrganoidModel& b, const PqapParams& params,
                  const SolverConfig& config);

/// phi for every unordered pair (i < j), in row-major order over the model list.
/// Pairs are evaluated on `threads` worker threads; the result does not depend
/// on the thread count.
std::vector<double> similarities(const std::vector<OrganoidModel>& models, const PqapParams& params,
                                 const SolverConfig& config, unsigned threads = 1);

/// Turns pairwise similarities (as returned by similarities()) into the
/// clustering costs q = phi - cut_threshold.
CostMatrix costs_from_similarities(const std::vector<OrganoidModel>& models,
                                   const std::vector<double>& phi, double cut_threshold);

/// q_{j,k} = phi_{j,k} - cut_threshold for every unordered pair.
CostMatrix pqap_cost_matrix(const std::vector<OrganoidModel>& models, const PqapParams& params,
                            const SolverConfig& config, unsigned threads = 1);

} // namespace organoid::pqap
