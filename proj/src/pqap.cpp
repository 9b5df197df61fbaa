#include "organoid/pqap.hpp"

#include "organoid/error.hpp"
#include "organoid/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace organoid::pqap {

void PqapParams::validate() const {
    const auto nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
    if (!nonneg(color_threshold) || !nonneg(radius_threshold) || !nonneg(angle_threshold))
        throw ValidationError("thresholds delta, delta', delta'' must be finite and >= 0");
    if (!(unary_mix > 0.0 && unary_mix < 1.0))
        throw ValidationError("theta must lie in (0,1)");
    if (!(pairwise_weight > 0.0 && pairwise_weight < 1.0))
        throw ValidationError("lambda must lie in (0,1)");
    if (!(cut_threshold >= 0.0 && cut_threshold <= 1.0))
        throw ValidationError("delta''' must lie in [0,1]");
}

double PqapParams::normalizer() const {
    return (1.0 - pairwise_weight) *
               (unary_mix * color_threshold + (1.0 - unary_mix) * radius_threshold) +
           pairwise_weight * angle_threshold;
}

bool Assignment::is_feasible() const {
    std::vector<bool> src(source_size, false), tgt(target_size, false);
    for (const auto& [v, w] : pairs) {
        if (v >= source_size || w >= target_size || src[v] || tgt[w])
            return false;
        src[v] = tgt[w] = true;
    }
    return true;
}

void SolverConfig::validate() const {
    if (rotation_steps < 1)
        throw ValidationError("rotation_steps must be >= 1");
    if (candidate_divisor < 1)
        throw ValidationError("candidate_divisor must be >= 1");
}

namespace {

struct PointGeometry {
    std::vector<double> radius;
    std::vector<bool> on_center;
    std::vector<double> angle;
};

PointGeometry geometry_of(const OrganoidModel& m) {
    const std::size_t n = m.points.size();
    PointGeometry g;
    g.radius.resize(n);
    g.on_center.resize(n);
    g.angle.assign(n * n, 0.0);
    std::vector<Vec2> rel(n);
    for (std::size_t i = 0; i < n; ++i) {
        rel[i] = m.points[i].position - m.barycenter;
        g.radius[i] = relative_radius(m.points[i], m);
        g.on_center[i] = rel[i].norm() == 0.0;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (!g.on_center[i] && !g.on_center[j])
                g.angle[i * n + j] = g.angle[j * n + i] = vector_angle(rel[i], rel[j]);
    return g;
}

} // namespace

PqapInstance::PqapInstance(const OrganoidModel& source, const OrganoidModel& target,
                           const PqapParams& params)
    : source_(&source), target_(&target), params_(params) {
    organoid::validate(source);
    organoid::validate(target);
    params_.validate();

    const std::size_t ns = source.points.size(), nt = target.points.size();
    n1_ = std::min(ns, nt);
    n2_ = n1_ * (n1_ - 1) / 2;
    unary_weight_ = (1.0 - params_.pairwise_weight) / static_cast<double>(n1_);
    pairwise_weight_ = n2_ == 0 ? 0.0 : params_.pairwise_weight / static_cast<double>(n2_);

    auto gs = geometry_of(source);
    auto gt = geometry_of(target);
    source_radius_ = std::move(gs.radius);
    source_on_center_ = std::move(gs.on_center);
    source_angle_ = std::move(gs.angle);
    target_radius_ = std::move(gt.radius);
    target_on_center_ = std::move(gt.on_center);
    target_angle_ = std::move(gt.angle);

    const double theta = params_.unary_mix;
    unary_.resize(ns * nt);
    for (std::size_t v = 0; v < ns; ++v)
        for (std::size_t w = 0; w < nt; ++w) {
            const double d = color_distance(source.points[v], target.points[w]);
            const double dr = std::abs(source_radius_[v] - target_radius_[w]);
            unary_[v * nt + w] = theta * (d - params_.color_threshold) +
                                 (1.0 - theta) * (dr - params_.radius_threshold);
        }
}

double PqapInstance::radius_difference(std::size_t v, std::size_t w) const {
    return std::abs(source_radius_[v] - target_radius_[w]);
}

double PqapInstance::angle_difference(std::size_t v, std::size_t v2, std::size_t w,
                                      std::size_t w2) const {
    return std::abs(source_angle_[v * source_size() + v2] - target_angle_[w * target_size() + w2]);
}

double PqapInstance::pairwise_cost(std::size_t v, std::size_t v2, std::size_t w,
                                   std::size_t w2) const {
    if (source_on_center_[v] || source_on_center_[v2] || target_on_center_[w] ||
        target_on_center_[w2])
        return 0.0;
    return angle_difference(v, v2, w, w2) - params_.angle_threshold;
}

double PqapInstance::objective(const Assignment& x) const {
    if (x.source_size != source_size() || x.target_size != target_size() || !x.is_feasible())
        throw ValidationError("infeasible assignment");
    double unary = 0.0;
    double pairwise = 0.0;
    for (std::size_t a = 0; a < x.pairs.size(); ++a) {
        const auto [v, w] = x.pairs[a];
        unary += unary_cost(v, w);
        for (std::size_t b = a + 1; b < x.pairs.size(); ++b)
            pairwise += pairwise_cost(v, x.pairs[b].first, w, x.pairs[b].second);
    }
    return unary_weight_ * unary + pairwise_weight_ * pairwise;
}

namespace {

struct Candidate {
    std::size_t source;
    std::size_t target;
    double gain;
};

/// Per source point, the targets closest to its image under the transform,
/// ordered by (source, target).
std::vector<Candidate> candidates_at(const PqapInstance& inst, double angle,
                                     const SolverConfig& config) {
    const auto& src = inst.source();
    const auto& tgt = inst.target();
    const SimilarityTransform f{tgt.barycenter, tgt.extent / src.extent, angle, src.barycenter};
    const std::size_t nt = inst.target_size();
    const std::size_t per_source = std::min(
        nt, std::max<std::size_t>(1, nt / static_cast<std::size_t>(config.candidate_divisor)));

    std::vector<Candidate> out;
    out.reserve(inst.source_size() * per_source);
    std::vector<std::size_t> order(nt);
    std::vector<double> dist(nt);
    for (std::size_t v = 0; v < inst.source_size(); ++v) {
        const Vec2 mapped = apply_transform(f, src.points[v].position);
        for (std::size_t w = 0; w < nt; ++w)
            dist[w] = (mapped - tgt.points[w].position).norm();
        std::iota(order.begin(), order.end(), 0);
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(per_source),
                          order.end(), [&](std::size_t a, std::size_t b) {
                              return dist[a] < dist[b] || (dist[a] == dist[b] && a < b);
                          });
        std::sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(per_source));
        for (std::size_t i = 0; i < per_source; ++i)
            out.push_back({v, order[i], inst.unary_weight() * inst.unary_cost(v, order[i])});
    }
    return out;
}

Solution greedy(const PqapInstance& inst, std::vector<Candidate> candidates,
                std::vector<double>* trace) {
    Solution sol;
    sol.assignment.source_size = inst.source_size();
    sol.assignment.target_size = inst.target_size();
    std::vector<bool> src_used(inst.source_size(), false), tgt_used(inst.target_size(), false);

    double running = 0.0;
    if (trace)
        trace->assign(1, 0.0);
    for (;;) {
        const Candidate* best = nullptr;
        for (const auto& c : candidates) {
            if (src_used[c.source] || tgt_used[c.target])
                continue;
            if (!best || c.gain < best->gain)
                best = &c;
        }
        if (!best || !(best->gain < 0.0))
            break;

        const Candidate chosen = *best;
        src_used[chosen.source] = tgt_used[chosen.target] = true;
        sol.assignment.pairs.emplace_back(chosen.source, chosen.target);
        running += chosen.gain;
        if (trace)
            trace->push_back(running);

        if (inst.pairwise_weight() != 0.0)
            for (auto& c : candidates)
                if (!src_used[c.source] && !tgt_used[c.target])
                    c.gain += inst.pairwise_weight() *
                              inst.pairwise_cost(c.source, chosen.source, c.target, chosen.target);
    }
    sol.objective = inst.objective(sol.assignment);
    return sol;
}

bool same_candidates(const std::vector<Candidate>& a, const std::vector<Candidate>& b) {
    return std::equal(a.begin(), a.end(), b.begin(), b.end(), [](const auto& x, const auto& y) {
        return x.source == y.source && x.target == y.target;
    });
}

} // namespace

Solution solve_at_angle(const PqapInstance& instance, double angle, const SolverConfig& config,
                        std::vector<double>* trace) {
    config.validate();
    return greedy(instance, candidates_at(instance, angle, config), trace);
}

Solution solve_local(const PqapInstance& instance, const SolverConfig& config) {
    config.validate();
    Solution best;
    best.assignment.source_size = instance.source_size();
    best.assignment.target_size = instance.target_size();

    // Consecutive angles often select the same candidate sets; the greedy pass
    // is a function of the candidate set alone, so it is skipped for repeats.
    std::vector<Candidate> previous;
    for (int n = 0; n < config.rotation_steps; ++n) {
        const double angle = 2.0 * std::numbers::pi * n / config.rotation_steps;
        auto candidates = candidates_at(instance, angle, config);
        if (n > 0 && same_candidates(candidates, previous))
            continue;
        previous = candidates;
        auto sol = greedy(instance, std::move(candidates), nullptr);
        if (sol.objective < best.objective)
            best = std::move(sol);
    }
    return best;
}

double normalize(double cost_forward, double cost_backward, const PqapParams& params) {
    const double denominator = params.normalizer();
    if (!(denominator > 0.0))
        throw ValidationError("degenerate normalization");
    const double m = std::min(cost_forward, cost_backward);
    if (m > 0.0)
        throw ValidationError("assignment objective must not be positive");
    return m == 0.0 ? 0.0 : -m / denominator;
}

double similarity(const OrganoidModel& a, const OrganoidModel& b, const PqapParams& params,
                  const SolverConfig& config) {
    const PqapInstance forward(a, b, params);
    const PqapInstance backward(b, a, params);
    return normalize(solve_local(forward, config).objective,
                     solve_local(backward, config).objective, params);
}

std::vector<double> similarities(const std::vector<OrganoidModel>& models, const PqapParams& params,
                                 const SolverConfig& config, unsigned threads) {
    if (models.size() < 2)
        throw ValidationError("need at least two models");
    validate_unique_ids(models);
    params.validate();
    config.validate();
    if (!(params.normalizer() > 0.0))
        throw ValidationError("degenerate normalization");

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < models.size(); ++i)
        for (std::size_t j = i + 1; j < models.size(); ++j)
            pairs.emplace_back(i, j);

    std::vector<double> phi(pairs.size());
    parallel_for(pairs.size(), threads, [&](std::size_t p) {
        const auto [i, j] = pairs[p];
        try {
            phi[p] = similarity(models[i], models[j], params, config);
        } catch (const ValidationError& e) {
            throw ValidationError("pair (" + models[i].image_id + ", " + models[j].image_id +
                                  "): " + e.what());
        }
    });
    return phi;
}

CostMatrix costs_from_similarities(const std::vector<OrganoidModel>& models,
                                   const std::vector<double>& phi, double cut_threshold) {
    std::vector<std::string> ids;
    ids.reserve(models.size());
    for (const auto& m : models)
        ids.push_back(m.image_id);
    CostMatrix q(std::move(ids));
    std::size_t p = 0;
    for (std::size_t i = 0; i < models.size(); ++i)
        for (std::size_t j = i + 1; j < models.size(); ++j)
            q.set(i, j, phi.at(p++) - cut_threshold);
    return q;
}

CostMatrix pqap_cost_matrix(const std::vector<OrganoidModel>& models, const PqapParams& params,
                            const SolverConfig& config, unsigned threads) {
    return costs_from_similarities(models, similarities(models, params, config, threads),
                                   params.cut_threshold);
}

} // namespace organoid::pqap
