#pragma once

// Independent reference implementations used only by the tests. None of them
// call into the code paths they check.

#include "organoid/cost_matrix.hpp"
#include "organoid/model.hpp"
#include "organoid/partition.hpp"
#include "organoid/pqap.hpp"

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using organoid::CostMatrix;
using organoid::KeyPoint;
using organoid::OrganoidModel;
using organoid::Vec2;

/// Calls visit(labels) for every partition of n elements as a restricted
/// growth string.
inline void for_each_partition(std::size_t n, const std::function<void(const std::vector<std::size_t>&)>& visit) {
    std::vector<std::size_t> labels(n, 0);
    const std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t used) {
        if (i == n) {
            visit(labels);
            return;
        }
        for (std::size_t c = 0; c <= used && c < n; ++c) {
            labels[i] = c;
            rec(i + 1, std::max(used, c + 1));
        }
    };
    if (n == 0) {
        visit(labels);
        return;
    }
    labels[0] = 0;
    rec(1, 1);
}

/// Sum of cut costs, summed in the same row-major order the library uses so
/// that identical partitions give identical bits.
inline double cut_cost(const CostMatrix& q, const std::vector<std::size_t>& labels) {
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i)
        for (std::size_t j = i + 1; j < q.size(); ++j)
            if (labels[i] != labels[j])
                s += q.at(i, j);
    return s;
}

inline double brute_force_min_cut(const CostMatrix& q) {
    double best = std::numeric_limits<double>::infinity();
    for_each_partition(q.size(), [&](const auto& l) { best = std::min(best, cut_cost(q, l)); });
    return best;
}

inline CostMatrix random_costs(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i)
        ids.push_back("n" + std::to_string(100 + i));
    CostMatrix q(ids);
    std::uniform_real_distribution<double> u(lo, hi);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            q.set(i, j, u(rng));
    return q;
}

inline organoid::Partition random_partition(std::mt19937_64& rng, std::size_t n, std::size_t max_clusters) {
    std::uniform_int_distribution<std::size_t> pick(0, max_clusters - 1);
    std::vector<std::string> ids;
    std::vector<std::size_t> labels;
    for (std::size_t i = 0; i < n; ++i) {
        ids.push_back("e" + std::to_string(100 + i));
        labels.push_back(pick(rng));
    }
    return organoid::Partition::from_labels(ids, labels);
}

/// Joint-count computation of VI, VI_C = H(pred|truth), VI_J = H(truth|pred), in bits,
/// through H(X|Y) = H(X,Y) - H(Y).
struct ViOracle {
    double vi, vi_cuts, vi_joins;
};

inline ViOracle vi_oracle(const std::vector<std::size_t>& truth, const std::vector<std::size_t>& pred) {
    const double n = static_cast<double>(truth.size());
    std::map<std::pair<std::size_t, std::size_t>, double> joint;
    std::map<std::size_t, double> t, p;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        joint[{truth[i], pred[i]}] += 1.0 / n;
        t[truth[i]] += 1.0 / n;
        p[pred[i]] += 1.0 / n;
    }
    const auto h = [](const auto& dist) {
        double s = 0.0;
        for (const auto& [k, v] : dist)
            s -= v * std::log2(v);
        return s;
    };
    const double hj = h(joint), ht = h(t), hp = h(p);
    return {2 * hj - ht - hp, hj - ht, hj - hp};
}

/// Rand index by enumerating all pairs.
inline double rand_index_oracle(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    std::size_t agree = 0, total = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            ++total;
            agree += (a[i] == a[j]) == (b[i] == b[j]);
        }
    return total == 0 ? 1.0 : static_cast<double>(agree) / total;
}

/// Objective of a partial assignment computed straight from the point
/// coordinates with a literal loop over ordered pairs of assigned pairs. The
/// ordered sum visits every unordered pair twice, hence the 2 n2 normalization.
inline double naive_objective(const OrganoidModel& src, const OrganoidModel& tgt,
                              const organoid::pqap::PqapParams& p,
                              const std::vector<std::vector<int>>& x) {
    const std::size_t nj = src.points.size(), nk = tgt.points.size();
    const double n1 = static_cast<double>(std::min(nj, nk));
    const double n2 = n1 * (n1 - 1) / 2;
    auto rel = [](const OrganoidModel& m, std::size_t v) {
        return Vec2{m.points[v].position.x - m.barycenter.x, m.points[v].position.y - m.barycenter.y};
    };
    auto sigma = [&](const OrganoidModel& m, std::size_t v) {
        const Vec2 r = rel(m, v);
        return std::sqrt(r.x * r.x + r.y * r.y) / m.extent;
    };
    auto angle = [&](const OrganoidModel& m, std::size_t v, std::size_t v2) {
        const Vec2 a = rel(m, v), b = rel(m, v2);
        const double c = (a.x * b.x + a.y * b.y) /
                         (std::sqrt(a.x * a.x + a.y * a.y) * std::sqrt(b.x * b.x + b.y * b.y));
        return std::acos(std::max(-1.0, std::min(1.0, c)));
    };
    double unary = 0.0, pairwise = 0.0;
    for (std::size_t v = 0; v < nj; ++v)
        for (std::size_t w = 0; w < nk; ++w) {
            if (!x[v][w])
                continue;
            double dc = 0.0;
            for (int c = 0; c < 3; ++c) {
                const double d = src.points[v].color[c] - tgt.points[w].color[c];
                dc += d * d;
            }
            dc = std::sqrt(dc);
            const double dr = std::abs(sigma(src, v) - sigma(tgt, w));
            unary += p.unary_mix * (dc - p.color_threshold) +
                     (1 - p.unary_mix) * (dr - p.radius_threshold);
            for (std::size_t v2 = 0; v2 < nj; ++v2)
                for (std::size_t w2 = 0; w2 < nk; ++w2)
                    if (v2 != v && w2 != w && x[v2][w2])
                        pairwise += std::abs(angle(src, v, v2) - angle(tgt, w, w2)) - p.angle_threshold;
        }
    double value = (1 - p.pairwise_weight) / n1 * unary;
    if (n2 > 0)
        value += p.pairwise_weight / (2 * n2) * pairwise;
    return value;
}

/// Minimum of naive_objective over every feasible assignment (tiny instances only).
inline double brute_force_pqap(const OrganoidModel& src, const OrganoidModel& tgt,
                               const organoid::pqap::PqapParams& p) {
    const std::size_t nj = src.points.size(), nk = tgt.points.size();
    std::vector<std::vector<int>> x(nj, std::vector<int>(nk, 0));
    std::vector<bool> used(nk, false);
    double best = std::numeric_limits<double>::infinity();
    const std::function<void(std::size_t)> rec = [&](std::size_t v) {
        if (v == nj) {
            best = std::min(best, naive_objective(src, tgt, p, x));
            return;
        }
        rec(v + 1);
        for (std::size_t w = 0; w < nk; ++w) {
            if (used[w])
                continue;
            used[w] = true;
            x[v][w] = 1;
            rec(v + 1);
            x[v][w] = 0;
            used[w] = false;
        }
    };
    rec(0);
    return best;
}

inline OrganoidModel random_model(std::mt19937_64& rng, const std::string& id, std::size_t points) {
    std::uniform_real_distribution<double> pos(-50.0, 50.0), col(0.0, 1.0);
    OrganoidModel m;
    m.image_id = id;
    m.barycenter = {pos(rng) + 200.0, pos(rng) + 200.0};
    double far = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
        KeyPoint k;
        k.position = {m.barycenter.x + pos(rng), m.barycenter.y + pos(rng)};
        k.color = {col(rng), col(rng), col(rng)};
        far = std::max(far, std::hypot(k.position.x - m.barycenter.x, k.position.y - m.barycenter.y));
        m.points.push_back(k);
    }
    m.extent = far * 1.05 + 1.0;
    return m;
}

/// Target = source under a similarity transform whose rotation is on the
/// grid 2 pi n / steps, with identical colors and consistent extent.
inline OrganoidModel consistent_copy(std::mt19937_64& rng, const OrganoidModel& src, int steps,
                                     const std::string& id) {
    std::uniform_int_distribution<int> n(0, steps - 1);
    std::uniform_real_distribution<double> scale(0.5, 2.0), shift(-300.0, 300.0);
    const double gamma = 2.0 * std::numbers::pi * n(rng) / steps;
    const double s = scale(rng);
    const Vec2 target{src.barycenter.x + shift(rng), src.barycenter.y + shift(rng)};
    OrganoidModel out;
    out.image_id = id;
    out.barycenter = target;
    out.extent = s * src.extent;
    const double c = std::cos(gamma), si = std::sin(gamma);
    for (const auto& p : src.points) {
        const double dx = p.position.x - src.barycenter.x, dy = p.position.y - src.barycenter.y;
        KeyPoint k = p;
        k.position = {target.x + s * (c * dx - si * dy), target.y + s * (si * dx + c * dy)};
        out.points.push_back(k);
    }
    std::shuffle(out.points.begin(), out.points.end(), rng);
    return out;
}

} // namespace oracle
