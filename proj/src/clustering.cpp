#include "organoid/clustering.hpp"

#include "organoid/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <tuple>

namespace organoid::cc {

double cc_objective(const CostMatrix& q, const std::vector<std::size_t>& labels) {
    const std::size_t n = q.size();
    if (labels.size() != n)
        throw ValidationError("ground set mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (labels[i] != labels[j])
                sum += q.at(i, j);
    return sum;
}

double cc_objective(const CostMatrix& q, const Partition& p) {
    return cc_objective(q, p.labels_for(q.ids()));
}

namespace {

/// Relabels to 0, 1, 2, ... in order of first occurrence.
void compact(std::vector<std::size_t>& labels) {
    std::vector<std::size_t> map(labels.size() + 1, std::numeric_limits<std::size_t>::max());
    std::size_t next = 0;
    for (auto& l : labels) {
        if (l >= map.size())
            map.resize(l + 1, std::numeric_limits<std::size_t>::max());
        if (map[l] == std::numeric_limits<std::size_t>::max())
            map[l] = next++;
        l = map[l];
    }
}

ClusteringResult make_result(const CostMatrix& q, std::vector<std::size_t> labels) {
    compact(labels);
    return {Partition::from_labels(q.ids(), labels), cc_objective(q, labels)};
}

CostMatrix submatrix(const CostMatrix& q, const std::vector<std::size_t>& members) {
    std::vector<std::string> ids;
    ids.reserve(members.size());
    for (auto m : members)
        ids.push_back(q.ids()[m]);
    CostMatrix sub(std::move(ids));
    for (std::size_t a = 0; a < members.size(); ++a)
        for (std::size_t b = a + 1; b < members.size(); ++b)
            sub.set(a, b, q.at(members[a], members[b]));
    return sub;
}

/// Connected components of the graph whose edges are the pairs with q >= 0.
std::vector<std::vector<std::size_t>> nonnegative_components(const CostMatrix& q) {
    const std::size_t n = q.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    const std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (q.at(i, j) >= 0.0) {
                const auto a = find(i), b = find(j);
                if (a != b)
                    parent[std::max(a, b)] = std::min(a, b);
            }
    std::vector<std::vector<std::size_t>> comps;
    std::vector<std::size_t> slot(n, std::numeric_limits<std::size_t>::max());
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = find(i);
        if (slot[r] == std::numeric_limits<std::size_t>::max()) {
            slot[r] = comps.size();
            comps.emplace_back();
        }
        comps[slot[r]].push_back(i);
    }
    return comps;
}

class BranchAndBound {
public:
    explicit BranchAndBound(const CostMatrix& q) : m_(q.size()) {
        // Branching order: start from the element with the most total weight,
        // then always take the element most strongly tied to those already placed.
        order_.reserve(m_);
        std::vector<bool> placed(m_, false);
        std::vector<double> tie(m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i)
            for (std::size_t j = 0; j < m_; ++j)
                if (i != j)
                    tie[i] += std::abs(q.at(i, j));
        for (std::size_t step = 0; step < m_; ++step) {
            std::size_t pick = m_;
            for (std::size_t i = 0; i < m_; ++i)
                if (!placed[i] && (pick == m_ || tie[i] > tie[pick]))
                    pick = i;
            placed[pick] = true;
            order_.push_back(pick);
            if (step == 0)
                std::fill(tie.begin(), tie.end(), 0.0);
            for (std::size_t i = 0; i < m_; ++i)
                if (!placed[i])
                    tie[i] += std::abs(q.at(i, pick));
        }

        w_.assign(m_ * m_, 0.0);
        double scale = 0.0;
        for (std::size_t a = 0; a < m_; ++a)
            for (std::size_t b = 0; b < m_; ++b)
                if (a != b) {
                    w_[a * m_ + b] = q.at(order_[a], order_[b]);
                    scale += std::abs(w_[a * m_ + b]);
                }
        tolerance_ = 1e-12 * (1.0 + scale);

        negative_suffix_.assign(m_ + 1, 0.0);
        for (std::size_t d = m_; d-- > 0;) {
            double row = 0.0;
            for (std::size_t b = d + 1; b < m_; ++b)
                row += std::min(0.0, w_[d * m_ + b]);
            negative_suffix_[d] = negative_suffix_[d + 1] + row;
        }
    }

    /// Returns labels indexed like the input matrix.
    std::vector<std::size_t> solve(const std::vector<std::size_t>& incumbent) {
        best_.resize(m_);
        for (std::size_t a = 0; a < m_; ++a)
            best_[a] = incumbent[order_[a]];
        best_cost_ = cost_of(best_);

        assign_.assign(m_, 0);
        conn_.assign(m_ * m_, 0.0);
        total_.assign(m_, 0.0);
        search(0, 0, 0.0);

        std::vector<std::size_t> labels(m_);
        for (std::size_t a = 0; a < m_; ++a)
            labels[order_[a]] = best_[a];
        return labels;
    }

private:
    double cost_of(const std::vector<std::size_t>& labels) const {
        double c = 0.0;
        for (std::size_t a = 0; a < m_; ++a)
            for (std::size_t b = a + 1; b < m_; ++b)
                if (labels[a] != labels[b])
                    c += w_[a * m_ + b];
        return c;
    }

    double bound(std::size_t depth, std::size_t clusters, double cost) const {
        double b = cost + negative_suffix_[depth];
        for (std::size_t u = depth; u < m_; ++u) {
            double strongest = 0.0;
            for (std::size_t c = 0; c < clusters; ++c)
                strongest = std::max(strongest, conn_[u * m_ + c]);
            b += total_[u] - strongest;
        }
        return b;
    }

    void place(std::size_t depth, std::size_t cluster, double sign) {
        for (std::size_t u = depth + 1; u < m_; ++u) {
            const double wt = sign * w_[u * m_ + depth];
            conn_[u * m_ + cluster] += wt;
            total_[u] += wt;
        }
    }

    void search(std::size_t depth, std::size_t clusters, double cost) {
        if (depth == m_) {
            if (cost < best_cost_ - tolerance_) {
                best_cost_ = cost;
                best_ = assign_;
            }
            return;
        }
        if (bound(depth, clusters, cost) >= best_cost_ - tolerance_)
            return;

        // Options sorted by immediate cost; existing clusters before a new one on ties.
        std::vector<std::pair<double, std::size_t>> options;
        options.reserve(clusters + 1);
        for (std::size_t c = 0; c < clusters; ++c)
            options.emplace_back(total_[depth] - conn_[depth * m_ + c], c);
        options.emplace_back(total_[depth], clusters);
        std::stable_sort(options.begin(), options.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });

        for (const auto& [extra, c] : options) {
            assign_[depth] = c;
            place(depth, c, 1.0);
            search(depth + 1, std::max(clusters, c + 1), cost + extra);
            place(depth, c, -1.0);
        }
    }

    std::size_t m_;
    std::vector<std::size_t> order_;
    std::vector<double> w_;
    std::vector<double> negative_suffix_;
    double tolerance_ = 0.0;

    std::vector<std::size_t> assign_;
    std::vector<double> conn_;
    std::vector<double> total_;
    std::vector<std::size_t> best_;
    double best_cost_ = 0.0;
};

/// Merges clusters whose mutual cost sum is zero; the objective is unchanged.
void merge_zero_ties(const CostMatrix& q, std::vector<std::size_t>& labels) {
    bool merged = true;
    while (merged) {
        merged = false;
        compact(labels);
        const std::size_t k = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
        std::vector<double> between(k * k, 0.0);
        for (std::size_t i = 0; i < q.size(); ++i)
            for (std::size_t j = i + 1; j < q.size(); ++j)
                if (labels[i] != labels[j]) {
                    between[labels[i] * k + labels[j]] += q.at(i, j);
                    between[labels[j] * k + labels[i]] += q.at(i, j);
                }
        for (std::size_t a = 0; a < k && !merged; ++a)
            for (std::size_t b = a + 1; b < k && !merged; ++b)
                if (between[a * k + b] == 0.0) {
                    for (auto& l : labels)
                        if (l == b)
                            l = a;
                    merged = true;
                }
    }
}

} // namespace

ClusteringResult solve_exact(const CostMatrix& q, const ExactConfig& config) {
    if (q.size() > config.max_size)
        throw SolverSizeError("instance with " + std::to_string(q.size()) +
                              " ids exceeds the exact solver limit of " +
                              std::to_string(config.max_size) + "; use solve_heuristic");

    std::vector<std::size_t> labels(q.size(), 0);
    std::size_t next_label = 0;
    for (const auto& members : nonnegative_components(q)) {
        std::vector<std::size_t> local(members.size(), 0);
        if (members.size() > 1) {
            const CostMatrix sub = submatrix(q, members);
            const auto start = solve_heuristic(sub).partition.labels_for(sub.ids());
            local = BranchAndBound(sub).solve(start);
            merge_zero_ties(sub, local);
        }
        compact(local);
        std::size_t used = 0;
        for (std::size_t a = 0; a < members.size(); ++a) {
            labels[members[a]] = next_label + local[a];
            used = std::max(used, local[a] + 1);
        }
        next_label += used;
    }
    return make_result(q, std::move(labels));
}

std::vector<std::size_t> greedy_additive_edge_contraction(const CostMatrix& q) {
    const std::size_t n = q.size();
    std::vector<double> between(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j)
                between[i * n + j] = q.at(i, j);

    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::vector<bool> active(n, true);
    std::vector<std::size_t> version(n, 0);

    // (weight, -a, -b) max-heap: largest weight first, then smallest indices.
    using Entry = std::tuple<double, long, long, std::size_t, std::size_t>;
    std::priority_queue<Entry> heap;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (between[i * n + j] > 0.0)
                heap.emplace(between[i * n + j], -static_cast<long>(i), -static_cast<long>(j), 0, 0);

    while (!heap.empty()) {
        const auto [weight, na, nb, va, vb] = heap.top();
        heap.pop();
        const auto a = static_cast<std::size_t>(-na), b = static_cast<std::size_t>(-nb);
        if (!active[a] || !active[b] || version[a] != va || version[b] != vb)
            continue;
        if (!(weight > 0.0))
            break;

        active[b] = false;
        parent[b] = a;
        ++version[a];
        for (std::size_t c = 0; c < n; ++c) {
            if (!active[c] || c == a)
                continue;
            between[a * n + c] += between[b * n + c];
            between[c * n + a] = between[a * n + c];
            if (between[a * n + c] > 0.0) {
                const auto lo = std::min(a, c), hi = std::max(a, c);
                heap.emplace(between[a * n + c], -static_cast<long>(lo), -static_cast<long>(hi),
                             version[lo], version[hi]);
            }
        }
    }

    std::vector<std::size_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = i;
        while (parent[r] != r)
            r = parent[r];
        labels[i] = r;
    }
    compact(labels);
    return labels;
}

namespace {

/// Best improvement between cluster members `a` and `b` (b may be empty,
/// meaning a fresh cluster). Returns the cost decrease and, when positive,
/// the elements to move from their side to the other.
struct TwoCutMove {
    double gain = 0.0;
    bool merge = false;
    std::vector<std::size_t> moved;
};

TwoCutMove two_cut(const CostMatrix& q, const std::vector<std::size_t>& a,
                   const std::vector<std::size_t>& b) {
    std::vector<std::size_t> elems(a);
    elems.insert(elems.end(), b.begin(), b.end());
    const std::size_t s = elems.size();
    std::vector<int> side(s, 0);
    for (std::size_t i = a.size(); i < s; ++i)
        side[i] = 1;

    // gain[i]: decrease of the objective if element i switches side.
    std::vector<double> gain(s, 0.0);
    double merge_gain = 0.0;
    for (std::size_t i = 0; i < s; ++i)
        for (std::size_t j = 0; j < s; ++j) {
            if (i == j)
                continue;
            const double w = q.at(elems[i], elems[j]);
            gain[i] += side[i] == side[j] ? -w : w;
            if (i < a.size() && j >= a.size())
                merge_gain += w;
        }

    std::vector<bool> locked(s, false);
    std::vector<std::size_t> sequence;
    double cumulative = 0.0, best = 0.0;
    std::size_t best_len = 0;
    for (std::size_t step = 0; step < s; ++step) {
        std::size_t pick = s;
        for (std::size_t i = 0; i < s; ++i)
            if (!locked[i] && (pick == s || gain[i] > gain[pick]))
                pick = i;
        locked[pick] = true;
        cumulative += gain[pick];
        sequence.push_back(pick);
        for (std::size_t j = 0; j < s; ++j) {
            if (locked[j])
                continue;
            const double w = q.at(elems[pick], elems[j]);
            // pick leaves j's side: the pair becomes a cut; pick joins j's side: the pair joins.
            gain[j] += side[pick] == side[j] ? 2.0 * w : -2.0 * w;
        }
        side[pick] = 1 - side[pick];
        if (cumulative > best) {
            best = cumulative;
            best_len = sequence.size();
        }
    }

    TwoCutMove move;
    if (!b.empty() && merge_gain > best) {
        move.gain = merge_gain;
        move.merge = true;
        return move;
    }
    move.gain = best;
    for (std::size_t i = 0; i < best_len; ++i)
        move.moved.push_back(elems[sequence[i]]);
    return move;
}

} // namespace

void kernighan_lin(const CostMatrix& q, std::vector<std::size_t>& labels) {
    const std::size_t n = q.size();
    if (labels.size() != n)
        throw ValidationError("ground set mismatch");
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            scale += std::abs(q.at(i, j));
    const double tolerance = 1e-12 * (1.0 + scale);

    constexpr int max_sweeps = 1000;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool improved = false;
        compact(labels);
        std::size_t k = n == 0 ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;

        const auto members = [&](std::size_t c) {
            std::vector<std::size_t> out;
            for (std::size_t i = 0; i < n; ++i)
                if (labels[i] == c)
                    out.push_back(i);
            return out;
        };

        for (std::size_t ca = 0; ca < k; ++ca) {
            for (std::size_t cb = ca + 1; cb <= k; ++cb) {
                const auto a = members(ca);
                if (a.empty())
                    break;
                const auto b = cb < k ? members(cb) : std::vector<std::size_t>{};
                if (cb < k && b.empty())
                    continue;
                const auto move = two_cut(q, a, b);
                if (!(move.gain > tolerance))
                    continue;
                improved = true;
                if (move.merge) {
                    for (auto i : b)
                        labels[i] = ca;
                } else {
                    const std::size_t target_b = cb < k ? cb : k;
                    for (auto i : move.moved)
                        labels[i] = labels[i] == ca ? target_b : ca;
                    if (cb == k)
                        ++k;
                }
            }
        }
        if (!improved)
            break;
    }
    compact(labels);
}

ClusteringResult solve_heuristic(const CostMatrix& q) {
    auto labels = greedy_additive_edge_contraction(q);
    kernighan_lin(q, labels);
    return make_result(q, std::move(labels));
}

} // namespace organoid::cc
