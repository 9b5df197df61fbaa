#include "organoid/metrics.hpp"

#include "organoid/error.hpp"

#include <cmath>
#include <map>
#include <utility>

namespace organoid::metrics {

PairConfusion pair_confusion(const Partition& truth, const PairLabeling& pred) {
    const std::size_t n = pred.ids.size();
    if (pred.join.size() != n * (n - (n > 0)) / 2)
        throw ValidationError("pair labelling has the wrong number of pairs");
    const auto labels = truth.labels_for(pred.ids);
    PairConfusion c;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool true_join = labels[i] == labels[j];
            const bool pred_join = pred.join[pair_index(n, i, j)] != 0;
            if (true_join)
                ++(pred_join ? c.true_joins : c.false_cuts);
            else
                ++(pred_join ? c.false_joins : c.true_cuts);
        }
    return c;
}

PairConfusion pair_confusion(const Partition& truth, const Partition& pred) {
    const auto ids = truth.ground_set();
    return pair_confusion(truth, partition_to_labeling(pred, ids));
}

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
    if (den == 0)
        return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
}

std::optional<double> harmonic(std::optional<double> p, std::optional<double> r) {
    if (!p || !r)
        return std::nullopt;
    if (*p + *r == 0.0)
        return 0.0;
    return 2.0 * *p * *r / (*p + *r);
}

} // namespace

PairScores scores(const PairConfusion& c) {
    PairScores s;
    const std::size_t total = c.total();
    s.accuracy = total == 0 ? 1.0 : static_cast<double>(c.true_joins + c.true_cuts) / total;
    s.rand_index = s.accuracy;
    s.precision_joins = ratio(c.true_joins, c.true_joins + c.false_joins);
    s.recall_joins = ratio(c.true_joins, c.true_joins + c.false_cuts);
    s.precision_cuts = ratio(c.true_cuts, c.true_cuts + c.false_cuts);
    s.recall_cuts = ratio(c.true_cuts, c.true_cuts + c.false_joins);
    s.f1_joins = harmonic(s.precision_joins, s.recall_joins);
    s.f1_cuts = harmonic(s.precision_cuts, s.recall_cuts);
    return s;
}

VariationOfInformation variation_of_information(const Partition& truth, const Partition& pred) {
    const auto ids = truth.ground_set();
    const auto t = truth.labels_for(ids);
    const auto p = pred.labels_for(ids);
    const auto n = static_cast<double>(ids.size());

    std::map<std::pair<std::size_t, std::size_t>, std::size_t> joint;
    std::map<std::size_t, std::size_t> truth_size, pred_size;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        ++joint[{t[i], p[i]}];
        ++truth_size[t[i]];
        ++pred_size[p[i]];
    }

    // H(P|T) = -sum p(t,p) log2(p(t,p) / p(t)), and symmetrically.
    VariationOfInformation vi;
    for (const auto& [key, count] : joint) {
        const double pj = count / n;
        vi.vi_cuts -= pj * std::log2(static_cast<double>(count) / truth_size[key.first]);
        vi.vi_joins -= pj * std::log2(static_cast<double>(count) / pred_size[key.second]);
    }
    // log2(1) terms contribute -0.0; normalize the sign.
    vi.vi_cuts += 0.0;
    vi.vi_joins += 0.0;
    vi.vi = vi.vi_cuts + vi.vi_joins;
    return vi;
}

double entropy(const Partition& p) {
    const auto n = static_cast<double>(p.element_count());
    double h = 0.0;
    for (const auto& c : p.clusters()) {
        const double f = c.size() / n;
        h -= f * std::log2(f);
    }
    return h + 0.0;
}

} // namespace organoid::metrics
