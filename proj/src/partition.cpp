#include "organoid/partition.hpp"

#include "organoid/error.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace organoid {

Partition::Partition(std::vector<std::vector<std::string>> clusters) : clusters_(std::move(clusters)) {
    std::unordered_set<std::string> seen;
    for (auto& c : clusters_) {
        if (c.empty())
            throw ValidationError("partition has an empty cluster");
        for (const auto& id : c)
            if (!seen.insert(id).second)
                throw ValidationError("id '" + id + "' occurs in more than one place of the partition");
        std::sort(c.begin(), c.end());
    }
    std::sort(clusters_.begin(), clusters_.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

Partition Partition::from_labels(const std::vector<std::string>& ids,
                                 const std::vector<std::size_t>& labels) {
    if (ids.size() != labels.size())
        throw ValidationError("label count does not match id count");
    std::unordered_map<std::size_t, std::size_t> slot;
    std::vector<std::vector<std::string>> clusters;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        auto [it, inserted] = slot.try_emplace(labels[i], clusters.size());
        if (inserted)
            clusters.emplace_back();
        clusters[it->second].push_back(ids[i]);
    }
    return Partition(std::move(clusters));
}

std::size_t Partition::element_count() const {
    std::size_t n = 0;
    for (const auto& c : clusters_)
        n += c.size();
    return n;
}

std::vector<std::string> Partition::ground_set() const {
    std::vector<std::string> out;
    out.reserve(element_count());
    for (const auto& c : clusters_)
        out.insert(out.end(), c.begin(), c.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::size_t> Partition::labels_for(const std::vector<std::string>& ids) const {
    std::unordered_map<std::string, std::size_t> label;
    for (std::size_t c = 0; c < clusters_.size(); ++c)
        for (const auto& id : clusters_[c])
            label.emplace(id, c);
    if (ids.size() != label.size())
        throw ValidationError("ground set mismatch");
    std::vector<std::size_t> out;
    out.reserve(ids.size());
    std::unordered_set<std::string> seen;
    for (const auto& id : ids) {
        const auto it = label.find(id);
        if (it == label.end() || !seen.insert(id).second)
            throw ValidationError("ground set mismatch at id '" + id + "'");
        out.push_back(it->second);
    }
    return out;
}

bool CutVector::satisfies_transitivity() const {
    const std::size_t n = ids.size();
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
            if (k == j)
                continue;
            for (std::size_t l = 0; l < n; ++l) {
                if (l == j || l == k)
                    continue;
                if (is_cut(j, l) && !is_cut(j, k) && !is_cut(k, l))
                    return false;
            }
        }
    return true;
}

CutVector partition_to_cuts(const Partition& p) {
    return partition_to_cuts(p, p.ground_set());
}

CutVector partition_to_cuts(const Partition& p, const std::vector<std::string>& ids) {
    const auto labels = p.labels_for(ids);
    const std::size_t n = ids.size();
    CutVector y{ids, std::vector<std::uint8_t>(n * (n - (n > 0)) / 2, 0)};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            y.cut[pair_index(n, i, j)] = labels[i] != labels[j];
    return y;
}

Partition cuts_to_partition(const CutVector& y) {
    const std::size_t n = y.ids.size();
    if (y.cut.size() != n * (n - (n > 0)) / 2)
        throw ValidationError("cut vector has the wrong number of pairs");
    if (!y.satisfies_transitivity())
        throw ValidationError("not a partition encoding");

    std::vector<std::size_t> label(n);
    std::iota(label.begin(), label.end(), 0);
    // With transitivity, every y = 0 pair joins i to the smallest member of its cluster.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (!y.is_cut(j, i)) {
                label[i] = label[j];
                break;
            }
    return Partition::from_labels(y.ids, label);
}

PairLabeling partition_to_labeling(const Partition& p, const std::vector<std::string>& ids) {
    auto y = partition_to_cuts(p, ids);
    for (auto& c : y.cut)
        c = !c;
    return {std::move(y.ids), std::move(y.cut)};
}

} // namespace organoid
