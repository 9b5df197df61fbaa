#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace organoid {

/// Position of the unordered pair {i, j}, i < j, in row-major order over n elements.
inline std::size_t pair_index(std::size_t n, std::size_t i, std::size_t j) {
    return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

/// Clustering of a set of ids into disjoint non-empty clusters. Stored in
/// canonical form: members sorted, clusters ordered by their smallest member.
class Partition {
public:
    Partition() = default;

    /// Throws ValidationError on empty clusters or ids occurring twice.
    explicit Partition(std::vector<std::vector<std::string>> clusters);

    /// ids[i] goes to the cluster labelled labels[i].
    static Partition from_labels(const std::vector<std::string>& ids,
                                 const std::vector<std::size_t>& labels);

    const std::vector<std::vector<std::string>>& clusters() const { return clusters_; }
    std::size_t cluster_count() const { return clusters_.size(); }
    std::size_t element_count() const;

    /// All ids, sorted.
    std::vector<std::string> ground_set() const;

    /// Cluster index of each id in `ids`. Throws ValidationError unless `ids`
    /// is exactly the ground set (in any order).
    std::vector<std::size_t> labels_for(const std::vector<std::string>& ids) const;

    friend bool operator==(const Partition&, const Partition&) = default;

private:
    std::vector<std::vector<std::string>> clusters_;
};

/// Cut indicators y_{j,k} over unordered pairs of `ids` (1 = distinct clusters).
/// Stored by pair_index; not necessarily a partition encoding until checked.
struct CutVector {
    std::vector<std::string> ids;
    std::vector<std::uint8_t> cut;

    bool is_cut(std::size_t i, std::size_t j) const {
        return i < j ? cut[pair_index(ids.size(), i, j)] != 0 : cut[pair_index(ids.size(), j, i)] != 0;
    }

    /// y_{j,l} <= y_{j,k} + y_{k,l} for all distinct j, k, l.
    bool satisfies_transitivity() const;
};

/// Independent join/cut decisions over unordered pairs of `ids`, indexed by
/// pair_index. Need not be transitive.
struct PairLabeling {
    std::vector<std::string> ids;
    std::vector<std::uint8_t> join;
};

/// Cut vector over the sorted ground set of the partition.
CutVector partition_to_cuts(const Partition& p);

/// Cut vector over a given ordering of the ground set.
CutVector partition_to_cuts(const Partition& p, const std::vector<std::string>& ids);

/// Connected components of the y = 0 graph. Throws
/// ValidationError("not a partition encoding") if y violates transitivity.
Partition cuts_to_partition(const CutVector& y);

/// Join decision for every pair, as implied by the partition.
PairLabeling partition_to_labeling(const Partition& p, const std::vector<std::string>& ids);

} // namespace organoid
