#pragma once

#include "organoid/partition.hpp"

#include <cstddef>
#include <optional>

namespace organoid::metrics {

/// Pair counts of a predicted join/cut labelling against a true partition.
struct PairConfusion {
    std::size_t true_joins = 0;  ///< TJ: joined in truth and prediction
    std::size_t false_cuts = 0;  ///< FC: joined in truth, cut in prediction
    std::size_t true_cuts = 0;   ///< TC: cut in truth and prediction
    std::size_t false_joins = 0; ///< FJ: cut in truth, joined in prediction

    std::size_t total() const { return true_joins + false_cuts + true_cuts + false_joins; }

    friend bool operator==(const PairConfusion&, const PairConfusion&) = default;
};

/// Ratios of a PairConfusion. A ratio with zero denominator is absent.
struct PairScores {
    double accuracy = 0.0;
    double rand_index = 0.0;
    std::optional<double> precision_cuts;
    std::optional<double> recall_cuts;
    std::optional<double> precision_joins;
    std::optional<double> recall_joins;
    std::optional<double> f1_cuts;
    std::optional<double> f1_joins;
};

/// Partition distance in bits. vi == vi_cuts + vi_joins.
struct VariationOfInformation {
    double vi = 0.0;
    double vi_cuts = 0.0;  ///< H(pred | truth): true clusters fragmented by false cuts
    double vi_joins = 0.0; ///< H(truth | pred): true clusters merged by false joins
};

PairConfusion pair_confusion(const Partition& truth, const Partition& pred);

/// Pred is an arbitrary (possibly intransitive) labelling over the same ids.
PairConfusion pair_confusion(const Partition& truth, const PairLabeling& pred);

PairScores scores(const PairConfusion& c);

VariationOfInformation variation_of_information(const Partition& truth, const Partition& pred);

/// Entropy in bits of the cluster-size distribution.
double entropy(const Partition& p);

} // namespace organoid::metrics
