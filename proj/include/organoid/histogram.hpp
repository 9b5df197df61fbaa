#pragma once

#include "organoid/cost_matrix.hpp"
#include "organoid/model.hpp"
#include "organoid/partition.hpp"

#include <array>
#include <map>
#include <string>
#include <vector>

namespace organoid::hist {

inline constexpr std::size_t bin_count = 256;

/// Three per-channel 256-bin histograms, each summing to 1.
struct ColorHistogram {
    std::array<std::array<double, bin_count>, 3> bins{};

    friend bool operator==(const ColorHistogram&, const ColorHistogram&) = default;
};

/// Bins each channel at min(floor(c * 256), 255) and normalizes. An empty
/// pixel list yields uniform channels.
ColorHistogram build_histogram(const std::vector<Color>& pixels);

/// Throws ValidationError unless every bin is >= 0 and each channel sums to 1 within 1e-6.
void validate(const ColorHistogram& h);

/// Mean over the three channels of sqrt(1 - BC), BC = sum_b sqrt(p_b q_b) divided by
/// sqrt(sum_b p_b * sum_b q_b). In [0,1].
double hellinger(const ColorHistogram& a, const ColorHistogram& b);

/// q = (1 - cut_threshold) - d_H for every unordered pair. Computing it in this
/// order makes q >= 0 exactly equivalent to d_H <= 1 - cut_threshold.
CostMatrix hellinger_cost_matrix(const std::map<std::string, ColorHistogram>& histograms,
                                 double cut_threshold);

struct ThresholdSearch {
    double cut_threshold = 0.0;
    double f1 = 0.0;
};

/// Exhaustive search of cut_threshold over {n / 100 : n = 0..100} maximizing
/// the F1 score of joins (absent F1 counts as 0). Ties go to the smallest
/// threshold.
ThresholdSearch grid_search_threshold(const std::map<std::string, ColorHistogram>& histograms,
                                      const Partition& truth);

} // namespace organoid::hist
