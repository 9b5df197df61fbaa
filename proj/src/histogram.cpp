#include "organoid/histogram.hpp"

#include "organoid/error.hpp"
#include "organoid/learn.hpp"
#include "organoid/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace organoid::hist {

ColorHistogram build_histogram(const std::vector<Color>& pixels) {
    ColorHistogram h;
    if (pixels.empty()) {
        for (auto& channel : h.bins)
            channel.fill(1.0 / bin_count);
        return h;
    }
    for (const auto& px : pixels)
        for (std::size_t c = 0; c < 3; ++c) {
            if (!(px[c] >= 0.0 && px[c] <= 1.0))
                throw ValidationError("pixel color outside [0,1]");
            const auto bin = std::min<std::size_t>(
                static_cast<std::size_t>(std::floor(px[c] * bin_count)), bin_count - 1);
            h.bins[c][bin] += 1.0;
        }
    const double n = static_cast<double>(pixels.size());
    for (auto& channel : h.bins)
        for (double& b : channel)
            b /= n;
    return h;
}

void validate(const ColorHistogram& h) {
    for (const auto& channel : h.bins) {
        double sum = 0.0;
        for (double b : channel) {
            if (!(b >= 0.0) || !std::isfinite(b))
                throw ValidationError("histogram bin is negative or not finite");
            sum += b;
        }
        if (std::abs(sum - 1.0) > 1e-6)
            throw ValidationError("histogram channel is not normalized");
    }
}

double hellinger(const ColorHistogram& a, const ColorHistogram& b) {
    validate(a);
    validate(b);
    double total = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
        // Dividing by the channel masses absorbs their rounding, so that
        // identical channels give a coefficient of exactly 1.
        double bc = 0.0, mass_a = 0.0, mass_b = 0.0;
        for (std::size_t i = 0; i < bin_count; ++i) {
            bc += std::sqrt(a.bins[c][i] * b.bins[c][i]);
            mass_a += a.bins[c][i];
            mass_b += b.bins[c][i];
        }
        bc /= std::sqrt(mass_a * mass_b);
        total += std::sqrt(std::max(0.0, 1.0 - bc));
    }
    return total / 3.0;
}

namespace {

std::vector<std::string> keys_of(const std::map<std::string, ColorHistogram>& histograms) {
    std::vector<std::string> ids;
    ids.reserve(histograms.size());
    for (const auto& [id, h] : histograms)
        ids.push_back(id);
    return ids;
}

/// Hellinger distance per unordered pair, indexed by pair_index over keys_of().
std::vector<double> pairwise_distances(const std::map<std::string, ColorHistogram>& histograms) {
    std::vector<const ColorHistogram*> hs;
    for (const auto& [id, h] : histograms)
        hs.push_back(&h);
    std::vector<double> d;
    for (std::size_t i = 0; i < hs.size(); ++i)
        for (std::size_t j = i + 1; j < hs.size(); ++j)
            d.push_back(hellinger(*hs[i], *hs[j]));
    return d;
}

} // namespace

CostMatrix hellinger_cost_matrix(const std::map<std::string, ColorHistogram>& histograms,
                                 double cut_threshold) {
    if (histograms.size() < 2)
        throw ValidationError("need at least two histograms");
    if (!(cut_threshold >= 0.0 && cut_threshold <= 1.0))
        throw ValidationError("delta''' must lie in [0,1]");
    CostMatrix q(keys_of(histograms));
    const auto d = pairwise_distances(histograms);
    const std::size_t n = q.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            q.set(i, j, (1.0 - cut_threshold) - d[pair_index(n, i, j)]);
    return q;
}

ThresholdSearch grid_search_threshold(const std::map<std::string, ColorHistogram>& histograms,
                                      const Partition& truth) {
    if (histograms.size() < 2)
        throw ValidationError("need at least two histograms");
    const auto ids = keys_of(histograms);
    const auto d = pairwise_distances(histograms);

    constexpr int grid = 100;
    ThresholdSearch best{0.0, -1.0};
    PairLabeling labeling{ids, std::vector<std::uint8_t>(d.size())};
    for (int n = 0; n <= grid; ++n) {
        const double threshold = static_cast<double>(n) / grid;
        for (std::size_t p = 0; p < d.size(); ++p)
            labeling.join[p] = d[p] <= 1.0 - threshold;
        const double f1 = learn::join_f1(metrics::pair_confusion(truth, labeling));
        if (f1 > best.f1)
            best = {threshold, f1};
    }
    return best;
}

} // namespace organoid::hist
