#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace organoid {

/// Symmetric costs q_{j,k} over all unordered pairs of distinct image ids.
/// Positive cost: the pair looks similar and cutting it is penalized.
/// This is the exchange type between cost providers and the clustering solvers.
class CostMatrix {
public:
    CostMatrix() = default;

    /// All costs start at zero. Throws ValidationError on duplicate ids.
    explicit CostMatrix(std::vector<std::string> ids);

    std::size_t size() const { return ids_.size(); }
    const std::vector<std::string>& ids() const { return ids_; }

    double at(std::size_t i, std::size_t j) const { return values_[i * ids_.size() + j]; }

    /// Sets q_{i,j} = q_{j,i}. Throws ValidationError on i == j or non-finite cost.
    void set(std::size_t i, std::size_t j, double cost);

    /// Throws ValidationError if the id is unknown.
    std::size_t index_of(const std::string& id) const;

    /// Every entry shifted by chi.
    CostMatrix shifted(double chi) const;

    /// Every entry multiplied by factor.
    CostMatrix scaled(double factor) const;

    double max_abs() const;

    friend bool operator==(const CostMatrix&, const CostMatrix&) = default;

private:
    std::vector<std::string> ids_;
    std::vector<double> values_;
};

} // namespace organoid
