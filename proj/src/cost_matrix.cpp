#include "organoid/cost_matrix.hpp"

#include "organoid/error.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace organoid {

CostMatrix::CostMatrix(std::vector<std::string> ids)
    : ids_(std::move(ids)), values_(ids_.size() * ids_.size(), 0.0) {
    std::unordered_set<std::string> seen;
    for (const auto& id : ids_)
        if (!seen.insert(id).second)
            throw ValidationError("duplicate id '" + id + "' in cost matrix");
}

void CostMatrix::set(std::size_t i, std::size_t j, double cost) {
    if (i == j)
        throw ValidationError("cost matrix has no self pairs");
    if (!std::isfinite(cost))
        throw ValidationError("cost for pair (" + ids_.at(i) + ", " + ids_.at(j) +
                              ") is not finite");
    values_[i * ids_.size() + j] = cost;
    values_[j * ids_.size() + i] = cost;
}

std::size_t CostMatrix::index_of(const std::string& id) const {
    const auto it = std::find(ids_.begin(), ids_.end(), id);
    if (it == ids_.end())
        throw ValidationError("unknown id '" + id + "'");
    return static_cast<std::size_t>(it - ids_.begin());
}

CostMatrix CostMatrix::shifted(double chi) const {
    CostMatrix out = *this;
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j)
                out.values_[i * n + j] += chi;
    return out;
}

CostMatrix CostMatrix::scaled(double factor) const {
    CostMatrix out = *this;
    for (double& v : out.values_)
        v *= factor;
    return out;
}

double CostMatrix::max_abs() const {
    double m = 0.0;
    for (double v : values_)
        m = std::max(m, std::abs(v));
    return m;
}

} // namespace organoid
