#include "organoid/model.hpp"

#include "organoid/error.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <unordered_set>

namespace organoid {

namespace {

std::uint64_t pack(std::int64_t x, std::int64_t y) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) |
           static_cast<std::uint32_t>(y);
}

} // namespace

void validate(const KeyPoint& point) {
    if (!std::isfinite(point.position.x) || !std::isfinite(point.position.y))
        throw ValidationError("key point position is not finite");
    for (double c : point.color)
        if (!(c >= 0.0 && c <= 1.0))
            throw ValidationError("key point color outside [0,1]");
}

void validate(const OrganoidModel& model) {
    if (!(model.extent > 0.0) || !std::isfinite(model.extent))
        throw ValidationError("model '" + model.image_id + "': extent must be positive");
    if (model.points.empty())
        throw ValidationError("model '" + model.image_id + "': no key points");
    if (!std::isfinite(model.barycenter.x) || !std::isfinite(model.barycenter.y))
        throw ValidationError("model '" + model.image_id + "': barycenter is not finite");
    for (const auto& p : model.points)
        validate(p);
}

void validate_unique_ids(const std::vector<OrganoidModel>& models) {
    std::unordered_set<std::string> seen;
    for (const auto& m : models)
        if (!seen.insert(m.image_id).second)
            throw ValidationError("duplicate image id '" + m.image_id + "'");
}

Vec2 estimate_barycenter(const SegmentMask& mask) {
    if (mask.pixels.empty())
        throw ValidationError("empty segment");
    double sx = 0.0, sy = 0.0;
    for (const auto& p : mask.pixels) {
        sx += p[0];
        sy += p[1];
    }
    const auto n = static_cast<double>(mask.pixels.size());
    return {sx / n, sy / n};
}

double estimate_extent(const SegmentMask& mask, const std::vector<KeyPoint>& points,
                       Vec2 barycenter) {
    if (mask.pixels.empty())
        throw ValidationError("empty segment");
    if (points.empty())
        throw ValidationError("degenerate model");

    std::unordered_set<std::uint64_t> inside;
    inside.reserve(mask.pixels.size() * 2);
    int min_x = std::numeric_limits<int>::max(), max_x = std::numeric_limits<int>::min();
    int min_y = min_x, max_y = max_x;
    for (const auto& p : mask.pixels) {
        inside.insert(pack(p[0], p[1]));
        min_x = std::min(min_x, p[0]);
        max_x = std::max(max_x, p[0]);
        min_y = std::min(min_y, p[1]);
        max_y = std::max(max_y, p[1]);
    }
    const auto contains = [&](Vec2 r) {
        return inside.count(pack(static_cast<std::int64_t>(std::floor(r.x)),
                                 static_cast<std::int64_t>(std::floor(r.y)))) != 0;
    };
    if (!contains(barycenter))
        throw ValidationError("barycenter outside segment");

    // Pixels are unit cells, so the box spans max - min + 1 per axis.
    const double diagonal = std::hypot(max_x - min_x + 1.0, max_y - min_y + 1.0);

    double extent = 0.0;
    bool any_direction = false;
    for (const auto& point : points) {
        const Vec2 dir = point.position - barycenter;
        const double len = dir.norm();
        if (len == 0.0)
            continue;
        any_direction = true;
        const auto steps = static_cast<long>(std::ceil(diagonal / len / extent_ray_step));
        double last_inside = 0.0;
        for (long k = 1; k <= steps; ++k) {
            const double lambda = static_cast<double>(k) * extent_ray_step;
            if (contains(barycenter + lambda * dir))
                last_inside = lambda;
        }
        extent = std::max(extent, len * last_inside);
    }
    if (!any_direction || !(extent > 0.0))
        throw ValidationError("degenerate model");
    return extent;
}

double relative_radius(const KeyPoint& point, const OrganoidModel& model) {
    return (point.position - model.barycenter).norm() / model.extent;
}

double vector_angle(Vec2 a, Vec2 b) {
    return std::atan2(std::abs(cross(a, b)), dot(a, b));
}

double inter_point_angle(const KeyPoint& a, const KeyPoint& b, const OrganoidModel& model) {
    const Vec2 da = a.position - model.barycenter;
    const Vec2 db = b.position - model.barycenter;
    if (da.norm() == 0.0 || db.norm() == 0.0)
        throw ValidationError("point at barycenter");
    return vector_angle(da, db);
}

double color_distance(const KeyPoint& a, const KeyPoint& b) {
    const double d0 = a.color[0] - b.color[0];
    const double d1 = a.color[1] - b.color[1];
    const double d2 = a.color[2] - b.color[2];
    return std::sqrt(d0 * d0 + d1 * d1 + d2 * d2);
}

Vec2 apply_transform(const SimilarityTransform& t, Vec2 r) {
    const Vec2 d = r - t.source_center;
    const double c = std::cos(t.angle), s = std::sin(t.angle);
    return t.target + t.scale * Vec2{c * d.x - s * d.y, s * d.x + c * d.y};
}

} // namespace organoid
