#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace organoid {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2 a, Vec2 b) = default;

    double norm() const { return std::hypot(x, y); }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

/// Channel intensities, each normalized to [0,1].
using Color = std::array<double, 3>;

/// Provenance of a key point. Does not influence any cost.
enum class Channel { nuclei_green, nuclei_blue, membrane_red };

struct KeyPoint {
    Vec2 position;
    Color color{};
    Channel channel = Channel::nuclei_green;
};

/// An image reduced to its key points plus the barycenter and extent of the
/// depicted organoid.
struct OrganoidModel {
    std::string image_id;
    std::vector<KeyPoint> points;
    Vec2 barycenter;
    double extent = 1.0;
};

/// Pixel set of one segmented organoid.
struct SegmentMask {
    std::vector<std::array<int, 2>> pixels;
};

/// f(r) = target + scale * R(angle) * (r - source_center).
struct SimilarityTransform {
    Vec2 target;
    double scale = 1.0;
    double angle = 0.0;
    Vec2 source_center;
};

/// Throws ValidationError on non-finite positions or colors outside [0,1].
void validate(const KeyPoint& point);

/// Throws ValidationError unless extent > 0, points are non-empty and valid.
void validate(const OrganoidModel& model);

/// Checks that image ids are unique across a collection.
void validate_unique_ids(const std::vector<OrganoidModel>& models);

/// Mean pixel coordinate of the mask.
Vec2 estimate_barycenter(const SegmentMask& mask);

/// Step of the ray march used to approximate the supremum in estimate_extent.
inline constexpr double extent_ray_step = 0.01;

/// Largest distance from the barycenter at which a ray through some key point
/// still lies inside the mask. The ray parameter is advanced in increments of
/// extent_ray_step up to the bounding-box diagonal.
double estimate_extent(const SegmentMask& mask, const std::vector<KeyPoint>& points,
                       Vec2 barycenter);

/// |r_v - r_0| / extent.
double relative_radius(const KeyPoint& point, const OrganoidModel& model);

/// Unsigned angle in [0, pi] between the barycenter-relative vectors of two
/// points. Throws ValidationError if either point sits on the barycenter.
double inter_point_angle(const KeyPoint& a, const KeyPoint& b, const OrganoidModel& model);

/// Unsigned angle between two vectors, atan2(|a x b|, a . b).
double vector_angle(Vec2 a, Vec2 b);

/// Euclidean distance between two colors.
double color_distance(const KeyPoint& a, const KeyPoint& b);

Vec2 apply_transform(const SimilarityTransform& t, Vec2 r);

} // namespace organoid
