#include "organoid/error.hpp"
#include "organoid/model.hpp"

#include <doctest.h>

#include <numbers>
#include <random>

using namespace organoid;

namespace {

KeyPoint at(double x, double y, Color c = {0.5, 0.5, 0.5}) {
    return KeyPoint{{x, y}, c, Channel::nuclei_green};
}

OrganoidModel model_at_origin(double extent) {
    OrganoidModel m;
    m.image_id = "m";
    m.barycenter = {0.0, 0.0};
    m.extent = extent;
    m.points = {at(1.0, 0.0)};
    return m;
}

SegmentMask square(int lo, int hi) {
    SegmentMask mask;
    for (int x = lo; x <= hi; ++x)
        for (int y = lo; y <= hi; ++y)
            mask.pixels.push_back({x, y});
    return mask;
}

} // namespace

TEST_CASE("barycenter is the mean pixel") {
    CHECK(estimate_barycenter({{{0, 0}, {2, 0}, {0, 2}, {2, 2}}}) == Vec2{1.0, 1.0});
    CHECK(estimate_barycenter({{{5, 7}}}) == Vec2{5.0, 7.0});
    CHECK(estimate_barycenter({{{0, 0}, {3, 0}}}) == Vec2{1.5, 0.0});
    CHECK_THROWS_WITH_AS(estimate_barycenter({}), "empty segment", ValidationError);
}

TEST_CASE("extent follows the ray until it leaves the mask") {
    // Ray from (2,2) along +x leaves [0,4]^2 once floor(2 + lambda) = 5.
    CHECK(estimate_extent(square(0, 4), {at(3.0, 2.0)}, {2.0, 2.0}) ==
          doctest::Approx(3.0).epsilon(extent_ray_step));
    CHECK(estimate_extent({{{0, 0}}}, {at(1.0, 0.0)}, {0.0, 0.0}) ==
          doctest::Approx(1.0).epsilon(extent_ray_step));

    // The supremum is a maximum over key points.
    const double e = estimate_extent(square(0, 4), {at(3.0, 2.0), at(3.0, 3.0)}, {2.0, 2.0});
    CHECK(e == doctest::Approx(3.0 * std::sqrt(2.0)).epsilon(0.01));

    CHECK_THROWS_WITH_AS(estimate_extent(square(0, 4), {at(2.0, 2.0)}, {2.0, 2.0}),
                         "degenerate model", ValidationError);
    CHECK_THROWS_AS(estimate_extent({}, {at(1.0, 0.0)}, {0.0, 0.0}), ValidationError);
}

TEST_CASE("extent uses the last in-mask step on non-convex masks") {
    // Gap at x = 3: the ray re-enters the mask and the supremum is beyond the gap.
    SegmentMask mask;
    for (int x : {0, 1, 2, 4, 5})
        mask.pixels.push_back({x, 0});
    const double e = estimate_extent(mask, {at(1.0, 0.5)}, {0.5, 0.5});
    CHECK(e == doctest::Approx(5.49).epsilon(0.01));
}

TEST_CASE("relative radius") {
    const auto m = model_at_origin(10.0);
    CHECK(relative_radius(at(0.0, 0.0), m) == 0.0);
    CHECK(relative_radius(at(10.0, 0.0), m) == 1.0);
    CHECK(relative_radius(at(3.0, 4.0), m) == doctest::Approx(0.5));
}

TEST_CASE("inter-point angle is unsigned") {
    const auto m = model_at_origin(1.0);
    CHECK(inter_point_angle(at(1.0, 1.0), at(2.0, 2.0), m) == doctest::Approx(0.0));
    CHECK(inter_point_angle(at(1.0, 0.0), at(-3.0, 0.0), m) == doctest::Approx(std::numbers::pi));
    CHECK(inter_point_angle(at(1.0, 0.0), at(0.0, 1.0), m) == doctest::Approx(std::numbers::pi / 2));
    CHECK(inter_point_angle(at(0.0, 1.0), at(1.0, 0.0), m) == doctest::Approx(std::numbers::pi / 2));
    CHECK_THROWS_WITH_AS(inter_point_angle(at(0.0, 0.0), at(1.0, 0.0), m), "point at barycenter",
                         ValidationError);
}

TEST_CASE("color distance is Euclidean") {
    CHECK(color_distance(at(0, 0, {0.2, 0.3, 0.4}), at(0, 0, {0.2, 0.3, 0.4})) == 0.0);
    CHECK(color_distance(at(0, 0, {1, 0, 0}), at(0, 0, {0, 1, 0})) == doctest::Approx(std::sqrt(2.0)));
    CHECK(color_distance(at(0, 0, {0.5, 0.5, 0.5}), at(0, 0, {0.8, 0.5, 0.5})) == doctest::Approx(0.3));
}

TEST_CASE("similarity transform") {
    const SimilarityTransform t{{7.0, -3.0}, 2.5, 1.1, {4.0, 4.0}};
    CHECK(apply_transform(t, {4.0, 4.0}) == Vec2{7.0, -3.0});

    const SimilarityTransform shift{{1.0, 2.0}, 1.0, 0.0, {0.0, 0.0}};
    CHECK(apply_transform(shift, {3.0, 4.0}) == Vec2{4.0, 6.0});

    const auto r = apply_transform({{0.0, 0.0}, 2.0, std::numbers::pi / 2, {0.0, 0.0}}, {1.0, 0.0});
    CHECK(r.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.y == doctest::Approx(2.0));
}

TEST_CASE("transform invariants on random inputs") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-100.0, 100.0), ang(0.0, 2 * std::numbers::pi),
        sc(0.1, 5.0);
    for (int trial = 0; trial < 500; ++trial) {
        const SimilarityTransform t{{u(rng), u(rng)}, sc(rng), ang(rng), {u(rng), u(rng)}};
        const Vec2 a{u(rng), u(rng)}, b{u(rng), u(rng)};
        const Vec2 fa = apply_transform(t, a), fb = apply_transform(t, b);

        CHECK((fa - t.target).norm() == doctest::Approx(t.scale * (a - t.source_center).norm()));
        CHECK(std::abs(vector_angle(fa - t.target, fb - t.target) -
                       vector_angle(a - t.source_center, b - t.source_center)) < 1e-9);

        // Relative radius is preserved when the target extent is scale * source extent.
        OrganoidModel src{"s", {at(a.x, a.y)}, t.source_center, 40.0};
        OrganoidModel dst{"d", {at(fa.x, fa.y)}, t.target, 40.0 * t.scale};
        CHECK(relative_radius(dst.points[0], dst) == doctest::Approx(relative_radius(src.points[0], src)));

        const auto ka = at(a.x, a.y, {0.1, 0.9, 0.3}), kb = at(b.x, b.y, {0.7, 0.2, 0.5});
        CHECK(color_distance(ka, kb) == color_distance(kb, ka));
        CHECK(inter_point_angle(ka, kb, src) == inter_point_angle(kb, ka, src));
    }
}

TEST_CASE("model validation") {
    auto m = model_at_origin(1.0);
    CHECK_NOTHROW(validate(m));
    m.extent = 0.0;
    CHECK_THROWS_AS(validate(m), ValidationError);
    m.extent = 1.0;
    m.points[0].color[1] = 1.5;
    CHECK_THROWS_AS(validate(m), ValidationError);
    m.points.clear();
    CHECK_THROWS_AS(validate(m), ValidationError);
    CHECK_THROWS_AS(validate_unique_ids({model_at_origin(1.0), model_at_origin(2.0)}), ValidationError);
}
