#include "organoid/pipeline.hpp"

#include "organoid/error.hpp"
#include "organoid/histogram.hpp"
#include "organoid/learn.hpp"
#include "organoid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <set>

namespace organoid::pipeline {

namespace fs = std::filesystem;

void SyntheticSpec::validate() const {
    if (num_classes < 1 || images_per_class < 1)
        throw ValidationError("synthetic spec needs at least one class and one image per class");
    if (points_min < 1 || points_max < points_min)
        throw ValidationError("synthetic spec needs 1 <= points_min <= points_max");
    if (!(color_noise_std >= 0.0) || !(position_noise_std >= 0.0))
        throw ValidationError("noise levels must be >= 0");
    if (rotation_steps < 1)
        throw ValidationError("rotation_steps must be >= 1");
}

namespace {

constexpr double prototype_radius = 100.0;
constexpr double min_palette_distance = 0.35;
constexpr int histogram_pixels_per_point = 24;
constexpr double histogram_pixel_noise = 0.03;

struct Prototype {
    std::vector<KeyPoint> points;
    double extent = 1.0;
};

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

Color palette_color(std::mt19937_64& rng, const std::vector<Color>& taken) {
    std::uniform_real_distribution<double> u(0.15, 0.85);
    Color best{};
    double best_gap = -1.0;
    for (int attempt = 0; attempt < 1000; ++attempt) {
        const Color c{u(rng), u(rng), u(rng)};
        double gap = std::numeric_limits<double>::infinity();
        for (const auto& t : taken)
            gap = std::min(gap, std::hypot(c[0] - t[0], c[1] - t[1], c[2] - t[2]));
        if (gap >= min_palette_distance)
            return c;
        if (gap > best_gap) {
            best_gap = gap;
            best = c;
        }
    }
    return best;
}

Prototype make_prototype(std::mt19937_64& rng, const SyntheticSpec& spec, const Color& base) {
    std::uniform_int_distribution<int> count(spec.points_min, spec.points_max);
    std::uniform_real_distribution<double> radius_sq(0.04, 1.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> tint(-0.1, 0.1);
    std::uniform_int_distribution<int> channel(0, 2);

    Prototype proto;
    const int n = count(rng);
    double max_r = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = prototype_radius * std::sqrt(radius_sq(rng));
        const double a = angle(rng);
        KeyPoint k;
        k.position = {r * std::cos(a), r * std::sin(a)};
        for (std::size_t c = 0; c < 3; ++c)
            k.color[c] = clamp01(base[c] + tint(rng));
        k.channel = static_cast<Channel>(channel(rng));
        proto.points.push_back(k);
        max_r = std::max(max_r, r);
    }
    proto.extent = 1.1 * max_r;
    return proto;
}

std::string image_id(int cls, int img) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "c%02d_i%03d", cls, img);
    return buf;
}

} // namespace

io::DatasetManifest generate_synthetic(const SyntheticSpec& spec, const fs::path& out_dir) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> scale(0.6, 1.5);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::uniform_int_distribution<int> grid(0, spec.rotation_steps - 1);
    std::uniform_real_distribution<double> center(150.0, 850.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    io::DatasetManifest manifest;
    manifest.name = "synthetic-" + std::to_string(spec.num_classes) + "x" +
                    std::to_string(spec.images_per_class) + "-seed" + std::to_string(spec.seed);
    manifest.base_dir = out_dir;

    std::vector<Color> palette;
    for (int cls = 0; cls < spec.num_classes; ++cls) {
        palette.push_back(palette_color(rng, palette));
        const Prototype proto = make_prototype(rng, spec, palette.back());

        for (int img = 0; img < spec.images_per_class; ++img) {
            const double s = scale(rng);
            const double gamma = spec.rotation_on_grid
                                     ? 2.0 * std::numbers::pi * grid(rng) / spec.rotation_steps
                                     : angle(rng);
            const Vec2 c{center(rng), center(rng)};
            const SimilarityTransform f{c, s, gamma, {0.0, 0.0}};

            OrganoidModel model;
            model.image_id = image_id(cls, img);
            model.barycenter = c;
            model.extent = s * proto.extent;
            const double pos_std = spec.position_noise_std * model.extent;
            for (const auto& p : proto.points) {
                KeyPoint k = p;
                k.position = apply_transform(f, p.position);
                if (pos_std > 0.0) {
                    k.position.x += pos_std * gauss(rng);
                    k.position.y += pos_std * gauss(rng);
                }
                if (spec.color_noise_std > 0.0)
                    for (double& v : k.color)
                        v = clamp01(v + spec.color_noise_std * gauss(rng));
                model.points.push_back(k);
            }
            std::shuffle(model.points.begin(), model.points.end(), rng);

            std::vector<Color> pixels;
            for (const auto& k : model.points)
                for (int i = 0; i < histogram_pixels_per_point; ++i)
                    pixels.push_back({clamp01(k.color[0] + histogram_pixel_noise * gauss(rng)),
                                      clamp01(k.color[1] + histogram_pixel_noise * gauss(rng)),
                                      clamp01(k.color[2] + histogram_pixel_noise * gauss(rng))});

            io::ManifestImage entry;
            entry.image_id = model.image_id;
            entry.keypoints_file = fs::path("keypoints") / (model.image_id + ".json");
            entry.histogram_file = fs::path("histograms") / (model.image_id + ".json");
            entry.cluster_label = "class_" + std::to_string(cls);
            io::write_json(out_dir / *entry.keypoints_file, io::to_json(model));
            io::write_json(out_dir / *entry.histogram_file,
                           io::to_json(hist::build_histogram(pixels), model.image_id));
            manifest.images.push_back(std::move(entry));
        }
    }
    io::save_manifest(out_dir / "manifest.json", manifest);
    return manifest;
}

cc::ClusteringResult solve(const CostMatrix& q, SolverChoice choice, const cc::ExactConfig& exact) {
    return choice == SolverChoice::exact ? cc::solve_exact(q, exact) : cc::solve_heuristic(q);
}

io::MetricsReport evaluate_partition(const Partition& truth, const Partition& pred) {
    return {metrics::scores(metrics::pair_confusion(truth, pred)),
            metrics::variation_of_information(truth, pred)};
}

io::MetricsReport evaluate_labeling(const Partition& truth, const PairLabeling& pred) {
    return {metrics::scores(metrics::pair_confusion(truth, pred)), std::nullopt};
}

PipelineResult run_pipeline(const io::DatasetManifest& manifest, const PipelineOptions& options) {
    manifest.validate();
    if (options.evaluate && !manifest.labeled())
        throw ValidationError("metrics requested but manifest '" + manifest.name +
                              "' has no cluster labels");

    PipelineResult result;
    switch (options.provider) {
    case CostProvider::pqap:
        result.costs = pqap::pqap_cost_matrix(io::load_models(manifest), options.params,
                                              options.solver_config, options.threads);
        break;
    case CostProvider::hellinger:
        result.costs = hist::hellinger_cost_matrix(io::load_histograms(manifest),
                                                   options.params.cut_threshold);
        break;
    case CostProvider::external: {
        if (!options.external_costs)
            throw ValidationError("external cost provider needs a cost file");
        result.costs = io::cost_matrix_from_json(io::read_json(*options.external_costs));
        std::set<std::string> expected, got(result.costs.ids().begin(), result.costs.ids().end());
        for (const auto& img : manifest.images)
            expected.insert(img.image_id);
        if (expected != got)
            throw ValidationError("cost file ids do not match the manifest ids");
        break;
    }
    }

    result.clustering = solve(result.costs, options.solver, options.exact);

    if (options.evaluate) {
        const Partition truth = io::truth_partition(manifest);
        result.classification_metrics =
            evaluate_labeling(truth, learn::classify_pairs(result.costs));
        result.clustering_metrics = evaluate_partition(truth, result.clustering.partition);
    }

    if (options.out_dir) {
        io::write_json(*options.out_dir / "costs.json", io::to_json(result.costs));
        io::write_json(*options.out_dir / "partition.json", io::to_json(result.clustering));
        if (options.evaluate)
            io::write_json(*options.out_dir / "metrics.json",
                           {{"classification", io::to_json(*result.classification_metrics)},
                            {"clustering", io::to_json(*result.clustering_metrics)}});
    }
    return result;
}

std::vector<SweepRow> shift_sweep(const CostMatrix& costs, const Partition& truth,
                                  const std::vector<double>& chi_grid, SolverChoice choice,
                                  const cc::ExactConfig& exact) {
    const double m = costs.max_abs();
    const CostMatrix scaled = m > 0.0 ? costs.scaled(1.0 / m) : costs;
    std::vector<SweepRow> rows;
    rows.reserve(chi_grid.size());
    for (double chi : chi_grid) {
        SweepRow row;
        row.chi = chi;
        row.clustering = solve(chi == 0.0 ? scaled : scaled.shifted(chi), choice, exact);
        row.vi = metrics::variation_of_information(truth, row.clustering.partition);
        rows.push_back(std::move(row));
    }
    return rows;
}

io::json to_json(const std::vector<SweepRow>& rows) {
    io::json out = io::json::array();
    for (const auto& r : rows)
        out.push_back({{"chi", r.chi},
                       {"VI", r.vi.vi},
                       {"VI_C", r.vi.vi_cuts},
                       {"VI_J", r.vi.vi_joins},
                       {"clusters", r.clustering.partition.cluster_count()},
                       {"objective", r.clustering.objective}});
    return out;
}

} // namespace organoid::pipeline
