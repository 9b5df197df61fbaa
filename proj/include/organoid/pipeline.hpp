#pragma once

#include "organoid/clustering.hpp"
#include "organoid/io.hpp"
#include "organoid/pqap.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace organoid::pipeline {

/// Planted-partition data: each class has a prototype point set with its own
/// palette, and every image is the prototype under a random similarity
/// transform plus independent Gaussian noise.
struct SyntheticSpec {
    int num_classes = 3;
    int images_per_class = 4;
    int points_min = 12;
    int points_max = 20;
    double color_noise_std = 0.0;
    double position_noise_std = 0.0; ///< as a fraction of the image's extent
    bool rotation_on_grid = true;
    int rotation_steps = 75;         ///< grid used when rotation_on_grid
    std::uint64_t seed = 0;

    void validate() const;
};

/// Writes keypoints/<id>.json, histograms/<id>.json and manifest.json under
/// out_dir and returns the manifest (base_dir = out_dir). Output bytes depend
/// only on the spec.
io::DatasetManifest generate_synthetic(const SyntheticSpec& spec, const std::filesystem::path& out_dir);

enum class CostProvider { pqap, hellinger, external };
enum class SolverChoice { exact, heuristic };

struct PipelineOptions {
    CostProvider provider = CostProvider::pqap;
    SolverChoice solver = SolverChoice::exact;
    pqap::PqapParams params;
    pqap::SolverConfig solver_config;
    cc::ExactConfig exact;
    std::optional<std::filesystem::path> external_costs; ///< required for CostProvider::external
    bool evaluate = false;                               ///< requires a labeled manifest
    std::optional<std::filesystem::path> out_dir;        ///< where to persist results
    unsigned threads = 1;
};

struct PipelineResult {
    CostMatrix costs;
    cc::ClusteringResult clustering;
    std::optional<io::MetricsReport> classification_metrics; ///< independent pair decisions
    std::optional<io::MetricsReport> clustering_metrics;
};

cc::ClusteringResult solve(const CostMatrix& q, SolverChoice choice, const cc::ExactConfig& exact);

/// Cost provider -> correlation clustering -> (optional) evaluation. When
/// out_dir is set, writes costs.json, partition.json and, if evaluated,
/// metrics.json with "classification" and "clustering" blocks.
PipelineResult run_pipeline(const io::DatasetManifest& manifest, const PipelineOptions& options);

/// Metrics of a clustering and of the independent classification by sign of q.
io::MetricsReport evaluate_partition(const Partition& truth, const Partition& pred);
io::MetricsReport evaluate_labeling(const Partition& truth, const PairLabeling& pred);

struct SweepRow {
    double chi = 0.0;
    cc::ClusteringResult clustering;
    metrics::VariationOfInformation vi;
};

/// Scales all costs by 1 / max|q|, then for each chi clusters q + chi and
/// compares against truth.
std::vector<SweepRow> shift_sweep(const CostMatrix& costs, const Partition& truth,
                                  const std::vector<double>& chi_grid, SolverChoice choice,
                                  const cc::ExactConfig& exact = {});

io::json to_json(const std::vector<SweepRow>& rows);

} // namespace organoid::pipeline
