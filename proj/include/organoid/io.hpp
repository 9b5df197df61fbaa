#pragma once

#include "organoid/clustering.hpp"
#include "organoid/cost_matrix.hpp"
#include "organoid/histogram.hpp"
#include "organoid/learn.hpp"
#include "organoid/metrics.hpp"
#include "organoid/model.hpp"
#include "organoid/partition.hpp"
#include "organoid/pqap.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace organoid::io {

using json = nlohmann::json;

/// Parses a file; syntax errors become ValidationError naming the file.
json read_json(const std::filesystem::path& path);

/// Writes with two-space indentation and a trailing newline, creating parent directories.
void write_json(const std::filesystem::path& path, const json& value);

// Key-point file. Colors with any component above 1 are read as 8-bit and divided by 255.
json to_json(const OrganoidModel& model);
OrganoidModel model_from_json(const json& j);

json to_json(const SegmentMask& mask);
SegmentMask mask_from_json(const json& j);

/// {"ids": [...], "entries": [{"a", "b", "cost"}]} with a < b, one entry per pair.
json to_json(const CostMatrix& q);
/// Requires exactly one finite entry per unordered pair of distinct ids.
CostMatrix cost_matrix_from_json(const json& j);

/// {"objective", "clusters"}; clusters sorted by smallest member.
json to_json(const cc::ClusteringResult& result);
cc::ClusteringResult clustering_from_json(const json& j);

json to_json(const PairLabeling& labeling);
PairLabeling labeling_from_json(const json& j);

json to_json(const hist::ColorHistogram& h, const std::string& image_id);
hist::ColorHistogram histogram_from_json(const json& j);

json to_json(const pqap::PqapParams& p);
pqap::PqapParams params_from_json(const json& j);

json to_json(const learn::AnnealResult& r);
learn::AnnealResult anneal_result_from_json(const json& j);

/// Pair scores and VI of one evaluation; absent scores are null.
struct MetricsReport {
    metrics::PairScores scores;
    std::optional<metrics::VariationOfInformation> vi;
};

json to_json(const MetricsReport& r);
MetricsReport metrics_report_from_json(const json& j);

struct ManifestImage {
    std::string image_id;
    /// Absent for datasets that are only clustered from external cost files.
    std::optional<std::filesystem::path> keypoints_file;
    std::optional<std::filesystem::path> mask_file;
    std::optional<std::filesystem::path> histogram_file;
    std::optional<std::string> cluster_label;
    /// Raw image consumed by the twin-network trainer; carried through unchanged.
    std::optional<std::filesystem::path> image_file;

    friend bool operator==(const ManifestImage&, const ManifestImage&) = default;
};

/// Image list of a dataset. Relative file paths resolve against base_dir.
struct DatasetManifest {
    std::string name;
    std::vector<ManifestImage> images;
    std::filesystem::path base_dir;

    bool labeled() const { return !images.empty() && images.front().cluster_label.has_value(); }
    std::filesystem::path resolve(const std::filesystem::path& p) const;

    /// Unique ids; labels on all images or on none.
    void validate() const;

    friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

/// Paths are written as stored (relative to the manifest's directory).
json to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const json& j, const std::filesystem::path& base_dir);

/// Loads and validates; also checks that every referenced file exists.
DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const DatasetManifest& m);

/// Reads every key-point file (ValidationError if an image has none). When an image has a mask file the barycenter
/// and extent are recomputed from it; a mismatch above 1e-6 against the stored
/// values is reported through `warnings`.
std::vector<OrganoidModel> load_models(const DatasetManifest& m,
                                       std::vector<std::string>* warnings = nullptr);

/// Recomputes barycenter and extent of a model from its segment mask.
/// Appends a warning if either differs from the stored value by more than 1e-6.
OrganoidModel refine_with_mask(OrganoidModel model, const SegmentMask& mask,
                               std::vector<std::string>* warnings = nullptr);

/// Throws ValidationError if an image lacks a histogram file.
std::map<std::string, hist::ColorHistogram> load_histograms(const DatasetManifest& m);

/// Partition from cluster labels; throws ValidationError on unlabeled manifests.
Partition truth_partition(const DatasetManifest& m);

} // namespace organoid::io
