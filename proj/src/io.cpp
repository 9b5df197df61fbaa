#include "organoid/io.hpp"

#include "organoid/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <unordered_set>

namespace organoid::io {

namespace fs = std::filesystem;

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ValidationError("'" + path.string() + "': " + e.what());
    }
}

void write_json(const fs::path& path, const json& value) {
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    out << value.dump(2) << '\n';
    if (!out)
        throw std::runtime_error("write failed for '" + path.string() + "'");
}

namespace {

/// Runs a parser and turns JSON type errors into ValidationError.
template <class F>
auto parse(const char* what, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed ") + what + ": " + e.what());
    }
}

json vec(Vec2 v) { return json::array({v.x, v.y}); }

Vec2 vec_from(const json& j) {
    if (!j.is_array() || j.size() != 2)
        throw ValidationError("expected a 2-vector");
    return {j[0].get<double>(), j[1].get<double>()};
}

const char* channel_name(Channel c) {
    switch (c) {
    case Channel::nuclei_green: return "green";
    case Channel::nuclei_blue: return "blue";
    case Channel::membrane_red: return "red";
    }
    return "green";
}

Channel channel_from(const std::string& s) {
    if (s == "green") return Channel::nuclei_green;
    if (s == "blue") return Channel::nuclei_blue;
    if (s == "red") return Channel::membrane_red;
    throw ValidationError("unknown channel '" + s + "'");
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null())
        return std::nullopt;
    return j.at(key).get<double>();
}

} // namespace

json to_json(const OrganoidModel& model) {
    json points = json::array();
    for (const auto& p : model.points)
        points.push_back({{"x", p.position.x},
                          {"y", p.position.y},
                          {"channel", channel_name(p.channel)},
                          {"color", json::array({p.color[0], p.color[1], p.color[2]})}});
    return {{"image_id", model.image_id},
            {"barycenter", vec(model.barycenter)},
            {"extent", model.extent},
            {"points", points}};
}

OrganoidModel model_from_json(const json& j) {
    return parse("key-point file", [&] {
        OrganoidModel m;
        m.image_id = j.at("image_id").get<std::string>();
        m.barycenter = vec_from(j.at("barycenter"));
        m.extent = j.at("extent").get<double>();
        bool eight_bit = false;
        for (const auto& p : j.at("points")) {
            KeyPoint k;
            k.position = {p.at("x").get<double>(), p.at("y").get<double>()};
            k.channel = channel_from(p.at("channel").get<std::string>());
            const auto& c = p.at("color");
            if (!c.is_array() || c.size() != 3)
                throw ValidationError("color must have three components");
            for (std::size_t i = 0; i < 3; ++i) {
                k.color[i] = c[i].get<double>();
                eight_bit = eight_bit || k.color[i] > 1.0;
            }
            m.points.push_back(k);
        }
        if (eight_bit)
            for (auto& p : m.points)
                for (double& c : p.color)
                    c /= 255.0;
        for (const auto& p : m.points)
            validate(p);
        return m;
    });
}

json to_json(const SegmentMask& mask) {
    json px = json::array();
    for (const auto& p : mask.pixels)
        px.push_back(json::array({p[0], p[1]}));
    return {{"pixels", px}};
}

SegmentMask mask_from_json(const json& j) {
    return parse("mask file", [&] {
        SegmentMask m;
        for (const auto& p : j.at("pixels")) {
            if (!p.is_array() || p.size() != 2)
                throw ValidationError("pixel must be [x, y]");
            m.pixels.push_back({p[0].get<int>(), p[1].get<int>()});
        }
        return m;
    });
}

json to_json(const CostMatrix& q) {
    std::vector<std::tuple<std::string, std::string, double>> entries;
    for (std::size_t i = 0; i < q.size(); ++i)
        for (std::size_t j = i + 1; j < q.size(); ++j) {
            auto a = q.ids()[i], b = q.ids()[j];
            if (b < a)
                std::swap(a, b);
            entries.emplace_back(a, b, q.at(i, j));
        }
    std::sort(entries.begin(), entries.end());
    json out = {{"ids", q.ids()}, {"entries", json::array()}};
    for (const auto& [a, b, c] : entries)
        out["entries"].push_back({{"a", a}, {"b", b}, {"cost", c}});
    return out;
}

CostMatrix cost_matrix_from_json(const json& j) {
    return parse("cost matrix", [&] {
        CostMatrix q(j.at("ids").get<std::vector<std::string>>());
        const std::size_t n = q.size();
        std::vector<bool> seen(n * n, false);
        std::size_t count = 0;
        for (const auto& e : j.at("entries")) {
            const auto a = e.at("a").get<std::string>();
            const auto b = e.at("b").get<std::string>();
            if (!(a < b))
                throw ValidationError("cost entry (" + a + ", " + b + ") must have a < b");
            const auto& cost = e.at("cost");
            if (!cost.is_number())
                throw ValidationError("cost entry (" + a + ", " + b + ") is not a number");
            const auto i = q.index_of(a), k = q.index_of(b);
            if (seen[i * n + k])
                throw ValidationError("duplicate cost entry (" + a + ", " + b + ")");
            seen[i * n + k] = seen[k * n + i] = true;
            q.set(i, k, cost.get<double>());
            ++count;
        }
        if (count != n * (n - (n > 0)) / 2)
            throw ValidationError("cost matrix does not cover every pair of ids");
        return q;
    });
}

json to_json(const cc::ClusteringResult& result) {
    return {{"objective", result.objective}, {"clusters", result.partition.clusters()}};
}

cc::ClusteringResult clustering_from_json(const json& j) {
    return parse("partition file", [&] {
        return cc::ClusteringResult{
            Partition(j.at("clusters").get<std::vector<std::vector<std::string>>>()),
            j.value("objective", 0.0)};
    });
}

json to_json(const PairLabeling& labeling) {
    json out = {{"ids", labeling.ids}, {"pairs", json::array()}};
    const std::size_t n = labeling.ids.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            out["pairs"].push_back({{"a", labeling.ids[i]},
                                    {"b", labeling.ids[j]},
                                    {"join", labeling.join[pair_index(n, i, j)] != 0}});
    return out;
}

PairLabeling labeling_from_json(const json& j) {
    return parse("pair labelling", [&] {
        PairLabeling l{j.at("ids").get<std::vector<std::string>>(), {}};
        const std::size_t n = l.ids.size();
        std::map<std::string, std::size_t> index;
        for (std::size_t i = 0; i < n; ++i)
            if (!index.emplace(l.ids[i], i).second)
                throw ValidationError("duplicate id '" + l.ids[i] + "'");
        l.join.assign(n * (n - (n > 0)) / 2, 0);
        std::vector<bool> seen(l.join.size(), false);
        for (const auto& p : j.at("pairs")) {
            const auto ia = index.find(p.at("a").get<std::string>());
            const auto ib = index.find(p.at("b").get<std::string>());
            if (ia == index.end() || ib == index.end() || ia->second == ib->second)
                throw ValidationError("pair labelling references an unknown pair");
            const auto lo = std::min(ia->second, ib->second), hi = std::max(ia->second, ib->second);
            const auto k = pair_index(n, lo, hi);
            if (seen[k])
                throw ValidationError("duplicate pair in labelling");
            seen[k] = true;
            l.join[k] = p.at("join").get<bool>();
        }
        if (std::find(seen.begin(), seen.end(), false) != seen.end())
            throw ValidationError("pair labelling does not cover every pair");
        return l;
    });
}

json to_json(const hist::ColorHistogram& h, const std::string& image_id) {
    json bins = json::array();
    for (const auto& channel : h.bins)
        bins.push_back(channel);
    return {{"image_id", image_id}, {"bins", bins}};
}

hist::ColorHistogram histogram_from_json(const json& j) {
    return parse("histogram file", [&] {
        hist::ColorHistogram h;
        const auto& bins = j.at("bins");
        if (!bins.is_array() || bins.size() != 3)
            throw ValidationError("histogram needs three channels");
        for (std::size_t c = 0; c < 3; ++c) {
            if (!bins[c].is_array() || bins[c].size() != hist::bin_count)
                throw ValidationError("histogram channel needs 256 bins");
            for (std::size_t b = 0; b < hist::bin_count; ++b)
                h.bins[c][b] = bins[c][b].get<double>();
        }
        hist::validate(h);
        return h;
    });
}

json to_json(const pqap::PqapParams& p) {
    return {{"color_threshold", p.color_threshold}, {"radius_threshold", p.radius_threshold},
            {"angle_threshold", p.angle_threshold}, {"unary_mix", p.unary_mix},
            {"pairwise_weight", p.pairwise_weight}, {"cut_threshold", p.cut_threshold}};
}

pqap::PqapParams params_from_json(const json& j) {
    return parse("parameter set", [&] {
        pqap::PqapParams p;
        p.color_threshold = j.value("color_threshold", p.color_threshold);
        p.radius_threshold = j.value("radius_threshold", p.radius_threshold);
        p.angle_threshold = j.value("angle_threshold", p.angle_threshold);
        p.unary_mix = j.value("unary_mix", p.unary_mix);
        p.pairwise_weight = j.value("pairwise_weight", p.pairwise_weight);
        p.cut_threshold = j.value("cut_threshold", p.cut_threshold);
        p.validate();
        return p;
    });
}

json to_json(const learn::AnnealResult& r) {
    json trace = json::array();
    for (const auto& s : r.trace)
        trace.push_back({{"t", s.iteration},
                         {"temperature", s.temperature},
                         {"proposal", to_json(s.proposal)},
                         {"f1", s.proposal_f1},
                         {"accepted", s.accepted},
                         {"current", to_json(s.current)},
                         {"current_f1", s.current_f1},
                         {"best_f1", s.best_f1}});
    return {{"params", to_json(r.best)}, {"best_f1", r.best_f1}, {"trace", trace}};
}

learn::AnnealResult anneal_result_from_json(const json& j) {
    return parse("learned-parameter file", [&] {
        learn::AnnealResult r;
        r.best = params_from_json(j.at("params"));
        r.best_f1 = j.at("best_f1").get<double>();
        for (const auto& s : j.value("trace", json::array()))
            r.trace.push_back({s.at("t").get<int>(), s.at("temperature").get<double>(),
                               params_from_json(s.at("proposal")), s.at("f1").get<double>(),
                               s.at("accepted").get<bool>(), params_from_json(s.at("current")),
                               s.at("current_f1").get<double>(), s.at("best_f1").get<double>()});
        return r;
    });
}

json to_json(const MetricsReport& r) {
    const auto& s = r.scores;
    json out = {{"ACC", s.accuracy},
                {"PC", optional_number(s.precision_cuts)},
                {"RC", optional_number(s.recall_cuts)},
                {"PJ", optional_number(s.precision_joins)},
                {"RJ", optional_number(s.recall_joins)},
                {"RI", s.rand_index},
                {"F1C", optional_number(s.f1_cuts)},
                {"F1J", optional_number(s.f1_joins)}};
    out["VI"] = r.vi ? json(r.vi->vi) : json(nullptr);
    out["VI_C"] = r.vi ? json(r.vi->vi_cuts) : json(nullptr);
    out["VI_J"] = r.vi ? json(r.vi->vi_joins) : json(nullptr);
    return out;
}

MetricsReport metrics_report_from_json(const json& j) {
    return parse("metrics report", [&] {
        MetricsReport r;
        r.scores.accuracy = j.at("ACC").get<double>();
        r.scores.rand_index = j.at("RI").get<double>();
        r.scores.precision_cuts = optional_from(j, "PC");
        r.scores.recall_cuts = optional_from(j, "RC");
        r.scores.precision_joins = optional_from(j, "PJ");
        r.scores.recall_joins = optional_from(j, "RJ");
        r.scores.f1_cuts = optional_from(j, "F1C");
        r.scores.f1_joins = optional_from(j, "F1J");
        if (!j.at("VI").is_null())
            r.vi = metrics::VariationOfInformation{j.at("VI").get<double>(),
                                                   j.at("VI_C").get<double>(),
                                                   j.at("VI_J").get<double>()};
        return r;
    });
}

fs::path DatasetManifest::resolve(const fs::path& p) const {
    return p.is_absolute() ? p : base_dir / p;
}

void DatasetManifest::validate() const {
    std::unordered_set<std::string> seen;
    std::size_t labeled_count = 0;
    for (const auto& img : images) {
        if (!seen.insert(img.image_id).second)
            throw ValidationError("duplicate image id '" + img.image_id + "' in manifest");
        labeled_count += img.cluster_label.has_value();
    }
    if (labeled_count != 0 && labeled_count != images.size())
        throw ValidationError("manifest labels either all images or none");
}

json to_json(const DatasetManifest& m) {
    json images = json::array();
    for (const auto& img : m.images) {
        json e = {{"image_id", img.image_id}};
        if (img.keypoints_file)
            e["keypoints_file"] = img.keypoints_file->generic_string();
        if (img.mask_file)
            e["mask_file"] = img.mask_file->generic_string();
        if (img.histogram_file)
            e["histogram_file"] = img.histogram_file->generic_string();
        if (img.cluster_label)
            e["cluster_label"] = *img.cluster_label;
        if (img.image_file)
            e["image_file"] = img.image_file->generic_string();
        images.push_back(e);
    }
    return {{"name", m.name}, {"images", images}};
}

DatasetManifest manifest_from_json(const json& j, const fs::path& base_dir) {
    return parse("manifest", [&] {
        DatasetManifest m;
        m.name = j.value("name", std::string{});
        m.base_dir = base_dir;
        for (const auto& e : j.at("images")) {
            ManifestImage img;
            img.image_id = e.at("image_id").get<std::string>();
            if (e.contains("keypoints_file"))
                img.keypoints_file = fs::path(e.at("keypoints_file").get<std::string>());
            if (e.contains("mask_file"))
                img.mask_file = fs::path(e.at("mask_file").get<std::string>());
            if (e.contains("histogram_file"))
                img.histogram_file = fs::path(e.at("histogram_file").get<std::string>());
            if (e.contains("cluster_label"))
                img.cluster_label = e.at("cluster_label").get<std::string>();
            if (e.contains("image_file"))
                img.image_file = fs::path(e.at("image_file").get<std::string>());
            m.images.push_back(std::move(img));
        }
        m.validate();
        return m;
    });
}

DatasetManifest load_manifest(const fs::path& path) {
    auto m = manifest_from_json(read_json(path), path.parent_path());
    for (const auto& img : m.images) {
        for (const auto* p : {img.keypoints_file ? &*img.keypoints_file : nullptr,
                              img.mask_file ? &*img.mask_file : nullptr,
                              img.histogram_file ? &*img.histogram_file : nullptr})
            if (p && !fs::exists(m.resolve(*p)))
                throw ValidationError("manifest references missing file '" +
                                      m.resolve(*p).string() + "'");
    }
    return m;
}

void save_manifest(const fs::path& path, const DatasetManifest& m) {
    write_json(path, to_json(m));
}

OrganoidModel refine_with_mask(OrganoidModel model, const SegmentMask& mask,
                               std::vector<std::string>* warnings) {
    const Vec2 barycenter = estimate_barycenter(mask);
    const double extent = estimate_extent(mask, model.points, barycenter);
    const bool moved = (barycenter - model.barycenter).norm() > 1e-6;
    const bool resized = std::abs(extent - model.extent) > 1e-6;
    if ((moved || resized) && warnings)
        warnings->push_back("image '" + model.image_id +
                            "': stored barycenter/extent differ from the mask estimate; using the mask");
    model.barycenter = barycenter;
    model.extent = extent;
    return model;
}

std::vector<OrganoidModel> load_models(const DatasetManifest& m, std::vector<std::string>* warnings) {
    std::vector<OrganoidModel> models;
    models.reserve(m.images.size());
    for (const auto& img : m.images) {
        if (!img.keypoints_file)
            throw ValidationError("image '" + img.image_id + "' has no key-point file");
        auto model = model_from_json(read_json(m.resolve(*img.keypoints_file)));
        if (model.image_id != img.image_id)
            throw ValidationError("key-point file of '" + img.image_id + "' carries id '" +
                                  model.image_id + "'");
        if (img.mask_file)
            model = refine_with_mask(std::move(model),
                                     mask_from_json(read_json(m.resolve(*img.mask_file))), warnings);
        validate(model);
        models.push_back(std::move(model));
    }
    return models;
}

std::map<std::string, hist::ColorHistogram> load_histograms(const DatasetManifest& m) {
    std::map<std::string, hist::ColorHistogram> out;
    for (const auto& img : m.images) {
        if (!img.histogram_file)
            throw ValidationError("image '" + img.image_id + "' has no histogram file");
        out.emplace(img.image_id, histogram_from_json(read_json(m.resolve(*img.histogram_file))));
    }
    return out;
}

Partition truth_partition(const DatasetManifest& m) {
    if (!m.labeled())
        throw ValidationError("manifest '" + m.name + "' has no cluster labels");
    std::map<std::string, std::vector<std::string>> by_label;
    for (const auto& img : m.images)
        by_label[*img.cluster_label].push_back(img.image_id);
    std::vector<std::vector<std::string>> clusters;
    for (auto& [label, ids] : by_label)
        clusters.push_back(std::move(ids));
    return Partition(std::move(clusters));
}

} // namespace organoid::io
