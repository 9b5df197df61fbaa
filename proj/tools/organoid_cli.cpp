// Command-line front end: cost providers, clustering, evaluation and learning.

#include "organoid/clustering.hpp"
#include "organoid/error.hpp"
#include "organoid/histogram.hpp"
#include "organoid/io.hpp"
#include "organoid/learn.hpp"
#include "organoid/parallel.hpp"
#include "organoid/pipeline.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using namespace organoid;
namespace fs = std::filesystem;
using io::json;

namespace {

/// Reads a JSON config file. Top-level keys are option names of the main app;
/// nested objects named after a subcommand hold that subcommand's options.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
        json out;
        collect(app, default_also, out);
        return out.dump(2);
    }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        json j;
        try {
            input >> j;
        } catch (const json::exception& e) {
            throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
        }
        if (!j.is_object())
            throw CLI::ConversionError("config file must hold a JSON object");
        std::vector<CLI::ConfigItem> items;
        flatten(j, "", {}, items);
        return items;
    }

private:
    static void collect(const CLI::App* app, bool default_also, json& out) {
        for (const CLI::Option* opt : app->get_options({})) {
            if (opt->get_lnames().empty() || !opt->get_configurable())
                continue;
            const std::string name = opt->get_lnames().front();
            if (opt->count() > 0)
                out[name] = opt->as<std::vector<std::string>>().size() == 1
                                 ? json(opt->as<std::string>())
                                 : json(opt->as<std::vector<std::string>>());
            else if (default_also && !opt->get_default_str().empty())
                out[name] = opt->get_default_str();
        }
        for (const CLI::App* sub : app->get_subcommands({})) {
            json nested;
            collect(sub, default_also, nested);
            if (!nested.empty())
                out[sub->get_name()] = nested;
        }
    }

    static std::string scalar(const json& v, const std::string& name) {
        if (v.is_boolean())
            return v.get<bool>() ? "true" : "false";
        if (v.is_number())
            return v.dump();
        if (v.is_string())
            return v.get<std::string>();
        throw CLI::ConversionError("config value '" + name + "' must be a scalar or a list of scalars");
    }

    static void flatten(const json& j, const std::string& name, const std::vector<std::string>& parents,
                        std::vector<CLI::ConfigItem>& out) {
        if (j.is_object()) {
            auto nested = parents;
            if (!name.empty())
                nested.push_back(name);
            for (auto it = j.begin(); it != j.end(); ++it)
                flatten(*it, it.key(), nested, out);
            return;
        }
        CLI::ConfigItem item;
        item.name = name;
        item.parents = parents;
        if (j.is_array())
            for (const auto& v : j)
                item.inputs.push_back(scalar(v, name));
        else
            item.inputs.push_back(scalar(j, name));
        out.push_back(std::move(item));
    }
};

struct ParamFlags {
    std::string file;
    std::optional<double> delta, delta_radius, delta_angle, theta, lambda, cut;

    void attach(CLI::App* app) {
        app->add_option("--params", file, "Parameter file (a learned-parameter or threshold file)");
        app->add_option("--delta", delta, "Color threshold");
        app->add_option("--delta-radius", delta_radius, "Relative-radius threshold");
        app->add_option("--delta-angle", delta_angle, "Angle threshold");
        app->add_option("--theta", theta, "Color vs. radius mix, in (0,1)");
        app->add_option("--lambda", lambda, "Unary vs. pairwise weight, in (0,1)");
        app->add_option("--cut", cut, "Cut threshold, in [0,1]");
    }

    pqap::PqapParams resolve() const {
        pqap::PqapParams p;
        if (!file.empty()) {
            const json j = io::read_json(file);
            p = io::params_from_json(j.contains("params") ? j.at("params") : j);
        }
        if (delta) p.color_threshold = *delta;
        if (delta_radius) p.radius_threshold = *delta_radius;
        if (delta_angle) p.angle_threshold = *delta_angle;
        if (theta) p.unary_mix = *theta;
        if (lambda) p.pairwise_weight = *lambda;
        if (cut) p.cut_threshold = *cut;
        p.validate();
        return p;
    }
};

struct SolverFlags {
    int rotation_steps = 75;
    int candidate_divisor = 10;

    void attach(CLI::App* app) {
        app->add_option("--rotation-steps", rotation_steps, "Number of grid rotation angles")
            ->capture_default_str();
        app->add_option("--candidate-divisor", candidate_divisor,
                        "Candidates per source point = max(1, |target| / divisor)")
            ->capture_default_str();
    }

    pqap::SolverConfig resolve() const { return {rotation_steps, candidate_divisor}; }
};

struct ClusterFlags {
    bool heuristic = false;
    std::size_t exact_limit = cc::ExactConfig{}.max_size;

    void attach(CLI::App* app) {
        auto* exact = app->add_flag("--exact", "Solve exactly by branch-and-bound (default)");
        auto* heur = app->add_flag("--heuristic", heuristic, "Greedy contraction plus local search");
        exact->excludes(heur);
        app->add_option("--exact-limit", exact_limit, "Largest instance the exact solver accepts")
            ->capture_default_str();
    }

    pipeline::SolverChoice choice() const {
        return heuristic ? pipeline::SolverChoice::heuristic : pipeline::SolverChoice::exact;
    }
    cc::ExactConfig exact() const { return {exact_limit}; }
};

Partition truth_from(const std::string& manifest, const std::string& truth_file) {
    if (!truth_file.empty())
        return io::clustering_from_json(io::read_json(truth_file)).partition;
    if (manifest.empty())
        throw ValidationError("ground truth needs --manifest or --truth");
    return io::truth_partition(io::load_manifest(manifest));
}

void print_scores(const std::string& label, const io::MetricsReport& r) {
    std::cout << label << ": RI=" << r.scores.rand_index;
    if (r.scores.f1_joins)
        std::cout << " F1J=" << *r.scores.f1_joins;
    if (r.vi)
        std::cout << " VI=" << r.vi->vi;
    std::cout << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Clustering of organoid images by partial quadratic assignment"};
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON config file; flags given on the command line take precedence");
    app.require_subcommand(1);

    unsigned threads = default_thread_count();
    app.add_option("--threads", threads, "Worker threads (default: ORGANOID_THREADS or all cores)");

    // model
    auto* model_cmd = app.add_subcommand("model", "Recompute barycenter and extent from segment masks");
    std::string model_keypoints, model_mask, model_out, model_manifest, model_out_dir;
    auto* mk = model_cmd->add_option("--keypoints", model_keypoints, "Key-point file");
    model_cmd->add_option("--mask", model_mask, "Segment mask file")->needs(mk);
    model_cmd->add_option("--out", model_out, "Refined key-point file")->needs(mk);
    auto* mm = model_cmd->add_option("--manifest", model_manifest, "Refine every image with a mask");
    model_cmd->add_option("--out-dir", model_out_dir, "Directory for refined files and manifest")->needs(mm);
    mk->excludes(mm);

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "Generate a planted-partition synthetic dataset");
    pipeline::SyntheticSpec spec;
    std::string synth_out;
    bool free_rotation = false;
    synth_cmd->add_option("--out", synth_out, "Output directory")->required();
    synth_cmd->add_option("--classes", spec.num_classes, "Number of classes")->capture_default_str();
    synth_cmd->add_option("--per-class", spec.images_per_class, "Images per class")->capture_default_str();
    synth_cmd->add_option("--points-min", spec.points_min, "Fewest key points per class")->capture_default_str();
    synth_cmd->add_option("--points-max", spec.points_max, "Most key points per class")->capture_default_str();
    synth_cmd->add_option("--color-noise", spec.color_noise_std, "Std-dev of color noise")->capture_default_str();
    synth_cmd->add_option("--position-noise", spec.position_noise_std,
                          "Std-dev of position noise as a fraction of the extent")
        ->capture_default_str();
    synth_cmd->add_flag("--free-rotation", free_rotation, "Draw rotations uniformly instead of on the grid");
    synth_cmd->add_option("--rotation-steps", spec.rotation_steps, "Rotation grid size")->capture_default_str();
    synth_cmd->add_option("--seed", spec.seed, "Random seed")->capture_default_str();

    // pqap-costs
    auto* pqap_cmd = app.add_subcommand("pqap-costs", "Pairwise costs from partial quadratic assignment");
    std::string pqap_manifest, pqap_out;
    ParamFlags pqap_params;
    SolverFlags pqap_solver;
    pqap_cmd->add_option("--manifest", pqap_manifest, "Dataset manifest")->required();
    pqap_cmd->add_option("--out", pqap_out, "Cost matrix file")->required();
    pqap_params.attach(pqap_cmd);
    pqap_solver.attach(pqap_cmd);

    // hellinger-costs
    auto* hell_cmd = app.add_subcommand("hellinger-costs", "Pairwise costs from color-histogram distances");
    std::string hell_manifest, hell_out, hell_params;
    std::optional<double> hell_cut;
    hell_cmd->add_option("--manifest", hell_manifest, "Dataset manifest")->required();
    hell_cmd->add_option("--out", hell_out, "Cost matrix file")->required();
    hell_cmd->add_option("--cut", hell_cut, "Cut threshold, in [0,1] (default 0.5)");
    hell_cmd->add_option("--params", hell_params, "Threshold file written by learn-threshold");

    // cluster
    auto* cluster_cmd = app.add_subcommand("cluster", "Correlation clustering of a cost matrix");
    std::string cluster_costs, cluster_out;
    ClusterFlags cluster_flags;
    cluster_cmd->add_option("--costs", cluster_costs, "Cost matrix file")->required();
    cluster_cmd->add_option("--out", cluster_out, "Partition file")->required();
    cluster_flags.attach(cluster_cmd);

    // classify
    auto* classify_cmd = app.add_subcommand("classify", "Independent join/cut decision per pair");
    std::string classify_costs, classify_out;
    classify_cmd->add_option("--costs", classify_costs, "Cost matrix file")->required();
    classify_cmd->add_option("--out", classify_out, "Pair labeling file")->required();

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "Score a partition or pair labeling against the truth");
    std::string eval_manifest, eval_truth, eval_partition, eval_labeling, eval_out;
    eval_cmd->add_option("--manifest", eval_manifest, "Labeled manifest holding the truth");
    eval_cmd->add_option("--truth", eval_truth, "Partition file holding the truth");
    auto* ep = eval_cmd->add_option("--partition", eval_partition, "Predicted partition file");
    auto* el = eval_cmd->add_option("--labeling", eval_labeling, "Predicted pair labeling file");
    ep->excludes(el);
    eval_cmd->add_option("--out", eval_out, "Metrics report file");

    // learn-anneal
    auto* anneal_cmd = app.add_subcommand("learn-anneal", "Learn assignment parameters by simulated annealing");
    std::string anneal_manifest, anneal_out;
    ParamFlags anneal_init;
    SolverFlags anneal_solver;
    learn::AnnealConfig anneal_cfg;
    anneal_cmd->add_option("--manifest", anneal_manifest, "Labeled training manifest")->required();
    anneal_cmd->add_option("--out", anneal_out, "Learned-parameter file")->required();
    anneal_cmd->add_option("--kappa", anneal_cfg.kappa, "Proposal std-dev")->capture_default_str();
    anneal_cmd->add_option("--t0", anneal_cfg.t0, "Initial temperature")->capture_default_str();
    anneal_cmd->add_option("--beta", anneal_cfg.beta, "Cooling factor")->capture_default_str();
    anneal_cmd->add_option("--iterations", anneal_cfg.t_max, "Number of proposals")->capture_default_str();
    anneal_cmd->add_option("--seed", anneal_cfg.seed, "Random seed")->capture_default_str();
    anneal_init.attach(anneal_cmd);
    anneal_solver.attach(anneal_cmd);

    // learn-threshold
    auto* thr_cmd = app.add_subcommand("learn-threshold", "Grid search of the histogram cut threshold");
    std::string thr_manifest, thr_out;
    thr_cmd->add_option("--manifest", thr_manifest, "Labeled training manifest")->required();
    thr_cmd->add_option("--out", thr_out, "Threshold file")->required();

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "Cluster shifted costs over a grid of offsets");
    std::string sweep_costs, sweep_manifest, sweep_truth, sweep_out;
    std::vector<double> chi_grid;
    ClusterFlags sweep_flags;
    sweep_cmd->add_option("--costs", sweep_costs, "Cost matrix file")->required();
    sweep_cmd->add_option("--manifest", sweep_manifest, "Labeled manifest holding the truth");
    sweep_cmd->add_option("--truth", sweep_truth, "Partition file holding the truth");
    sweep_cmd->add_option("--chi", chi_grid, "Offsets (default -1.0, -0.9, ..., 1.0)");
    sweep_cmd->add_option("--out", sweep_out, "Sweep table file")->required();
    sweep_flags.attach(sweep_cmd);

    // run
    auto* run_cmd = app.add_subcommand("run", "Costs, clustering and evaluation in one pass");
    std::string run_manifest, run_provider = "pqap", run_costs, run_out;
    bool run_evaluate = false;
    ParamFlags run_params;
    SolverFlags run_solver;
    ClusterFlags run_flags;
    run_cmd->add_option("--manifest", run_manifest, "Dataset manifest")->required();
    run_cmd->add_option("--provider", run_provider, "Cost provider")
        ->check(CLI::IsMember({"pqap", "hellinger", "external"}))
        ->capture_default_str();
    run_cmd->add_option("--costs", run_costs, "Cost matrix file for the external provider");
    run_cmd->add_option("--out-dir", run_out, "Directory for costs, partition and metrics")->required();
    run_cmd->add_flag("--evaluate", run_evaluate, "Score against the manifest's labels");
    run_params.attach(run_cmd);
    run_solver.attach(run_cmd);
    run_flags.attach(run_cmd);

    try {
        app.parse(argc, argv);
        if (threads == 0)
            throw ValidationError("--threads must be positive");

        if (model_cmd->parsed()) {
            if (!model_keypoints.empty()) {
                if (model_mask.empty() || model_out.empty())
                    throw ValidationError("--keypoints needs --mask and --out");
                std::vector<std::string> warnings;
                const auto m = io::refine_with_mask(io::model_from_json(io::read_json(model_keypoints)),
                                                    io::mask_from_json(io::read_json(model_mask)), &warnings);
                for (const auto& w : warnings)
                    std::cerr << "warning: " << w << '\n';
                io::write_json(model_out, io::to_json(m));
                std::cout << m.image_id << ": barycenter (" << m.barycenter.x << ", " << m.barycenter.y
                          << "), extent " << m.extent << '\n';
            } else if (!model_manifest.empty()) {
                if (model_out_dir.empty())
                    throw ValidationError("--manifest needs --out-dir");
                auto man = io::load_manifest(model_manifest);
                std::vector<std::string> warnings;
                const auto models = io::load_models(man, &warnings);
                for (const auto& w : warnings)
                    std::cerr << "warning: " << w << '\n';
                const fs::path out_dir = model_out_dir;
                io::DatasetManifest refined = man;
                refined.base_dir = out_dir;
                for (std::size_t i = 0; i < models.size(); ++i) {
                    const fs::path rel = fs::path("keypoints") / (models[i].image_id + ".json");
                    io::write_json(out_dir / rel, io::to_json(models[i]));
                    refined.images[i].keypoints_file = rel;
                    refined.images[i].mask_file.reset();
                    for (auto* p : {&refined.images[i].histogram_file, &refined.images[i].image_file})
                        if (*p)
                            *p = fs::absolute(man.resolve(**p));
                }
                io::save_manifest(out_dir / "manifest.json", refined);
                std::cout << "refined " << models.size() << " models\n";
            } else {
                throw ValidationError("model needs --keypoints or --manifest");
            }
        } else if (synth_cmd->parsed()) {
            spec.rotation_on_grid = !free_rotation;
            const auto man = pipeline::generate_synthetic(spec, synth_out);
            std::cout << "wrote " << man.images.size() << " images to " << synth_out << '\n';
        } else if (pqap_cmd->parsed()) {
            const auto models = io::load_models(io::load_manifest(pqap_manifest));
            const auto q = pqap::pqap_cost_matrix(models, pqap_params.resolve(), pqap_solver.resolve(), threads);
            io::write_json(pqap_out, io::to_json(q));
            std::cout << "wrote " << q.size() << " x " << q.size() << " costs to " << pqap_out << '\n';
        } else if (hell_cmd->parsed()) {
            double cut = 0.5;
            if (!hell_params.empty())
                cut = io::read_json(hell_params).at("cut_threshold").get<double>();
            if (hell_cut)
                cut = *hell_cut;
            if (!(cut >= 0.0 && cut <= 1.0))
                throw ValidationError("cut threshold must lie in [0,1]");
            const auto q = hist::hellinger_cost_matrix(io::load_histograms(io::load_manifest(hell_manifest)), cut);
            io::write_json(hell_out, io::to_json(q));
            std::cout << "wrote " << q.size() << " x " << q.size() << " costs to " << hell_out << '\n';
        } else if (cluster_cmd->parsed()) {
            const auto q = io::cost_matrix_from_json(io::read_json(cluster_costs));
            const auto r = pipeline::solve(q, cluster_flags.choice(), cluster_flags.exact());
            io::write_json(cluster_out, io::to_json(r));
            std::cout << r.partition.cluster_count() << " clusters, objective " << r.objective << '\n';
        } else if (classify_cmd->parsed()) {
            const auto q = io::cost_matrix_from_json(io::read_json(classify_costs));
            const auto l = learn::classify_pairs(q);
            io::write_json(classify_out, io::to_json(l));
            std::size_t joins = 0;
            for (auto j : l.join)
                joins += j;
            std::cout << joins << " of " << l.join.size() << " pairs joined\n";
        } else if (eval_cmd->parsed()) {
            const auto truth = truth_from(eval_manifest, eval_truth);
            io::MetricsReport r;
            if (!eval_partition.empty())
                r = pipeline::evaluate_partition(truth,
                                                 io::clustering_from_json(io::read_json(eval_partition)).partition);
            else if (!eval_labeling.empty())
                r = pipeline::evaluate_labeling(truth, io::labeling_from_json(io::read_json(eval_labeling)));
            else
                throw ValidationError("evaluate needs --partition or --labeling");
            if (!eval_out.empty())
                io::write_json(eval_out, io::to_json(r));
            print_scores("metrics", r);
        } else if (anneal_cmd->parsed()) {
            const auto man = io::load_manifest(anneal_manifest);
            const learn::LabeledDataset data{io::load_models(man), io::truth_partition(man)};
            const auto r = learn::anneal_pqap(data, anneal_init.resolve(), anneal_cfg, anneal_solver.resolve(),
                                              threads);
            io::write_json(anneal_out, io::to_json(r));
            std::cout << "best F1 " << r.best_f1 << " (initial " << r.trace.front().current_f1 << ")\n";
        } else if (thr_cmd->parsed()) {
            const auto man = io::load_manifest(thr_manifest);
            const auto r = hist::grid_search_threshold(io::load_histograms(man), io::truth_partition(man));
            io::write_json(thr_out, json{{"cut_threshold", r.cut_threshold}, {"f1", r.f1}});
            std::cout << "cut threshold " << r.cut_threshold << ", F1 " << r.f1 << '\n';
        } else if (sweep_cmd->parsed()) {
            if (chi_grid.empty())
                for (int i = -10; i <= 10; ++i)
                    chi_grid.push_back(i / 10.0);
            const auto q = io::cost_matrix_from_json(io::read_json(sweep_costs));
            const auto rows = pipeline::shift_sweep(q, truth_from(sweep_manifest, sweep_truth), chi_grid,
                                                    sweep_flags.choice(), sweep_flags.exact());
            io::write_json(sweep_out, pipeline::to_json(rows));
            for (const auto& row : rows)
                std::cout << "chi " << row.chi << ": " << row.clustering.partition.cluster_count()
                          << " clusters, VI " << row.vi.vi << '\n';
        } else if (run_cmd->parsed()) {
            pipeline::PipelineOptions opt;
            opt.provider = run_provider == "pqap"        ? pipeline::CostProvider::pqap
                           : run_provider == "hellinger" ? pipeline::CostProvider::hellinger
                                                         : pipeline::CostProvider::external;
            if (!run_costs.empty())
                opt.external_costs = fs::path(run_costs);
            opt.solver = run_flags.choice();
            opt.exact = run_flags.exact();
            opt.params = run_params.resolve();
            opt.solver_config = run_solver.resolve();
            opt.evaluate = run_evaluate;
            opt.out_dir = fs::path(run_out);
            opt.threads = threads;
            const auto r = pipeline::run_pipeline(io::load_manifest(run_manifest), opt);
            std::cout << r.clustering.partition.cluster_count() << " clusters, objective "
                      << r.clustering.objective << '\n';
            if (r.classification_metrics)
                print_scores("classification", *r.classification_metrics);
            if (r.clustering_metrics)
                print_scores("clustering", *r.clustering_metrics);
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const SolverSizeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
