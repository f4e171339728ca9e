// Command-line driver: error-gated training runs, toy-task surface and
// trajectory exports, and coreset extraction.

#include "lazylearn/errors.hpp"
#include "lazylearn/hash.hpp"
#include "lazylearn/idx.hpp"
#include "lazylearn/landscape.hpp"
#include "lazylearn/metrics_io.hpp"
#include "lazylearn/model.hpp"
#include "lazylearn/toy.hpp"
#include "lazylearn/trainer.hpp"
#include "lazylearn/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lazylearn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::mutex g_stderr_mutex;

void progress(bool quiet, const std::string& tag, const MetricsRecord& rec) {
    if (quiet) {
        return;
    }
    std::lock_guard<std::mutex> lock(g_stderr_mutex);
    std::fprintf(stderr, "[%s] samples=%lld epoch=%d test_acc=%.4f test_loss=%.5f updates=%lld\n",
                 tag.c_str(), static_cast<long long>(rec.samples_seen), rec.epoch,
                 rec.test_accuracy, rec.test_loss, static_cast<long long>(rec.update_count));
}

struct DatasetFingerprint {
    std::string role;
    std::string source; // file path or synthetic descriptor
    std::string hash;
};

struct ManifestBuilder {
    std::string command;
    json config = json::object();
    std::vector<DatasetFingerprint> datasets;
    std::vector<std::string> artifacts;
    std::string status = "completed";

    void add_file(const std::string& role, const std::string& path) {
        datasets.push_back({role, path, to_hex(fnv1a64_file(path))});
    }
    void add_synthetic(const std::string& role, const std::string& descriptor) {
        datasets.push_back(
            {role, descriptor, to_hex(fnv1a64(descriptor.data(), descriptor.size()))});
    }

    void write(const fs::path& path) const {
        json doc;
        doc["engine_version"] = kVersion;
        doc["command"] = command;
        doc["config"] = config;
        json ds = json::array();
        for (const auto& d : datasets) {
            ds.push_back({{"role", d.role}, {"source", d.source}, {"fnv1a64", d.hash}});
        }
        doc["datasets"] = ds;
        doc["artifacts"] = artifacts;
        doc["status"] = status;
        std::ofstream out(path, std::ios::trunc);
        if (!out) {
            throw io_error("cannot open " + path.string() + " for writing");
        }
        out << doc.dump(2) << '\n';
    }
};

json config_to_json(const TrainConfig& cfg, const std::string& dataset) {
    return json{
        {"dataset", dataset},
        {"rule", to_string(cfg.rule)},
        {"learning_rate", cfg.learning_rate},
        {"epochs", cfg.epochs},
        {"eval_every", cfg.eval_every},
        {"stop_test_accuracy",
         cfg.stop_test_accuracy ? json(*cfg.stop_test_accuracy) : json(nullptr)},
        {"seed", cfg.seed},
        {"hidden_dim", cfg.hidden_dim},
        {"remember_preset_all", cfg.remember_preset_all},
    };
}

// Shared flags describing the synthetic two-cloud task.
struct ToyFlags {
    std::uint64_t seed = 7;
    std::int64_t n_per_class = 100;
    double radius = 1.2;

    ToyTaskSpec spec() const {
        ToyTaskSpec s;
        s.seed = seed;
        s.n_per_class = n_per_class;
        s.radius = radius;
        return s;
    }
    std::string descriptor(std::uint64_t seed_override) const {
        return "two-clouds centers=(-2,0)/(2,0) radius=" + std::to_string(radius) +
               " n_per_class=" + std::to_string(n_per_class) +
               " seed=" + std::to_string(seed_override);
    }
    void attach(CLI::App* cmd) {
        cmd->add_option("--toy-seed", seed, "Seed for the synthetic two-cloud task");
        cmd->add_option("--toy-n", n_per_class, "Points per class in the toy task");
        cmd->add_option("--toy-radius", radius, "Disc radius of the toy task");
    }
};

struct DataPathFlags {
    std::string data_dir;
    std::string train_images, train_labels, test_images, test_labels;
    bool no_transpose = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--data-dir", data_dir,
                        "Directory holding the standard IDX files (.gz accepted)");
        cmd->add_option("--train-images", train_images, "Training images IDX file");
        cmd->add_option("--train-labels", train_labels, "Training labels IDX file");
        cmd->add_option("--test-images", test_images, "Test images IDX file");
        cmd->add_option("--test-labels", test_labels, "Test labels IDX file");
        cmd->add_flag("--no-transpose", no_transpose,
                      "Do not transpose images (emnist files store them transposed)");
    }
};

std::string find_idx_file(const std::string& dir, const std::string& base) {
    const fs::path plain = fs::path(dir) / base;
    if (fs::exists(plain)) {
        return plain.string();
    }
    const fs::path gz = fs::path(dir) / (base + ".gz");
    if (fs::exists(gz)) {
        return gz.string();
    }
    throw io_error("dataset file not found: " + plain.string() + "[.gz]");
}

struct LoadedPair {
    Dataset train;
    Dataset test;
    std::vector<DatasetFingerprint> fingerprints;
};

LoadedPair load_image_dataset(const std::string& dataset, const DataPathFlags& paths) {
    std::string tri = paths.train_images;
    std::string trl = paths.train_labels;
    std::string tei = paths.test_images;
    std::string tel = paths.test_labels;
    if (tri.empty() || trl.empty() || tei.empty() || tel.empty()) {
        if (paths.data_dir.empty()) {
            throw invalid_input("dataset " + dataset +
                                " needs --data-dir or the four explicit IDX path flags");
        }
        if (dataset == "mnist") {
            tri = tri.empty() ? find_idx_file(paths.data_dir, "train-images-idx3-ubyte") : tri;
            trl = trl.empty() ? find_idx_file(paths.data_dir, "train-labels-idx1-ubyte") : trl;
            tei = tei.empty() ? find_idx_file(paths.data_dir, "t10k-images-idx3-ubyte") : tei;
            tel = tel.empty() ? find_idx_file(paths.data_dir, "t10k-labels-idx1-ubyte") : tel;
        } else {
            tri = tri.empty() ? find_idx_file(paths.data_dir, "emnist-digits-train-images-idx3-ubyte")
                              : tri;
            trl = trl.empty() ? find_idx_file(paths.data_dir, "emnist-digits-train-labels-idx1-ubyte")
                              : trl;
            tei = tei.empty() ? find_idx_file(paths.data_dir, "emnist-digits-test-images-idx3-ubyte")
                              : tei;
            tel = tel.empty() ? find_idx_file(paths.data_dir, "emnist-digits-test-labels-idx1-ubyte")
                              : tel;
        }
    }
    const bool transpose = dataset == "emnist" && !paths.no_transpose;
    LoadedPair out;
    out.train = load_idx(tri, trl, transpose);
    out.test = load_idx(tei, tel, transpose);
    out.fingerprints = {
        {"train-images", tri, to_hex(fnv1a64_file(tri))},
        {"train-labels", trl, to_hex(fnv1a64_file(trl))},
        {"test-images", tei, to_hex(fnv1a64_file(tei))},
        {"test-labels", tel, to_hex(fnv1a64_file(tel))},
    };
    return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text, std::uint64_t fallback) {
    if (text.empty()) {
        return {fallback};
    }
    std::vector<std::uint64_t> seeds;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t comma = text.find(',', pos);
        const std::string tok = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
        if (!tok.empty()) {
            seeds.push_back(std::stoull(tok));
        }
        if (comma == std::string::npos) {
            break;
        }
        pos = comma + 1;
    }
    if (seeds.empty()) {
        throw invalid_input("--seeds: no seeds parsed from '" + text + "'");
    }
    return seeds;
}

bool parse_init_w(const std::string& text, Eigen::Vector2d& out) {
    const std::size_t comma = text.find(',');
    if (comma == std::string::npos) {
        return false;
    }
    try {
        out(0) = std::stod(text.substr(0, comma));
        out(1) = std::stod(text.substr(comma + 1));
    } catch (const std::exception&) {
        return false;
    }
    return true;
}

// ---------------------------------------------------------------- train

struct TrainFlags {
    std::string rule = "backprop";
    std::string dataset;
    int hidden = 100;
    double lr = -1.0;       // resolved per dataset
    int epochs = 50;
    std::int64_t eval_every = -1; // resolved per dataset
    double stop_acc = -2.0;       // -2: unset, negative: disabled
    std::uint64_t seed = 1;
    std::string seeds_list;
    unsigned jobs = 1;
    std::string out_dir = "runs";
    std::string init_w;
    int preset = 0; // 1..3 for toy starting points
    bool remember_all = false;
    bool quiet = false;
    ToyFlags toy;
    DataPathFlags paths;
};

TrainConfig resolve_config(const TrainFlags& flags, std::int64_t train_size,
                           std::uint64_t seed) {
    TrainConfig cfg;
    cfg.rule = gate_kind_from_string(flags.rule);
    const bool is_toy = flags.dataset == "toy";
    cfg.learning_rate = flags.lr > 0.0 ? flags.lr : (is_toy ? 0.001 : 0.01);
    cfg.epochs = flags.epochs;
    if (flags.eval_every > 0) {
        cfg.eval_every = flags.eval_every;
    } else if (is_toy) {
        cfg.eval_every = train_size;
    } else {
        cfg.eval_every = flags.dataset == "emnist" ? 60000 : 5000;
    }
    if (flags.stop_acc > -1.5) {
        if (flags.stop_acc > 0.0) {
            cfg.stop_test_accuracy = flags.stop_acc;
        }
    } else if (cfg.rule == GateKind::pure_lazy) {
        cfg.stop_test_accuracy = 0.975; // default cut-off for the pure rule
    }
    cfg.seed = seed;
    cfg.hidden_dim = flags.hidden;
    cfg.remember_preset_all = flags.remember_all;
    cfg.validate();
    return cfg;
}

int run_one_train(const TrainFlags& flags, const Dataset& train, const Dataset& test,
                  const std::vector<DatasetFingerprint>& fingerprints, std::uint64_t seed) {
    const TrainConfig cfg = resolve_config(flags, train.size(), seed);
    const std::string run_name = flags.dataset + "-" + to_string(cfg.rule) + "-h" +
                                 std::to_string(cfg.hidden_dim) + "-s" + std::to_string(seed);
    const fs::path dir = fs::path(flags.out_dir) / run_name;
    fs::create_directories(dir);

    ManifestBuilder manifest;
    manifest.command = "train";
    manifest.config = config_to_json(cfg, flags.dataset);
    manifest.datasets = fingerprints;

    MetricsCsvWriter csv((dir / "metrics.csv").string());
    MetricsJsonlWriter jsonl((dir / "metrics.jsonl").string());
    const MetricsSink sink = [&](const MetricsRecord& rec) {
        csv.write(rec);
        jsonl.write(rec);
        progress(flags.quiet, run_name, rec);
    };

    RunResult result;
    if (flags.dataset == "toy") {
        Eigen::Vector2d w0(0.0, 0.0);
        if (!flags.init_w.empty()) {
            if (!parse_init_w(flags.init_w, w0)) {
                throw invalid_input("--init-w expects 'w1,w2'");
            }
        } else if (flags.preset >= 1 && flags.preset <= 3) {
            w0 = preset_initial_conditions()[static_cast<std::size_t>(flags.preset - 1)];
        }
        result = run_toy_experiment(cfg, train, test, w0, sink);
        LinearToyModel final_model;
        final_model.w = result.final_params;
        save_model_json(final_model, (dir / "model.json").string());
    } else {
        result = run_mlp_experiment(cfg, train, test, sink);
        MlpModel final_model = init_mlp(train.dims(), cfg.hidden_dim, train.n_classes, cfg.seed);
        // Rehydrate the final parameters from the flat vector.
        Eigen::Index k = 0;
        for (Eigen::Index r = 0; r < final_model.w1.rows(); ++r) {
            for (Eigen::Index c = 0; c < final_model.w1.cols(); ++c) {
                final_model.w1(r, c) = result.final_params(k++);
            }
        }
        for (Eigen::Index i = 0; i < final_model.b1.size(); ++i) {
            final_model.b1(i) = result.final_params(k++);
        }
        for (Eigen::Index r = 0; r < final_model.w2.rows(); ++r) {
            for (Eigen::Index c = 0; c < final_model.w2.cols(); ++c) {
                final_model.w2(r, c) = result.final_params(k++);
            }
        }
        for (Eigen::Index i = 0; i < final_model.b2.size(); ++i) {
            final_model.b2(i) = result.final_params(k++);
        }
        save_model_json(final_model, (dir / "model.json").string());
    }

    write_summary_json(result.summary, cfg, (dir / "summary.json").string());
    write_per_sample_energy_csv(result.per_sample_energy, train.sample_ids,
                                (dir / "per_sample_energy.csv").string());
    manifest.artifacts = {
        (dir / "metrics.csv").string(),    (dir / "metrics.jsonl").string(),
        (dir / "summary.json").string(),   (dir / "per_sample_energy.csv").string(),
        (dir / "model.json").string(),
    };
    if (cfg.rule == GateKind::lazy) {
        write_coreset_ids_json(result.summary.coreset_ids, (dir / "coreset_ids.json").string());
        manifest.artifacts.push_back((dir / "coreset_ids.json").string());
    }
    manifest.status = to_string(result.summary.status);
    manifest.write(dir / "manifest.json");

    if (!flags.quiet) {
        std::lock_guard<std::mutex> lock(g_stderr_mutex);
        std::fprintf(stderr, "[%s] %s: steps=%lld updates=%lld m=%.6g -> %s\n", run_name.c_str(),
                     to_string(result.summary.status),
                     static_cast<long long>(result.summary.step_count),
                     static_cast<long long>(result.summary.update_count),
                     result.summary.efficiency.m, dir.string().c_str());
    }
    return result.summary.status == RunStatus::failed ? kExitRuntime : kExitOk;
}

int cmd_train(const TrainFlags& flags) {
    Dataset train;
    Dataset test;
    std::vector<DatasetFingerprint> fingerprints;
    if (flags.dataset == "toy") {
        ToyTaskSpec spec = flags.toy.spec();
        train = make_two_clouds(spec);
        ToyTaskSpec test_spec = spec;
        test_spec.seed = spec.seed + 1; // independent clouds, same geometry
        test = make_two_clouds(test_spec);
        fingerprints = {
            {"train", flags.toy.descriptor(spec.seed),
             to_hex(fnv1a64(flags.toy.descriptor(spec.seed).data(),
                            flags.toy.descriptor(spec.seed).size()))},
            {"test", flags.toy.descriptor(test_spec.seed),
             to_hex(fnv1a64(flags.toy.descriptor(test_spec.seed).data(),
                            flags.toy.descriptor(test_spec.seed).size()))},
        };
    } else {
        LoadedPair pair = load_image_dataset(flags.dataset, flags.paths);
        train = std::move(pair.train);
        test = std::move(pair.test);
        fingerprints = std::move(pair.fingerprints);
    }

    const auto seeds = parse_seed_list(flags.seeds_list, flags.seed);
    if (seeds.size() == 1 || flags.jobs <= 1) {
        int rc = kExitOk;
        for (const auto seed : seeds) {
            rc = std::max(rc, run_one_train(flags, train, test, fingerprints, seed));
        }
        return rc;
    }

    // Independent seeds in worker threads; each run owns its trainer,
    // ledger and output directory.
    std::atomic<std::size_t> next{0};
    std::atomic<int> rc{kExitOk};
    const unsigned workers = std::min<unsigned>(flags.jobs, static_cast<unsigned>(seeds.size()));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < seeds.size(); i = next.fetch_add(1)) {
                try {
                    const int one = run_one_train(flags, train, test, fingerprints, seeds[i]);
                    int expected = rc.load();
                    while (expected < one && !rc.compare_exchange_weak(expected, one)) {
                    }
                } catch (const std::exception& e) {
                    std::lock_guard<std::mutex> lock(g_stderr_mutex);
                    std::fprintf(stderr, "error: seed %llu: %s\n",
                                 static_cast<unsigned long long>(seeds[i]), e.what());
                    rc.store(kExitRuntime);
                }
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    return rc.load();
}

// ---------------------------------------------------------- surface/trace

struct SurfaceFlags {
    int res = 301;
    double w1_min = -3.0, w1_max = 3.0, w2_min = -3.0, w2_max = 3.0;
    std::string out_dir = "landscape";
    ToyFlags toy;
};

int cmd_surface(const SurfaceFlags& flags) {
    const Dataset data = make_two_clouds(flags.toy.spec());
    GridSpec spec;
    spec.w1 = {flags.w1_min, flags.w1_max, flags.res};
    spec.w2 = {flags.w2_min, flags.w2_max, flags.res};
    const SurfaceGrid grid = sample_surface(data, spec);

    fs::create_directories(flags.out_dir);
    const fs::path path = fs::path(flags.out_dir) / "surface.csv";
    write_surface_csv(grid, path.string());

    ManifestBuilder manifest;
    manifest.command = "surface";
    manifest.config = {{"res", flags.res},
                       {"w1", {flags.w1_min, flags.w1_max}},
                       {"w2", {flags.w2_min, flags.w2_max}}};
    manifest.add_synthetic("data", flags.toy.descriptor(flags.toy.seed));
    manifest.artifacts = {path.string()};
    manifest.write(fs::path(flags.out_dir) / "manifest.json");
    std::fprintf(stderr, "wrote %s (%d x %d grid)\n", path.string().c_str(), flags.res, flags.res);
    return kExitOk;
}

struct TraceFlags {
    std::string preset = "1"; // 1|2|3|all
    std::string rule = "backprop";
    std::string init_w;
    double lr = 0.001;
    int epochs = 50; // lets the pure rule settle on the terrace from every preset
    std::int64_t eval_every = -1;
    std::uint64_t seed = 1;
    std::string out_dir = "landscape";
    ToyFlags toy;
};

int cmd_trace(const TraceFlags& flags) {
    const Dataset data = make_two_clouds(flags.toy.spec());
    fs::create_directories(flags.out_dir);

    std::vector<int> presets;
    if (flags.preset == "all") {
        presets = {1, 2, 3};
    } else {
        const int p = std::stoi(flags.preset);
        if (p < 1 || p > 3) {
            throw invalid_input("--preset must be 1, 2, 3 or all");
        }
        presets = {p};
    }
    std::vector<GateKind> rules;
    if (flags.rule == "all") {
        rules = {GateKind::backprop, GateKind::lazy, GateKind::pure_lazy};
    } else {
        rules = {gate_kind_from_string(flags.rule)};
    }

    ManifestBuilder manifest;
    manifest.command = "trace";
    manifest.add_synthetic("data", flags.toy.descriptor(flags.toy.seed));
    manifest.config = {{"lr", flags.lr},
                       {"epochs", flags.epochs},
                       {"seed", flags.seed},
                       {"presets", presets.size()},
                       {"rules", rules.size()}};

    for (const int preset : presets) {
        Eigen::Vector2d w0;
        if (!flags.init_w.empty()) {
            if (!parse_init_w(flags.init_w, w0)) {
                throw invalid_input("--init-w expects 'w1,w2'");
            }
        } else {
            w0 = preset_initial_conditions()[static_cast<std::size_t>(preset - 1)];
        }
        for (const GateKind rule : rules) {
            TrainConfig cfg;
            cfg.rule = rule;
            cfg.learning_rate = flags.lr;
            cfg.epochs = flags.epochs;
            cfg.eval_every = flags.eval_every > 0 ? flags.eval_every : data.size();
            cfg.seed = flags.seed;

            Trajectory traj = trace_run(cfg, data, w0);
            traj.initial_condition_id = preset;
            const std::string stem = "trace-p" + std::to_string(preset) + "-" + to_string(rule);
            const fs::path traj_path = fs::path(flags.out_dir) / (stem + ".csv");
            const fs::path energy_path = fs::path(flags.out_dir) / (stem + "-energy.csv");
            const fs::path summary_path = fs::path(flags.out_dir) / (stem + "-summary.json");
            write_trajectory_csv(traj, traj_path.string());
            write_per_sample_energy_csv(traj.per_sample_energy, data.sample_ids,
                                        energy_path.string());
            write_summary_json(traj.run.summary, cfg, summary_path.string());
            manifest.artifacts.push_back(traj_path.string());
            manifest.artifacts.push_back(energy_path.string());
            manifest.artifacts.push_back(summary_path.string());
            std::fprintf(stderr, "trace p%d %s: steps=%lld m=%.6g -> %s\n", preset,
                         to_string(rule), static_cast<long long>(traj.run.summary.step_count),
                         traj.run.summary.efficiency.m, traj_path.string().c_str());
        }
    }
    manifest.write(fs::path(flags.out_dir) / "manifest.json");
    return kExitOk;
}

// ---------------------------------------------------------------- coreset

struct CoresetFlags {
    std::string summary_path;
    std::string out_dir = "coreset";
    std::string images, labels; // original training pair for re-export
    bool export_idx = false;
    bool transpose = false;
};

int cmd_coreset(const CoresetFlags& flags) {
    std::ifstream in(flags.summary_path);
    if (!in) {
        throw io_error("cannot open " + flags.summary_path);
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw format_error("invalid JSON in " + flags.summary_path + ": " + e.what());
    }
    if (doc.value("config", json::object()).value("rule", "") != "lazy") {
        throw invalid_input("coreset: summary does not come from a lazy run");
    }
    if (!doc.contains("remembered")) {
        throw invalid_input("coreset: summary carries no remembered-sample section");
    }
    const auto ids = doc["remembered"].value("sample_ids", std::vector<std::int64_t>{});

    fs::create_directories(flags.out_dir);
    const fs::path ids_path = fs::path(flags.out_dir) / "coreset_ids.json";
    write_coreset_ids_json(ids, ids_path.string());

    ManifestBuilder manifest;
    manifest.command = "coreset";
    manifest.config = {{"summary", flags.summary_path}, {"count", ids.size()}};
    manifest.artifacts = {ids_path.string()};

    if (flags.export_idx) {
        if (flags.images.empty() || flags.labels.empty()) {
            throw invalid_input("--export-idx needs --images and --labels of the original "
                                "training set");
        }
        const Dataset full = load_idx(flags.images, flags.labels, flags.transpose);
        const Dataset core = subset_rows(full, ids);
        const fs::path img_path = fs::path(flags.out_dir) / "coreset-images-idx3-ubyte";
        const fs::path lbl_path = fs::path(flags.out_dir) / "coreset-labels-idx1-ubyte";
        save_idx(core, img_path.string(), lbl_path.string());
        manifest.add_file("images", flags.images);
        manifest.add_file("labels", flags.labels);
        manifest.artifacts.push_back(img_path.string());
        manifest.artifacts.push_back(lbl_path.string());
        std::fprintf(stderr, "exported %lld coreset samples to %s\n",
                     static_cast<long long>(core.size()), flags.out_dir.c_str());
    }
    manifest.write(fs::path(flags.out_dir) / "manifest.json");
    std::fprintf(stderr, "coreset: %zu sample ids -> %s\n", ids.size(), ids_path.string().c_str());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Error-gated training engine and benchmark harness"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    TrainFlags train_flags;
    CLI::App* train = app.add_subcommand("train", "Run a gated SGD experiment");
    train->set_config("--config", "", "Flat key=value config file ('#' comments)");
    train->add_option("--rule", train_flags.rule, "backprop | pure-lazy | lazy")
        ->check(CLI::IsMember({"backprop", "pure-lazy", "lazy"}));
    train->add_option("--dataset", train_flags.dataset, "mnist | emnist | toy")
        ->required()
        ->check(CLI::IsMember({"mnist", "emnist", "toy"}));
    train->add_option("--hidden", train_flags.hidden, "Hidden units (image datasets)");
    train->add_option("--lr", train_flags.lr, "Learning rate (default 0.01, toy 0.001)");
    train->add_option("--epochs", train_flags.epochs, "Training epochs");
    train->add_option("--eval-every", train_flags.eval_every,
                      "Presented samples between metric rows");
    train->add_option("--stop-acc", train_flags.stop_acc,
                      "Stop once test accuracy reaches this (negative disables; "
                      "default 0.975 for pure-lazy)");
    train->add_option("--seed", train_flags.seed, "Run seed");
    train->add_option("--seeds", train_flags.seeds_list, "Comma-separated seed list");
    train->add_option("--jobs", train_flags.jobs, "Worker threads for --seeds");
    train->add_option("--out", train_flags.out_dir, "Output directory root");
    train->add_option("--init-w", train_flags.init_w, "Toy initial weights 'w1,w2'");
    train->add_option("--preset", train_flags.preset, "Toy preset starting point (1-3)");
    train->add_flag("--remember-all", train_flags.remember_all,
                    "Pre-set every remember flag of a lazy gate");
    train->add_flag("--quiet", train_flags.quiet, "Suppress progress output");
    train_flags.toy.attach(train);
    train_flags.paths.attach(train);

    SurfaceFlags surface_flags;
    CLI::App* surface = app.add_subcommand("surface", "Sample the toy loss/accuracy surfaces");
    surface->set_config("--config", "", "Flat key=value config file ('#' comments)");
    surface->add_option("--res", surface_flags.res, "Grid resolution per axis");
    surface->add_option("--w1-min", surface_flags.w1_min);
    surface->add_option("--w1-max", surface_flags.w1_max);
    surface->add_option("--w2-min", surface_flags.w2_min);
    surface->add_option("--w2-max", surface_flags.w2_max);
    surface->add_option("--out", surface_flags.out_dir, "Output directory");
    surface_flags.toy.attach(surface);

    TraceFlags trace_flags;
    CLI::App* trace = app.add_subcommand("trace", "Record toy weight trajectories");
    trace->set_config("--config", "", "Flat key=value config file ('#' comments)");
    trace->add_option("--preset", trace_flags.preset, "Starting point: 1, 2, 3 or all");
    trace->add_option("--rule", trace_flags.rule, "backprop | pure-lazy | lazy | all")
        ->check(CLI::IsMember({"backprop", "pure-lazy", "lazy", "all"}));
    trace->add_option("--rules", trace_flags.rule, "Alias of --rule");
    trace->add_option("--init-w", trace_flags.init_w, "Explicit initial weights 'w1,w2'");
    trace->add_option("--lr", trace_flags.lr, "Learning rate");
    trace->add_option("--epochs", trace_flags.epochs, "Training epochs");
    trace->add_option("--eval-every", trace_flags.eval_every, "Metric cadence");
    trace->add_option("--seed", trace_flags.seed, "Run seed");
    trace->add_option("--out", trace_flags.out_dir, "Output directory");
    trace_flags.toy.attach(trace);

    CoresetFlags coreset_flags;
    CLI::App* coreset = app.add_subcommand("coreset", "Export remembered samples of a lazy run");
    coreset->add_option("--summary", coreset_flags.summary_path, "summary.json of a lazy run")
        ->required();
    coreset->add_option("--out", coreset_flags.out_dir, "Output directory");
    coreset->add_flag("--export-idx", coreset_flags.export_idx,
                      "Also write the coreset as an IDX pair");
    coreset->add_option("--images", coreset_flags.images, "Original training images IDX file");
    coreset->add_option("--labels", coreset_flags.labels, "Original training labels IDX file");
    coreset->add_flag("--transpose", coreset_flags.transpose,
                      "Transpose images on re-export load (emnist sources)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (train->parsed()) {
            return cmd_train(train_flags);
        }
        if (surface->parsed()) {
            return cmd_surface(surface_flags);
        }
        if (trace->parsed()) {
            return cmd_trace(trace_flags);
        }
        if (coreset->parsed()) {
            return cmd_coreset(coreset_flags);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitRuntime;
    }
    return kExitUsage;
}
