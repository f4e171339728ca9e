#pragma once

#include "lazylearn/dataset.hpp"
#include "lazylearn/energy.hpp"
#include "lazylearn/gating.hpp"
#include "lazylearn/model.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace lazylearn {

struct TrainConfig {
    GateKind rule = GateKind::backprop;
    double learning_rate = 0.01; // 0.001 for the toy task
    int epochs = 50;
    std::int64_t eval_every = 5000; // presented samples between metric rows
    std::optional<double> stop_test_accuracy; // halt once reached (checked at evals)
    std::uint64_t seed = 1;
    int hidden_dim = 100;
    // Pre-set every remember flag of a lazy gate; such a run decides
    // identically to backprop on every step.
    bool remember_preset_all = false;

    void validate() const; // throws invalid_input
};

// One row of the periodic evaluation stream.
struct MetricsRecord {
    std::int64_t samples_seen = 0;
    int epoch = 0; // 0-based epoch of the most recently presented sample
    double train_loss = 0.0;
    double test_loss = 0.0;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    double m_total = 0.0;
    double m_min = 0.0;
    std::optional<double> inefficiency;
    std::int64_t update_count = 0;
    std::optional<double> remembered_fraction; // lazy runs only
};

enum class RunStatus { completed, stopped_at_target, failed };
const char* to_string(RunStatus status);

struct RunSummary {
    RunStatus status = RunStatus::completed;
    std::string diagnostic; // non-empty when failed
    std::int64_t step_count = 0;
    std::int64_t update_count = 0;
    EfficiencyReport efficiency;
    std::optional<MetricsRecord> final_record;
    std::optional<double> remembered_fraction;  // lazy only
    std::vector<std::int64_t> coreset_ids;      // lazy only
};

struct RunResult {
    std::vector<MetricsRecord> records;
    RunSummary summary;
    std::vector<double> per_sample_energy;
    Eigen::VectorXd final_params;
};

// Called with each metrics row as it is produced (incremental export).
using MetricsSink = std::function<void(const MetricsRecord&)>;

// Loss/accuracy over a full dataset. Pure; sweeps are chunk-parallel
// internally with a fixed chunk grid, so results do not depend on the
// thread count. Throws invalid_input on an empty dataset.
struct Evaluation {
    double loss = 0.0;
    double accuracy = 0.0;
};
Evaluation evaluate(const MlpModel& m, const Dataset& data);
Evaluation evaluate(const LinearToyModel& m, const Dataset& data);

// One presented sample: forward once, gate on the prediction, and when
// gated in, backpropagate from the cached activations and apply
// w <- w - lr g, charging the step's L1 cost to this sample.
// Returns true when an update occurred.
// Throws numeric_error when a non-finite value appears.
bool train_step(MlpModel& m, UpdateGate& gate, EnergyLedger& ledger, const Dataset& train,
                std::int64_t row, double lr);
bool train_step(LinearToyModel& m, UpdateGate& gate, EnergyLedger& ledger, const Dataset& train,
                std::int64_t row, double lr);

// Gated one-sample SGD over shuffled epochs with metrics every
// config.eval_every presented samples. Deterministic for fixed
// (config, datasets, initial model). A numeric abort keeps the partial
// stream and tags the summary failed.
RunResult run_mlp_experiment(const TrainConfig& config, const Dataset& train,
                             const Dataset& test, const MetricsSink& sink = {});

// As above but starting from a caller-supplied model (used to resume
// analysis runs from fixed weights).
RunResult run_mlp_experiment_from(const TrainConfig& config, const Dataset& train,
                                  const Dataset& test, MlpModel model,
                                  const MetricsSink& sink = {});

// Toy-model run. `observer`, when set, is called with the weight vector
// before the first presentation and after every presented sample.
using ToyObserver = std::function<void(const Eigen::Vector2d&)>;
RunResult run_toy_experiment(const TrainConfig& config, const Dataset& train,
                             const Dataset& test, const Eigen::Vector2d& initial_w,
                             const MetricsSink& sink = {}, const ToyObserver& observer = {});

} // namespace lazylearn
