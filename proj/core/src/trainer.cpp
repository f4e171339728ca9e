#include "lazylearn/trainer.hpp"

#include "lazylearn/errors.hpp"
#include "lazylearn/parallel.hpp"
#include "lazylearn/rng.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace lazylearn {
namespace {

constexpr std::int64_t kEvalChunk = 2048;

// Reused per-step buffers for the MLP path; one-sample SGD at image
// scale is allocation-sensitive.
struct MlpWorkspace {
    MlpActivations acts;
    Eigen::VectorXd target;   // one-hot scratch
    Eigen::VectorXd d_out;    // dL/d_output
    Eigen::VectorXd d_hidden; // dL/d_hidden_pre

    explicit MlpWorkspace(const MlpModel& m) {
        acts.hidden_pre.resize(m.hidden_dim());
        acts.hidden_post.resize(m.hidden_dim());
        acts.output.resize(m.out_dim());
        target = Eigen::VectorXd::Zero(m.out_dim());
        d_out.resize(m.out_dim());
        d_hidden.resize(m.hidden_dim());
    }
};

Eigen::Map<const Eigen::VectorXd> sample_vector(const Dataset& data, std::int64_t row) {
    return {data.features.row(static_cast<Eigen::Index>(row)).data(),
            static_cast<Eigen::Index>(data.dims())};
}

// One presented sample for the MLP. A single forward pass feeds both
// the gate decision and, when gated in, the backward pass. The update
// is applied as two rank-1 corrections; the step's L1 cost factorizes
// over the outer products, so it costs O(hidden + in) extra.
bool mlp_step(MlpModel& m, UpdateGate& gate, EnergyLedger& ledger, const Dataset& train,
              std::int64_t row, double lr, MlpWorkspace& ws) {
    if (row < 0 || row >= train.size()) {
        throw invalid_input("train_step: row out of range");
    }
    const auto x = sample_vector(train, row);
    forward_mlp_into(m, x, ws.acts);
    const int label = train.labels[static_cast<std::size_t>(row)];
    const int predicted = predict_from_output(ws.acts.output);
    const GateDecision decision = gate.decide(row, predicted, label);
    ledger.record_presentation();
    if (!decision.update) {
        return false;
    }

    const double k = static_cast<double>(m.out_dim());
    ws.target.setZero();
    ws.target(label) = 1.0;
    ws.d_out = (2.0 / k) * (ws.acts.output - ws.target);
    ws.d_hidden.noalias() = m.w2.transpose() * ws.d_out;
    for (Eigen::Index i = 0; i < ws.d_hidden.size(); ++i) {
        if (ws.acts.hidden_pre(i) <= 0.0) {
            ws.d_hidden(i) *= m.negative_slope;
        }
    }

    // sum_ij |a_i b_j| = sum|a| * sum|b| for the two outer products.
    const double delta_l1 =
        lr * (ws.d_hidden.lpNorm<1>() * x.lpNorm<1>() + ws.d_hidden.lpNorm<1>() +
              ws.d_out.lpNorm<1>() * ws.acts.hidden_post.lpNorm<1>() + ws.d_out.lpNorm<1>());
    if (!std::isfinite(delta_l1)) {
        throw numeric_error("train_step: non-finite gradient on sample " +
                            std::to_string(train.sample_ids[static_cast<std::size_t>(row)]));
    }

    m.w2.noalias() -= lr * (ws.d_out * ws.acts.hidden_post.transpose());
    m.b2.noalias() -= lr * ws.d_out;
    m.w1.noalias() -= lr * (ws.d_hidden * x.transpose());
    m.b1.noalias() -= lr * ws.d_hidden;
    ledger.record_update(row, delta_l1);
    return true;
}

bool toy_step(LinearToyModel& m, UpdateGate& gate, EnergyLedger& ledger, const Dataset& train,
              std::int64_t row, double lr) {
    if (row < 0 || row >= train.size()) {
        throw invalid_input("train_step: row out of range");
    }
    const Eigen::Vector2d x = train.features.row(static_cast<Eigen::Index>(row)).transpose();
    const double h = m.w.dot(x);
    const int label = train.labels[static_cast<std::size_t>(row)];
    const int predicted = h >= 0.0 ? 1 : 0;
    const GateDecision decision = gate.decide(row, predicted, label);
    ledger.record_presentation();
    if (!decision.update) {
        return false;
    }
    const double err = h - static_cast<double>(label);
    const Eigen::Vector2d grad = 2.0 * err * x;
    const Eigen::Vector2d w_next = m.w - lr * grad;
    // Two parameters: charge the realized weight motion, which keeps the
    // ledger bit-identical to trajectory L1 sums.
    const double delta_l1 = (w_next - m.w).lpNorm<1>();
    if (!std::isfinite(delta_l1)) { // leaves the model untouched
        throw numeric_error("train_step: non-finite gradient on sample " +
                            std::to_string(train.sample_ids[static_cast<std::size_t>(row)]));
    }
    m.w = w_next;
    ledger.record_update(row, delta_l1);
    return true;
}

struct ChunkStats {
    double loss_sum = 0.0;
    std::int64_t correct = 0;
};

Evaluation reduce_chunks(const std::vector<ChunkStats>& chunks, std::int64_t n) {
    double loss_sum = 0.0;
    std::int64_t correct = 0;
    for (const ChunkStats& c : chunks) { // fixed order: thread-count independent
        loss_sum += c.loss_sum;
        correct += c.correct;
    }
    Evaluation out;
    out.loss = loss_sum / static_cast<double>(n);
    out.accuracy = static_cast<double>(correct) / static_cast<double>(n);
    return out;
}

} // namespace

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw invalid_input("config: learning_rate must be positive");
    }
    if (epochs < 1) {
        throw invalid_input("config: epochs must be at least 1");
    }
    if (eval_every < 1) {
        throw invalid_input("config: eval_every must be at least 1");
    }
    if (stop_test_accuracy && !(*stop_test_accuracy > 0.0 && *stop_test_accuracy <= 1.0)) {
        throw invalid_input("config: stop_test_accuracy must be in (0, 1]");
    }
    if (hidden_dim < 1) {
        throw invalid_input("config: hidden_dim must be positive");
    }
    if (remember_preset_all && rule != GateKind::lazy) {
        throw invalid_input("config: remember_preset_all applies to the lazy rule only");
    }
}

const char* to_string(RunStatus status) {
    switch (status) {
    case RunStatus::completed:
        return "completed";
    case RunStatus::stopped_at_target:
        return "stopped_at_target";
    case RunStatus::failed:
        return "failed";
    }
    return "unknown";
}

Evaluation evaluate(const MlpModel& m, const Dataset& data) {
    const std::int64_t n = data.size();
    if (n == 0) {
        throw invalid_input("evaluate: empty dataset");
    }
    if (data.dims() != m.in_dim()) {
        throw shape_error("evaluate: dataset dims do not match the model");
    }
    const Eigen::Index out_dim = m.out_dim();
    const std::int64_t n_chunks = (n + kEvalChunk - 1) / kEvalChunk;
    std::vector<ChunkStats> chunks(static_cast<std::size_t>(n_chunks));

    parallel_chunks(n, kEvalChunk, [&](std::int64_t ci, std::int64_t begin, std::int64_t end) {
        const auto rows = static_cast<Eigen::Index>(end - begin);
        const auto block = data.features.middleRows(static_cast<Eigen::Index>(begin), rows);
        Eigen::MatrixXd hidden = (block * m.w1.transpose()).rowwise() + m.b1.transpose();
        hidden = hidden.unaryExpr([slope = m.negative_slope](double v) {
            return v > 0.0 ? v : slope * v;
        });
        const Eigen::MatrixXd output = (hidden * m.w2.transpose()).rowwise() + m.b2.transpose();

        ChunkStats stats;
        for (Eigen::Index r = 0; r < rows; ++r) {
            const int label = data.labels[static_cast<std::size_t>(begin + r)];
            double loss = 0.0;
            int best = 0;
            double best_value = output(r, 0);
            for (Eigen::Index j = 0; j < out_dim; ++j) {
                const double d = output(r, j) - (static_cast<int>(j) == label ? 1.0 : 0.0);
                loss += d * d;
                if (j > 0 && output(r, j) > best_value) {
                    best_value = output(r, j);
                    best = static_cast<int>(j);
                }
            }
            stats.loss_sum += loss / static_cast<double>(out_dim);
            stats.correct += best == label ? 1 : 0;
        }
        chunks[static_cast<std::size_t>(ci)] = stats;
    });
    return reduce_chunks(chunks, n);
}

Evaluation evaluate(const LinearToyModel& m, const Dataset& data) {
    const std::int64_t n = data.size();
    if (n == 0) {
        throw invalid_input("evaluate: empty dataset");
    }
    if (data.dims() != 2) {
        throw shape_error("evaluate: toy model needs 2-dimensional data");
    }
    double loss_sum = 0.0;
    std::int64_t correct = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        const double h = m.w.dot(data.features.row(static_cast<Eigen::Index>(i)).transpose());
        const int label = data.labels[static_cast<std::size_t>(i)];
        const double err = h - static_cast<double>(label);
        loss_sum += err * err;
        correct += (h >= 0.0 ? 1 : 0) == label ? 1 : 0;
    }
    Evaluation out;
    out.loss = loss_sum / static_cast<double>(n);
    out.accuracy = static_cast<double>(correct) / static_cast<double>(n);
    return out;
}

bool train_step(MlpModel& m, UpdateGate& gate, EnergyLedger& ledger, const Dataset& train,
                std::int64_t row, double lr) {
    MlpWorkspace ws(m);
    return mlp_step(m, gate, ledger, train, row, lr, ws);
}

bool train_step(LinearToyModel& m, UpdateGate& gate, EnergyLedger& ledger, const Dataset& train,
                std::int64_t row, double lr) {
    return toy_step(m, gate, ledger, train, row, lr);
}

namespace {

template <class Model, class StepFn>
RunResult run_loop(const TrainConfig& config, const Dataset& train, const Dataset& test,
                   Model model, StepFn&& step, const MetricsSink& sink,
                   const std::function<void(const Model&)>& observer) {
    config.validate();
    train.validate();
    test.validate();
    if (train.size() == 0) {
        throw invalid_input("run_experiment: empty training set");
    }
    if (train.n_classes != test.n_classes) {
        throw consistency_error("run_experiment: train has " + std::to_string(train.n_classes) +
                                " classes, test has " + std::to_string(test.n_classes));
    }

    UpdateGate gate = (config.rule == GateKind::lazy && config.remember_preset_all)
                          ? UpdateGate::lazy_all_remembered(train.size())
                          : UpdateGate(config.rule, train.size());
    EnergyLedger ledger(flatten_params(model), train.size());

    RunResult result;
    RunStatus status = RunStatus::completed;
    std::string diagnostic;

    auto emit = [&](int epoch) {
        const Evaluation on_train = evaluate(model, train);
        const Evaluation on_test = evaluate(model, test);
        const EfficiencyReport eff = make_efficiency_report(ledger, flatten_params(model));
        MetricsRecord rec;
        rec.samples_seen = ledger.step_count();
        rec.epoch = epoch;
        rec.train_loss = on_train.loss;
        rec.test_loss = on_test.loss;
        rec.train_accuracy = on_train.accuracy;
        rec.test_accuracy = on_test.accuracy;
        rec.m_total = eff.m;
        rec.m_min = eff.m_min;
        rec.inefficiency = eff.ineff;
        rec.update_count = ledger.update_count();
        if (gate.kind() == GateKind::lazy) {
            rec.remembered_fraction = gate.remembered_fraction();
        }
        result.records.push_back(rec);
        if (sink) {
            sink(rec);
        }
        return rec;
    };

    if (observer) {
        observer(model);
    }

    bool done = false;
    for (int epoch = 0; epoch < config.epochs && !done; ++epoch) {
        const auto order = shuffled_order(train.size(), epoch, config.seed);
        for (const std::int64_t row : order) {
            try {
                step(model, gate, ledger, row);
            } catch (const numeric_error& e) {
                status = RunStatus::failed;
                diagnostic = e.what();
                done = true;
                break;
            }
            if (observer) {
                observer(model);
            }
            if (ledger.step_count() % config.eval_every == 0) {
                const MetricsRecord rec = emit(epoch);
                if (config.stop_test_accuracy &&
                    rec.test_accuracy >= *config.stop_test_accuracy) {
                    status = RunStatus::stopped_at_target;
                    done = true;
                    break;
                }
            }
        }
    }

    // Cover a misaligned tail so the stream always ends at the final
    // parameters (aligned runs have it already).
    if (status != RunStatus::failed && ledger.step_count() % config.eval_every != 0) {
        emit(config.epochs - 1);
    }

    RunSummary& summary = result.summary;
    summary.status = status;
    summary.diagnostic = diagnostic;
    summary.step_count = ledger.step_count();
    summary.update_count = ledger.update_count();
    if (status != RunStatus::failed) {
        summary.efficiency = make_efficiency_report(ledger, flatten_params(model));
    } else {
        // Aborted parameters may be non-finite; report only the path
        // cost accumulated before the abort.
        summary.efficiency.m = ledger.m_total();
        summary.efficiency.m_min = std::numeric_limits<double>::quiet_NaN();
        summary.efficiency.ineff = std::nullopt;
    }
    if (!result.records.empty()) {
        summary.final_record = result.records.back();
    }
    if (gate.kind() == GateKind::lazy) {
        summary.remembered_fraction = gate.remembered_fraction();
        summary.coreset_ids = gate.remembered_ids();
    }
    result.per_sample_energy = ledger.per_sample_energy();
    result.final_params = flatten_params(model);
    return result;
}

} // namespace

RunResult run_mlp_experiment_from(const TrainConfig& config, const Dataset& train,
                                  const Dataset& test, MlpModel model, const MetricsSink& sink) {
    if (train.dims() != model.in_dim()) {
        throw shape_error("run_experiment: dataset dims do not match the model");
    }
    MlpWorkspace ws(model);
    auto step = [&](MlpModel& m, UpdateGate& gate, EnergyLedger& ledger, std::int64_t row) {
        mlp_step(m, gate, ledger, train, row, config.learning_rate, ws);
    };
    return run_loop<MlpModel>(config, train, test, std::move(model), step, sink, {});
}

RunResult run_mlp_experiment(const TrainConfig& config, const Dataset& train, const Dataset& test,
                             const MetricsSink& sink) {
    MlpModel model = init_mlp(train.dims(), config.hidden_dim, train.n_classes, config.seed);
    return run_mlp_experiment_from(config, train, test, std::move(model), sink);
}

RunResult run_toy_experiment(const TrainConfig& config, const Dataset& train, const Dataset& test,
                             const Eigen::Vector2d& initial_w, const MetricsSink& sink,
                             const ToyObserver& observer) {
    if (train.dims() != 2) {
        throw shape_error("run_experiment: toy runs need 2-dimensional data");
    }
    LinearToyModel model;
    model.w = initial_w;
    auto step = [&](LinearToyModel& m, UpdateGate& gate, EnergyLedger& ledger, std::int64_t row) {
        toy_step(m, gate, ledger, train, row, config.learning_rate);
    };
    std::function<void(const LinearToyModel&)> wrapped;
    if (observer) {
        wrapped = [&observer](const LinearToyModel& m) { observer(m.w); };
    }
    return run_loop<LinearToyModel>(config, train, test, std::move(model), step, sink, wrapped);
}

} // namespace lazylearn
