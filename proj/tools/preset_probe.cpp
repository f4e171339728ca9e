// Regime evidence for the shipped toy-task starting points: runs every
// (preset, rule) pair on the default cloud geometry and prints the
// figures the presets were frozen against.

#include "lazylearn/landscape.hpp"
#include "lazylearn/toy.hpp"

#include <cstdio>
#include <cstdlib>
#include <vector>

using namespace lazylearn;

int main(int argc, char** argv) {
    int epochs = 6;
    if (argc > 1) {
        epochs = std::atoi(argv[1]);
    }
    ToyTaskSpec spec;
    const Dataset data = make_two_clouds(spec);
    std::vector<Eigen::Vector2d> presets;
    if (argc > 3) { // probe one explicit starting point
        presets.push_back(Eigen::Vector2d(std::atof(argv[2]), std::atof(argv[3])));
    } else {
        for (const auto& w0 : preset_initial_conditions()) {
            presets.push_back(w0);
        }
    }

    std::printf("geometry: centers (%.1f,%.1f)/(%.1f,%.1f) radius %.2f n/class %lld seed %llu\n",
                spec.center_a[0], spec.center_a[1], spec.center_b[0], spec.center_b[1],
                spec.radius, static_cast<long long>(spec.n_per_class),
                static_cast<unsigned long long>(spec.seed));
    std::printf("epochs %d, lr 0.001\n\n", epochs);
    std::printf("%-8s %-10s %10s %10s %10s %10s %12s\n", "preset", "rule", "m_total", "m_min",
                "updates", "final_acc", "acc100_at");

    for (std::size_t p = 0; p < presets.size(); ++p) {
        for (const GateKind rule : {GateKind::pure_lazy, GateKind::lazy, GateKind::backprop}) {
            TrainConfig cfg;
            cfg.rule = rule;
            cfg.learning_rate = 0.001;
            cfg.epochs = epochs;
            cfg.eval_every = data.size();
            cfg.seed = 1;
            const Trajectory traj = trace_run(cfg, data, presets[p]);
            const auto& records = traj.run.records;
            long long acc100_at = -1;
            for (const auto& rec : records) {
                if (rec.train_accuracy == 1.0) {
                    acc100_at = rec.samples_seen;
                    break;
                }
            }
            std::printf("%-8zu %-10s %10.4f %10.4f %10lld %10.4f %12lld\n", p + 1,
                        to_string(rule), traj.run.summary.efficiency.m,
                        traj.run.summary.efficiency.m_min,
                        static_cast<long long>(traj.run.summary.update_count),
                        records.empty() ? -1.0 : records.back().train_accuracy, acc100_at);
        }
        std::printf("\n");
    }
    return 0;
}
