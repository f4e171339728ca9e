#include "lazylearn/errors.hpp"
#include "lazylearn/landscape.hpp"
#include "lazylearn/rng.hpp"
#include "lazylearn/toy.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace lazylearn;

namespace {

Dataset default_clouds() {
    ToyTaskSpec spec; // centers (+-2, 0), radius 1.2, 100 per class, seed 7
    return make_two_clouds(spec);
}

TrainConfig trace_config(GateKind rule, int epochs) {
    TrainConfig cfg;
    cfg.rule = rule;
    cfg.learning_rate = 0.001;
    cfg.epochs = epochs;
    cfg.eval_every = 200;
    cfg.seed = 1;
    return cfg;
}

std::int64_t count_lines(const std::string& path) {
    std::ifstream in(path);
    std::int64_t lines = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++lines;
    }
    return lines;
}

} // namespace

TEST_CASE("axis ranges include both endpoints") {
    AxisRange r{-3.0, 3.0, 301};
    CHECK(r.at(0) == -3.0);
    CHECK(r.at(300) == 3.0);
    CHECK(r.at(150) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("sample_surface") {
    const Dataset data = default_clouds();

    SUBCASE("rejects non-2D datasets") {
        Dataset wide;
        wide.n_classes = 2;
        wide.features.resize(4, 3);
        wide.features.setZero();
        wide.labels = {0, 1, 0, 1};
        wide.sample_ids = {0, 1, 2, 3};
        CHECK_THROWS_AS(sample_surface(wide, GridSpec{}), invalid_input);
    }
    SUBCASE("a fully-correct weight cell has accuracy 1") {
        GridSpec spec;
        spec.w1 = {1.0, 1.0, 1};
        spec.w2 = {0.0, 0.0, 1};
        const SurfaceGrid grid = sample_surface(data, spec);
        CHECK(grid.accuracy_values(0, 0) == 1.0);
    }
    SUBCASE("w = 0 with balanced classes: loss 0.5, accuracy 0.5") {
        GridSpec spec;
        spec.w1 = {0.0, 0.0, 1};
        spec.w2 = {0.0, 0.0, 1};
        const SurfaceGrid grid = sample_surface(data, spec);
        CHECK(grid.loss_values(0, 0) == 0.5);     // mean of target^2 over {0,1}
        CHECK(grid.accuracy_values(0, 0) == 0.5); // H(0)=1 for every sample
    }
    SUBCASE("every grid cell matches a brute-force recount") {
        ToyTaskSpec small;
        small.n_per_class = 5;
        small.seed = 13;
        const Dataset ten = make_two_clouds(small);
        GridSpec spec;
        spec.w1 = {-2.0, 2.0, 5};
        spec.w2 = {-2.0, 2.0, 5};
        const SurfaceGrid grid = sample_surface(ten, spec);
        for (int i = 0; i < 5; ++i) {
            for (int j = 0; j < 5; ++j) {
                const Eigen::Vector2d w(spec.w1.at(i), spec.w2.at(j));
                const auto rc = oracle::recount_toy(w, ten);
                CHECK(grid.loss_values(i, j) == doctest::Approx(rc.loss).epsilon(1e-12));
                CHECK(grid.accuracy_values(i, j) ==
                      static_cast<double>(rc.correct) / static_cast<double>(ten.size()));
            }
        }
    }
    SUBCASE("binary symmetry: correct(w) + correct(-w) == n away from ties") {
        auto eng = make_engine(3, 0);
        const auto n = data.size();
        for (int trial = 0; trial < 50; ++trial) {
            const Eigen::Vector2d w(uniform_range(eng, -3, 3), uniform_range(eng, -3, 3));
            // Skip weights that put any sample exactly on the boundary.
            bool tie = false;
            for (std::int64_t i = 0; i < n && !tie; ++i) {
                tie = w(0) * data.features(static_cast<Eigen::Index>(i), 0) +
                          w(1) * data.features(static_cast<Eigen::Index>(i), 1) ==
                      0.0;
            }
            if (tie) {
                continue;
            }
            const auto pos = oracle::recount_toy(w, data);
            const auto neg = oracle::recount_toy(-w, data);
            CHECK(pos.correct + neg.correct == n);
        }
    }
}

TEST_CASE("trace_run") {
    const Dataset data = default_clouds();

    SUBCASE("pure lazy from a 100%-accuracy point never moves") {
        const Trajectory traj =
            trace_run(trace_config(GateKind::pure_lazy, 2), data, Eigen::Vector2d(1.0, 0.0));
        CHECK(traj.points.size() == static_cast<std::size_t>(2 * data.size() + 1));
        for (const auto& p : traj.points) {
            CHECK(p == Eigen::Vector2d(1.0, 0.0));
        }
        CHECK(traj.run.summary.update_count == 0);
        CHECK(traj.run.summary.efficiency.m == 0.0);
    }
    SUBCASE("consecutive L1 distances sum exactly to m_total") {
        for (const GateKind rule : {GateKind::backprop, GateKind::lazy, GateKind::pure_lazy}) {
            const Trajectory traj =
                trace_run(trace_config(rule, 3), data, Eigen::Vector2d(-1.2, 2.0));
            double path = 0.0;
            for (std::size_t i = 1; i < traj.points.size(); ++i) {
                path += (traj.points[i] - traj.points[i - 1]).lpNorm<1>();
            }
            // Same additions in the same order as the ledger.
            CHECK(path == traj.run.summary.efficiency.m);
            CHECK(traj.points.size() ==
                  static_cast<std::size_t>(traj.run.summary.step_count) + 1);
        }
    }
}

TEST_CASE("preset initial conditions reproduce the three regimes") {
    const Dataset data = default_clouds();
    const auto presets = preset_initial_conditions();

    SUBCASE("presets are fixed constants") {
        const auto again = preset_initial_conditions();
        for (int i = 0; i < 3; ++i) {
            CHECK(presets[static_cast<std::size_t>(i)] == again[static_cast<std::size_t>(i)]);
        }
    }

    SUBCASE("full-length runs: terrace endpoint and energy ordering") {
        // 50 epochs: long enough for the pure rule to reach and settle
        // on the top accuracy terrace from every preset.
        for (const auto& w0 : presets) {
            const Trajectory pl = trace_run(trace_config(GateKind::pure_lazy, 50), data, w0);
            const Trajectory lz = trace_run(trace_config(GateKind::lazy, 50), data, w0);
            const Trajectory bp = trace_run(trace_config(GateKind::backprop, 50), data, w0);

            const auto rc = oracle::recount_toy(pl.points.back(), data);
            CHECK(rc.correct == data.size());

            CHECK(pl.run.summary.efficiency.m <= lz.run.summary.efficiency.m);
            CHECK(lz.run.summary.efficiency.m <= bp.run.summary.efficiency.m);
        }
    }

    SUBCASE("preset 2: every rule spends comparable energy (within 2x)") {
        const auto& w0 = presets[1];
        const double m_pl =
            trace_run(trace_config(GateKind::pure_lazy, 4), data, w0).run.summary.efficiency.m;
        const double m_lz =
            trace_run(trace_config(GateKind::lazy, 4), data, w0).run.summary.efficiency.m;
        const double m_bp =
            trace_run(trace_config(GateKind::backprop, 4), data, w0).run.summary.efficiency.m;
        CHECK(m_bp <= 2.0 * m_pl);
        CHECK(m_pl <= m_bp);
        // From this start everything is misclassified immediately, so
        // the memory rule replays gradient descent exactly.
        CHECK(m_lz == m_bp);
    }

    SUBCASE("preset 3: error-gated rules out-climb gradient descent early") {
        const auto& w0 = presets[2];
        const Trajectory bp = trace_run(trace_config(GateKind::backprop, 6), data, w0);
        const Trajectory pl = trace_run(trace_config(GateKind::pure_lazy, 6), data, w0);
        const double bp_acc = bp.run.records.back().train_accuracy;
        const double pl_acc = pl.run.records.back().train_accuracy;
        CHECK(pl_acc > bp_acc);
    }
}

TEST_CASE("csv exports") {
    const Dataset data = default_clouds();
    const auto dir = std::filesystem::temp_directory_path() / "lazylearn_landscape_test";
    std::filesystem::create_directories(dir);

    SUBCASE("surface csv has res*res data rows") {
        GridSpec spec;
        spec.w1 = {-1.0, 1.0, 21};
        spec.w2 = {-1.0, 1.0, 21};
        const SurfaceGrid grid = sample_surface(data, spec);
        const auto path = (dir / "surface.csv").string();
        write_surface_csv(grid, path);
        CHECK(count_lines(path) == 21 * 21 + 1);
    }
    SUBCASE("trajectory csv has one row per point plus header") {
        const Trajectory traj =
            trace_run(trace_config(GateKind::backprop, 1), data, Eigen::Vector2d(0.0, 0.0));
        const auto path = (dir / "traj.csv").string();
        write_trajectory_csv(traj, path);
        CHECK(count_lines(path) == static_cast<std::int64_t>(traj.points.size()) + 1);
    }
    SUBCASE("per-sample energy csv pairs ids with energies") {
        const Trajectory traj =
            trace_run(trace_config(GateKind::backprop, 1), data, Eigen::Vector2d(0.0, 0.0));
        const auto path = (dir / "energy.csv").string();
        write_per_sample_energy_csv(traj.per_sample_energy, data.sample_ids, path);
        CHECK(count_lines(path) == data.size() + 1);
    }
}
