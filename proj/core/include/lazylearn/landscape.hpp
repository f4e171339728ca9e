#pragma once

#include "lazylearn/dataset.hpp"
#include "lazylearn/trainer.hpp"

#include <array>
#include <string>
#include <vector>

namespace lazylearn {

struct AxisRange {
    double min = -3.0;
    double max = 3.0;
    int resolution = 301; // grid points per axis, both endpoints included

    double at(int i) const;
};

struct GridSpec {
    AxisRange w1{};
    AxisRange w2{};
};

// Loss and accuracy of the toy model sampled over a weight grid.
// loss(i, j) and accuracy(i, j) belong to w = (w1.at(i), w2.at(j)).
struct SurfaceGrid {
    GridSpec spec;
    Eigen::MatrixXd loss_values;     // resolution x resolution
    Eigen::MatrixXd accuracy_values; // entries in [0, 1]
};

// Mean toy MSE and Heaviside accuracy over `data` at every grid point.
// Throws invalid_input unless the dataset is 2-dimensional.
SurfaceGrid sample_surface(const Dataset& data, const GridSpec& spec);

// Weight path of one toy run: the initial point plus the weight vector
// after every presented sample, whether or not it updated.
struct Trajectory {
    GateKind rule = GateKind::backprop;
    int initial_condition_id = -1; // preset index, or -1 for explicit starts
    std::vector<Eigen::Vector2d> points;
    std::vector<double> per_sample_energy;
    RunResult run; // metrics stream + summary of the producing run
};

// Runs the trainer from the given weights, recording the trajectory.
Trajectory trace_run(const TrainConfig& config, const Dataset& data,
                     const Eigen::Vector2d& initial_w);

// Three fixed starting weights covering distinct regimes on the default
// cloud geometry:
//   0: mixed-accuracy start; gradient descent reaches the loss minimum
//      and jitters there, the error-gated rules settle on the top
//      accuracy terrace (windy vs straight endgame).
//   1: fully misclassified start; every rule drives through the same
//      corridor and the error-gated rules save little except stopping.
//   2: start just outside the top accuracy terrace where the loss pulls
//      away from it; error-gated rules climb the terrace anyway.
std::array<Eigen::Vector2d, 3> preset_initial_conditions();

// CSV exports. Surface rows: w1,w2,loss,accuracy. Trajectory rows:
// step,w1,w2. Per-sample energy rows: sample_id,energy.
void write_surface_csv(const SurfaceGrid& grid, const std::string& path);
void write_trajectory_csv(const Trajectory& traj, const std::string& path);
void write_per_sample_energy_csv(const std::vector<double>& energy,
                                 const std::vector<std::int64_t>& sample_ids,
                                 const std::string& path);

} // namespace lazylearn
