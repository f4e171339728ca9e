#include "lazylearn/landscape.hpp"

#include "lazylearn/errors.hpp"
#include "lazylearn/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace lazylearn {
namespace {

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw io_error("cannot open " + path + " for writing");
    }
    return out;
}

void append_double(std::string& s, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    s += buf;
}

} // namespace

double AxisRange::at(int i) const {
    if (resolution <= 1) {
        return min;
    }
    return min + (max - min) * static_cast<double>(i) / static_cast<double>(resolution - 1);
}

SurfaceGrid sample_surface(const Dataset& data, const GridSpec& spec) {
    if (data.dims() != 2) {
        throw invalid_input("sample_surface: dataset must be 2-dimensional");
    }
    if (data.size() == 0) {
        throw invalid_input("sample_surface: empty dataset");
    }
    if (spec.w1.resolution < 1 || spec.w2.resolution < 1) {
        throw invalid_input("sample_surface: resolution must be at least 1");
    }
    SurfaceGrid grid;
    grid.spec = spec;
    grid.loss_values.resize(spec.w1.resolution, spec.w2.resolution);
    grid.accuracy_values.resize(spec.w1.resolution, spec.w2.resolution);

    const std::int64_t n = data.size();
    const double inv_n = 1.0 / static_cast<double>(n);

    // Rows of the grid are independent; parallel over w1 indices.
    parallel_chunks(spec.w1.resolution, 8, [&](std::int64_t, std::int64_t begin, std::int64_t end) {
        for (std::int64_t i = begin; i < end; ++i) {
            const double w1 = spec.w1.at(static_cast<int>(i));
            for (int j = 0; j < spec.w2.resolution; ++j) {
                const double w2 = spec.w2.at(j);
                double loss_sum = 0.0;
                std::int64_t correct = 0;
                for (std::int64_t s = 0; s < n; ++s) {
                    const auto row = static_cast<Eigen::Index>(s);
                    const double h =
                        w1 * data.features(row, 0) + w2 * data.features(row, 1);
                    const int label = data.labels[static_cast<std::size_t>(s)];
                    const double err = h - static_cast<double>(label);
                    loss_sum += err * err;
                    correct += (h >= 0.0 ? 1 : 0) == label ? 1 : 0;
                }
                grid.loss_values(static_cast<Eigen::Index>(i), j) = loss_sum * inv_n;
                grid.accuracy_values(static_cast<Eigen::Index>(i), j) =
                    static_cast<double>(correct) * inv_n;
            }
        }
    });
    return grid;
}

Trajectory trace_run(const TrainConfig& config, const Dataset& data,
                     const Eigen::Vector2d& initial_w) {
    Trajectory traj;
    traj.rule = config.rule;
    traj.points.reserve(static_cast<std::size_t>(data.size()) *
                            static_cast<std::size_t>(config.epochs) +
                        1);
    const ToyObserver observer = [&traj](const Eigen::Vector2d& w) { traj.points.push_back(w); };
    traj.run = run_toy_experiment(config, data, data, initial_w, {}, observer);
    traj.per_sample_energy = traj.run.per_sample_energy;
    return traj;
}

std::array<Eigen::Vector2d, 3> preset_initial_conditions() {
    // Chosen against the default two-cloud geometry (centers (+-2, 0),
    // radius 1.2, 100 points per class, seed 7) and verified by the
    // preset_probe tool; see its output for the regime evidence.
    return {
        Eigen::Vector2d(-1.2, 2.0), // mixed start, windy-vs-straight endgame
        Eigen::Vector2d(-2.0, 0.0), // everything misclassified, shared corridor
        Eigen::Vector2d(1.2, 2.6),  // terrace climb against the loss pull
    };
}

void write_surface_csv(const SurfaceGrid& grid, const std::string& path) {
    auto out = open_for_write(path);
    out << "w1,w2,loss,accuracy\n";
    std::string row;
    for (int i = 0; i < grid.spec.w1.resolution; ++i) {
        for (int j = 0; j < grid.spec.w2.resolution; ++j) {
            row.clear();
            append_double(row, grid.spec.w1.at(i));
            row += ',';
            append_double(row, grid.spec.w2.at(j));
            row += ',';
            append_double(row, grid.loss_values(i, j));
            row += ',';
            append_double(row, grid.accuracy_values(i, j));
            out << row << '\n';
        }
    }
    if (!out) {
        throw io_error("error while writing " + path);
    }
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    auto out = open_for_write(path);
    out << "step,w1,w2\n";
    std::string row;
    for (std::size_t i = 0; i < traj.points.size(); ++i) {
        row.clear();
        row += std::to_string(i);
        row += ',';
        append_double(row, traj.points[i](0));
        row += ',';
        append_double(row, traj.points[i](1));
        out << row << '\n';
    }
    if (!out) {
        throw io_error("error while writing " + path);
    }
}

void write_per_sample_energy_csv(const std::vector<double>& energy,
                                 const std::vector<std::int64_t>& sample_ids,
                                 const std::string& path) {
    if (energy.size() != sample_ids.size()) {
        throw shape_error("per-sample energy and sample id counts differ");
    }
    auto out = open_for_write(path);
    out << "sample_id,energy\n";
    std::string row;
    for (std::size_t i = 0; i < energy.size(); ++i) {
        row.clear();
        row += std::to_string(sample_ids[i]);
        row += ',';
        append_double(row, energy[i]);
        out << row << '\n';
    }
    if (!out) {
        throw io_error("error while writing " + path);
    }
}

} // namespace lazylearn
