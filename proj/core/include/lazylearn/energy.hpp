#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

namespace lazylearn {

// Path-energy accounting for one training run. The cost of a weight
// step is the L1 norm of the parameter change; m_total accumulates it
// over the whole run and per_sample_energy attributes each step's cost
// to the sample that was being presented (exact under one-sample SGD).
class EnergyLedger {
public:
    // Snapshots the initial parameters; they anchor minimum_energy.
    EnergyLedger(Eigen::VectorXd initial_params, std::int64_t n_train_samples);

    // One update event: adds delta_l1 = sum_i |dw_i| to the totals.
    // Throws invalid_input when delta_l1 is negative or non-finite.
    void record_update(std::int64_t sample_id, double delta_l1);

    // One presented sample (whether or not it updated).
    void record_presentation() { ++step_count_; }

    double m_total() const { return m_total_; }
    std::int64_t update_count() const { return update_count_; }
    std::int64_t step_count() const { return step_count_; }
    const std::vector<double>& per_sample_energy() const { return per_sample_energy_; }
    const Eigen::VectorXd& initial_params() const { return initial_params_; }

    // L1 distance between the current parameters and the initial
    // snapshot: the straight-path lower bound on m_total.
    double minimum_energy(const Eigen::Ref<const Eigen::VectorXd>& current_params) const;

private:
    double m_total_ = 0.0;
    Eigen::VectorXd initial_params_;
    std::vector<double> per_sample_energy_;
    std::int64_t update_count_ = 0;
    std::int64_t step_count_ = 0;
};

// m / m_min. Undefined (nullopt) when the path moved but ended where it
// started (m_min == 0, m > 0); 1 when nothing moved at all.
// Throws invalid_input when m < m_min beyond rounding.
std::optional<double> inefficiency(double m, double m_min);

struct EfficiencyReport {
    double m = 0.0;
    double m_min = 0.0;
    std::optional<double> ineff; // >= 1 whenever defined
};

EfficiencyReport make_efficiency_report(const EnergyLedger& ledger,
                                        const Eigen::Ref<const Eigen::VectorXd>& current_params);

} // namespace lazylearn
