#include "lazylearn/energy.hpp"

#include "lazylearn/errors.hpp"

#include <cmath>
#include <string>

namespace lazylearn {

EnergyLedger::EnergyLedger(Eigen::VectorXd initial_params, std::int64_t n_train_samples)
    : initial_params_(std::move(initial_params)) {
    if (n_train_samples < 0) {
        throw invalid_input("EnergyLedger: negative training-set size");
    }
    per_sample_energy_.assign(static_cast<std::size_t>(n_train_samples), 0.0);
}

void EnergyLedger::record_update(std::int64_t sample_id, double delta_l1) {
    if (!(delta_l1 >= 0.0) || !std::isfinite(delta_l1)) {
        throw invalid_input("record_update: delta_l1 must be finite and non-negative");
    }
    if (sample_id < 0 || sample_id >= static_cast<std::int64_t>(per_sample_energy_.size())) {
        throw invalid_input("record_update: sample_id " + std::to_string(sample_id) +
                            " out of range");
    }
    m_total_ += delta_l1;
    per_sample_energy_[static_cast<std::size_t>(sample_id)] += delta_l1;
    ++update_count_;
}

double EnergyLedger::minimum_energy(const Eigen::Ref<const Eigen::VectorXd>& current_params) const {
    if (current_params.size() != initial_params_.size()) {
        throw shape_error("minimum_energy: parameter count changed since the snapshot");
    }
    return (current_params - initial_params_).lpNorm<1>();
}

std::optional<double> inefficiency(double m, double m_min) {
    if (m < 0.0 || m_min < 0.0) {
        throw invalid_input("inefficiency: energies must be non-negative");
    }
    // The L1 path is never shorter than the straight line; a violation
    // beyond rounding means the caller mixed up its arguments.
    if (m < m_min * (1.0 - 1e-9)) {
        throw invalid_input("inefficiency: m < m_min");
    }
    if (m_min > 0.0) {
        return m / m_min;
    }
    if (m == 0.0) {
        return 1.0; // nothing moved at all
    }
    return std::nullopt; // moved but returned to the start: undefined
}

EfficiencyReport make_efficiency_report(const EnergyLedger& ledger,
                                        const Eigen::Ref<const Eigen::VectorXd>& current_params) {
    EfficiencyReport report;
    report.m = ledger.m_total();
    report.m_min = ledger.minimum_energy(current_params);
    report.ineff = inefficiency(report.m, report.m_min);
    return report;
}

} // namespace lazylearn
