#include "lazylearn/gating.hpp"

#include "lazylearn/errors.hpp"

#include <algorithm>
#include <string>

namespace lazylearn {

const char* to_string(GateKind kind) {
    switch (kind) {
    case GateKind::backprop:
        return "backprop";
    case GateKind::pure_lazy:
        return "pure-lazy";
    case GateKind::lazy:
        return "lazy";
    }
    return "unknown";
}

GateKind gate_kind_from_string(const std::string& name) {
    if (name == "backprop") {
        return GateKind::backprop;
    }
    if (name == "pure-lazy" || name == "pure_lazy") {
        return GateKind::pure_lazy;
    }
    if (name == "lazy") {
        return GateKind::lazy;
    }
    throw invalid_input("unknown learning rule: " + name);
}

UpdateGate::UpdateGate(GateKind kind, std::int64_t n_train_samples) : kind_(kind) {
    if (n_train_samples < 0) {
        throw invalid_input("UpdateGate: negative training-set size");
    }
    n_train_ = n_train_samples;
    if (kind_ == GateKind::lazy) {
        remember_.assign(static_cast<std::size_t>(n_train_samples), 0);
    }
}

UpdateGate UpdateGate::lazy_all_remembered(std::int64_t n_train_samples) {
    UpdateGate gate(GateKind::lazy, n_train_samples);
    std::fill(gate.remember_.begin(), gate.remember_.end(), std::uint8_t{1});
    return gate;
}

GateDecision UpdateGate::decide(std::int64_t sample_id, int predicted, int target) {
    GateDecision decision;
    switch (kind_) {
    case GateKind::backprop:
        decision.update = true;
        return decision;
    case GateKind::pure_lazy:
        decision.update = predicted != target;
        return decision;
    case GateKind::lazy:
        break;
    }
    if (sample_id < 0 || sample_id >= static_cast<std::int64_t>(remember_.size())) {
        throw invalid_input("UpdateGate::decide: sample_id " + std::to_string(sample_id) +
                            " outside the tracked training set");
    }
    auto& flag = remember_[static_cast<std::size_t>(sample_id)];
    if (predicted != target && flag == 0) {
        // Record the miss before testing the gate, so a currently-wrong
        // sample updates on this very presentation.
        flag = 1;
        decision.newly_remembered = true;
    }
    decision.update = flag != 0;
    return decision;
}

double UpdateGate::remembered_fraction() const {
    if (kind_ != GateKind::lazy) {
        throw state_error("remembered_fraction: gate has no remember store");
    }
    if (remember_.empty()) {
        return 0.0;
    }
    const auto count = std::count(remember_.begin(), remember_.end(), std::uint8_t{1});
    return static_cast<double>(count) / static_cast<double>(remember_.size());
}

std::vector<std::int64_t> UpdateGate::remembered_ids() const {
    if (kind_ != GateKind::lazy) {
        throw state_error("remembered_ids: gate has no remember store");
    }
    std::vector<std::int64_t> ids;
    for (std::size_t i = 0; i < remember_.size(); ++i) {
        if (remember_[i] != 0) {
            ids.push_back(static_cast<std::int64_t>(i));
        }
    }
    return ids;
}

bool UpdateGate::is_remembered(std::int64_t sample_id) const {
    if (kind_ != GateKind::lazy) {
        return false;
    }
    if (sample_id < 0 || sample_id >= static_cast<std::int64_t>(remember_.size())) {
        throw invalid_input("is_remembered: sample_id out of range");
    }
    return remember_[static_cast<std::size_t>(sample_id)] != 0;
}

Dataset export_coreset(const UpdateGate& gate, const Dataset& data) {
    if (gate.kind() != GateKind::lazy) {
        throw state_error("export_coreset: gate has no remember store");
    }
    if (gate.tracked_samples() != data.size()) {
        throw consistency_error("export_coreset: gate tracks " +
                                std::to_string(gate.tracked_samples()) + " samples, dataset has " +
                                std::to_string(data.size()));
    }
    // remembered_ids() are positions in the training set the gate was
    // built for, so they index rows directly; subset keeps the original
    // sample_ids.
    return subset_rows(data, gate.remembered_ids());
}

} // namespace lazylearn
