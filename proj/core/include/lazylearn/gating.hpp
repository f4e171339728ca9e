#pragma once

#include "lazylearn/dataset.hpp"

#include <cstdint>
#include <vector>

namespace lazylearn {

enum class GateKind {
    backprop,  // update on every presented sample
    pure_lazy, // update only while the sample is currently misclassified
    lazy,      // update when currently or ever-before misclassified
};

const char* to_string(GateKind kind);
GateKind gate_kind_from_string(const std::string& name);

struct GateDecision {
    bool update = false;
    bool newly_remembered = false;
};

// Per-sample update policy. The lazy variant owns a remember flag per
// training sample; flags are monotone within a run (set, never cleared).
// Mutated by exactly one training loop.
class UpdateGate {
public:
    UpdateGate(GateKind kind, std::int64_t n_train_samples);

    // Lazy gate with every sample already remembered; decides exactly
    // like a backprop gate on every call.
    static UpdateGate lazy_all_remembered(std::int64_t n_train_samples);

    GateKind kind() const { return kind_; }
    std::int64_t tracked_samples() const { return static_cast<std::int64_t>(remember_.size()); }

    // Decides whether this presentation updates the weights. For the
    // lazy gate a misclassification is recorded *before* the gate test,
    // so a currently-wrong sample always updates.
    GateDecision decide(std::int64_t sample_id, int predicted, int target);

    // Fraction of samples remembered so far. Lazy gates only.
    double remembered_fraction() const;

    // Remembered sample ids, ascending. Lazy gates only.
    std::vector<std::int64_t> remembered_ids() const;

    bool is_remembered(std::int64_t sample_id) const;

private:
    GateKind kind_;
    std::int64_t n_train_ = 0;
    std::vector<std::uint8_t> remember_; // lazy only; monotone
};

// The remembered sub-dataset, preserving original sample ids. An empty
// remember set yields an empty (valid) dataset. Lazy gates only.
Dataset export_coreset(const UpdateGate& gate, const Dataset& data);

} // namespace lazylearn
