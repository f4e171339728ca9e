#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>

namespace lazylearn {

// Two-weight linear classifier for the planar task. No bias: the score
// is h = w . x and the class is the Heaviside step H(h), with the
// convention H(0) = 1.
struct LinearToyModel {
    Eigen::Vector2d w = Eigen::Vector2d::Zero();
};

// One-hidden-layer perceptron: leaky-ReLU hidden layer, linear output
// read against one-hot targets under mean-squared error (no softmax).
struct MlpModel {
    Eigen::MatrixXd w1; // hidden x in
    Eigen::VectorXd b1; // hidden
    Eigen::MatrixXd w2; // out x hidden
    Eigen::VectorXd b2; // out
    double negative_slope = 0.01;

    Eigen::Index in_dim() const { return w1.cols(); }
    Eigen::Index hidden_dim() const { return w1.rows(); }
    Eigen::Index out_dim() const { return w2.rows(); }
    Eigen::Index param_count() const {
        return w1.size() + b1.size() + w2.size() + b2.size();
    }
};

// Parameter-shaped gradient buffers for MlpModel.
struct MlpGradients {
    Eigen::MatrixXd w1;
    Eigen::VectorXd b1;
    Eigen::MatrixXd w2;
    Eigen::VectorXd b2;

    static MlpGradients zeros_like(const MlpModel& m);
};

// Cached forward-pass activations, reused by the backward pass so every
// presented sample is evaluated exactly once.
struct MlpActivations {
    Eigen::VectorXd hidden_pre;  // w1 x + b1
    Eigen::VectorXd hidden_post; // leaky_relu(hidden_pre)
    Eigen::VectorXd output;      // w2 hidden_post + b2
};

// Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)] for both weights
// and biases of each layer; deterministic per seed.
// Throws invalid_input when any dimension is not positive.
MlpModel init_mlp(Eigen::Index in_dim, Eigen::Index hidden_dim, Eigen::Index out_dim,
                  std::uint64_t seed);

// Forward pass for one sample. Throws shape_error on dimension mismatch.
MlpActivations forward_mlp(const MlpModel& m, const Eigen::Ref<const Eigen::VectorXd>& x);

// Same pass writing into caller-owned buffers (no per-call allocation).
void forward_mlp_into(const MlpModel& m, const Eigen::Ref<const Eigen::VectorXd>& x,
                      MlpActivations& acts);

// Mean over output dimensions of the squared error.
double mse_loss(const Eigen::Ref<const Eigen::VectorXd>& output,
                const Eigen::Ref<const Eigen::VectorXd>& target);

// Analytic gradient of mse_loss(forward_mlp(m, x), target) in every
// parameter, plus the loss. Recomputes activations internally; the
// training loop uses the cached-activation overload.
double backward_mlp(const MlpModel& m, const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& target, MlpGradients& grads);

double backward_mlp_cached(const MlpModel& m, const MlpActivations& acts,
                           const Eigen::Ref<const Eigen::VectorXd>& x,
                           const Eigen::Ref<const Eigen::VectorXd>& target,
                           MlpGradients& grads);

// Predicted class: argmax over the output vector, lowest index on ties.
int predict_from_output(const Eigen::Ref<const Eigen::VectorXd>& output);

int predict(const MlpModel& m, const Eigen::Ref<const Eigen::VectorXd>& x);

// Toy model: score, loss (h - target)^2 and gradient 2 (h - target) x.
double toy_score(const LinearToyModel& m, const Eigen::Ref<const Eigen::Vector2d>& x);
int predict(const LinearToyModel& m, const Eigen::Ref<const Eigen::Vector2d>& x);
double backward_toy(const LinearToyModel& m, const Eigen::Ref<const Eigen::Vector2d>& x,
                    double target, Eigen::Vector2d& grad);

// All parameters as one flat vector; layout is w1 row-major, b1,
// w2 row-major, b2 (the checkpoint layout). Toy models flatten to w.
Eigen::VectorXd flatten_params(const MlpModel& m);
Eigen::VectorXd flatten_params(const LinearToyModel& m);

// Checkpoint export/import: a flat JSON object carrying shape metadata
// and row-major f64 parameter arrays. Round-trips bit-exactly.
void save_model_json(const MlpModel& m, const std::string& path);
void save_model_json(const LinearToyModel& m, const std::string& path);
MlpModel load_mlp_json(const std::string& path);
LinearToyModel load_toy_json(const std::string& path);

} // namespace lazylearn
