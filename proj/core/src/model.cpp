#include "lazylearn/model.hpp"

#include "lazylearn/errors.hpp"
#include "lazylearn/rng.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <string>

namespace lazylearn {
namespace {

using nlohmann::json;

void check_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw numeric_error(std::string("non-finite value in ") + what);
    }
}

// Draw order is part of the checkpoint contract: w1 row-major, b1,
// w2 row-major, b2.
void fill_uniform_matrix(Eigen::MatrixXd& m, double bound, std::mt19937_64& eng) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            m(r, c) = uniform_range(eng, -bound, bound);
        }
    }
}

void fill_uniform_vector(Eigen::VectorXd& v, double bound, std::mt19937_64& eng) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v(i) = uniform_range(eng, -bound, bound);
    }
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json arr = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            arr.push_back(m(r, c));
        }
    }
    return arr;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        arr.push_back(v(i));
    }
    return arr;
}

Eigen::MatrixXd matrix_from_json(const json& arr, Eigen::Index rows, Eigen::Index cols,
                                 const char* name) {
    if (static_cast<Eigen::Index>(arr.size()) != rows * cols) {
        throw format_error(std::string("checkpoint: ") + name + " has wrong length");
    }
    Eigen::MatrixXd m(rows, cols);
    Eigen::Index k = 0;
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = arr[static_cast<std::size_t>(k++)].get<double>();
        }
    }
    return m;
}

Eigen::VectorXd vector_from_json(const json& arr, Eigen::Index size, const char* name) {
    if (static_cast<Eigen::Index>(arr.size()) != size) {
        throw format_error(std::string("checkpoint: ") + name + " has wrong length");
    }
    Eigen::VectorXd v(size);
    for (Eigen::Index i = 0; i < size; ++i) {
        v(i) = arr[static_cast<std::size_t>(i)].get<double>();
    }
    return v;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw io_error("cannot open " + path);
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw format_error("invalid JSON in " + path + ": " + e.what());
    }
    return doc;
}

void write_json_file(const json& doc, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw io_error("cannot open " + path + " for writing");
    }
    out << doc.dump(2) << '\n';
    if (!out) {
        throw io_error("error while writing " + path);
    }
}

} // namespace

MlpGradients MlpGradients::zeros_like(const MlpModel& m) {
    MlpGradients g;
    g.w1 = Eigen::MatrixXd::Zero(m.w1.rows(), m.w1.cols());
    g.b1 = Eigen::VectorXd::Zero(m.b1.size());
    g.w2 = Eigen::MatrixXd::Zero(m.w2.rows(), m.w2.cols());
    g.b2 = Eigen::VectorXd::Zero(m.b2.size());
    return g;
}

MlpModel init_mlp(Eigen::Index in_dim, Eigen::Index hidden_dim, Eigen::Index out_dim,
                  std::uint64_t seed) {
    if (in_dim <= 0 || hidden_dim <= 0 || out_dim <= 0) {
        throw invalid_input("init_mlp: all dimensions must be positive");
    }
    MlpModel m;
    m.w1.resize(hidden_dim, in_dim);
    m.b1.resize(hidden_dim);
    m.w2.resize(out_dim, hidden_dim);
    m.b2.resize(out_dim);

    auto eng = make_engine(seed, rng_stream::model_init);
    const double bound1 = 1.0 / std::sqrt(static_cast<double>(in_dim));
    const double bound2 = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
    fill_uniform_matrix(m.w1, bound1, eng);
    fill_uniform_vector(m.b1, bound1, eng);
    fill_uniform_matrix(m.w2, bound2, eng);
    fill_uniform_vector(m.b2, bound2, eng);
    return m;
}

void forward_mlp_into(const MlpModel& m, const Eigen::Ref<const Eigen::VectorXd>& x,
                      MlpActivations& acts) {
    if (x.size() != m.in_dim()) {
        throw shape_error("forward_mlp: input has " + std::to_string(x.size()) +
                          " dims, model expects " + std::to_string(m.in_dim()));
    }
    acts.hidden_pre.noalias() = m.w1 * x;
    acts.hidden_pre += m.b1;
    acts.hidden_post = acts.hidden_pre.unaryExpr([slope = m.negative_slope](double v) {
        return v > 0.0 ? v : slope * v;
    });
    acts.output.noalias() = m.w2 * acts.hidden_post;
    acts.output += m.b2;
}

MlpActivations forward_mlp(const MlpModel& m, const Eigen::Ref<const Eigen::VectorXd>& x) {
    MlpActivations acts;
    forward_mlp_into(m, x, acts);
    return acts;
}

double mse_loss(const Eigen::Ref<const Eigen::VectorXd>& output,
                const Eigen::Ref<const Eigen::VectorXd>& target) {
    if (output.size() != target.size()) {
        throw shape_error("mse_loss: length mismatch");
    }
    if (output.size() == 0) {
        throw shape_error("mse_loss: empty vectors");
    }
    return (output - target).squaredNorm() / static_cast<double>(output.size());
}

double backward_mlp_cached(const MlpModel& m, const MlpActivations& acts,
                           const Eigen::Ref<const Eigen::VectorXd>& x,
                           const Eigen::Ref<const Eigen::VectorXd>& target,
                           MlpGradients& grads) {
    if (target.size() != m.out_dim() || x.size() != m.in_dim()) {
        throw shape_error("backward_mlp: shape mismatch");
    }
    const double k = static_cast<double>(m.out_dim());
    const Eigen::VectorXd residual = acts.output - target;
    const double loss = residual.squaredNorm() / k;
    check_finite(loss, "backward_mlp loss");

    // dL/d_output with the mean reduction folded in.
    const Eigen::VectorXd d_out = (2.0 / k) * residual;
    grads.w2.noalias() = d_out * acts.hidden_post.transpose();
    grads.b2 = d_out;

    Eigen::VectorXd d_hidden = m.w2.transpose() * d_out;
    for (Eigen::Index i = 0; i < d_hidden.size(); ++i) {
        if (acts.hidden_pre(i) <= 0.0) {
            d_hidden(i) *= m.negative_slope;
        }
    }
    grads.w1.noalias() = d_hidden * x.transpose();
    grads.b1 = std::move(d_hidden);
    return loss;
}

double backward_mlp(const MlpModel& m, const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& target, MlpGradients& grads) {
    const MlpActivations acts = forward_mlp(m, x);
    return backward_mlp_cached(m, acts, x, target, grads);
}

int predict_from_output(const Eigen::Ref<const Eigen::VectorXd>& output) {
    int best = 0;
    double best_value = output(0);
    for (Eigen::Index i = 1; i < output.size(); ++i) {
        if (output(i) > best_value) { // strict: ties keep the lowest index
            best_value = output(i);
            best = static_cast<int>(i);
        }
    }
    return best;
}

int predict(const MlpModel& m, const Eigen::Ref<const Eigen::VectorXd>& x) {
    return predict_from_output(forward_mlp(m, x).output);
}

double toy_score(const LinearToyModel& m, const Eigen::Ref<const Eigen::Vector2d>& x) {
    return m.w.dot(x);
}

int predict(const LinearToyModel& m, const Eigen::Ref<const Eigen::Vector2d>& x) {
    return toy_score(m, x) >= 0.0 ? 1 : 0; // H(0) = 1
}

double backward_toy(const LinearToyModel& m, const Eigen::Ref<const Eigen::Vector2d>& x,
                    double target, Eigen::Vector2d& grad) {
    const double h = toy_score(m, x);
    const double err = h - target;
    grad = 2.0 * err * x;
    const double loss = err * err;
    check_finite(loss, "backward_toy loss");
    return loss;
}

Eigen::VectorXd flatten_params(const MlpModel& m) {
    Eigen::VectorXd flat(m.param_count());
    Eigen::Index k = 0;
    for (Eigen::Index r = 0; r < m.w1.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.w1.cols(); ++c) {
            flat(k++) = m.w1(r, c);
        }
    }
    for (Eigen::Index i = 0; i < m.b1.size(); ++i) {
        flat(k++) = m.b1(i);
    }
    for (Eigen::Index r = 0; r < m.w2.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.w2.cols(); ++c) {
            flat(k++) = m.w2(r, c);
        }
    }
    for (Eigen::Index i = 0; i < m.b2.size(); ++i) {
        flat(k++) = m.b2(i);
    }
    return flat;
}

Eigen::VectorXd flatten_params(const LinearToyModel& m) {
    return m.w;
}

void save_model_json(const MlpModel& m, const std::string& path) {
    json doc;
    doc["kind"] = "mlp";
    doc["in_dim"] = m.in_dim();
    doc["hidden_dim"] = m.hidden_dim();
    doc["out_dim"] = m.out_dim();
    doc["negative_slope"] = m.negative_slope;
    doc["w1"] = matrix_to_json(m.w1);
    doc["b1"] = vector_to_json(m.b1);
    doc["w2"] = matrix_to_json(m.w2);
    doc["b2"] = vector_to_json(m.b2);
    write_json_file(doc, path);
}

void save_model_json(const LinearToyModel& m, const std::string& path) {
    json doc;
    doc["kind"] = "linear_toy";
    doc["w"] = json::array({m.w(0), m.w(1)});
    write_json_file(doc, path);
}

MlpModel load_mlp_json(const std::string& path) {
    const json doc = load_json_file(path);
    if (doc.value("kind", "") != "mlp") {
        throw format_error("checkpoint in " + path + " is not an mlp model");
    }
    const auto in_dim = doc.at("in_dim").get<Eigen::Index>();
    const auto hidden_dim = doc.at("hidden_dim").get<Eigen::Index>();
    const auto out_dim = doc.at("out_dim").get<Eigen::Index>();
    MlpModel m;
    m.negative_slope = doc.at("negative_slope").get<double>();
    m.w1 = matrix_from_json(doc.at("w1"), hidden_dim, in_dim, "w1");
    m.b1 = vector_from_json(doc.at("b1"), hidden_dim, "b1");
    m.w2 = matrix_from_json(doc.at("w2"), out_dim, hidden_dim, "w2");
    m.b2 = vector_from_json(doc.at("b2"), out_dim, "b2");
    return m;
}

LinearToyModel load_toy_json(const std::string& path) {
    const json doc = load_json_file(path);
    if (doc.value("kind", "") != "linear_toy") {
        throw format_error("checkpoint in " + path + " is not a linear toy model");
    }
    const json& w = doc.at("w");
    if (w.size() != 2) {
        throw format_error("checkpoint: toy weight vector must have 2 entries");
    }
    LinearToyModel m;
    m.w << w[0].get<double>(), w[1].get<double>();
    return m;
}

} // namespace lazylearn
