#include "lazylearn/errors.hpp"
#include "lazylearn/model.hpp"
#include "lazylearn/rng.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace lazylearn;

namespace {

MlpModel random_small_mlp(std::mt19937_64& eng, Eigen::Index max_dim = 16) {
    const auto in = static_cast<Eigen::Index>(1 + uniform_below(eng, static_cast<std::uint64_t>(max_dim)));
    const auto hidden = static_cast<Eigen::Index>(1 + uniform_below(eng, static_cast<std::uint64_t>(max_dim)));
    const auto out = static_cast<Eigen::Index>(1 + uniform_below(eng, static_cast<std::uint64_t>(max_dim)));
    MlpModel m = init_mlp(in, hidden, out, eng());
    // Spread the weights a little beyond the init bound so gradients
    // are not all tiny; too far and the loss scale drowns the finite
    // differences in rounding noise.
    m.w1 *= 1.5;
    m.w2 *= 1.5;
    return m;
}

Eigen::VectorXd random_vector(std::mt19937_64& eng, Eigen::Index n, double lo, double hi) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v(i) = uniform_range(eng, lo, hi);
    }
    return v;
}

// Instances whose hidden pre-activations sit near the leaky-ReLU kink
// make central differences straddle the corner; redraw those.
bool near_kink(const MlpModel& m, const Eigen::VectorXd& x) {
    const auto acts = forward_mlp(m, x);
    return acts.hidden_pre.cwiseAbs().minCoeff() < 1e-4;
}

} // namespace

TEST_CASE("init_mlp is deterministic and respects the fan-in bound") {
    const MlpModel a = init_mlp(784, 100, 10, 1);
    const MlpModel b = init_mlp(784, 100, 10, 1);
    CHECK(flatten_params(a) == flatten_params(b));

    const MlpModel c = init_mlp(784, 100, 10, 2);
    CHECK(flatten_params(a) != flatten_params(c));

    const double bound1 = 1.0 / std::sqrt(784.0);
    CHECK(a.w1.cwiseAbs().maxCoeff() <= bound1);
    CHECK(a.b1.cwiseAbs().maxCoeff() <= bound1);
    const double bound2 = 1.0 / std::sqrt(100.0);
    CHECK(a.w2.cwiseAbs().maxCoeff() <= bound2);
    CHECK(a.b2.cwiseAbs().maxCoeff() <= bound2);

    // Mean of 78,400 uniform draws: zero within 3 sigma of the
    // uniform-mean estimator, sigma = bound / sqrt(3 n).
    const double mean = a.w1.mean();
    const double sigma = bound1 / std::sqrt(3.0 * static_cast<double>(a.w1.size()));
    CHECK(std::abs(mean) <= 3.0 * sigma);

    CHECK_THROWS_AS(init_mlp(0, 10, 10, 1), invalid_input);
    CHECK_THROWS_AS(init_mlp(10, 0, 10, 1), invalid_input);
    CHECK_THROWS_AS(init_mlp(10, 10, 0, 1), invalid_input);
}

TEST_CASE("forward_mlp matches the definition") {
    SUBCASE("all-zero parameters give a zero output") {
        MlpModel m;
        m.w1 = Eigen::MatrixXd::Zero(4, 3);
        m.b1 = Eigen::VectorXd::Zero(4);
        m.w2 = Eigen::MatrixXd::Zero(2, 4);
        m.b2 = Eigen::VectorXd::Zero(2);
        const auto acts = forward_mlp(m, Eigen::Vector3d(1.0, -2.0, 0.5));
        CHECK(acts.output.isZero(0.0));
    }
    SUBCASE("leaky ReLU with slope 0.01 on pre-activations (-1, 2)") {
        MlpModel m;
        m.w1.resize(2, 1);
        m.w1 << -1.0, 2.0;
        m.b1 = Eigen::VectorXd::Zero(2);
        m.w2 = Eigen::MatrixXd::Identity(2, 2);
        m.b2 = Eigen::VectorXd::Zero(2);
        Eigen::VectorXd x(1);
        x << 1.0;
        const auto acts = forward_mlp(m, x);
        CHECK(acts.hidden_post(0) == -0.01);
        CHECK(acts.hidden_post(1) == 2.0);
    }
    SUBCASE("dimension mismatch is a shape error") {
        const MlpModel m = init_mlp(5, 4, 3, 1);
        CHECK_THROWS_AS(forward_mlp(m, Eigen::Vector3d(1, 2, 3)), shape_error);
    }
    SUBCASE("matches a naive triple-loop forward on random models") {
        auto eng = make_engine(21, 0);
        for (int trial = 0; trial < 25; ++trial) {
            const MlpModel m = random_small_mlp(eng);
            const Eigen::VectorXd x = random_vector(eng, m.in_dim(), -2.0, 2.0);
            const auto acts = forward_mlp(m, x);
            const auto naive = oracle::naive_mlp_output(m, x);
            for (Eigen::Index o = 0; o < m.out_dim(); ++o) {
                CHECK(acts.output(o) ==
                      doctest::Approx(naive[static_cast<std::size_t>(o)]).epsilon(1e-12));
            }
        }
    }
    SUBCASE("pure: identical inputs give bit-identical outputs") {
        auto eng = make_engine(22, 0);
        const MlpModel m = random_small_mlp(eng);
        const Eigen::VectorXd x = random_vector(eng, m.in_dim(), -1.0, 1.0);
        const auto a = forward_mlp(m, x);
        const auto b = forward_mlp(m, x);
        CHECK(a.output == b.output);
        CHECK(a.hidden_pre == b.hidden_pre);
    }
}

TEST_CASE("mse_loss arithmetic") {
    Eigen::Vector2d t(0.0, 1.0);
    CHECK(mse_loss(t, t) == 0.0);
    CHECK(mse_loss(Eigen::Vector2d(1.0, 0.0), t) == 1.0);

    Eigen::Vector3d out(0.5, 0.5, 0.0);
    Eigen::Vector3d onehot(1.0, 0.0, 0.0);
    CHECK(mse_loss(out, onehot) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));

    CHECK_THROWS_AS(mse_loss(Eigen::Vector2d(0, 0), Eigen::Vector3d(0, 0, 0)), shape_error);

    SUBCASE("non-negative, zero only at equality") {
        auto eng = make_engine(5, 0);
        for (int trial = 0; trial < 100; ++trial) {
            const auto n = static_cast<Eigen::Index>(1 + uniform_below(eng, 8));
            const Eigen::VectorXd a = random_vector(eng, n, -3.0, 3.0);
            const Eigen::VectorXd b = random_vector(eng, n, -3.0, 3.0);
            const double loss = mse_loss(a, b);
            CHECK(loss >= 0.0);
            if (a != b) {
                CHECK(loss > 0.0);
            }
        }
    }
}

TEST_CASE("backward_mlp gradients match central finite differences") {
    auto eng = make_engine(77, 0);
    int tested = 0;
    while (tested < 100) {
        const MlpModel m = random_small_mlp(eng);
        const Eigen::VectorXd x = random_vector(eng, m.in_dim(), -2.0, 2.0);
        if (near_kink(m, x)) {
            continue;
        }
        Eigen::VectorXd target = Eigen::VectorXd::Zero(m.out_dim());
        target(static_cast<Eigen::Index>(uniform_below(eng, static_cast<std::uint64_t>(m.out_dim())))) = 1.0;

        MlpGradients grads = MlpGradients::zeros_like(m);
        const double loss = backward_mlp(m, x, target, grads);
        CHECK(loss == doctest::Approx(oracle::naive_mlp_loss(m, x, target)).epsilon(1e-12));

        // Flatten analytic grads in checkpoint order and compare a few
        // random coordinates plus every bias (cheap).
        MlpModel probe = m;
        const Eigen::Index n_params = m.param_count();
        auto analytic_at = [&](Eigen::Index k) {
            if (k < m.w1.size()) {
                return grads.w1(k / m.w1.cols(), k % m.w1.cols());
            }
            k -= m.w1.size();
            if (k < m.b1.size()) {
                return grads.b1(k);
            }
            k -= m.b1.size();
            if (k < m.w2.size()) {
                return grads.w2(k / m.w2.cols(), k % m.w2.cols());
            }
            k -= m.w2.size();
            return grads.b2(k);
        };
        for (int probe_i = 0; probe_i < 12; ++probe_i) {
            const auto k = static_cast<Eigen::Index>(
                uniform_below(eng, static_cast<std::uint64_t>(n_params)));
            const double fd = oracle::fd_mlp_gradient(probe, x, target, k);
            CHECK(oracle::rel_err(analytic_at(k), fd) <= 1e-5);
        }
        ++tested;
    }
}

TEST_CASE("backward_mlp edge behaviour") {
    SUBCASE("zero residual gives all-zero gradients") {
        MlpModel m;
        m.w1 = Eigen::MatrixXd::Zero(3, 2);
        m.b1 = Eigen::VectorXd::Zero(3);
        m.w2 = Eigen::MatrixXd::Zero(2, 3);
        m.b2 = Eigen::VectorXd::Zero(2);
        m.b2 << 1.0, 0.0; // output equals the target exactly
        MlpGradients grads = MlpGradients::zeros_like(m);
        const double loss = backward_mlp(m, Eigen::Vector2d(0.3, -0.7),
                                         Eigen::Vector2d(1.0, 0.0), grads);
        CHECK(loss == 0.0);
        CHECK(grads.w1.isZero(0.0));
        CHECK(grads.b1.isZero(0.0));
        CHECK(grads.w2.isZero(0.0));
        CHECK(grads.b2.isZero(0.0));
    }
    SUBCASE("gradients are linear in the residual") {
        auto eng = make_engine(31, 0);
        const MlpModel m = random_small_mlp(eng);
        const Eigen::VectorXd x = random_vector(eng, m.in_dim(), -1.0, 1.0);
        const Eigen::VectorXd out = forward_mlp(m, x).output;
        const Eigen::VectorXd t1 = random_vector(eng, m.out_dim(), -1.0, 1.0);
        const double c = 3.5;
        const Eigen::VectorXd t2 = out - c * (out - t1); // residual scaled by c

        MlpGradients g1 = MlpGradients::zeros_like(m);
        MlpGradients g2 = MlpGradients::zeros_like(m);
        backward_mlp(m, x, t1, g1);
        backward_mlp(m, x, t2, g2);
        CHECK((g2.w1 - c * g1.w1).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((g2.w2 - c * g1.w2).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((g2.b1 - c * g1.b1).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((g2.b2 - c * g1.b2).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("predict conventions") {
    SUBCASE("toy: H at and above zero is class 1") {
        LinearToyModel m;
        m.w << 1.0, 0.0;
        CHECK(predict(m, Eigen::Vector2d(3.0, -1.0)) == 1);
        CHECK(predict(m, Eigen::Vector2d(0.0, 5.0)) == 1); // h == 0 boundary
        CHECK(predict(m, Eigen::Vector2d(-0.1, 5.0)) == 0);
    }
    SUBCASE("mlp: argmax with lowest index winning ties") {
        Eigen::Vector3d out(0.2, 0.9, 0.9);
        CHECK(predict_from_output(out) == 1);
    }
    SUBCASE("argmax is invariant under positive scaling") {
        auto eng = make_engine(13, 0);
        for (int trial = 0; trial < 100; ++trial) {
            const auto n = static_cast<Eigen::Index>(2 + uniform_below(eng, 8));
            const Eigen::VectorXd out = random_vector(eng, n, -2.0, 2.0);
            const double c = uniform_range(eng, 0.1, 10.0);
            CHECK(predict_from_output(out) == predict_from_output((c * out).eval()));
        }
    }
}

TEST_CASE("backward_toy gradients") {
    SUBCASE("score equal to target gives a zero gradient") {
        LinearToyModel m; // w = 0 so h = 0
        Eigen::Vector2d grad;
        const double loss = backward_toy(m, Eigen::Vector2d(1.0, 2.0), 0.0, grad);
        CHECK(loss == 0.0);
        CHECK(grad == Eigen::Vector2d(0.0, 0.0));
    }
    SUBCASE("w=0, x=(1,2), target=1 gives gradient (-2,-4)") {
        LinearToyModel m;
        Eigen::Vector2d grad;
        const double loss = backward_toy(m, Eigen::Vector2d(1.0, 2.0), 1.0, grad);
        CHECK(loss == 1.0);
        CHECK(grad(0) == -2.0);
        CHECK(grad(1) == -4.0);
    }
    SUBCASE("matches central finite differences on random instances") {
        auto eng = make_engine(55, 0);
        for (int trial = 0; trial < 100; ++trial) {
            LinearToyModel m;
            m.w << uniform_range(eng, -2, 2), uniform_range(eng, -2, 2);
            const Eigen::Vector2d x(uniform_range(eng, -3, 3), uniform_range(eng, -3, 3));
            const double target = uniform_below(eng, 2) == 0 ? 0.0 : 1.0;
            Eigen::Vector2d grad;
            backward_toy(m, x, target, grad);
            for (int k = 0; k < 2; ++k) {
                const double fd = oracle::fd_toy_gradient(m, x, target, k);
                CHECK(oracle::rel_err(grad(k), fd) <= 1e-6);
            }
        }
    }
}

TEST_CASE("model checkpoints round-trip bit-exactly") {
    const auto dir = std::filesystem::temp_directory_path() / "lazylearn_model_test";
    std::filesystem::create_directories(dir);

    SUBCASE("mlp") {
        const MlpModel m = init_mlp(17, 9, 4, 123);
        const auto path = (dir / "mlp.json").string();
        save_model_json(m, path);
        const MlpModel back = load_mlp_json(path);
        CHECK(flatten_params(back) == flatten_params(m));
        CHECK(back.negative_slope == m.negative_slope);
        CHECK_THROWS_AS(load_toy_json(path), format_error);
    }
    SUBCASE("toy") {
        LinearToyModel m;
        m.w << 0.12345678901234567, -1e-17;
        const auto path = (dir / "toy.json").string();
        save_model_json(m, path);
        const LinearToyModel back = load_toy_json(path);
        CHECK(back.w == m.w);
    }
}
