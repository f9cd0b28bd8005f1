#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mfac/actor.hpp"
#include "mfac/diffnet.hpp"
#include "support.hpp"

using namespace mfac;

namespace {

NetSpec tiny_tanh() { return NetSpec{1, {{1, Activation::tanh}}, 1}; }
NetSpec linear() { return NetSpec{1, {}, 1}; }

double fwd(const NetSpec& s, const ParamVector& p, double x) {
    return forward(s, p, std::span<const double>(&x, 1))[0];
}

}  // namespace

TEST_CASE("parameter counts of the default architectures") {
    CHECK(critic_spec().param_count() == 385);
    CHECK(score_spec().param_count() == 385);
    CHECK(GaussianPolicy::param_count(PolicyConfig{}) == 258);
    NetSpec two{3, {{4, Activation::tanh}, {5, Activation::elu}}, 2};
    CHECK(two.param_count() == (3 + 1) * 4 + (4 + 1) * 5 + (5 + 1) * 2);
}

TEST_CASE("spec validation") {
    CHECK_THROWS_AS(NetSpec({1, {{0, Activation::tanh}}, 1}).validate(), ContractError);
    CHECK_THROWS_AS(NetSpec({0, {}, 1}).validate(), ContractError);
    CHECK_NOTHROW(score_spec().validate());
    CHECK_THROWS_AS(forward(score_spec(), ParamVector(3, 0.0), std::vector<double>{0.0}), ContractError);
}

TEST_CASE("activation names round-trip") {
    for (auto a : {Activation::tanh, Activation::elu, Activation::identity, Activation::softplus})
        CHECK(activation_from_string(to_string(a)) == a);
    CHECK_THROWS_AS(activation_from_string("relu6"), ContractError);
}

TEST_CASE("forward: hand-evaluated examples") {
    const ParamVector zeros(score_spec().param_count(), 0.0);
    for (double x : {-3.0, 0.0, 2.5}) CHECK(fwd(score_spec(), zeros, x) == 0.0);
    for (double x : {-3.0, 0.0, 2.5}) CHECK(fwd(critic_spec(), ParamVector(385, 0.0), x) == 0.0);

    const ParamVector p{1.0, 0.0, 2.0, 0.5};  // w1, b1, w2, b2
    CHECK(fwd(tiny_tanh(), p, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(fwd(tiny_tanh(), p, 1.0) == doctest::Approx(2.0 * std::tanh(1.0) + 0.5).epsilon(1e-14));
    CHECK(fwd(tiny_tanh(), p, 1.0) == doctest::Approx(2.0231883).epsilon(1e-7));
}

TEST_CASE("forward agrees with an independent scalar evaluation") {
    std::mt19937_64 gen(7);
    for (const NetSpec& spec : {score_spec(), critic_spec(),
                                NetSpec{1, {{8, Activation::softplus}, {5, Activation::identity}}, 1}}) {
        for (int t = 0; t < 20; ++t) {
            const ParamVector p = testing::random_vector(gen, spec.param_count(), 1.0);
            const double x = testing::random_vector(gen, 1, 3.0)[0];
            CHECK(fwd(spec, p, x) == doctest::Approx(testing::naive_forward(spec, p, x)).epsilon(1e-12));
        }
    }
}

TEST_CASE("forward is pure and batch evaluation matches") {
    Rng rng(11);
    const ParamVector p = init_params(score_spec(), rng);
    CHECK(fwd(score_spec(), p, 0.37) == fwd(score_spec(), p, 0.37));

    Eigen::RowVectorXd xs = Eigen::RowVectorXd::LinSpaced(33, -4.0, 4.0);
    const Eigen::RowVectorXd ys = forward_batch(score_spec(), p, xs);
    BatchForward work(score_spec(), xs.size());
    const Eigen::RowVectorXd ys2 = work(p, xs);
    for (Eigen::Index i = 0; i < xs.size(); ++i) {
        CHECK(ys(i) == doctest::Approx(fwd(score_spec(), p, xs(i))).epsilon(1e-13));
        CHECK(ys2(i) == ys(i));
    }
}

TEST_CASE("init_params: bounds and zero biases") {
    Rng rng(3);
    const NetSpec spec = critic_spec();
    const ParamVector p = init_params(spec, rng);
    REQUIRE(p.size() == 385);
    for (int i = 0; i < 128; ++i) CHECK(std::abs(p[i]) <= 1.0);          // first layer, fan_in 1
    for (int i = 128; i < 256; ++i) CHECK(p[i] == 0.0);                  // first-layer bias
    for (int i = 256; i < 384; ++i) CHECK(std::abs(p[i]) <= 1.0 / std::sqrt(128.0));
    CHECK(p[384] == 0.0);
    Rng again(3);
    CHECK(init_params(spec, again) == p);
}

TEST_CASE("grad_params_scalar: hand examples") {
    const double x = 3.0;
    const ParamVector g = grad_params_scalar(linear(), ParamVector{0.7, -0.2}, std::span<const double>(&x, 1), 1.0);
    CHECK(g[0] == doctest::Approx(3.0));
    CHECK(g[1] == doctest::Approx(1.0));

    Rng rng(5);
    const ParamVector p = init_params(critic_spec(), rng);
    for (double v : grad_params_scalar(critic_spec(), p, std::span<const double>(&x, 1), 0.0)) CHECK(v == 0.0);
}

TEST_CASE("input_derivative: hand examples") {
    const double x = 1.7;
    CHECK(input_derivative(score_spec(), ParamVector(385, 0.0), std::span<const double>(&x, 1)) == 0.0);
    CHECK(input_derivative(linear(), ParamVector{-2.5, 4.0}, std::span<const double>(&x, 1)) ==
          doctest::Approx(-2.5));
}

TEST_CASE("score loss: hand examples") {
    const double x0 = 0.6;
    const double w = 1.3, b = -0.4;
    const LossAndGrad lg = grad_params_of_score_loss(linear(), ParamVector{w, b}, std::span<const double>(&x0, 1));
    const double s = w * x0 + b;
    CHECK(lg.loss == doctest::Approx(w + 0.5 * s * s).epsilon(1e-14));
    CHECK(lg.grad[0] == doctest::Approx(1.0 + s * x0).epsilon(1e-14));
    CHECK(lg.grad[1] == doctest::Approx(s).epsilon(1e-14));

    // Zero params: the ½|S|² term and its gradient vanish; only the trace
    // term's gradient survives, through the last-layer weights.
    const LossAndGrad z = grad_params_of_score_loss(score_spec(), ParamVector(385, 0.0), std::span<const double>(&x0, 1));
    CHECK(z.loss == 0.0);
    auto loss_at = [&](const std::vector<double>& p) {
        return input_derivative(score_spec(), p, std::span<const double>(&x0, 1)) +
               0.5 * std::pow(fwd(score_spec(), p, x0), 2);
    };
    const auto fd = testing::central_diff(loss_at, ParamVector(385, 0.0));
    CHECK(testing::max_coord_rel_error(z.grad, fd) < 1e-4);
}

// Finite-difference oracles, 100 random (params, x) draws per default architecture.
TEST_CASE("finite-difference oracles on the default architectures") {
    std::mt19937_64 gen(2024);
    for (const NetSpec& spec : {critic_spec(), score_spec()}) {
        CAPTURE(spec.hidden[0].width);
        double worst_params = 0.0, worst_input = 0.0, worst_loss = 0.0;
        for (int t = 0; t < 100; ++t) {
            Rng rng(1000 + t);
            ParamVector p = init_params(spec, rng);
            // Non-zero biases so every code path is exercised.
            for (double& v : p) v += 0.1 * testing::random_vector(gen, 1, 1.0)[0];
            const double x = testing::random_vector(gen, 1, 2.5)[0];
            const std::span<const double> xs(&x, 1);

            const double upstream = 0.75;
            const auto g = grad_params_scalar(spec, p, xs, upstream);
            const auto fd = testing::central_diff([&](const auto& q) { return upstream * fwd(spec, q, x); }, p);
            worst_params = std::max(worst_params, testing::max_coord_rel_error(g, fd));

            const double h = 1e-5;
            const double dfd = (fwd(spec, p, x + h) - fwd(spec, p, x - h)) / (2 * h);
            const double d = input_derivative(spec, p, xs);
            worst_input = std::max(worst_input, std::abs(d - dfd) / std::max(std::abs(dfd), 1e-8));

            if (spec.hidden[0].activation == Activation::tanh) {
                const LossAndGrad lg = grad_params_of_score_loss(spec, p, xs);
                // The loss oracle needs d/dx inside it, so use a smaller inner
                // step: central difference in x is exact to O(h^2).
                auto loss = [&](const std::vector<double>& q) {
                    return input_derivative(spec, q, xs) + 0.5 * std::pow(fwd(spec, q, x), 2);
                };
                CHECK(lg.loss == doctest::Approx(loss(p)).epsilon(1e-12));
                worst_loss = std::max(worst_loss, testing::max_coord_rel_error(lg.grad, testing::central_diff(loss, p)));
            }
        }
        CHECK(worst_params < 1e-4);
        CHECK(worst_input < 1e-4);
        CHECK(worst_loss < 1e-4);
    }
}

TEST_CASE("adam_update") {
    const ParamVector p{0.5, -1.0, 2.0};
    const AdamState fresh = AdamState::zeros(3);

    SUBCASE("zero gradient keeps params") {
        const AdamStep s = adam_update(p, std::vector<double>(3, 0.0), fresh, 1e-2);
        CHECK(s.params == p);
        CHECK(s.state.step_count == 1);
    }
    SUBCASE("first step moves by lr * sign(g)") {
        const std::vector<double> g{3.0, -0.02, 1e3};
        const AdamStep s = adam_update(p, g, fresh, 1e-3);
        for (int i = 0; i < 3; ++i)
            CHECK(s.params[i] - p[i] == doctest::Approx(-1e-3 * (g[i] > 0 ? 1 : -1)).epsilon(1e-5));
    }
    SUBCASE("constant positive gradient decreases every step") {
        AdamStep s{p, fresh};
        for (int k = 0; k < 100; ++k) {
            const AdamStep next = adam_update(s.params, std::vector<double>{1.0, 1.0, 1.0}, s.state, 1e-2);
            for (int i = 0; i < 3; ++i) CHECK(next.params[i] < s.params[i]);
            CHECK(next.state.step_count == s.state.step_count + 1);
            for (double v : next.state.v) CHECK(v >= 0.0);
            s = next;
        }
    }
    SUBCASE("lr = 0 is the identity on params") {
        const AdamStep s = adam_update(p, std::vector<double>{5.0, -1.0, 0.3}, fresh, 0.0);
        CHECK(s.params == p);
    }
    SUBCASE("length mismatch is a contract error") {
        CHECK_THROWS_AS(adam_update(p, std::vector<double>{1.0}, fresh, 1e-3), ContractError);
    }
    SUBCASE("non-finite gradient is a fault") {
        CHECK_THROWS_AS(adam_update(p, std::vector<double>{1.0, NAN, 0.0}, fresh, 1e-3), FaultError);
    }
}
