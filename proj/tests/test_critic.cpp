#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mfac/critic.hpp"
#include "support.hpp"

using namespace mfac;

namespace {

CriticNet random_critic(std::uint64_t seed) {
    Rng rng(seed);
    CriticNet c = CriticNet::initialized(critic_spec(), rng);
    std::mt19937_64 gen(seed);
    ParamVector p = c.params();
    for (double& v : p) v += 0.2 * testing::random_vector(gen, 1, 1.0)[0];
    c.set_params(p);
    return c;
}

}  // namespace

TEST_CASE("value") {
    const CriticNet zero;
    CHECK(zero.params().size() == 385);
    for (double x : {-4.0, 0.0, 1.5}) CHECK(zero.value(x) == 0.0);

    const CriticNet c = random_critic(1);
    // Continuity: the step at h = 1e-6 is bounded by a local Lipschitz estimate.
    for (double x : {-2.0, -0.3, 0.0, 0.8, 2.2}) {
        const double lip = std::abs(c.value(x + 1e-3) - c.value(x - 1e-3)) / 2e-3 + 1.0;
        CHECK(std::abs(c.value(x + 1e-6) - c.value(x)) <= lip * 1e-6 * 1.01);
    }
    // Replaying stored parameters reproduces the values bit for bit.
    const CriticNet replay(critic_spec(), c.params());
    for (double x : {-1.0, 0.25, 3.0}) CHECK(replay.value(x) == c.value(x));
}

TEST_CASE("td target and error") {
    const double gamma = std::exp(-1.0 * 0.01);
    CHECK(td_target(-0.05, gamma, 2.0) == doctest::Approx(-0.05 + std::exp(-0.01) * 2.0).epsilon(1e-15));
    CHECK(td_target(-0.05, gamma, 2.0) == doctest::Approx(1.930100).epsilon(1e-6));
    CHECK(td_target(-0.3, gamma, 0.0) == -0.3);
    CHECK(td_target(-0.3, 0.0, 17.0) == -0.3);

    const double r = -0.02;
    const double v = r / (1.0 - gamma);
    CHECK(td_error(td_target(r, gamma, v), v) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(td_error(td_target(r, gamma, 0.0), 0.0) == r);
    CHECK(td_error(1.25 + 3.0, 0.5 + 3.0) == doctest::Approx(td_error(1.25, 0.5)).epsilon(1e-15));
}

TEST_CASE("critic semi-gradient") {
    SUBCASE("delta = 0 gives zero") {
        for (double g : random_critic(2).critic_loss_grad(0.4, 0.0)) CHECK(g == 0.0);
    }
    SUBCASE("one-parameter linear critic") {
        const CriticNet lin(NetSpec{1, {}, 1}, ParamVector{0.8, 0.0});
        const ParamVector g = lin.critic_loss_grad(2.0, 0.5);
        CHECK(g[0] == doctest::Approx(-2.0));
        CHECK(g[1] == doctest::Approx(-1.0));
    }
    SUBCASE("linear in delta") {
        const CriticNet c = random_critic(3);
        const ParamVector g1 = c.critic_loss_grad(-0.7, 0.013);
        const ParamVector g2 = c.critic_loss_grad(-0.7, 0.026);
        for (std::size_t i = 0; i < g1.size(); ++i) CHECK(g2[i] == 2.0 * g1[i]);
    }
    SUBCASE("finite difference of (y - V(x))² with y frozen, 100 instances") {
        std::mt19937_64 gen(31);
        const double gamma = std::exp(-0.01);
        double worst = 0.0, separation = 1e300;
        for (int t = 0; t < 100; ++t) {
            const CriticNet c = random_critic(200 + t);
            const auto v = testing::random_vector(gen, 3, 2.0);
            const double x = v[0], x_next = v[1], r = 0.05 * v[2];
            const double y = td_target(r, gamma, c.value(x_next));
            const double delta = td_error(y, c.value(x));
            const ParamVector g = c.critic_loss_grad(x, delta);
            auto semi = [&](const std::vector<double>& p) {
                const double d = y - CriticNet(critic_spec(), p).value(x);
                return d * d;
            };
            worst = std::max(worst, testing::max_coord_rel_error(g, testing::central_diff(semi, c.params())));

            // The full gradient also flows through V(x_next) and must differ.
            auto full = [&](const std::vector<double>& p) {
                const CriticNet q(critic_spec(), p);
                const double d = r + gamma * q.value(x_next) - q.value(x);
                return d * d;
            };
            separation = std::min(separation, testing::rel_error(g, testing::central_diff(full, c.params())));
        }
        CHECK(worst < 1e-4);
        CHECK(separation > 1e-3);
    }
}

// Critic alone on r = c, x' = x: V must approach c / (1 - gamma).
TEST_CASE("policy evaluation on a constant-reward chain") {
    const double gamma = std::exp(-0.01);
    const double r = -0.01;
    const double target = r / (1.0 - gamma);
    Rng rng(17);
    CriticNet c = CriticNet::initialized(critic_spec(), rng);
    AdamState adam = AdamState::zeros(c.params().size());
    Rng states(18);
    for (int n = 0; n < 20000; ++n) {
        const double x = 4.0 * states.uniform() - 2.0;
        const double delta = td_error(td_target(r, gamma, c.value(x)), c.value(x));
        AdamStep s = adam_update(c.params(), c.critic_loss_grad(x, delta), adam, 1e-3);
        c.set_params(std::move(s.params));
        adam = std::move(s.state);
    }
    for (int i = 0; i < 10; ++i) {
        const double x = -1.8 + 0.4 * i;
        CAPTURE(x);
        CHECK(std::abs(c.value(x) - target) < 0.05 * std::abs(target));
    }
}

TEST_CASE("fault and contract errors") {
    CHECK_THROWS_AS(CriticNet(critic_spec(), ParamVector(7, 0.0)), ContractError);
    CHECK_THROWS_AS(random_critic(4).critic_loss_grad(0.0, INFINITY), FaultError);
}
