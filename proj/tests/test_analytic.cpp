#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mfac/analytic.hpp"
#include "support.hpp"

using namespace mfac;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("MFG, set 1") {
    const AnalyticSolution s = solve_mfg(lq_set1());
    CHECK(s.kind == SolutionKind::MFG);
    CHECK(rel(s.gamma2, (-1.0 + std::sqrt(7.0)) / 4.0) < 1e-12);
    CHECK(rel(s.mean, 0.3 / 0.375) < 1e-12);
    CHECK(rel(s.variance, 0.09 / (4.0 * s.gamma2)) < 1e-12);
    CHECK(s.variance == doctest::Approx(0.0546856).epsilon(1e-6));
    CHECK(optimal_control(s, 0.0) == doctest::Approx(0.6583005).epsilon(1e-7));
    CHECK(rel(s.gamma1, -2.0 * s.gamma2 * s.mean) < 1e-12);
    // Regression pin of the constant term.
    CHECK(s.gamma0 == doctest::Approx(1.0003496142692876).epsilon(1e-12));
    CHECK(value_function(s, 0.0) == s.gamma0);
}

TEST_CASE("MFG, set 2 and the decoupled limit") {
    CHECK(rel(solve_mfg(lq_set2()).mean, 1.0) < 1e-12);
    LQConfig c = lq_set1();
    c.c1 = 0.0;
    CHECK(rel(solve_mfg(c).mean, c.c4) < 1e-12);
}

TEST_CASE("MFC") {
    CHECK(rel(solve_mfc(lq_set1()).mean, 0.3 / (0.75 + 1.0 - 0.1875)) < 1e-12);
    CHECK(rel(solve_mfc(lq_set1()).mean, 0.192) < 1e-12);
    CHECK(rel(solve_mfc(lq_set2()).mean, 0.25 / 2.25) < 1e-12);
    LQConfig c = lq_set1();
    c.c5 = 0.0;
    c.c2 = 1.0;
    CHECK(rel(solve_mfc(c).mean, solve_mfg(c).mean) < 1e-12);
    // MFG and MFC solutions differ on both benchmark sets.
    CHECK(std::abs(solve_mfg(lq_set1()).mean - solve_mfc(lq_set1()).mean) > 0.1);
    CHECK(std::abs(solve_mfg(lq_set2()).mean - solve_mfc(lq_set2()).mean) > 0.1);
}

TEST_CASE("MFCG") {
    const AnalyticSolution s = solve_mfcg(mfcg_benchmark());
    CHECK(rel(s.gamma2, (-1.0 + std::sqrt(11.4)) / 4.0) < 1e-12);
    CHECK(rel(s.mean, 0.125 / 0.51875) < 1e-12);
    CHECK(rel(s.variance, 0.25 / (4.0 * s.gamma2)) < 1e-12);
    CHECK(s.variance == doctest::Approx(0.1052017).epsilon(1e-6));

    // Without the local terms the MFG mean formula comes back.
    MFCGConfig g = mfcg_benchmark();
    g.ct1 = 0.0;
    g.ct5 = 0.0;
    const LQConfig lq{g.c1, g.c2, g.c3, g.c4, 0.0, g.sigma_vol, g.beta, g.dt};
    CHECK(rel(solve_mfcg(g).mean, solve_mfg(lq).mean) < 1e-12);

    // Degree-0 homogeneity of the mean in the coefficient vector.
    MFCGConfig d = mfcg_benchmark();
    d.c1 *= 2; d.c3 *= 2; d.ct1 *= 2; d.ct5 *= 2;
    // c2, c4, ct2 enter as ratios; doubling the weights alone leaves m fixed.
    CHECK(rel(solve_mfcg(d).mean, s.mean) < 1e-12);
}

TEST_CASE("control and value readouts") {
    for (const AnalyticSolution& s : {solve_mfg(lq_set1()), solve_mfc(lq_set2()), solve_mfcg(mfcg_benchmark())}) {
        CHECK(std::abs(optimal_control(s, s.mean)) < 1e-12);
        for (double x : {-1.0, 0.3, 2.0})
            CHECK(optimal_control(s, x + 1.0) - optimal_control(s, x) == doctest::Approx(-2.0 * s.gamma2).epsilon(1e-12));
        // Vertex of the value parabola sits at the mean.
        const double h = 1e-4;
        CHECK(value_function(s, s.mean) < value_function(s, s.mean + h));
        CHECK(value_function(s, s.mean) < value_function(s, s.mean - h));
        CHECK(limiting_density(s, s.mean) == doctest::Approx(1.0 / std::sqrt(2 * M_PI * s.variance)).epsilon(1e-14));
    }
}

TEST_CASE("fixed-point oracle") {
    CHECK(mfg_fixed_point_residual(lq_set1()) < 1e-10);
    CHECK(mfg_fixed_point_residual(lq_set2()) < 1e-10);
    CHECK(mfg_best_response_mean(lq_set1(), 0.8) == doctest::Approx(0.8).epsilon(1e-14));

    // Off the fixed point the map moves, and iterating it contracts to m̂.
    for (const LQConfig& c : {lq_set1(), lq_set2()}) {
        const double m_hat = solve_mfg(c).mean;
        const double rate = c.c1 * c.c2 / (c.c1 + c.c3);
        REQUIRE(rate < 1.0);
        double m = m_hat + 3.0;
        CHECK(std::abs(mfg_best_response_mean(c, m) - m) > 0.0);
        for (int k = 0; k < 200; ++k) {
            const double next = mfg_best_response_mean(c, m);
            CHECK(std::abs(next - m_hat) <= rate * std::abs(m - m_hat) + 1e-15);
            m = next;
        }
        CHECK(std::abs(m - m_hat) < 1e-10);
    }
}

TEST_CASE("sweep over random valid configurations") {
    std::mt19937_64 gen(4242);
    std::uniform_real_distribution<double> pos(0.05, 2.0), any(-2.0, 2.0), vol(0.1, 1.0), beta(0.5, 2.0);
    int solved = 0;
    for (int t = 0; t < 1000; ++t) {
        const LQConfig c{pos(gen), any(gen), pos(gen), any(gen), pos(gen), vol(gen), beta(gen), 0.01};
        const MFCGConfig g{pos(gen), any(gen), pos(gen), any(gen), pos(gen), any(gen), pos(gen), vol(gen), beta(gen), 0.01};
        std::vector<AnalyticSolution> sols;
        for (auto solve : {+[](const LQConfig& x) { return solve_mfg(x); }, +[](const LQConfig& x) { return solve_mfc(x); }}) {
            try {
                sols.push_back(solve(c));
            } catch (const ContractError&) {
            }
        }
        try {
            sols.push_back(solve_mfcg(g));
        } catch (const ContractError&) {
        }
        for (const AnalyticSolution& s : sols) {
            ++solved;
            CHECK(quadratic_residual(s) < 1e-12);
            CHECK(std::abs(s.mean + s.gamma1 / (2 * s.gamma2)) < 1e-12 * std::max(1.0, std::abs(s.mean)));
            CHECK(s.gamma2 > 0.0);
            CHECK(s.variance > 0.0);
        }
    }
    CHECK(solved > 2900);
}

TEST_CASE("degenerate configurations are rejected") {
    const LQConfig zero{0, 0, 0, 0, 0, 0.3, 1.0, 0.01};
    CHECK_THROWS_AS(solve_mfg(zero), ContractError);
    CHECK_THROWS_AS(solve_mfc(zero), ContractError);
    // c1 + c3 - c1 c2 = 0.
    const LQConfig singular{1.0, 1.5, 0.5, 1.0, 0.0, 0.3, 1.0, 0.01};
    CHECK_THROWS_AS(solve_mfg(singular), ContractError);
    CHECK(to_string(SolutionKind::MFCG) == "MFCG");
    CHECK(solution_kind_from_string("mfc") == SolutionKind::MFC);
}
