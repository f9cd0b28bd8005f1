#include "mfac/analytic.hpp"

#include <cmath>
#include <numbers>

#include "mfac/diffnet.hpp"

namespace mfac {

namespace {

double positive_root(double beta, double c) {
    return (-beta + std::sqrt(beta * beta + 8.0 * c)) / 4.0;
}

void require_nonzero(double denominator, const char* what) {
    if (!std::isfinite(denominator) || std::abs(denominator) < 1e-14)
        throw ContractError(std::string("degenerate configuration: ") + what + " is zero");
}

}  // namespace

std::string to_string(SolutionKind kind) {
    switch (kind) {
        case SolutionKind::MFG: return "MFG";
        case SolutionKind::MFC: return "MFC";
        case SolutionKind::MFCG: return "MFCG";
    }
    return "unknown";
}

SolutionKind solution_kind_from_string(const std::string& name) {
    if (name == "mfg" || name == "MFG") return SolutionKind::MFG;
    if (name == "mfc" || name == "MFC") return SolutionKind::MFC;
    if (name == "mfcg" || name == "MFCG") return SolutionKind::MFCG;
    throw ContractError("unknown solution kind '" + name + "'");
}

AnalyticSolution solve_mfg(const LQConfig& cfg) {
    cfg.validate();
    AnalyticSolution s;
    s.kind = SolutionKind::MFG;
    s.beta = cfg.beta;
    s.quadratic_constant = cfg.c1 + cfg.c3;
    s.gamma2 = positive_root(cfg.beta, s.quadratic_constant);
    require_nonzero(s.gamma2, "Gamma2");

    const double mean_den = cfg.c1 + cfg.c3 - cfg.c1 * cfg.c2;
    const double g1_den = s.gamma2 * (cfg.beta + 2.0 * s.gamma2) - cfg.c1 * cfg.c2;
    require_nonzero(mean_den, "c1 + c3 - c1 c2");
    require_nonzero(g1_den, "Gamma2 (beta + 2 Gamma2) - c1 c2");

    s.mean = cfg.c3 * cfg.c4 / mean_den;
    s.gamma1 = -2.0 * s.gamma2 * cfg.c3 * cfg.c4 / g1_den;
    const double m2 = s.mean * s.mean;
    s.gamma0 = (cfg.c5 * m2 + cfg.c3 * cfg.c4 * cfg.c4 + cfg.c1 * cfg.c2 * cfg.c2 * m2 +
                cfg.sigma_vol * cfg.sigma_vol * s.gamma2 - 0.5 * s.gamma1 * s.gamma1) /
               cfg.beta;
    s.variance = cfg.sigma_vol * cfg.sigma_vol / (4.0 * s.gamma2);
    return s;
}

AnalyticSolution solve_mfc(const LQConfig& cfg) {
    cfg.validate();
    AnalyticSolution s;
    s.kind = SolutionKind::MFC;
    s.beta = cfg.beta;
    s.quadratic_constant = cfg.c1 + cfg.c3;
    s.gamma2 = positive_root(cfg.beta, s.quadratic_constant);
    require_nonzero(s.gamma2, "Gamma2");

    const double coupling = cfg.c5 - cfg.c1 * cfg.c2 * (2.0 - cfg.c2);
    const double mean_den = cfg.c1 + cfg.c3 + coupling;
    const double g1_den = s.gamma2 * (cfg.beta + 2.0 * s.gamma2) + coupling;
    require_nonzero(mean_den, "c1 + c3 + c5 - c1 c2 (2 - c2)");
    require_nonzero(g1_den, "Gamma2 (beta + 2 Gamma2) + c5 - c1 c2 (2 - c2)");

    s.mean = cfg.c3 * cfg.c4 / mean_den;
    s.gamma1 = -2.0 * s.gamma2 * cfg.c3 * cfg.c4 / g1_den;
    const double m2 = s.mean * s.mean;
    s.gamma0 = (cfg.c5 * m2 + cfg.c3 * cfg.c4 * cfg.c4 + cfg.c1 * cfg.c2 * cfg.c2 * m2 +
                cfg.sigma_vol * cfg.sigma_vol * s.gamma2 - 0.5 * s.gamma1 * s.gamma1) /
               cfg.beta;
    s.variance = cfg.sigma_vol * cfg.sigma_vol / (4.0 * s.gamma2);
    return s;
}

AnalyticSolution solve_mfcg(const MFCGConfig& cfg) {
    cfg.validate();
    AnalyticSolution s;
    s.kind = SolutionKind::MFCG;
    s.beta = cfg.beta;
    s.quadratic_constant = cfg.c1 + cfg.c3 + cfg.ct1;
    s.gamma2 = positive_root(cfg.beta, s.quadratic_constant);
    require_nonzero(s.gamma2, "Gamma2");

    const double one_minus_ct2 = 1.0 - cfg.ct2;
    const double den = cfg.c1 * (1.0 - cfg.c2) + cfg.ct1 * one_minus_ct2 * one_minus_ct2 + cfg.c3 + cfg.ct5;
    require_nonzero(den, "c1 (1 - c2) + ct1 (1 - ct2)^2 + c3 + ct5");

    s.gamma1 = -2.0 * s.gamma2 * cfg.c3 * cfg.c4 / den;
    s.mean = cfg.c3 * cfg.c4 / den;
    const double m2 = s.mean * s.mean;
    s.gamma0 = (cfg.c1 * cfg.c2 * cfg.c2 * m2 + (cfg.ct1 * cfg.ct2 * cfg.ct2 + cfg.ct5) * m2 +
                cfg.sigma_vol * cfg.sigma_vol * s.gamma2 - 0.5 * s.gamma1 * s.gamma1 +
                cfg.c3 * cfg.c4 * cfg.c4) /
               cfg.beta;
    s.variance = cfg.sigma_vol * cfg.sigma_vol / (4.0 * s.gamma2);
    return s;
}

double optimal_control(const AnalyticSolution& sol, double x) { return -(2.0 * sol.gamma2 * x + sol.gamma1); }

double value_function(const AnalyticSolution& sol, double x) {
    return (sol.gamma2 * x + sol.gamma1) * x + sol.gamma0;
}

double limiting_density(const AnalyticSolution& sol, double x) {
    const double d = x - sol.mean;
    return std::exp(-0.5 * d * d / sol.variance) / std::sqrt(2.0 * std::numbers::pi * sol.variance);
}

double quadratic_residual(const AnalyticSolution& sol) {
    return std::abs(2.0 * sol.gamma2 * sol.gamma2 + sol.beta * sol.gamma2 - sol.quadratic_constant);
}

double mfg_best_response_mean(const LQConfig& cfg, double m) {
    const double den = cfg.c1 + cfg.c3;
    require_nonzero(den, "c1 + c3");
    return (cfg.c1 * cfg.c2 * m + cfg.c3 * cfg.c4) / den;
}

double mfg_fixed_point_residual(const LQConfig& cfg) {
    const double m_hat = solve_mfg(cfg).mean;
    return std::abs(mfg_best_response_mean(cfg, m_hat) - m_hat);
}

}  // namespace mfac
