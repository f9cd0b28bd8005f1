#pragma once

/// Closed-form solutions of the LQ benchmarks.
///
/// All three problems have a quadratic value function v(x) = g2 x² + g1 x + g0,
/// a linear optimal feedback a(x) = -(2 g2 x + g1), and a Gaussian limiting law
/// N(-g1 / (2 g2), sigma² / (4 g2)) for the optimally controlled
/// Ornstein-Uhlenbeck state. g2 is the positive root of
///     2 g2² + beta g2 - C = 0,
/// with C = c1 + c3 (MFG and MFC) or c1 + c3 + ct1 (MFCG). The problems differ
/// in the linear coefficient, which fixes the mean:
///     MFG   m = c3 c4 / (c1 + c3 - c1 c2)
///     MFC   m = c3 c4 / (c1 + c3 + c5 - c1 c2 (2 - c2))
///     MFCG  m = c3 c4 / (c1 (1 - c2) + ct1 (1 - ct2)² + c3 + ct5)
///
/// Frozen-mean best response (used as the MFG fixed-point oracle): with the
/// population mean frozen at m, the running cost is a quadratic in x whose
/// linear part is -2 x (c1 c2 m + c3 c4). Matching linear coefficients in the
/// stationary HJB equation beta v = -½ v'² + ½ sigma² v'' + f gives
/// g1 (beta + 2 g2) = -2 (c1 c2 m + c3 c4), and with g2 (beta + 2 g2) = c1 + c3
/// the controlled state's stationary mean is
///     Phi(m) = (c1 c2 m + c3 c4) / (c1 + c3).
/// The MFG equilibrium mean is the fixed point of Phi.

#include <string>

#include "mfac/lq_env.hpp"

namespace mfac {

enum class SolutionKind { MFG, MFC, MFCG };

std::string to_string(SolutionKind kind);
SolutionKind solution_kind_from_string(const std::string& name);

struct AnalyticSolution {
    SolutionKind kind = SolutionKind::MFG;
    double gamma2 = 0.0;
    double gamma1 = 0.0;
    double gamma0 = 0.0;
    double mean = 0.0;
    double variance = 0.0;
    /// C in 2 g2² + beta g2 - C = 0, kept for the residual check.
    double quadratic_constant = 0.0;
    double beta = 1.0;
};

AnalyticSolution solve_mfg(const LQConfig& cfg);
AnalyticSolution solve_mfc(const LQConfig& cfg);
AnalyticSolution solve_mfcg(const MFCGConfig& cfg);

double optimal_control(const AnalyticSolution& sol, double x);
double value_function(const AnalyticSolution& sol, double x);

/// Density of the limiting Gaussian law at x.
double limiting_density(const AnalyticSolution& sol, double x);

/// |2 g2² + beta g2 - C|.
double quadratic_residual(const AnalyticSolution& sol);

/// Frozen-mean best-response map Phi(m) (see the file comment).
double mfg_best_response_mean(const LQConfig& cfg, double m);

/// |Phi(m_hat) - m_hat| at the closed-form MFG mean.
double mfg_fixed_point_residual(const LQConfig& cfg);

}  // namespace mfac
