#pragma once

/// Linear-quadratic benchmark environments.
///
/// LQ mean field problem: running cost
///     f(x, m, a) = ½a² + c1 (x - c2 m)² + c3 (x - c4)² + c5 m²
/// with dynamics dX = a dt + sigma dW. The population enters only through
/// its mean m.
///
/// LQ mean field control game: the c5 term is replaced by a local-population
/// interaction
///     ... + ct1 (x - ct2 m_local)² + ct5 m_local²
/// while c1, c2 still couple to the global mean.

#include "mfac/env.hpp"

namespace mfac {

struct LQConfig {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0, c5 = 0.0;
    double sigma_vol = 1.0;
    double beta = 1.0;
    double dt = 0.01;

    double gamma() const;
    /// Throws ContractError on a degenerate configuration.
    void validate() const;
};

struct MFCGConfig {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
    double ct1 = 0.0, ct2 = 0.0, ct5 = 0.0;
    double sigma_vol = 1.0;
    double beta = 1.0;
    double dt = 0.01;

    double gamma() const;
    void validate() const;
};

/// Coefficient sets of the published LQ benchmarks (beta = 1, dt = 0.01).
LQConfig lq_set1();
LQConfig lq_set2();
MFCGConfig mfcg_benchmark();

double lq_reward(const LQConfig& cfg, double x, double a, double m);
double lq_step(const LQConfig& cfg, double x, double a, Rng& rng);
double mfcg_reward(const MFCGConfig& cfg, double x, double a, double m_global, double m_local);

class LqEnvironment final : public Environment {
public:
    explicit LqEnvironment(LQConfig cfg);

    double reward(double x, double a, const Population& pop) const override;
    double next_state(double x, double a, const Population& pop, Rng& rng) const override;
    double discount() const override { return cfg_.gamma(); }

    const LQConfig& config() const { return cfg_; }

private:
    LQConfig cfg_;
};

class MfcgEnvironment final : public Environment {
public:
    explicit MfcgEnvironment(MFCGConfig cfg);

    double reward(double x, double a, const Population& pop) const override;
    double next_state(double x, double a, const Population& pop, Rng& rng) const override;
    double discount() const override { return cfg_.gamma(); }
    bool uses_local_population() const override { return true; }

    const MFCGConfig& config() const { return cfg_; }

private:
    MFCGConfig cfg_;
};

}  // namespace mfac
