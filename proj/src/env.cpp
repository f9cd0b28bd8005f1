#include "mfac/env.hpp"

#include <algorithm>
#include <cmath>

#include "mfac/diffnet.hpp"
#include "mfac/lq_env.hpp"

namespace mfac {

double truncate_state(double x, double bound) {
    if (!(bound > 0.0)) throw ContractError("truncation bound must be > 0");
    return std::clamp(x, -bound, bound);
}

namespace {

void check_common(double sigma_vol, double beta, double dt) {
    if (!(sigma_vol >= 0.0) || !std::isfinite(sigma_vol)) throw ContractError("volatility must be finite and >= 0");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ContractError("discount rate beta must be > 0");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ContractError("time step dt must be > 0");
}

void check_finite(std::initializer_list<double> values) {
    for (double v : values)
        if (!std::isfinite(v)) throw ContractError("cost coefficients must be finite");
}

double mean_of(const SampleSet* s) {
    if (s == nullptr) throw ContractError("environment needs a population sample set");
    return empirical_mean(*s);
}

}  // namespace

double LQConfig::gamma() const { return std::exp(-beta * dt); }

void LQConfig::validate() const {
    check_finite({c1, c2, c3, c4, c5});
    check_common(sigma_vol, beta, dt);
}

double MFCGConfig::gamma() const { return std::exp(-beta * dt); }

void MFCGConfig::validate() const {
    check_finite({c1, c2, c3, c4, ct1, ct2, ct5});
    check_common(sigma_vol, beta, dt);
}

LQConfig lq_set1() { return LQConfig{0.25, 1.5, 0.5, 0.6, 1.0, 0.3, 1.0, 0.01}; }

LQConfig lq_set2() { return LQConfig{0.15, 1.0, 0.25, 1.0, 2.0, 0.5, 1.0, 0.01}; }

MFCGConfig mfcg_benchmark() { return MFCGConfig{0.5, 1.5, 0.5, 0.25, 0.3, 1.25, 0.25, 0.5, 1.0, 0.01}; }

double lq_reward(const LQConfig& cfg, double x, double a, double m) {
    const double f = 0.5 * a * a + cfg.c1 * (x - cfg.c2 * m) * (x - cfg.c2 * m) +
                     cfg.c3 * (x - cfg.c4) * (x - cfg.c4) + cfg.c5 * m * m;
    return -f * cfg.dt;
}

double lq_step(const LQConfig& cfg, double x, double a, Rng& rng) {
    const double z = rng.normal();
    return x + a * cfg.dt + cfg.sigma_vol * std::sqrt(cfg.dt) * z;
}

double mfcg_reward(const MFCGConfig& cfg, double x, double a, double m_global, double m_local) {
    const double dg = x - cfg.c2 * m_global;
    const double dl = x - cfg.ct2 * m_local;
    const double f = 0.5 * a * a + cfg.c1 * dg * dg + cfg.c3 * (x - cfg.c4) * (x - cfg.c4) +
                     cfg.ct1 * dl * dl + cfg.ct5 * m_local * m_local;
    return -f * cfg.dt;
}

LqEnvironment::LqEnvironment(LQConfig cfg) : cfg_(cfg) { cfg_.validate(); }

double LqEnvironment::reward(double x, double a, const Population& pop) const {
    return lq_reward(cfg_, x, a, mean_of(pop.global));
}

double LqEnvironment::next_state(double x, double a, const Population&, Rng& rng) const {
    return lq_step(cfg_, x, a, rng);
}

MfcgEnvironment::MfcgEnvironment(MFCGConfig cfg) : cfg_(cfg) { cfg_.validate(); }

double MfcgEnvironment::reward(double x, double a, const Population& pop) const {
    return mfcg_reward(cfg_, x, a, mean_of(pop.global), mean_of(pop.local));
}

double MfcgEnvironment::next_state(double x, double a, const Population&, Rng& rng) const {
    // Same controlled diffusion as the LQ problem; the drift ignores both means.
    const double z = rng.normal();
    return x + a * cfg_.dt + cfg_.sigma_vol * std::sqrt(cfg_.dt) * z;
}

}  // namespace mfac
