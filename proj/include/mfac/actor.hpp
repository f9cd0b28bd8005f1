#pragma once

/// Gaussian stochastic policy for a scalar action.
///
/// Architecture: a shared 1 -> 64 tanh trunk feeding two affine heads. The
/// mean head is used as is; the standard-deviation head goes through a
/// positivity map and then gets an additive exploration floor, so
/// sigma(x) >= std_floor for every reachable parameter vector.
///
/// Flat parameter layout (258 entries at the default width):
///   trunk weights [w], trunk biases [w], mean weights [w], mean bias,
///   std weights [w], std bias.

#include <string>

#include "mfac/diffnet.hpp"
#include "mfac/rng.hpp"

namespace mfac {

enum class PositivityMap { softplus, exp, sigmoid };

std::string to_string(PositivityMap map);
PositivityMap positivity_from_string(const std::string& name);

struct PolicyConfig {
    int hidden_width = 64;
    PositivityMap positivity = PositivityMap::softplus;
    double std_floor = 1e-5;
};

struct PolicyOutput {
    double mu = 0.0;
    double sigma = 1.0;
};

struct ActionSample {
    double action = 0.0;
    double log_prob = 0.0;
};

/// log N(a; mu, sigma²).
double gaussian_log_density(double mu, double sigma, double a);

class GaussianPolicy {
public:
    /// Zero parameters when `params` is empty.
    explicit GaussianPolicy(PolicyConfig cfg = {}, ParamVector params = {});

    static GaussianPolicy initialized(PolicyConfig cfg, Rng& rng);
    static std::size_t param_count(const PolicyConfig& cfg);

    const PolicyConfig& config() const { return cfg_; }
    const ParamVector& params() const { return params_; }
    void set_params(ParamVector params);

    PolicyOutput policy_params(double x) const;
    ActionSample sample_action(double x, Rng& rng) const;
    double log_prob(double x, double a) const;

    /// d log_prob(a | x) / d params.
    ParamVector log_prob_grad(double x, double a) const;

    /// Gradient of -delta * log_prob(a | x); delta is a constant.
    ParamVector actor_loss_grad(double x, double a, double delta) const;

    /// Deterministic control readout: the mean head.
    double control(double x) const { return policy_params(x).mu; }

private:
    struct Forward {
        std::vector<double> hidden;
        double mu;
        double pre_std;
        double sigma;
    };
    Forward run(double x) const;

    PolicyConfig cfg_;
    ParamVector params_;
};

}  // namespace mfac
