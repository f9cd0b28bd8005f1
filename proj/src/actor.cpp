#include "mfac/actor.hpp"

#include <cmath>
#include <numbers>

namespace mfac {

namespace {

double positive(PositivityMap map, double u) {
    switch (map) {
        case PositivityMap::softplus: return std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u)));
        case PositivityMap::exp: return std::exp(u);
        case PositivityMap::sigmoid: return 1.0 / (1.0 + std::exp(-u));
    }
    return u;
}

double positive_d1(PositivityMap map, double u) {
    switch (map) {
        case PositivityMap::softplus: return 1.0 / (1.0 + std::exp(-u));
        case PositivityMap::exp: return std::exp(u);
        case PositivityMap::sigmoid: {
            const double s = 1.0 / (1.0 + std::exp(-u));
            return s * (1.0 - s);
        }
    }
    return 1.0;
}

struct Offsets {
    std::size_t trunk_w, trunk_b, mean_w, mean_b, std_w, std_b, total;
};

Offsets offsets(int w) {
    const auto n = static_cast<std::size_t>(w);
    Offsets o{};
    o.trunk_w = 0;
    o.trunk_b = n;
    o.mean_w = 2 * n;
    o.mean_b = 3 * n;
    o.std_w = 3 * n + 1;
    o.std_b = 4 * n + 1;
    o.total = 4 * n + 2;
    return o;
}

}  // namespace

std::string to_string(PositivityMap map) {
    switch (map) {
        case PositivityMap::softplus: return "softplus";
        case PositivityMap::exp: return "exp";
        case PositivityMap::sigmoid: return "sigmoid";
    }
    return "unknown";
}

PositivityMap positivity_from_string(const std::string& name) {
    if (name == "softplus") return PositivityMap::softplus;
    if (name == "exp") return PositivityMap::exp;
    if (name == "sigmoid") return PositivityMap::sigmoid;
    throw ContractError("unknown positivity map '" + name + "'");
}

double gaussian_log_density(double mu, double sigma, double a) {
    const double r = (a - mu) / sigma;
    return -std::log(sigma) - 0.5 * std::log(2.0 * std::numbers::pi) - 0.5 * r * r;
}

std::size_t GaussianPolicy::param_count(const PolicyConfig& cfg) {
    return offsets(cfg.hidden_width).total;
}

GaussianPolicy::GaussianPolicy(PolicyConfig cfg, ParamVector params) : cfg_(cfg) {
    if (cfg_.hidden_width < 1) throw ContractError("policy hidden width must be >= 1");
    if (!(cfg_.std_floor > 0.0)) throw ContractError("policy std_floor must be > 0");
    if (params.empty()) params.assign(param_count(cfg_), 0.0);
    set_params(std::move(params));
}

GaussianPolicy GaussianPolicy::initialized(PolicyConfig cfg, Rng& rng) {
    // Same rule as the plain networks: trunk fan_in is 1, heads fan_in is w.
    const Offsets o = offsets(cfg.hidden_width);
    ParamVector p(o.total, 0.0);
    const double head_bound = 1.0 / std::sqrt(static_cast<double>(cfg.hidden_width));
    for (int j = 0; j < cfg.hidden_width; ++j) p[o.trunk_w + j] = 2.0 * rng.uniform() - 1.0;
    for (int j = 0; j < cfg.hidden_width; ++j) p[o.mean_w + j] = head_bound * (2.0 * rng.uniform() - 1.0);
    for (int j = 0; j < cfg.hidden_width; ++j) p[o.std_w + j] = head_bound * (2.0 * rng.uniform() - 1.0);
    return GaussianPolicy(cfg, std::move(p));
}

void GaussianPolicy::set_params(ParamVector params) {
    if (params.size() != param_count(cfg_))
        throw ContractError("policy parameter vector has the wrong length");
    params_ = std::move(params);
}

GaussianPolicy::Forward GaussianPolicy::run(double x) const {
    const Offsets o = offsets(cfg_.hidden_width);
    Forward f;
    f.hidden.resize(static_cast<std::size_t>(cfg_.hidden_width));
    f.mu = params_[o.mean_b];
    f.pre_std = params_[o.std_b];
    for (int j = 0; j < cfg_.hidden_width; ++j) {
        const double h = std::tanh(params_[o.trunk_w + j] * x + params_[o.trunk_b + j]);
        f.hidden[j] = h;
        f.mu += params_[o.mean_w + j] * h;
        f.pre_std += params_[o.std_w + j] * h;
    }
    f.sigma = positive(cfg_.positivity, f.pre_std) + cfg_.std_floor;
    if (!std::isfinite(f.mu) || !std::isfinite(f.sigma))
        throw FaultError("policy network produced a non-finite output");
    return f;
}

PolicyOutput GaussianPolicy::policy_params(double x) const {
    const Forward f = run(x);
    return {f.mu, f.sigma};
}

ActionSample GaussianPolicy::sample_action(double x, Rng& rng) const {
    const Forward f = run(x);
    const double z = rng.normal();
    const double a = f.mu + f.sigma * z;
    return {a, gaussian_log_density(f.mu, f.sigma, a)};
}

double GaussianPolicy::log_prob(double x, double a) const {
    const Forward f = run(x);
    return gaussian_log_density(f.mu, f.sigma, a);
}

ParamVector GaussianPolicy::log_prob_grad(double x, double a) const {
    const Offsets o = offsets(cfg_.hidden_width);
    const Forward f = run(x);
    const double diff = a - f.mu;
    const double var = f.sigma * f.sigma;
    const double g_mu = diff / var;
    const double g_sigma = -1.0 / f.sigma + diff * diff / (var * f.sigma);
    const double g_pre_std = g_sigma * positive_d1(cfg_.positivity, f.pre_std);

    ParamVector grad(o.total, 0.0);
    grad[o.mean_b] = g_mu;
    grad[o.std_b] = g_pre_std;
    for (int j = 0; j < cfg_.hidden_width; ++j) {
        const double h = f.hidden[j];
        grad[o.mean_w + j] = g_mu * h;
        grad[o.std_w + j] = g_pre_std * h;
        const double g_h = g_mu * params_[o.mean_w + j] + g_pre_std * params_[o.std_w + j];
        const double g_z = g_h * (1.0 - h * h);
        grad[o.trunk_w + j] = g_z * x;
        grad[o.trunk_b + j] = g_z;
    }
    return grad;
}

ParamVector GaussianPolicy::actor_loss_grad(double x, double a, double delta) const {
    if (!std::isfinite(delta)) throw FaultError("non-finite TD error passed to the actor");
    ParamVector grad = log_prob_grad(x, a);
    for (double& g : grad) g *= -delta;
    if (!all_finite(grad)) throw FaultError("non-finite actor gradient");
    return grad;
}

}  // namespace mfac
