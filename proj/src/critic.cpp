#include "mfac/critic.hpp"

#include <cmath>

namespace mfac {

CriticNet::CriticNet(NetSpec spec, ParamVector params) : spec_(std::move(spec)) {
    spec_.validate();
    if (spec_.input_dim != 1 || spec_.output_dim != 1)
        throw ContractError("critic must map a scalar state to a scalar value");
    if (params.empty()) params.assign(spec_.param_count(), 0.0);
    set_params(std::move(params));
}

CriticNet CriticNet::initialized(NetSpec spec, Rng& rng) {
    ParamVector p = init_params(spec, rng);
    return CriticNet(std::move(spec), std::move(p));
}

void CriticNet::set_params(ParamVector params) {
    if (params.size() != spec_.param_count())
        throw ContractError("critic parameter vector has the wrong length");
    params_ = std::move(params);
}

double CriticNet::value(double x) const {
    const double v = forward(spec_, params_, std::span<const double>(&x, 1))[0];
    if (!std::isfinite(v)) throw FaultError("critic produced a non-finite value");
    return v;
}

ParamVector CriticNet::critic_loss_grad(double x, double delta) const {
    if (!std::isfinite(delta)) throw FaultError("non-finite TD error passed to the critic");
    return grad_params_scalar(spec_, params_, std::span<const double>(&x, 1), -2.0 * delta);
}

}  // namespace mfac
