#pragma once

#include "mfac/diffnet.hpp"

namespace mfac {

/// State-value network V(x).
class CriticNet {
public:
    explicit CriticNet(NetSpec spec = critic_spec(), ParamVector params = {});

    static CriticNet initialized(NetSpec spec, Rng& rng);

    const NetSpec& spec() const { return spec_; }
    const ParamVector& params() const { return params_; }
    void set_params(ParamVector params);

    double value(double x) const;

    /// Semi-gradient of delta² where only -V(x) depends on the parameters:
    /// -2 * delta * dV(x)/dparams.
    ParamVector critic_loss_grad(double x, double delta) const;

private:
    NetSpec spec_;
    ParamVector params_;
};

/// r + gamma * v_next. The caller treats the result as a constant.
inline double td_target(double reward, double gamma, double v_next) { return reward + gamma * v_next; }

inline double td_error(double target, double v_current) { return target - v_current; }

}  // namespace mfac
