#pragma once

/// Small feed-forward networks with hand-written reverse mode.
///
/// A network is a NetSpec (shape) plus a flat parameter vector. Layers are
/// stored in order; each contributes its weight matrix (fan_out x fan_in,
/// row-major) followed by its bias vector. Hidden layers apply their
/// activation, the output layer is always affine.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mfac/rng.hpp"

namespace mfac {

/// Shape or argument mismatch at an API boundary.
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A NaN or Inf reached a loss, gradient, or state.
class FaultError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Activation { tanh, elu, identity, softplus };

std::string to_string(Activation act);
Activation activation_from_string(const std::string& name);

struct HiddenLayer {
    int width = 1;
    Activation activation = Activation::tanh;
};

struct NetSpec {
    int input_dim = 1;
    std::vector<HiddenLayer> hidden;
    int output_dim = 1;

    /// Σ over layers of (fan_in + 1) * fan_out.
    std::size_t param_count() const;
    void validate() const;
};

using ParamVector = std::vector<double>;

/// Default architectures for the three networks of the actor-critic loop.
NetSpec critic_spec();  // 1 -> 128 elu -> 1
NetSpec score_spec();   // 1 -> 128 tanh -> 1

/// Uniform in ±1/sqrt(fan_in) per layer, zero biases.
ParamVector init_params(const NetSpec& spec, Rng& rng);

bool all_finite(std::span<const double> values);

// Elementwise activation and its first two derivatives. tanh is evaluated as
// 1 - 2 / (1 + exp(2z)) so Eigen can vectorize it.
Eigen::ArrayXXd activate(Activation act, const Eigen::ArrayXXd& z);
Eigen::ArrayXXd activate_d1(Activation act, const Eigen::ArrayXXd& z, const Eigen::ArrayXXd& a);
Eigen::ArrayXXd activate_d2(Activation act, const Eigen::ArrayXXd& z, const Eigen::ArrayXXd& a);

std::vector<double> forward(const NetSpec& spec, std::span<const double> params,
                            std::span<const double> x);

/// Batched evaluation of a 1-in/1-out network at every entry of `xs`.
Eigen::RowVectorXd forward_batch(const NetSpec& spec, std::span<const double> params,
                                 const Eigen::RowVectorXd& xs);

/// Reusable workspace for repeated batched evaluation at a fixed batch size.
/// Inner Langevin loops call this thousands of times per training step, so
/// it never allocates after construction.
class BatchForward {
public:
    BatchForward(const NetSpec& spec, Eigen::Index batch);

    const Eigen::RowVectorXd& operator()(std::span<const double> params, const Eigen::RowVectorXd& xs);

private:
    NetSpec spec_;
    std::vector<Eigen::ArrayXXd> buffers_;
    Eigen::RowVectorXd out_;
};

/// upstream * d forward / d params for a scalar-output network.
ParamVector grad_params_scalar(const NetSpec& spec, std::span<const double> params,
                               std::span<const double> x, double upstream);

/// Trace of the input Jacobian; requires input_dim == output_dim.
double input_derivative(const NetSpec& spec, std::span<const double> params,
                        std::span<const double> x);

struct LossAndGrad {
    double loss = 0.0;
    ParamVector grad;
};

/// Score-matching loss tr(dS/dx) + ½|S(x)|² and its exact parameter gradient,
/// computed forward-over-reverse along each input direction.
LossAndGrad grad_params_of_score_loss(const NetSpec& spec, std::span<const double> params,
                                      std::span<const double> x);

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::int64_t step_count = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps_hat = 1e-8;

    static AdamState zeros(std::size_t n);
};

struct AdamStep {
    ParamVector params;
    AdamState state;
};

/// One bias-corrected Adam descent step. Pure: returns the new parameters and
/// moments, leaving the inputs untouched.
AdamStep adam_update(std::span<const double> params, std::span<const double> grad,
                     const AdamState& state, double lr);

}  // namespace mfac
