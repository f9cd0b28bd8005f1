#include "mfac/diffnet.hpp"

#include <cmath>
#include <sstream>

namespace mfac {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMatMap = Eigen::Map<const RowMatrix>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;
using MatMap = Eigen::Map<RowMatrix>;
using VecMap = Eigen::Map<Eigen::VectorXd>;

struct LayerShape {
    int fan_in;
    int fan_out;
    Activation activation;
    std::size_t offset;  // start of the weight block in the flat vector
};

std::vector<LayerShape> layer_shapes(const NetSpec& spec) {
    std::vector<LayerShape> layers;
    layers.reserve(spec.hidden.size() + 1);
    int fan_in = spec.input_dim;
    std::size_t offset = 0;
    for (const auto& h : spec.hidden) {
        layers.push_back({fan_in, h.width, h.activation, offset});
        offset += static_cast<std::size_t>(fan_in + 1) * h.width;
        fan_in = h.width;
    }
    layers.push_back({fan_in, spec.output_dim, Activation::identity, offset});
    return layers;
}

ConstMatMap weights(std::span<const double> params, const LayerShape& l) {
    return ConstMatMap(params.data() + l.offset, l.fan_out, l.fan_in);
}

ConstVecMap biases(std::span<const double> params, const LayerShape& l) {
    return ConstVecMap(params.data() + l.offset + static_cast<std::size_t>(l.fan_in) * l.fan_out,
                       l.fan_out);
}

void check_params(const NetSpec& spec, std::span<const double> params) {
    if (params.size() != spec.param_count()) {
        std::ostringstream msg;
        msg << "parameter vector has " << params.size() << " entries, spec expects "
            << spec.param_count();
        throw ContractError(msg.str());
    }
}

void check_input(const NetSpec& spec, std::span<const double> x) {
    if (static_cast<int>(x.size()) != spec.input_dim) {
        std::ostringstream msg;
        msg << "input has dimension " << x.size() << ", spec expects " << spec.input_dim;
        throw ContractError(msg.str());
    }
}

// Primal activations of every layer for a single input column, with the
// pre-activations kept for the backward pass.
struct Trace {
    std::vector<Eigen::ArrayXXd> pre;   // z_l
    std::vector<Eigen::ArrayXXd> post;  // a_l; post[0] is the input
};

Trace run_forward(const std::vector<LayerShape>& layers, std::span<const double> params,
                  const Eigen::MatrixXd& input) {
    Trace t;
    t.post.push_back(input.array());
    for (const auto& l : layers) {
        Eigen::MatrixXd z = weights(params, l) * t.post.back().matrix();
        z.colwise() += biases(params, l);
        t.post.push_back(activate(l.activation, z.array()));
        t.pre.push_back(std::move(z).array());
    }
    return t;
}

Eigen::MatrixXd as_column(std::span<const double> x) {
    return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

}  // namespace

std::string to_string(Activation act) {
    switch (act) {
        case Activation::tanh: return "tanh";
        case Activation::elu: return "elu";
        case Activation::identity: return "identity";
        case Activation::softplus: return "softplus";
    }
    return "unknown";
}

Activation activation_from_string(const std::string& name) {
    if (name == "tanh") return Activation::tanh;
    if (name == "elu") return Activation::elu;
    if (name == "identity") return Activation::identity;
    if (name == "softplus") return Activation::softplus;
    throw ContractError("unknown activation '" + name + "'");
}

std::size_t NetSpec::param_count() const {
    std::size_t n = 0;
    int fan_in = input_dim;
    for (const auto& h : hidden) {
        n += static_cast<std::size_t>(fan_in + 1) * h.width;
        fan_in = h.width;
    }
    return n + static_cast<std::size_t>(fan_in + 1) * output_dim;
}

void NetSpec::validate() const {
    if (input_dim < 1 || output_dim < 1) throw ContractError("network dimensions must be >= 1");
    for (const auto& h : hidden)
        if (h.width < 1) throw ContractError("hidden layer widths must be >= 1");
}

NetSpec critic_spec() { return NetSpec{1, {{128, Activation::elu}}, 1}; }

NetSpec score_spec() { return NetSpec{1, {{128, Activation::tanh}}, 1}; }

ParamVector init_params(const NetSpec& spec, Rng& rng) {
    spec.validate();
    ParamVector params(spec.param_count(), 0.0);
    for (const auto& l : layer_shapes(spec)) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(l.fan_in));
        const std::size_t n_weights = static_cast<std::size_t>(l.fan_in) * l.fan_out;
        for (std::size_t i = 0; i < n_weights; ++i)
            params[l.offset + i] = bound * (2.0 * rng.uniform() - 1.0);
    }
    return params;
}

bool all_finite(std::span<const double> values) {
    for (double v : values)
        if (!std::isfinite(v)) return false;
    return true;
}

Eigen::ArrayXXd activate(Activation act, const Eigen::ArrayXXd& z) {
    switch (act) {
        case Activation::tanh: return 1.0 - 2.0 / (1.0 + (2.0 * z).exp());
        case Activation::elu: return (z > 0.0).select(z, z.min(0.0).expm1());
        case Activation::identity: return z;
        case Activation::softplus: return z.max(0.0) + (-z.abs()).exp().log1p();
    }
    return z;
}

Eigen::ArrayXXd activate_d1(Activation act, const Eigen::ArrayXXd& z, const Eigen::ArrayXXd& a) {
    switch (act) {
        case Activation::tanh: return 1.0 - a.square();
        case Activation::elu: return (z > 0.0).select(Eigen::ArrayXXd::Ones(z.rows(), z.cols()), a + 1.0);
        case Activation::identity: return Eigen::ArrayXXd::Ones(z.rows(), z.cols());
        case Activation::softplus: return 1.0 / (1.0 + (-z).exp());
    }
    return z;
}

Eigen::ArrayXXd activate_d2(Activation act, const Eigen::ArrayXXd& z, const Eigen::ArrayXXd& a) {
    switch (act) {
        case Activation::tanh: return -2.0 * a * (1.0 - a.square());
        case Activation::elu: return (z > 0.0).select(Eigen::ArrayXXd::Zero(z.rows(), z.cols()), a + 1.0);
        case Activation::identity: return Eigen::ArrayXXd::Zero(z.rows(), z.cols());
        case Activation::softplus: {
            const Eigen::ArrayXXd s = 1.0 / (1.0 + (-z).exp());
            return s * (1.0 - s);
        }
    }
    return z;
}

std::vector<double> forward(const NetSpec& spec, std::span<const double> params,
                            std::span<const double> x) {
    check_params(spec, params);
    check_input(spec, x);
    const Trace t = run_forward(layer_shapes(spec), params, as_column(x));
    const auto& out = t.post.back();
    return std::vector<double>(out.data(), out.data() + out.size());
}

Eigen::RowVectorXd forward_batch(const NetSpec& spec, std::span<const double> params,
                                 const Eigen::RowVectorXd& xs) {
    BatchForward eval(spec, xs.size());
    return eval(params, xs);
}

BatchForward::BatchForward(const NetSpec& spec, Eigen::Index batch) : spec_(spec), out_(batch) {
    spec_.validate();
    if (spec_.input_dim != 1 || spec_.output_dim != 1)
        throw ContractError("batched evaluation requires a 1-in/1-out network");
    for (const auto& h : spec_.hidden) buffers_.emplace_back(h.width, batch);
}

const Eigen::RowVectorXd& BatchForward::operator()(std::span<const double> params,
                                                   const Eigen::RowVectorXd& xs) {
    check_params(spec_, params);
    if (xs.size() != out_.size()) throw ContractError("batch size differs from the workspace size");
    const auto layers = layer_shapes(spec_);
    for (std::size_t li = 0; li < layers.size(); ++li) {
        const auto& l = layers[li];
        const auto w = weights(params, l);
        const auto b = biases(params, l);
        if (li + 1 == layers.size()) {
            if (li == 0)
                out_.noalias() = w * xs;
            else
                out_.noalias() = w * buffers_[li - 1].matrix();
            out_.array() += b(0);
            break;
        }
        auto& z = buffers_[li];
        if (li == 0) {
            // Scalar input: fuse the affine map into the activation, one column per sample.
            const Eigen::ArrayXd wa = w.col(0).array();
            const Eigen::ArrayXd ba = b.array();
            for (Eigen::Index k = 0; k < xs.size(); ++k) {
                auto col = z.col(k);
                switch (l.activation) {
                    case Activation::tanh: col = 1.0 - 2.0 / (1.0 + (2.0 * (wa * xs(k) + ba)).exp()); break;
                    default: col = activate(l.activation, wa * xs(k) + ba); break;
                }
            }
            continue;
        }
        z.matrix().noalias() = w * buffers_[li - 1].matrix();
        z.matrix().colwise() += b;
        z = activate(l.activation, z);
    }
    return out_;
}

ParamVector grad_params_scalar(const NetSpec& spec, std::span<const double> params,
                               std::span<const double> x, double upstream) {
    check_params(spec, params);
    check_input(spec, x);
    if (spec.output_dim != 1) throw ContractError("grad_params_scalar requires output_dim = 1");

    const auto layers = layer_shapes(spec);
    const Trace t = run_forward(layers, params, as_column(x));
    ParamVector grad(params.size(), 0.0);

    Eigen::VectorXd adj = Eigen::VectorXd::Constant(1, upstream);
    for (std::size_t li = layers.size(); li-- > 0;) {
        const auto& l = layers[li];
        const Eigen::VectorXd dz =
            (adj.array() * activate_d1(l.activation, t.pre[li], t.post[li + 1]).col(0)).matrix();
        MatMap(grad.data() + l.offset, l.fan_out, l.fan_in) = dz * t.post[li].matrix().transpose();
        VecMap(grad.data() + l.offset + static_cast<std::size_t>(l.fan_in) * l.fan_out, l.fan_out) = dz;
        adj = weights(params, l).transpose() * dz;
    }
    if (!all_finite(grad)) throw FaultError("non-finite parameter gradient");
    return grad;
}

namespace {

// Primal plus one tangent (directional derivative along an input axis).
struct DualTrace {
    Trace primal;
    std::vector<Eigen::ArrayXXd> dpre;   // dz_l/dx
    std::vector<Eigen::ArrayXXd> dpost;  // da_l/dx; dpost[0] is the seed
};

DualTrace run_dual_forward(const std::vector<LayerShape>& layers, std::span<const double> params,
                           const Eigen::MatrixXd& input, int axis) {
    DualTrace d;
    d.primal.post.push_back(input.array());
    Eigen::ArrayXXd seed = Eigen::ArrayXXd::Zero(input.rows(), 1);
    seed(axis, 0) = 1.0;
    d.dpost.push_back(seed);
    for (const auto& l : layers) {
        const auto w = weights(params, l);
        Eigen::MatrixXd z = w * d.primal.post.back().matrix();
        z.colwise() += biases(params, l);
        Eigen::ArrayXXd dz = (w * d.dpost.back().matrix()).array();
        Eigen::ArrayXXd a = activate(l.activation, z.array());
        d.dpost.push_back(activate_d1(l.activation, z.array(), a) * dz);
        d.primal.pre.push_back(z.array());
        d.primal.post.push_back(std::move(a));
        d.dpre.push_back(std::move(dz));
    }
    return d;
}

}  // namespace

double input_derivative(const NetSpec& spec, std::span<const double> params,
                        std::span<const double> x) {
    check_params(spec, params);
    check_input(spec, x);
    if (spec.input_dim != spec.output_dim)
        throw ContractError("input Jacobian trace needs input_dim == output_dim");
    const auto layers = layer_shapes(spec);
    const Eigen::MatrixXd input = as_column(x);
    double trace = 0.0;
    for (int axis = 0; axis < spec.input_dim; ++axis)
        trace += run_dual_forward(layers, params, input, axis).dpost.back()(axis, 0);
    return trace;
}

LossAndGrad grad_params_of_score_loss(const NetSpec& spec, std::span<const double> params,
                                      std::span<const double> x) {
    check_params(spec, params);
    check_input(spec, x);
    if (spec.input_dim != spec.output_dim)
        throw ContractError("score loss needs input_dim == output_dim");

    const auto layers = layer_shapes(spec);
    const Eigen::MatrixXd input = as_column(x);
    LossAndGrad out;
    out.grad.assign(params.size(), 0.0);

    for (int axis = 0; axis < spec.input_dim; ++axis) {
        const DualTrace d = run_dual_forward(layers, params, input, axis);
        const Eigen::ArrayXXd& y = d.primal.post.back();
        out.loss += d.dpost.back()(axis, 0);

        // Output adjoints: the ½|y|² term is charged once, on the first axis.
        Eigen::VectorXd adj = axis == 0 ? Eigen::VectorXd(y.matrix().col(0))
                                        : Eigen::VectorXd::Zero(spec.output_dim);
        Eigen::VectorXd dadj = Eigen::VectorXd::Zero(spec.output_dim);
        dadj(axis) = 1.0;
        if (axis == 0) out.loss += 0.5 * y.matrix().squaredNorm();

        for (std::size_t li = layers.size(); li-- > 0;) {
            const auto& l = layers[li];
            const auto& z = d.primal.pre[li];
            const auto& a = d.primal.post[li + 1];
            const Eigen::ArrayXd s1 = activate_d1(l.activation, z, a).col(0);
            const Eigen::ArrayXd s2 = activate_d2(l.activation, z, a).col(0);
            const Eigen::VectorXd gz = (adj.array() * s1 + dadj.array() * s2 * d.dpre[li].col(0)).matrix();
            const Eigen::VectorXd gdz = (dadj.array() * s1).matrix();

            MatMap(out.grad.data() + l.offset, l.fan_out, l.fan_in) +=
                gz * d.primal.post[li].matrix().transpose() + gdz * d.dpost[li].matrix().transpose();
            VecMap(out.grad.data() + l.offset + static_cast<std::size_t>(l.fan_in) * l.fan_out,
                   l.fan_out) += gz;

            const auto w = weights(params, l);
            adj = w.transpose() * gz;
            dadj = w.transpose() * gdz;
        }
    }
    if (!std::isfinite(out.loss) || !all_finite(out.grad))
        throw FaultError("non-finite score loss or gradient");
    return out;
}

AdamState AdamState::zeros(std::size_t n) {
    AdamState s;
    s.m.assign(n, 0.0);
    s.v.assign(n, 0.0);
    return s;
}

AdamStep adam_update(std::span<const double> params, std::span<const double> grad,
                     const AdamState& state, double lr) {
    if (grad.size() != params.size() || state.m.size() != params.size() ||
        state.v.size() != params.size())
        throw ContractError("adam_update: parameter, gradient and moment sizes differ");
    if (!(lr >= 0.0)) throw ContractError("adam_update: learning rate must be >= 0");
    if (!all_finite(grad)) throw FaultError("adam_update: non-finite gradient");

    AdamStep out{ParamVector(params.begin(), params.end()), state};
    AdamState& s = out.state;
    s.step_count += 1;
    const double t = static_cast<double>(s.step_count);
    const double c1 = 1.0 - std::pow(s.beta1, t);
    const double c2 = 1.0 - std::pow(s.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        s.m[i] = s.beta1 * s.m[i] + (1.0 - s.beta1) * grad[i];
        s.v[i] = s.beta2 * s.v[i] + (1.0 - s.beta2) * grad[i] * grad[i];
        const double m_hat = s.m[i] / c1;
        const double v_hat = s.v[i] / c2;
        out.params[i] -= lr * m_hat / (std::sqrt(v_hat) + s.eps_hat);
    }
    if (!all_finite(out.params)) throw FaultError("adam_update: parameters diverged");
    return out;
}

}  // namespace mfac
