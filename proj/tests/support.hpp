#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "mfac/diffnet.hpp"

namespace testing {

/// Central difference of f along every coordinate of p.
inline std::vector<double> central_diff(const std::function<double(const std::vector<double>&)>& f,
                                        std::vector<double> p, double h = 1e-5) {
    std::vector<double> g(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double orig = p[i];
        p[i] = orig + h;
        const double up = f(p);
        p[i] = orig - h;
        const double dn = f(p);
        p[i] = orig;
        g[i] = (up - dn) / (2 * h);
    }
    return g;
}

/// ||a - b|| / max(||b||, floor): one number per gradient vector, so tiny
/// coordinates dominated by finite-difference noise do not fail the check.
inline double rel_error(const std::vector<double>& a, const std::vector<double>& b, double floor = 1e-8) {
    double diff = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff += (a[i] - b[i]) * (a[i] - b[i]);
        norm += b[i] * b[i];
    }
    return std::sqrt(diff) / std::max(std::sqrt(norm), floor);
}

/// Plain scalar evaluation of a 1-in/1-out network, written without Eigen.
inline double naive_forward(const mfac::NetSpec& spec, const std::vector<double>& p, double x) {
    std::vector<double> a{x};
    std::size_t off = 0;
    for (const auto& layer : spec.hidden) {
        std::vector<double> z(static_cast<std::size_t>(layer.width));
        const std::size_t fan_in = a.size();
        for (std::size_t o = 0; o < z.size(); ++o) {
            double s = p[off + z.size() * fan_in + o];
            for (std::size_t i = 0; i < fan_in; ++i) s += p[off + o * fan_in + i] * a[i];
            switch (layer.activation) {
                case mfac::Activation::tanh: z[o] = std::tanh(s); break;
                case mfac::Activation::elu: z[o] = s > 0 ? s : std::expm1(s); break;
                case mfac::Activation::identity: z[o] = s; break;
                case mfac::Activation::softplus: z[o] = std::log1p(std::exp(s)); break;
            }
        }
        off += z.size() * fan_in + z.size();
        a = std::move(z);
    }
    double y = p[off + a.size()];
    for (std::size_t i = 0; i < a.size(); ++i) y += p[off + i] * a[i];
    return y;
}

/// Largest per-coordinate relative error, with coordinates below 1% of the
/// largest one measured against that 1% level.
inline double max_coord_rel_error(const std::vector<double>& a, const std::vector<double>& b) {
    double scale = 0.0;
    for (double v : b) scale = std::max(scale, std::abs(v));
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i] - b[i]) / std::max({std::abs(b[i]), 1e-2 * scale, 1e-12}));
    return worst;
}

inline std::vector<double> random_vector(std::mt19937_64& gen, std::size_t n, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    std::vector<double> v(n);
    for (double& e : v) e = u(gen);
    return v;
}

}  // namespace testing
