#include "mfac/score.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mfac {

ScoreNet ScoreNet::zeros(NetSpec spec) {
    spec.validate();
    ScoreNet s{spec, ParamVector(spec.param_count(), 0.0)};
    return s;
}

ScoreNet ScoreNet::initialized(NetSpec spec, Rng& rng) {
    ParamVector p = init_params(spec, rng);
    return ScoreNet{std::move(spec), std::move(p)};
}

double ScoreNet::operator()(double x) const {
    return forward(spec, params, std::span<const double>(&x, 1))[0];
}

ScoreStep score_step(const ScoreNet& score, double x, double lr, const AdamState& adam) {
    const LossAndGrad lg = grad_params_of_score_loss(score.spec, score.params, std::span<const double>(&x, 1));
    AdamStep step = adam_update(score.params, lg.grad, adam, lr);
    return {ScoreNet{score.spec, std::move(step.params)}, std::move(step.state), lg.loss};
}

SampleSet langevin_sample(const ScoreNet& score, const SampleSet& warm_start, double eps,
                          int n_iter, Rng& rng) {
    if (!(eps > 0.0)) throw ContractError("Langevin step size must be > 0");
    if (n_iter < 0) throw ContractError("Langevin iteration count must be >= 0");
    const std::uint64_t key = rng.next_u64();
    if (n_iter == 0) return warm_start;

    const auto k = static_cast<Eigen::Index>(warm_start.size());
    Eigen::MatrixXd noise(n_iter, k);  // column i is particle i's stream
    for (Eigen::Index i = 0; i < k; ++i) {
        Rng stream(derive_key({key, static_cast<std::uint64_t>(i)}));
        for (int m = 0; m < n_iter; ++m) noise(m, i) = stream.normal();
    }

    Eigen::RowVectorXd x = Eigen::Map<const Eigen::RowVectorXd>(warm_start.particles.data(), k);
    const double half_eps = 0.5 * eps;
    const double root_eps = std::sqrt(eps);
    BatchForward eval(score.spec, k);
    for (int m = 0; m < n_iter; ++m)
        x += half_eps * eval(score.params, x) + root_eps * noise.row(m);

    SampleSet out{std::vector<double>(x.data(), x.data() + k)};
    if (!all_finite(out.particles)) throw FaultError("Langevin chain produced a non-finite particle");
    return out;
}

double empirical_mean(const SampleSet& samples) {
    if (samples.particles.empty()) throw ContractError("empirical_mean of an empty sample set");
    return std::accumulate(samples.particles.begin(), samples.particles.end(), 0.0) /
           static_cast<double>(samples.size());
}

double empirical_variance(const SampleSet& samples) {
    const double mean = empirical_mean(samples);
    double ss = 0.0;
    for (double p : samples.particles) ss += (p - mean) * (p - mean);
    return ss / static_cast<double>(samples.size());
}

double wasserstein1(const SampleSet& a, const SampleSet& b) {
    if (a.size() != b.size() || a.size() == 0)
        throw ContractError("wasserstein1 needs two non-empty sets of equal size");
    std::vector<double> sa = a.particles;
    std::vector<double> sb = b.particles;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    double total = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i) total += std::abs(sa[i] - sb[i]);
    return total / static_cast<double>(sa.size());
}

Histogram histogram(const SampleSet& samples, int bins, double lo, double hi) {
    if (bins < 1) throw ContractError("histogram needs at least one bin");
    if (!(hi > lo)) throw ContractError("histogram range must satisfy lo < hi");
    Histogram h{lo, hi, std::vector<std::int64_t>(static_cast<std::size_t>(bins), 0), 0, 0};
    const double width = (hi - lo) / bins;
    for (double p : samples.particles) {
        if (p < lo) {
            ++h.below;
        } else if (p > hi) {
            ++h.above;
        } else {
            auto idx = static_cast<std::size_t>((p - lo) / width);
            h.counts[std::min(idx, h.counts.size() - 1)] += 1;
        }
    }
    return h;
}

}  // namespace mfac
