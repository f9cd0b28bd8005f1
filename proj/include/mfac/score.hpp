#pragma once

/// Stein-score representation of a population distribution.
///
/// The score network S(x) approximates d/dx log p(x). It is trained online,
/// one state at a time, on the score-matching loss tr(dS/dx) + ½|S(x)|², and
/// samples are drawn from it with unadjusted Langevin dynamics
///     x <- x + (eps/2) S(x) + sqrt(eps) z.
/// Each particle is its own chain with its own noise substream, so the
/// result does not depend on the order particles are processed in.

#include <cstdint>
#include <vector>

#include "mfac/diffnet.hpp"
#include "mfac/rng.hpp"

namespace mfac {

struct ScoreNet {
    NetSpec spec = score_spec();
    ParamVector params;

    static ScoreNet zeros(NetSpec spec = score_spec());
    static ScoreNet initialized(NetSpec spec, Rng& rng);

    double operator()(double x) const;
};

struct SampleSet {
    std::vector<double> particles;

    std::size_t size() const { return particles.size(); }
};

struct ScoreStep {
    ScoreNet score;
    AdamState adam;
    double loss = 0.0;
};

/// One Adam step on the score-matching loss at a single state.
ScoreStep score_step(const ScoreNet& score, double x, double lr, const AdamState& adam);

/// Runs `n_iter` Langevin iterations from `warm_start`. One key is drawn from
/// `rng`; particle i then uses the substream derive_key({key, i}).
SampleSet langevin_sample(const ScoreNet& score, const SampleSet& warm_start, double eps,
                          int n_iter, Rng& rng);

double empirical_mean(const SampleSet& samples);

/// Second central moment (divides by k).
double empirical_variance(const SampleSet& samples);

/// Wasserstein-1 distance between two equally sized particle sets.
double wasserstein1(const SampleSet& a, const SampleSet& b);

struct Histogram {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<std::int64_t> counts;
    std::int64_t below = 0;
    std::int64_t above = 0;

    double bin_width() const { return (hi - lo) / static_cast<double>(counts.size()); }
    double bin_center(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * bin_width(); }
};

/// Equal-width bins on [lo, hi]; the right edge belongs to the last bin.
Histogram histogram(const SampleSet& samples, int bins, double lo, double hi);

}  // namespace mfac
