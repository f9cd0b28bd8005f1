#pragma once

/// Model-free environment boundary seen by the trainer.
///
/// The agent only observes rewards and next states. Everything about the
/// running cost and the dynamics stays behind this interface.

#include "mfac/rng.hpp"
#include "mfac/score.hpp"

namespace mfac {

/// Current estimate of the population: the global sample set, plus the local
/// one for mean field control games.
struct Population {
    const SampleSet* global = nullptr;
    const SampleSet* local = nullptr;
};

struct Transition {
    double reward = 0.0;
    double next_state = 0.0;
};

class Environment {
public:
    virtual ~Environment() = default;

    /// r = -f(x, population, a) * dt.
    virtual double reward(double x, double a, const Population& pop) const = 0;

    /// One Euler-Maruyama step of the controlled state.
    virtual double next_state(double x, double a, const Population& pop, Rng& rng) const = 0;

    /// Per-step discount exp(-beta * dt).
    virtual double discount() const = 0;

    /// True when reward() reads Population::local.
    virtual bool uses_local_population() const { return false; }
};

/// clamp(x, -bound, bound).
double truncate_state(double x, double bound);

}  // namespace mfac
