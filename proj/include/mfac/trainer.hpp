#pragma once

/// Three-timescale mean field actor-critic training loops.
///
/// One loop serves MFG and MFC; which solution it approaches is decided only
/// by the ordering of the learning rates:
///   MFG   lr_score < min(lr_actor, lr_critic)   (population nearly frozen)
///   MFC   lr_score > max(lr_actor, lr_critic)   (population moves with the policy)
///   MFCG  lr_score < min(lr_actor, lr_critic) < max(lr_actor, lr_critic) < lr_local_score
///
/// Per step n, in this order:
///   1. score-matching Adam step at X_n (then the local score, MFCG only)
///   2. Langevin sampling from the updated score(s), warm-started at the
///      previous step's particles
///   3. action A_n ~ policy(. | X_n)
///   4. reward r from the environment
///   5. next state X_{n+1} from the environment (clamped during warm-up)
///   6. TD target r + exp(-beta dt) V(X_{n+1}) and TD error
///   7. critic Adam step on the semi-gradient
///   8. actor Adam step on -delta * grad log policy
/// Random draws happen in the same order: Langevin keys, action noise,
/// dynamics noise.

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mfac/actor.hpp"
#include "mfac/critic.hpp"
#include "mfac/env.hpp"
#include "mfac/score.hpp"

namespace mfac {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Mode { MFG, MFC, MFCG };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& name);

struct TrainConfig {
    Mode mode = Mode::MFG;
    std::int64_t n_steps = 200000;
    double lr_actor = 5e-6;
    double lr_critic = 1e-5;
    double lr_score = 1e-6;
    double lr_local_score = 5e-4;
    double langevin_eps = 0.05;
    int langevin_iters = 50;
    int n_particles = 100;
    double truncation_bound = 5.0;
    std::int64_t truncation_steps = 40000;
    /// Also clamp the Langevin particles during warm-up.
    bool truncate_particles = true;
    std::uint64_t seed = 0;
    std::int64_t log_interval = 1000;
    double initial_state_mean = 0.0;
    double initial_state_std = 1.0;
    std::vector<double> probes = {-1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0};

    PolicyConfig policy;
    NetSpec critic = critic_spec();
    NetSpec score = score_spec();

    /// Throws ConfigError naming the violated requirement.
    void validate() const;
};

/// Reduced profile used by tests and CI: 2e5 steps, k = 100, 50 Langevin
/// iterations, warm-up truncation for the first 4e4 steps.
TrainConfig desk_profile(Mode mode);

/// Full-size profile: 1e6 steps (2e6 for MFCG), k = 1000, 200 iterations,
/// warm-up truncation for the first 2e5 steps.
TrainConfig paper_profile(Mode mode);

/// Analytic references used only for the error columns of the metric trace.
struct MetricTargets {
    std::optional<double> mean;
    std::optional<double> local_mean;
};

struct MetricRow {
    std::int64_t step = 0;  // steps completed
    double sample_mean = 0.0;
    double sample_var = 0.0;
    double abs_mean_error = 0.0;  // NaN without a target
    double td_err_avg = 0.0;      // window mean of |delta|
    double score_loss_avg = 0.0;  // window mean of the score loss
    std::vector<double> controls;  // actor mean at TrainConfig::probes
    // MFCG only.
    double local_sample_mean = 0.0;
    double local_sample_var = 0.0;
    double local_abs_mean_error = 0.0;
    double local_score_loss_avg = 0.0;
};

struct WindowStats {
    std::int64_t count = 0;
    double abs_td_sum = 0.0;
    double score_loss_sum = 0.0;
    double local_score_loss_sum = 0.0;
};

/// Everything needed to continue a run bit-for-bit.
struct TrainerState {
    std::int64_t step = 0;
    double x = 0.0;
    GaussianPolicy actor;
    CriticNet critic;
    ScoreNet score;
    ScoreNet local_score;
    AdamState actor_adam;
    AdamState critic_adam;
    AdamState score_adam;
    AdamState local_adam;
    SampleSet samples;
    SampleSet local_samples;
    Rng rng;
    WindowStats window;
    std::vector<MetricRow> trace;
};

enum class RunStatus { completed, fault };

enum class StepEvent {
    score_update,
    local_score_update,
    sampling,
    action,
    reward,
    next_state,
    critic_update,
    actor_update,
};

struct TrainHooks {
    std::function<void(StepEvent)> on_event;
    std::function<void(const MetricRow&)> on_row;
};

struct TrainResult {
    TrainerState state;
    RunStatus status = RunStatus::completed;
    std::int64_t fault_step = -1;
    std::string fault_message;
    double wall_seconds = 0.0;

    const std::vector<MetricRow>& trace() const { return state.trace; }
};

class Trainer {
public:
    /// Validates `cfg`; throws ConfigError before any training happens.
    Trainer(const Environment& env, TrainConfig cfg, MetricTargets targets = {});

    const TrainConfig& config() const { return cfg_; }

    TrainerState initial_state() const;

    /// Runs steps until state.step == until (capped at n_steps) or a fault.
    /// On fault the state is left as it was when the fault was detected.
    TrainResult advance(TrainerState state, std::int64_t until, const TrainHooks& hooks = {}) const;

private:
    void step_once(TrainerState& s, const TrainHooks& hooks) const;
    MetricRow make_row(const TrainerState& s) const;

    const Environment& env_;
    TrainConfig cfg_;
    MetricTargets targets_;
    double gamma_;
};

/// Mean field games and mean field control (mode MFG or MFC).
TrainResult run_ih_mf_ac(const Environment& env, const TrainConfig& cfg, MetricTargets targets = {},
                         const TrainHooks& hooks = {});

/// Mean field control games (mode MFCG): adds a fast local score.
TrainResult run_ih_mfcg_ac(const Environment& env, const TrainConfig& cfg, MetricTargets targets = {},
                           const TrainHooks& hooks = {});

/// Actor mean at each probe state.
std::vector<double> probe_control(const GaussianPolicy& actor, const std::vector<double>& probes);

}  // namespace mfac
