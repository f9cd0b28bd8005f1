#include "mfac/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mfac {

namespace {

// Stream tags for the per-network initialization streams.
constexpr std::uint64_t kMainStream = 0x6d61696e;
constexpr std::uint64_t kActorInit = 1;
constexpr std::uint64_t kCriticInit = 2;
constexpr std::uint64_t kScoreInit = 3;
constexpr std::uint64_t kLocalScoreInit = 4;

void emit(const TrainHooks& hooks, StepEvent e) {
    if (hooks.on_event) hooks.on_event(e);
}

double abs_error(const std::optional<double>& target, double value) {
    return target ? std::abs(value - *target) : std::numeric_limits<double>::quiet_NaN();
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

std::string to_string(Mode mode) {
    switch (mode) {
        case Mode::MFG: return "MFG";
        case Mode::MFC: return "MFC";
        case Mode::MFCG: return "MFCG";
    }
    return "unknown";
}

Mode mode_from_string(const std::string& name) {
    if (name == "MFG" || name == "mfg") return Mode::MFG;
    if (name == "MFC" || name == "mfc") return Mode::MFC;
    if (name == "MFCG" || name == "mfcg") return Mode::MFCG;
    throw ConfigError("unknown mode '" + name + "' (expected MFG, MFC or MFCG)");
}

void TrainConfig::validate() const {
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw ConfigError(what);
    };
    require(n_steps >= 0, "n_steps must be >= 0");
    require(lr_actor > 0 && lr_critic > 0 && lr_score > 0, "learning rates must be > 0");
    require(langevin_eps > 0, "langevin_eps must be > 0");
    require(langevin_iters >= 0, "langevin_iters must be >= 0");
    require(n_particles >= 1, "n_particles must be >= 1");
    require(truncation_bound > 0, "truncation_bound must be > 0");
    require(truncation_steps >= 0, "truncation_steps must be >= 0");
    require(log_interval >= 1, "log_interval must be >= 1");
    require(initial_state_std >= 0, "initial_state_std must be >= 0");
    require(critic.input_dim == 1 && critic.output_dim == 1, "critic network must be 1 -> 1");
    require(score.input_dim == 1 && score.output_dim == 1, "score network must be 1 -> 1");

    const double lo = std::min(lr_actor, lr_critic);
    const double hi = std::max(lr_actor, lr_critic);
    const std::string rates = " (lr_actor=" + fmt(lr_actor) + ", lr_critic=" + fmt(lr_critic) +
                              ", lr_score=" + fmt(lr_score) + ")";
    switch (mode) {
        case Mode::MFG:
            require(lr_score < lo, "MFG mode requires lr_score < min(lr_actor, lr_critic)" + rates);
            break;
        case Mode::MFC:
            require(lr_score > hi, "MFC mode requires lr_score > max(lr_actor, lr_critic)" + rates);
            break;
        case Mode::MFCG:
            require(lr_local_score > 0, "lr_local_score must be > 0");
            require(lr_score < lo && hi < lr_local_score,
                    "MFCG mode requires lr_score < min(lr_actor, lr_critic) < max(lr_actor, lr_critic) "
                    "< lr_local_score" +
                        rates.substr(0, rates.size() - 1) + ", lr_local_score=" + fmt(lr_local_score) + ")");
            break;
    }
}

TrainConfig desk_profile(Mode mode) {
    TrainConfig cfg;
    cfg.mode = mode;
    cfg.n_steps = mode == Mode::MFCG ? 400000 : 200000;
    cfg.lr_actor = 5e-6;
    cfg.lr_critic = 1e-5;
    cfg.lr_score = mode == Mode::MFC ? 5e-4 : 1e-6;
    cfg.lr_local_score = 5e-4;
    cfg.langevin_eps = 0.05;
    cfg.langevin_iters = 50;
    cfg.n_particles = 100;
    cfg.truncation_steps = cfg.n_steps / 5;
    cfg.log_interval = 1000;
    return cfg;
}

TrainConfig paper_profile(Mode mode) {
    TrainConfig cfg = desk_profile(mode);
    cfg.n_steps = mode == Mode::MFCG ? 2000000 : 1000000;
    cfg.langevin_iters = 200;
    cfg.n_particles = 1000;
    cfg.truncation_steps = 200000;
    cfg.log_interval = 5000;
    return cfg;
}

Trainer::Trainer(const Environment& env, TrainConfig cfg, MetricTargets targets)
    : env_(env), cfg_(std::move(cfg)), targets_(targets), gamma_(env.discount()) {
    cfg_.validate();
    if (!(gamma_ > 0.0 && gamma_ < 1.0)) throw ConfigError("environment discount must lie in (0, 1)");
}

TrainerState Trainer::initial_state() const {
    TrainerState s;
    Rng actor_rng(derive_key({cfg_.seed, kActorInit}));
    Rng critic_rng(derive_key({cfg_.seed, kCriticInit}));
    Rng score_rng(derive_key({cfg_.seed, kScoreInit}));
    Rng local_rng(derive_key({cfg_.seed, kLocalScoreInit}));
    s.actor = GaussianPolicy::initialized(cfg_.policy, actor_rng);
    s.critic = CriticNet::initialized(cfg_.critic, critic_rng);
    s.score = ScoreNet::initialized(cfg_.score, score_rng);
    s.actor_adam = AdamState::zeros(s.actor.params().size());
    s.critic_adam = AdamState::zeros(s.critic.params().size());
    s.score_adam = AdamState::zeros(s.score.params.size());
    if (cfg_.mode == Mode::MFCG) {
        s.local_score = ScoreNet::initialized(cfg_.score, local_rng);
        s.local_adam = AdamState::zeros(s.local_score.params.size());
    }

    s.rng = Rng(derive_key({cfg_.seed, kMainStream}));
    s.x = cfg_.initial_state_mean + cfg_.initial_state_std * s.rng.normal();
    // Step 0 has no previous particles: start the chains from the initial law.
    auto draw_initial = [&] {
        SampleSet set;
        set.particles.resize(static_cast<std::size_t>(cfg_.n_particles));
        for (double& p : set.particles) p = cfg_.initial_state_mean + cfg_.initial_state_std * s.rng.normal();
        return set;
    };
    s.samples = draw_initial();
    if (cfg_.mode == Mode::MFCG) s.local_samples = draw_initial();
    return s;
}

void Trainer::step_once(TrainerState& s, const TrainHooks& hooks) const {
    const bool game = cfg_.mode == Mode::MFCG;
    const bool warm_up = s.step < cfg_.truncation_steps;
    const double x = s.x;

    ScoreStep sc = score_step(s.score, x, cfg_.lr_score, s.score_adam);
    s.score = std::move(sc.score);
    s.score_adam = std::move(sc.adam);
    emit(hooks, StepEvent::score_update);

    double local_loss = 0.0;
    if (game) {
        ScoreStep lsc = score_step(s.local_score, x, cfg_.lr_local_score, s.local_adam);
        s.local_score = std::move(lsc.score);
        s.local_adam = std::move(lsc.adam);
        local_loss = lsc.loss;
        emit(hooks, StepEvent::local_score_update);
    }

    auto clamp_set = [&](SampleSet& set) {
        if (warm_up && cfg_.truncate_particles)
            for (double& p : set.particles) p = truncate_state(p, cfg_.truncation_bound);
    };
    s.samples = langevin_sample(s.score, s.samples, cfg_.langevin_eps, cfg_.langevin_iters, s.rng);
    clamp_set(s.samples);
    if (game) {
        s.local_samples =
            langevin_sample(s.local_score, s.local_samples, cfg_.langevin_eps, cfg_.langevin_iters, s.rng);
        clamp_set(s.local_samples);
    }
    emit(hooks, StepEvent::sampling);

    const Population pop{&s.samples, game ? &s.local_samples : nullptr};

    const ActionSample act = s.actor.sample_action(x, s.rng);
    emit(hooks, StepEvent::action);

    const double r = env_.reward(x, act.action, pop);
    if (!std::isfinite(r)) throw FaultError("environment returned a non-finite reward");
    emit(hooks, StepEvent::reward);

    double x_next = env_.next_state(x, act.action, pop, s.rng);
    if (warm_up) x_next = truncate_state(x_next, cfg_.truncation_bound);
    if (!std::isfinite(x_next)) throw FaultError("environment returned a non-finite state");
    emit(hooks, StepEvent::next_state);

    const double y = td_target(r, gamma_, s.critic.value(x_next));
    const double delta = td_error(y, s.critic.value(x));

    AdamStep critic_step = adam_update(s.critic.params(), s.critic.critic_loss_grad(x, delta), s.critic_adam,
                                       cfg_.lr_critic);
    s.critic.set_params(std::move(critic_step.params));
    s.critic_adam = std::move(critic_step.state);
    emit(hooks, StepEvent::critic_update);

    AdamStep actor_step = adam_update(s.actor.params(), s.actor.actor_loss_grad(x, act.action, delta),
                                      s.actor_adam, cfg_.lr_actor);
    s.actor.set_params(std::move(actor_step.params));
    s.actor_adam = std::move(actor_step.state);
    emit(hooks, StepEvent::actor_update);

    s.x = x_next;
    s.window.count += 1;
    s.window.abs_td_sum += std::abs(delta);
    s.window.score_loss_sum += sc.loss;
    s.window.local_score_loss_sum += local_loss;
    s.step += 1;
}

MetricRow Trainer::make_row(const TrainerState& s) const {
    MetricRow row;
    const double n = static_cast<double>(std::max<std::int64_t>(s.window.count, 1));
    row.step = s.step;
    row.sample_mean = empirical_mean(s.samples);
    row.sample_var = empirical_variance(s.samples);
    row.abs_mean_error = abs_error(targets_.mean, row.sample_mean);
    row.td_err_avg = s.window.abs_td_sum / n;
    row.score_loss_avg = s.window.score_loss_sum / n;
    row.controls = probe_control(s.actor, cfg_.probes);
    if (cfg_.mode == Mode::MFCG) {
        row.local_sample_mean = empirical_mean(s.local_samples);
        row.local_sample_var = empirical_variance(s.local_samples);
        row.local_abs_mean_error = abs_error(targets_.local_mean, row.local_sample_mean);
        row.local_score_loss_avg = s.window.local_score_loss_sum / n;
    }
    return row;
}

TrainResult Trainer::advance(TrainerState state, std::int64_t until, const TrainHooks& hooks) const {
    const auto start = std::chrono::steady_clock::now();
    TrainResult result;
    until = std::min(until, cfg_.n_steps);
    try {
        while (state.step < until) {
            step_once(state, hooks);
            if (state.step % cfg_.log_interval == 0 || state.step == cfg_.n_steps) {
                MetricRow row = make_row(state);
                state.window = WindowStats{};
                if (hooks.on_row) hooks.on_row(row);
                state.trace.push_back(std::move(row));
            }
        }
    } catch (const FaultError& e) {
        result.status = RunStatus::fault;
        result.fault_step = state.step;
        result.fault_message = e.what();
    }
    result.state = std::move(state);
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

TrainResult run_ih_mf_ac(const Environment& env, const TrainConfig& cfg, MetricTargets targets,
                         const TrainHooks& hooks) {
    if (cfg.mode == Mode::MFCG) throw ConfigError("run_ih_mf_ac handles MFG and MFC modes only");
    Trainer trainer(env, cfg, targets);
    return trainer.advance(trainer.initial_state(), cfg.n_steps, hooks);
}

TrainResult run_ih_mfcg_ac(const Environment& env, const TrainConfig& cfg, MetricTargets targets,
                           const TrainHooks& hooks) {
    if (cfg.mode != Mode::MFCG) throw ConfigError("run_ih_mfcg_ac requires mode MFCG");
    if (!env.uses_local_population())
        throw ConfigError("run_ih_mfcg_ac needs an environment that consumes the local population");
    Trainer trainer(env, cfg, targets);
    return trainer.advance(trainer.initial_state(), cfg.n_steps, hooks);
}

std::vector<double> probe_control(const GaussianPolicy& actor, const std::vector<double>& probes) {
    std::vector<double> out;
    out.reserve(probes.size());
    for (double p : probes) out.push_back(actor.control(p));
    return out;
}

}  // namespace mfac
