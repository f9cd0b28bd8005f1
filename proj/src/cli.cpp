#include "mfac/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "mfac/io.hpp"

namespace mfac {

namespace fs = std::filesystem;

namespace {

struct TrainArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    int seeds = 1;
    std::optional<std::string> profile;
    std::string out;
    std::string resume;
    std::int64_t checkpoint_interval = 0;
    std::int64_t stop_after = -1;
    bool quiet = false;
};

struct AnalyticArgs {
    std::string config;
    std::string kind;
};

struct HistArgs {
    std::string checkpoint;
    int bins = 50;
    std::vector<double> range;
    std::string out;
    std::uint64_t seed = 0;
};

void write_json(const fs::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

fs::path output_dir(const TrainArgs& args, const RunConfigFile& cfg) {
    if (!args.out.empty()) return args.out;
    if (const char* env = std::getenv("MFAC_OUTPUT_DIR"); env && *env) return env;
    return cfg.output;
}

RunConfigFile config_from_resolved(const Json& resolved) {
    RunConfigFile cfg;
    cfg.problem = problem_from_json(resolved.at("problem"));
    cfg.training = train_config_from_json(resolved.at("training"), TrainConfig{});
    cfg.profile = resolved.value("profile", "desk");
    cfg.training.validate();
    return cfg;
}

/// One seed, start to finish (or to --stop-after). Returns the exit code.
int train_one(RunConfigFile cfg, const fs::path& dir, std::optional<TrainerState> resume_state,
              const TrainArgs& args) {
    fs::create_directories(dir);
    const auto env = make_environment(cfg.problem);
    const Trainer trainer(*env, cfg.training, targets_for(cfg.problem, cfg.training.mode));

    TrainerState state = resume_state ? std::move(*resume_state) : trainer.initial_state();
    std::int64_t until = cfg.training.n_steps;
    if (args.stop_after >= 0) until = std::min(until, args.stop_after);
    const std::int64_t chunk = args.checkpoint_interval > 0 ? args.checkpoint_interval : until;

    TrainHooks hooks;
    if (!args.quiet) {
        hooks.on_row = [&](const MetricRow& r) {
            std::cout << "seed " << cfg.training.seed << " step " << r.step << " mean " << r.sample_mean
                      << " var " << r.sample_var << " |err| " << r.abs_mean_error << '\n';
        };
    }

    TrainResult result;
    result.state = std::move(state);
    double wall = 0.0;
    do {
        const std::int64_t target = std::min(until, result.state.step + std::max<std::int64_t>(chunk, 1));
        result = trainer.advance(std::move(result.state), target, hooks);
        wall += result.wall_seconds;
        save_checkpoint(dir / "checkpoint.json", cfg, result.state);
        if (result.status == RunStatus::fault) break;
    } while (result.state.step < until);
    result.wall_seconds = wall;

    write_metrics_csv(dir / "metrics.csv", cfg.training, result.trace());
    write_json(dir / "summary.json", make_summary(cfg, result));

    if (result.status == RunStatus::fault) {
        std::cerr << "fault at step " << result.fault_step << ": " << result.fault_message << '\n';
        return kExitFault;
    }
    return kExitOk;
}

int cmd_train(const TrainArgs& args) {
    if (!args.resume.empty()) {
        Checkpoint cp = load_checkpoint(args.resume);
        RunConfigFile cfg = config_from_resolved(cp.config);
        if (config_hash(cfg) != cp.config_hash) throw ConfigError("checkpoint config hash mismatch");
        if (!args.config.empty()) {
            const RunConfigFile given = load_run_config(args.config, args.profile);
            RunConfigFile probe = given;
            probe.training.seed = args.seed.value_or(given.training.seed);
            if (config_hash(probe) != cp.config_hash)
                throw ConfigError("--config does not match the configuration stored in the checkpoint");
        }
        cfg.output = args.out.empty() ? fs::path(args.resume).parent_path().string() : args.out;
        TrainArgs a = args;
        a.out = cfg.output;
        return train_one(cfg, output_dir(a, cfg), std::move(cp.state), args);
    }

    if (args.config.empty()) throw ConfigError("train needs --config (or --resume)");
    RunConfigFile cfg = load_run_config(args.config, args.profile);
    if (args.seed) cfg.training.seed = *args.seed;
    const fs::path dir = output_dir(args, cfg);
    if (args.seeds <= 1) return train_one(cfg, dir, std::nullopt, args);

    // Seed ensemble: independent runs in seed_<s>/, then the aggregate.
    int code = kExitOk;
    std::vector<CsvTable> tables;
    for (int i = 0; i < args.seeds; ++i) {
        RunConfigFile one = cfg;
        one.training.seed = cfg.training.seed + static_cast<std::uint64_t>(i);
        const fs::path sub = dir / ("seed_" + std::to_string(one.training.seed));
        const int rc = train_one(one, sub, std::nullopt, args);
        if (rc != kExitOk) code = rc;
        tables.push_back(read_csv(sub / "metrics.csv"));
    }
    try {
        write_csv(dir / "aggregate.csv", aggregate_tables(tables));
    } catch (const std::invalid_argument& e) {
        std::cerr << "aggregate skipped: " << e.what() << '\n';
        if (code == kExitOk) code = kExitFault;
    }
    return code;
}

int cmd_analytic(const AnalyticArgs& args) {
    const RunConfigFile cfg = load_run_config(args.config);
    AnalyticSolution sol;
    if (args.kind == "mfcg") {
        const auto* g = std::get_if<MFCGConfig>(&cfg.problem);
        if (!g) throw ConfigError("--kind mfcg needs a problem of type mfcg");
        sol = solve_mfcg(*g);
    } else {
        const auto* lq = std::get_if<LQConfig>(&cfg.problem);
        if (!lq) throw ConfigError("--kind " + args.kind + " needs a problem of type lq");
        sol = args.kind == "mfc" ? solve_mfc(*lq) : solve_mfg(*lq);
    }
    Json j = {{"kind", to_string(sol.kind)},
              {"mean", sol.mean},
              {"variance", sol.variance},
              {"gamma2", sol.gamma2},
              {"gamma1", sol.gamma1},
              {"gamma0", sol.gamma0},
              {"quadratic_residual", quadratic_residual(sol)}};
    if (args.kind == "mfg") j["fixed_point_residual"] = mfg_fixed_point_residual(std::get<LQConfig>(cfg.problem));
    std::cout << j.dump(2) << '\n';
    return kExitOk;
}

Json histogram_json(const Histogram& h, const SampleSet& samples, const std::optional<AnalyticSolution>& sol) {
    std::vector<double> centers, density, analytic;
    const double k = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        const double c = h.bin_center(i);
        centers.push_back(c);
        density.push_back(static_cast<double>(h.counts[i]) / (k * h.bin_width()));
        if (sol) analytic.push_back(limiting_density(*sol, c));
    }
    return {{"bin_centers", centers},
            {"counts", h.counts},
            {"density", density},
            {"below", h.below},
            {"above", h.above},
            {"n_particles", samples.size()},
            {"analytic_density", sol ? Json(analytic) : Json(nullptr)}};
}

int cmd_export_hist(const HistArgs& args) {
    if (args.range.size() != 2) throw ConfigError("--range takes two numbers LO HI");
    const double lo = args.range[0];
    const double hi = args.range[1];
    if (!(hi > lo)) throw ConfigError("--range must satisfy LO < HI");
    if (args.bins < 1) throw ConfigError("--bins must be >= 1");

    const Checkpoint cp = load_checkpoint(args.checkpoint);
    const RunConfigFile cfg = config_from_resolved(cp.config);
    const TrainConfig& tc = cfg.training;
    const auto sol = analytic_for(cfg.problem, tc.mode);

    Rng rng(derive_key({args.seed, tc.seed, static_cast<std::uint64_t>(cp.state.step)}));
    const SampleSet samples =
        langevin_sample(cp.state.score, cp.state.samples, tc.langevin_eps, tc.langevin_iters, rng);

    Json j = {{"lo", lo}, {"hi", hi}, {"bins", args.bins}, {"step", cp.state.step}, {"mode", to_string(tc.mode)}};
    j["analytic"] = sol ? Json{{"mean", sol->mean}, {"variance", sol->variance}} : Json(nullptr);
    j["global"] = histogram_json(histogram(samples, args.bins, lo, hi), samples, sol);
    if (tc.mode == Mode::MFCG) {
        const SampleSet local = langevin_sample(cp.state.local_score, cp.state.local_samples, tc.langevin_eps,
                                                tc.langevin_iters, rng);
        j["local"] = histogram_json(histogram(local, args.bins, lo, hi), local, sol);
    }

    if (args.out.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        if (fs::path(args.out).has_parent_path()) fs::create_directories(fs::path(args.out).parent_path());
        write_json(args.out, j);
    }
    return kExitOk;
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"Three-timescale mean field actor-critic for linear-quadratic benchmarks"};
    app.require_subcommand(1);

    TrainArgs train;
    auto* t = app.add_subcommand("train", "Train one run or a seed ensemble");
    t->add_option("--config", train.config, "Run config JSON");
    t->add_option("--seed", train.seed, "Seed (overrides the config)");
    t->add_option("--seeds", train.seeds, "Ensemble size; seeds run as seed, seed+1, ...")
        ->check(CLI::PositiveNumber);
    t->add_option("--profile", train.profile, "Size profile")->check(CLI::IsMember({"desk", "paper"}));
    t->add_option("--out", train.out, "Output directory (else $MFAC_OUTPUT_DIR, else the config's output)");
    t->add_option("--resume", train.resume, "Continue from checkpoint.json");
    t->add_option("--checkpoint-interval", train.checkpoint_interval, "Write checkpoint.json every N steps");
    t->add_option("--stop-after", train.stop_after, "Pause once this many steps are done");
    t->add_flag("--quiet", train.quiet, "No progress lines");

    AnalyticArgs analytic;
    auto* a = app.add_subcommand("analytic", "Print the closed-form solution");
    a->add_option("--config", analytic.config, "Run config JSON")->required();
    a->add_option("--kind", analytic.kind, "Solution kind")->required()->check(CLI::IsMember({"mfg", "mfc", "mfcg"}));

    HistArgs hist;
    auto* h = app.add_subcommand("export-hist", "Histogram of fresh Langevin samples from a checkpoint");
    h->add_option("--checkpoint", hist.checkpoint, "checkpoint.json")->required();
    h->add_option("--bins", hist.bins, "Number of bins");
    h->add_option("--range", hist.range, "LO HI")->expected(2)->required();
    h->add_option("--out", hist.out, "Output JSON (default stdout)");
    h->add_option("--seed", hist.seed, "Sampling seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*t) return cmd_train(train);
        if (*a) return cmd_analytic(analytic);
        if (*h) return cmd_export_hist(hist);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ContractError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kExitConfig;
    } catch (const FaultError& e) {
        std::cerr << "fault: " << e.what() << '\n';
        return kExitFault;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}

}  // namespace mfac
