#include "mfac/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace mfac {

namespace {

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& section) {
    if (!j.is_object()) throw ConfigError("'" + section + "' must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!allowed.contains(key)) throw ConfigError("unknown key '" + key + "' in '" + section + "'");
}

double get_number(const Json& j, const std::string& key, const std::string& section) {
    if (!j.contains(key)) throw ConfigError("missing key '" + key + "' in '" + section + "'");
    if (!j.at(key).is_number()) throw ConfigError("'" + section + "." + key + "' must be a number");
    return j.at(key).get<double>();
}

// JSON has no NaN; rows without an analytic target store null.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double num_from(const Json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

Json layers_to_json(const NetSpec& spec) {
    Json arr = Json::array();
    for (const auto& h : spec.hidden) arr.push_back({{"width", h.width}, {"activation", to_string(h.activation)}});
    return arr;
}

NetSpec layers_from_json(const Json& arr, const std::string& section) {
    if (!arr.is_array()) throw ConfigError("'" + section + "' must be an array of layers");
    NetSpec spec{1, {}, 1};
    for (const auto& layer : arr) {
        check_keys(layer, {"width", "activation"}, section);
        try {
            spec.hidden.push_back({layer.at("width").get<int>(),
                                   activation_from_string(layer.at("activation").get<std::string>())});
        } catch (const ContractError& e) {
            throw ConfigError(e.what());
        }
    }
    return spec;
}

Json adam_to_json(const AdamState& s) {
    return {{"m", s.m}, {"v", s.v}, {"step_count", s.step_count},
            {"beta1", s.beta1}, {"beta2", s.beta2}, {"eps_hat", s.eps_hat}};
}

AdamState adam_from_json(const Json& j) {
    AdamState s;
    s.m = j.at("m").get<std::vector<double>>();
    s.v = j.at("v").get<std::vector<double>>();
    s.step_count = j.at("step_count").get<std::int64_t>();
    s.beta1 = j.at("beta1").get<double>();
    s.beta2 = j.at("beta2").get<double>();
    s.eps_hat = j.at("eps_hat").get<double>();
    return s;
}

Json row_to_json(const MetricRow& r) {
    return {{"step", r.step},
            {"sample_mean", num(r.sample_mean)},
            {"sample_var", num(r.sample_var)},
            {"abs_mean_error", num(r.abs_mean_error)},
            {"td_err_avg", num(r.td_err_avg)},
            {"score_loss_avg", num(r.score_loss_avg)},
            {"controls", r.controls},
            {"local_sample_mean", num(r.local_sample_mean)},
            {"local_sample_var", num(r.local_sample_var)},
            {"local_abs_mean_error", num(r.local_abs_mean_error)},
            {"local_score_loss_avg", num(r.local_score_loss_avg)}};
}

MetricRow row_from_json(const Json& j) {
    MetricRow r;
    r.step = j.at("step").get<std::int64_t>();
    r.sample_mean = num_from(j.at("sample_mean"));
    r.sample_var = num_from(j.at("sample_var"));
    r.abs_mean_error = num_from(j.at("abs_mean_error"));
    r.td_err_avg = num_from(j.at("td_err_avg"));
    r.score_loss_avg = num_from(j.at("score_loss_avg"));
    for (const auto& c : j.at("controls")) r.controls.push_back(num_from(c));
    r.local_sample_mean = num_from(j.at("local_sample_mean"));
    r.local_sample_var = num_from(j.at("local_sample_var"));
    r.local_abs_mean_error = num_from(j.at("local_abs_mean_error"));
    r.local_score_loss_avg = num_from(j.at("local_score_loss_avg"));
    return r;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

}  // namespace

Json problem_to_json(const Problem& problem) {
    if (const auto* lq = std::get_if<LQConfig>(&problem))
        return {{"type", "lq"}, {"c1", lq->c1}, {"c2", lq->c2}, {"c3", lq->c3}, {"c4", lq->c4},
                {"c5", lq->c5}, {"sigma_vol", lq->sigma_vol}, {"beta", lq->beta}, {"dt", lq->dt}};
    const auto& g = std::get<MFCGConfig>(problem);
    return {{"type", "mfcg"}, {"c1", g.c1}, {"c2", g.c2}, {"c3", g.c3}, {"c4", g.c4},
            {"ct1", g.ct1}, {"ct2", g.ct2}, {"ct5", g.ct5}, {"sigma_vol", g.sigma_vol},
            {"beta", g.beta}, {"dt", g.dt}};
}

Problem problem_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("type") || !j.at("type").is_string())
        throw ConfigError("'problem' needs a string 'type' (lq or mfcg)");
    const std::string type = j.at("type").get<std::string>();
    const std::string sec = "problem";
    try {
        if (type == "lq") {
            check_keys(j, {"type", "c1", "c2", "c3", "c4", "c5", "sigma_vol", "beta", "dt"}, sec);
            LQConfig c{get_number(j, "c1", sec), get_number(j, "c2", sec), get_number(j, "c3", sec),
                       get_number(j, "c4", sec), get_number(j, "c5", sec), get_number(j, "sigma_vol", sec),
                       get_number(j, "beta", sec), get_number(j, "dt", sec)};
            c.validate();
            return c;
        }
        if (type == "mfcg") {
            check_keys(j, {"type", "c1", "c2", "c3", "c4", "ct1", "ct2", "ct5", "sigma_vol", "beta", "dt"}, sec);
            MFCGConfig c{get_number(j, "c1", sec),  get_number(j, "c2", sec),  get_number(j, "c3", sec),
                         get_number(j, "c4", sec),  get_number(j, "ct1", sec), get_number(j, "ct2", sec),
                         get_number(j, "ct5", sec), get_number(j, "sigma_vol", sec),
                         get_number(j, "beta", sec), get_number(j, "dt", sec)};
            c.validate();
            return c;
        }
    } catch (const ContractError& e) {
        throw ConfigError(std::string("invalid problem: ") + e.what());
    }
    throw ConfigError("unknown problem type '" + type + "' (expected lq or mfcg)");
}

Json train_config_to_json(const TrainConfig& c) {
    return {{"mode", to_string(c.mode)},
            {"n_steps", c.n_steps},
            {"lr_actor", c.lr_actor},
            {"lr_critic", c.lr_critic},
            {"lr_score", c.lr_score},
            {"lr_local_score", c.lr_local_score},
            {"langevin_eps", c.langevin_eps},
            {"langevin_iters", c.langevin_iters},
            {"n_particles", c.n_particles},
            {"truncation_bound", c.truncation_bound},
            {"truncation_steps", c.truncation_steps},
            {"truncate_particles", c.truncate_particles},
            {"seed", c.seed},
            {"log_interval", c.log_interval},
            {"initial_state_mean", c.initial_state_mean},
            {"initial_state_std", c.initial_state_std},
            {"probes", c.probes},
            {"policy",
             {{"hidden_width", c.policy.hidden_width},
              {"positivity", to_string(c.policy.positivity)},
              {"std_floor", c.policy.std_floor}}},
            {"critic_layers", layers_to_json(c.critic)},
            {"score_layers", layers_to_json(c.score)}};
}

TrainConfig train_config_from_json(const Json& j, TrainConfig c) {
    const std::string sec = "training";
    check_keys(j, {"mode", "profile", "n_steps", "lr_actor", "lr_critic", "lr_score", "lr_local_score",
                   "langevin_eps", "langevin_iters", "n_particles", "truncation_bound", "truncation_steps",
                   "truncate_particles", "seed", "log_interval", "initial_state_mean", "initial_state_std",
                   "probes", "policy", "critic_layers", "score_layers"},
               sec);
    try {
        if (j.contains("mode")) c.mode = mode_from_string(j.at("mode").get<std::string>());
        auto set_int = [&](const char* key, auto& field) {
            if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
        };
        auto set_num = [&](const char* key, double& field) {
            if (j.contains(key)) field = get_number(j, key, sec);
        };
        set_int("n_steps", c.n_steps);
        set_num("lr_actor", c.lr_actor);
        set_num("lr_critic", c.lr_critic);
        set_num("lr_score", c.lr_score);
        set_num("lr_local_score", c.lr_local_score);
        set_num("langevin_eps", c.langevin_eps);
        set_int("langevin_iters", c.langevin_iters);
        set_int("n_particles", c.n_particles);
        set_num("truncation_bound", c.truncation_bound);
        set_int("truncation_steps", c.truncation_steps);
        if (j.contains("truncate_particles")) c.truncate_particles = j.at("truncate_particles").get<bool>();
        set_int("seed", c.seed);
        set_int("log_interval", c.log_interval);
        set_num("initial_state_mean", c.initial_state_mean);
        set_num("initial_state_std", c.initial_state_std);
        if (j.contains("probes")) c.probes = j.at("probes").get<std::vector<double>>();
        if (j.contains("policy")) {
            const Json& p = j.at("policy");
            check_keys(p, {"hidden_width", "positivity", "std_floor"}, "training.policy");
            if (p.contains("hidden_width")) c.policy.hidden_width = p.at("hidden_width").get<int>();
            if (p.contains("positivity"))
                c.policy.positivity = positivity_from_string(p.at("positivity").get<std::string>());
            if (p.contains("std_floor")) c.policy.std_floor = get_number(p, "std_floor", "training.policy");
        }
        if (j.contains("critic_layers")) c.critic = layers_from_json(j.at("critic_layers"), "training.critic_layers");
        if (j.contains("score_layers")) c.score = layers_from_json(j.at("score_layers"), "training.score_layers");
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("malformed training section: ") + e.what());
    } catch (const ContractError& e) {
        throw ConfigError(e.what());
    }
    return c;
}

RunConfigFile parse_run_config(const Json& j, const std::optional<std::string>& profile_override) {
    check_keys(j, {"problem", "training", "output"}, "config");
    if (!j.contains("problem")) throw ConfigError("config is missing the 'problem' section");
    if (!j.contains("training")) throw ConfigError("config is missing the 'training' section");

    RunConfigFile out;
    out.problem = problem_from_json(j.at("problem"));
    const Json& t = j.at("training");
    if (!t.is_object() || !t.contains("mode")) throw ConfigError("'training' must specify 'mode'");
    const Mode mode = mode_from_string(t.at("mode").get<std::string>());

    out.profile = profile_override.value_or(t.contains("profile") ? t.at("profile").get<std::string>() : "desk");
    TrainConfig base;
    if (out.profile == "desk")
        base = desk_profile(mode);
    else if (out.profile == "paper")
        base = paper_profile(mode);
    else
        throw ConfigError("unknown profile '" + out.profile + "' (expected desk or paper)");
    out.training = train_config_from_json(t, base);

    // With a profile override, step-count keys in the file would silently win;
    // re-apply the profile's sizes instead.
    if (profile_override) {
        out.training.n_steps = base.n_steps;
        out.training.langevin_iters = base.langevin_iters;
        out.training.n_particles = base.n_particles;
        out.training.truncation_steps = base.truncation_steps;
        out.training.log_interval = base.log_interval;
    }

    if (j.contains("output")) {
        if (!j.at("output").is_string()) throw ConfigError("'output' must be a directory path string");
        out.output = j.at("output").get<std::string>();
    }

    const bool game_problem = std::holds_alternative<MFCGConfig>(out.problem);
    if (game_problem != (out.training.mode == Mode::MFCG))
        throw ConfigError("mode " + to_string(out.training.mode) + " does not match problem type " +
                          (game_problem ? "mfcg" : "lq"));
    out.training.validate();
    return out;
}

RunConfigFile load_run_config(const std::filesystem::path& path,
                              const std::optional<std::string>& profile_override) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_run_config(j, profile_override);
}

Json resolved_config_json(const RunConfigFile& cfg) {
    return {{"problem", problem_to_json(cfg.problem)},
            {"training", train_config_to_json(cfg.training)},
            {"profile", cfg.profile}};
}

std::string config_hash(const RunConfigFile& cfg) {
    const std::string text = resolved_config_json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::unique_ptr<Environment> make_environment(const Problem& problem) {
    if (const auto* lq = std::get_if<LQConfig>(&problem)) return std::make_unique<LqEnvironment>(*lq);
    return std::make_unique<MfcgEnvironment>(std::get<MFCGConfig>(problem));
}

std::optional<AnalyticSolution> analytic_for(const Problem& problem, Mode mode) {
    try {
        if (const auto* lq = std::get_if<LQConfig>(&problem))
            return mode == Mode::MFC ? solve_mfc(*lq) : solve_mfg(*lq);
        return solve_mfcg(std::get<MFCGConfig>(problem));
    } catch (const ContractError&) {
        return std::nullopt;
    }
}

MetricTargets targets_for(const Problem& problem, Mode mode) {
    MetricTargets t;
    if (auto sol = analytic_for(problem, mode)) {
        t.mean = sol->mean;
        if (mode == Mode::MFCG) t.local_mean = sol->mean;
    }
    return t;
}

Json state_to_json(const TrainerState& s) {
    Json trace = Json::array();
    for (const auto& r : s.trace) trace.push_back(row_to_json(r));
    return {{"step", s.step},
            {"x", s.x},
            {"params",
             {{"actor", s.actor.params()},
              {"critic", s.critic.params()},
              {"score", s.score.params},
              {"local_score", s.local_score.params}}},
            {"adam",
             {{"actor", adam_to_json(s.actor_adam)},
              {"critic", adam_to_json(s.critic_adam)},
              {"score", adam_to_json(s.score_adam)},
              {"local_score", adam_to_json(s.local_adam)}}},
            {"samples", s.samples.particles},
            {"local_samples", s.local_samples.particles},
            {"rng", {{"key", s.rng.key()}, {"counter", s.rng.counter()}}},
            {"window",
             {{"count", s.window.count},
              {"abs_td_sum", s.window.abs_td_sum},
              {"score_loss_sum", s.window.score_loss_sum},
              {"local_score_loss_sum", s.window.local_score_loss_sum}}},
            {"trace", trace}};
}

TrainerState state_from_json(const Json& j, const TrainConfig& cfg) {
    TrainerState s;
    try {
        s.step = j.at("step").get<std::int64_t>();
        s.x = j.at("x").get<double>();
        const Json& p = j.at("params");
        s.actor = GaussianPolicy(cfg.policy, p.at("actor").get<ParamVector>());
        s.critic = CriticNet(cfg.critic, p.at("critic").get<ParamVector>());
        s.score = ScoreNet{cfg.score, p.at("score").get<ParamVector>()};
        s.local_score = ScoreNet{cfg.score, p.at("local_score").get<ParamVector>()};
        if (s.score.params.size() != cfg.score.param_count())
            throw ConfigError("checkpoint score parameters do not match the score network");
        const Json& a = j.at("adam");
        s.actor_adam = adam_from_json(a.at("actor"));
        s.critic_adam = adam_from_json(a.at("critic"));
        s.score_adam = adam_from_json(a.at("score"));
        s.local_adam = adam_from_json(a.at("local_score"));
        s.samples.particles = j.at("samples").get<std::vector<double>>();
        s.local_samples.particles = j.at("local_samples").get<std::vector<double>>();
        s.rng = Rng(j.at("rng").at("key").get<std::uint64_t>(), j.at("rng").at("counter").get<std::uint64_t>());
        const Json& w = j.at("window");
        s.window.count = w.at("count").get<std::int64_t>();
        s.window.abs_td_sum = w.at("abs_td_sum").get<double>();
        s.window.score_loss_sum = w.at("score_loss_sum").get<double>();
        s.window.local_score_loss_sum = w.at("local_score_loss_sum").get<double>();
        for (const auto& r : j.at("trace")) s.trace.push_back(row_from_json(r));
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("malformed checkpoint state: ") + e.what());
    } catch (const ContractError& e) {
        throw ConfigError(std::string("checkpoint does not match the configured networks: ") + e.what());
    }
    return s;
}

void save_checkpoint(const std::filesystem::path& path, const RunConfigFile& cfg, const TrainerState& state) {
    const Json j = {{"format", "mfac-checkpoint-1"},
                    {"config", resolved_config_json(cfg)},
                    {"config_hash", config_hash(cfg)},
                    {"state", state_to_json(state)}};
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot write checkpoint " + tmp);
        out << j.dump();
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open checkpoint " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("checkpoint " + path.string() + " is not valid JSON: " + e.what());
    }
    if (j.value("format", "") != "mfac-checkpoint-1") throw ConfigError("unrecognized checkpoint format");
    Checkpoint cp;
    cp.config = j.at("config");
    cp.config_hash = j.at("config_hash").get<std::string>();
    RunConfigFile cfg;
    cfg.problem = problem_from_json(cp.config.at("problem"));
    cfg.training = train_config_from_json(cp.config.at("training"), TrainConfig{});
    cp.state = state_from_json(j.at("state"), cfg.training);
    return cp;
}

std::vector<std::string> metrics_header(const TrainConfig& cfg) {
    std::vector<std::string> h = {"step", "sample_mean", "sample_var", "abs_mean_error", "td_err_avg", "score_loss_avg"};
    for (double p : cfg.probes) h.push_back("control_at_" + format_double(p));
    if (cfg.mode == Mode::MFCG) {
        h.insert(h.end(), {"local_sample_mean", "local_sample_var", "local_abs_mean_error", "local_score_loss_avg"});
    }
    return h;
}

std::string format_metric_row(const MetricRow& r, const TrainConfig& cfg) {
    std::string line = std::to_string(r.step);
    auto add = [&](double v) {
        line += ',';
        line += format_double(v);
    };
    add(r.sample_mean);
    add(r.sample_var);
    add(r.abs_mean_error);
    add(r.td_err_avg);
    add(r.score_loss_avg);
    for (double c : r.controls) add(c);
    if (cfg.mode == Mode::MFCG) {
        add(r.local_sample_mean);
        add(r.local_sample_var);
        add(r.local_abs_mean_error);
        add(r.local_score_loss_avg);
    }
    return line;
}

void write_metrics_csv(const std::filesystem::path& path, const TrainConfig& cfg, const std::vector<MetricRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    const auto header = metrics_header(cfg);
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& r : rows) out << format_metric_row(r, cfg) << '\n';
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path.string() + " is empty");
    t.header = split(line, ',');
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        for (const auto& cell : split(line, ',')) row.push_back(std::stod(cell));
        if (row.size() != t.header.size()) throw std::runtime_error(path.string() + ": ragged row");
        t.rows.push_back(std::move(row));
    }
    return t;
}

CsvTable aggregate_tables(const std::vector<CsvTable>& tables) {
    if (tables.empty()) throw std::invalid_argument("aggregate_tables needs at least one table");
    const CsvTable& first = tables.front();
    for (const auto& t : tables)
        if (t.header != first.header || t.rows.size() != first.rows.size())
            throw std::invalid_argument("aggregate_tables: tables differ in shape");

    CsvTable out;
    out.header.push_back("step");
    for (std::size_t c = 1; c < first.header.size(); ++c) {
        out.header.push_back(first.header[c] + "_mean");
        out.header.push_back(first.header[c] + "_std");
    }
    const double n = static_cast<double>(tables.size());
    for (std::size_t r = 0; r < first.rows.size(); ++r) {
        std::vector<double> row{first.rows[r][0]};
        for (std::size_t c = 1; c < first.header.size(); ++c) {
            double sum = 0.0;
            for (const auto& t : tables) sum += t.rows[r][c];
            const double mean = sum / n;
            double ss = 0.0;
            for (const auto& t : tables) ss += (t.rows[r][c] - mean) * (t.rows[r][c] - mean);
            row.push_back(mean);
            row.push_back(std::sqrt(ss / n));
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            if (i == 0)
                out << static_cast<std::int64_t>(row[i]);
            else
                out << format_double(row[i]);
        }
        out << '\n';
    }
}

Json make_summary(const RunConfigFile& cfg, const TrainResult& result) {
    const TrainConfig& tc = cfg.training;
    const TrainerState& s = result.state;
    const auto sol = analytic_for(cfg.problem, tc.mode);

    Json j;
    j["status"] = result.status == RunStatus::completed
                      ? (s.step == tc.n_steps ? "completed" : "paused")
                      : "fault";
    j["mode"] = to_string(tc.mode);
    j["seed"] = tc.seed;
    j["steps_completed"] = s.step;
    j["n_steps"] = tc.n_steps;
    j["wall_seconds"] = result.wall_seconds;
    j["config_hash"] = config_hash(cfg);
    if (result.status == RunStatus::fault)
        j["fault"] = {{"step", result.fault_step}, {"message", result.fault_message}};

    const double mean = empirical_mean(s.samples);
    j["final_sample_mean"] = mean;
    j["final_sample_var"] = empirical_variance(s.samples);
    if (sol) {
        j["analytic"] = {{"kind", to_string(sol->kind)}, {"mean", sol->mean},     {"variance", sol->variance},
                         {"gamma2", sol->gamma2},        {"gamma1", sol->gamma1}, {"gamma0", sol->gamma0}};
        j["analytic_mean"] = sol->mean;
        j["final_abs_mean_error"] = std::abs(mean - sol->mean);
    } else {
        j["analytic"] = nullptr;
        j["analytic_mean"] = nullptr;
        j["final_abs_mean_error"] = nullptr;
    }
    if (tc.mode == Mode::MFCG && !s.local_samples.particles.empty()) {
        const double local_mean = empirical_mean(s.local_samples);
        j["final_local_sample_mean"] = local_mean;
        j["final_local_sample_var"] = empirical_variance(s.local_samples);
        j["final_local_abs_mean_error"] = sol ? Json(std::abs(local_mean - sol->mean)) : Json(nullptr);
    }

    // Readouts on a state grid for the control and value figures. The
    // learned value is the negated critic, comparable to the cost value v(x).
    const double centre = sol ? sol->mean : 0.0;
    const double half = sol ? std::max(4.0 * std::sqrt(sol->variance), 1.5) : 2.0;
    std::vector<double> grid, control, value, a_control, a_value;
    constexpr int kGrid = 41;
    for (int i = 0; i < kGrid; ++i) {
        const double x = centre - half + 2.0 * half * i / (kGrid - 1);
        grid.push_back(x);
        control.push_back(num_from(num(s.actor.control(x))));
        value.push_back(-s.critic.value(x));
        if (sol) {
            a_control.push_back(optimal_control(*sol, x));
            a_value.push_back(value_function(*sol, x));
        }
    }
    j["probe_grid"] = grid;
    j["learned_control"] = control;
    j["learned_value"] = value;
    j["analytic_control"] = sol ? Json(a_control) : Json(nullptr);
    j["analytic_value"] = sol ? Json(a_value) : Json(nullptr);
    return j;
}

}  // namespace mfac
