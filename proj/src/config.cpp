#include "drqlab/config.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace drqlab {

namespace {

std::string trim(std::string_view s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string_view::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return std::string(s.substr(begin, end - begin + 1));
}

double parse_double(const std::string& text) {
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("expected a number, got '" + text + "'");
    }
    if (used != text.size()) throw std::invalid_argument("expected a number, got '" + text + "'");
    return value;
}

std::uint64_t parse_u64(const std::string& text) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw std::invalid_argument("expected a non-negative integer, got '" + text + "'");
    return value;
}

template <typename T, typename F>
std::vector<T> parse_list(const std::string& text, F parse_item) {
    std::vector<T> out;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        item = trim(item);
        if (item.empty()) throw std::invalid_argument("empty list element in '" + text + "'");
        out.push_back(parse_item(item));
    }
    return out;
}

RateFunction parse_rate(const std::string& text) {
    const auto parts = parse_list<double>(text, parse_double);
    if (parts.size() != 2) throw std::invalid_argument("rate expects 'coef, exponent'");
    return {parts[0], parts[1]};
}

Algorithm parse_algorithm(const std::string& text) {
    if (text == "drq") return Algorithm::drq;
    if (text == "qlearning") return Algorithm::qlearning;
    if (text == "mlmc") return Algorithm::mlmc;
    if (text == "model_based") return Algorithm::model_based;
    if (text == "oracle") return Algorithm::oracle;
    throw std::invalid_argument("unknown algorithm '" + text +
                                "' (expected drq, qlearning, mlmc, model_based or oracle)");
}

DrqMode parse_mode(const std::string& text) {
    if (text == "single_trajectory") return DrqMode::single_trajectory;
    if (text == "synchronous") return DrqMode::synchronous;
    throw std::invalid_argument("unknown mode '" + text + "' (expected single_trajectory or synchronous)");
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"environment", [](auto& c, const auto& v) { c.environment = v; }},
        {"env_param", [](auto& c, const auto& v) { c.env_param = parse_double(v); }},
        {"algorithm", [](auto& c, const auto& v) { c.algorithm = parse_algorithm(v); }},
        {"k", [](auto& c, const auto& v) { c.k = parse_double(v); }},
        {"rho", [](auto& c, const auto& v) { c.rho = parse_double(v); }},
        {"mode", [](auto& c, const auto& v) { c.mode = parse_mode(v); }},
        {"exploration_eps", [](auto& c, const auto& v) { c.exploration_eps = parse_double(v); }},
        {"total_steps", [](auto& c, const auto& v) { c.total_steps = parse_u64(v); }},
        {"seeds", [](auto& c, const auto& v) { c.seeds = parse_list<std::uint64_t>(v, parse_u64); }},
        {"eval_episodes", [](auto& c, const auto& v) { c.eval_episodes = parse_u64(v); }},
        {"eval_max_steps", [](auto& c, const auto& v) { c.eval_max_steps = parse_u64(v); }},
        {"perturbations", [](auto& c, const auto& v) { c.perturbations = parse_list<double>(v, parse_double); }},
        {"out_dir", [](auto& c, const auto& v) { c.out_dir = v; }},
        {"curve_every", [](auto& c, const auto& v) { c.curve_every = parse_u64(v); }},
        {"z_rate", [](auto& c, const auto& v) { c.z_rate = parse_rate(v); }},
        {"eta_rate", [](auto& c, const auto& v) { c.eta_rate = parse_rate(v); }},
        {"q_rate", [](auto& c, const auto& v) { c.q_rate = parse_rate(v); }},
        {"mlmc_epsilon", [](auto& c, const auto& v) { c.mlmc_epsilon = parse_double(v); }},
        {"mlmc_rate", [](auto& c, const auto& v) { c.mlmc_rate = parse_rate(v); }},
        {"mlmc_max_level", [](auto& c, const auto& v) { c.mlmc_max_level = parse_u64(v); }},
        {"random_states", [](auto& c, const auto& v) { c.random.num_states = parse_u64(v); }},
        {"random_actions", [](auto& c, const auto& v) { c.random.num_actions = parse_u64(v); }},
        {"random_discount", [](auto& c, const auto& v) { c.random.discount = parse_double(v); }},
        {"random_concentration", [](auto& c, const auto& v) { c.random.concentration = parse_double(v); }},
        {"random_seed", [](auto& c, const auto& v) { c.random.seed = parse_u64(v); }},
        {"oracle_tol", [](auto& c, const auto& v) { c.oracle_tol = parse_double(v); }},
        {"sweep_k", [](auto& c, const auto& v) { c.sweep_k = parse_list<double>(v, parse_double); }},
        {"sweep_rho", [](auto& c, const auto& v) { c.sweep_rho = parse_list<double>(v, parse_double); }},
    };
    return table;
}

template <typename T>
std::string join(const std::vector<T>& items) {
    return fmt::format("{}", fmt::join(items, ", "));
}

}  // namespace

ConfigError::ConfigError(std::size_t line, const std::string& message)
    : std::runtime_error(line > 0 ? fmt::format("line {}: {}", line, message) : message),
      line_(line) {}

std::string to_string(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::drq: return "drq";
        case Algorithm::qlearning: return "qlearning";
        case Algorithm::mlmc: return "mlmc";
        case Algorithm::model_based: return "model_based";
        case Algorithm::oracle: return "oracle";
    }
    return "unknown";
}

std::string to_string(DrqMode mode) {
    return mode == DrqMode::synchronous ? "synchronous" : "single_trajectory";
}

void ExperimentConfig::resolve() {
    EnvironmentInfo info;
    try {
        info = environment_info(environment);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(0, e.what());
    }
    if (!env_param) env_param = info.nominal_param;
    if (!perturbations) perturbations = info.perturbations;
    if (!eval_max_steps) eval_max_steps = info.eval_max_steps;
    if (!z_rate) z_rate = RateFunction{1.0, 0.6};
    if (!eta_rate) eta_rate = RateFunction{0.1, 0.8};
    if (!q_rate) q_rate = RateFunction{environment == "american_put" ? 0.01 : 0.05, 1.0};

    if (seeds.empty()) throw ConfigError(0, "seeds must not be empty");
    if (total_steps == 0) throw ConfigError(0, "total_steps must be >= 1");
    if (eval_episodes == 0) throw ConfigError(0, "eval_episodes must be >= 1");
    if (*eval_max_steps == 0) throw ConfigError(0, "eval_max_steps must be >= 1");
    if (!(exploration_eps >= 0.0 && exploration_eps <= 1.0))
        throw ConfigError(0, "exploration_eps must lie in [0, 1]");
    if (perturbations->empty()) throw ConfigError(0, "perturbations must not be empty");
    if (!(oracle_tol > 0.0)) throw ConfigError(0, "oracle_tol must be positive");
    try {
        (void)params();
        for (double kk : sweep_k) (void)CressieReadParams(kk, rho);
        for (double r : sweep_rho) (void)CressieReadParams(k, r);
        (void)schedule(0.5);
        (void)mlmc_config();
        if (!(mlmc_epsilon > 0.0 && mlmc_epsilon <= 0.5))
            throw std::invalid_argument("mlmc_epsilon must lie in (0, 0.5]");
    } catch (const std::invalid_argument& e) {
        throw ConfigError(0, e.what());
    }
}

StepSchedule ExperimentConfig::schedule(double gamma) const {
    return StepSchedule(gamma, z_rate.value_or(RateFunction{1.0, 0.6}),
                        eta_rate.value_or(RateFunction{0.1, 0.8}),
                        q_rate.value_or(RateFunction{0.05, 1.0}));
}

DrqConfig ExperimentConfig::drq_config(double gamma) const {
    return DrqConfig{params(), exploration_eps, schedule(gamma), mode};
}

MlmcConfig ExperimentConfig::mlmc_config() const {
    return MlmcConfig{params(), mlmc_epsilon, mlmc_rate, mlmc_max_level};
}

std::string ExperimentConfig::to_text() const {
    std::string out;
    auto line = [&](std::string_view key, const auto& value) {
        out += fmt::format("{} = {}\n", key, value);
    };
    auto rate = [](const RateFunction& r) { return fmt::format("{}, {}", r.coef, r.exponent); };
    line("environment", environment);
    if (env_param) line("env_param", *env_param);
    line("algorithm", to_string(algorithm));
    line("k", k);
    line("rho", rho);
    line("mode", to_string(mode));
    line("exploration_eps", exploration_eps);
    line("total_steps", total_steps);
    line("seeds", join(seeds));
    line("eval_episodes", eval_episodes);
    if (eval_max_steps) line("eval_max_steps", *eval_max_steps);
    if (perturbations) line("perturbations", join(*perturbations));
    line("out_dir", out_dir.string());
    line("curve_every", curve_every);
    if (z_rate) line("z_rate", rate(*z_rate));
    if (eta_rate) line("eta_rate", rate(*eta_rate));
    if (q_rate) line("q_rate", rate(*q_rate));
    line("mlmc_epsilon", mlmc_epsilon);
    line("mlmc_rate", rate(mlmc_rate));
    line("mlmc_max_level", mlmc_max_level);
    line("random_states", random.num_states);
    line("random_actions", random.num_actions);
    line("random_discount", random.discount);
    line("random_concentration", random.concentration);
    line("random_seed", random.seed);
    line("oracle_tol", oracle_tol);
    if (!sweep_k.empty()) line("sweep_k", join(sweep_k));
    if (!sweep_rho.empty()) line("sweep_rho", join(sweep_rho));
    return out;
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig config;
    std::set<std::string> seen;
    std::stringstream stream(text);
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(stream, raw)) {
        ++line_no;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(line_no, "expected 'key = value'");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) throw ConfigError(line_no, "unknown key '" + key + "'");
        if (!seen.insert(key).second) throw ConfigError(line_no, "duplicate key '" + key + "'");
        if (value.empty()) throw ConfigError(line_no, "missing value for '" + key + "'");
        try {
            it->second(config, value);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(line_no, key + ": " + e.what());
        }
    }
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "cannot read config file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

}  // namespace drqlab
