#include "drqlab/harness.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

#include "drqlab/baselines.hpp"
#include "drqlab/drq.hpp"
#include "drqlab/robust_dp.hpp"

namespace drqlab {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kTrainStream = 0;
constexpr std::uint64_t kEvalStreamBase = 1000;

struct Moments {
    double mean = 0.0;
    double std = 0.0;
};

Moments moments(const std::vector<double>& xs) {
    Moments m;
    if (xs.empty()) return m;
    for (double x : xs) m.mean += x;
    m.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1 && std::any_of(xs.begin(), xs.end(), [&](double x) { return x != xs.front(); })) {
        double ss = 0.0;
        for (double x : xs) ss += (x - m.mean) * (x - m.mean);
        m.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return m;
}

void write_file(const fs::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << body;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads; rethrows the first
// failure (by index) after all workers finish.
template <typename F>
void parallel_for(std::size_t n, std::size_t jobs, F fn) {
    std::vector<std::exception_ptr> errors(n);
    auto guarded = [&](std::size_t i) {
        try {
            fn(i);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    jobs = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(n, 1));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) guarded(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        for (std::size_t w = 0; w < jobs; ++w)
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) guarded(i);
            });
        for (auto& t : workers) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

TabularMdp nominal_model(const ExperimentConfig& config) {
    return build_environment(config.environment, *config.env_param, config.random);
}

std::vector<EvalStats> evaluate_all(const ExperimentConfig& config, const QTable& q,
                                    std::uint64_t seed) {
    std::vector<EvalStats> out;
    for (std::size_t i = 0; i < config.perturbations->size(); ++i) {
        const double p = (*config.perturbations)[i];
        const TabularMdp model = build_environment(config.environment, p, config.random);
        RngStream rng = RngStream::substream(seed, kEvalStreamBase + i);
        EvalStats stats = evaluate_policy(model, q, config.eval_episodes, *config.eval_max_steps, rng);
        stats.perturbation = p;
        stats.seed = seed;
        out.push_back(stats);
    }
    return out;
}

void write_manifest(const ExperimentConfig& config) {
    write_file(config.out_dir / "manifest.txt", config.to_text());
}

}  // namespace

EvalStats evaluate_policy(const TabularMdp& mdp, const QTable& q, std::size_t episodes,
                          std::size_t max_steps, RngStream& rng) {
    if (episodes == 0) throw std::invalid_argument("evaluate_policy: episodes must be >= 1");
    std::vector<double> disc, undisc, len;
    disc.reserve(episodes);
    undisc.reserve(episodes);
    len.reserve(episodes);
    for (std::size_t e = 0; e < episodes; ++e) {
        const RolloutResult r = rollout(mdp, q, 0.0, max_steps, rng);
        disc.push_back(r.discounted_return);
        undisc.push_back(r.undiscounted_return);
        len.push_back(static_cast<double>(r.length));
    }
    const Moments d = moments(disc), u = moments(undisc), l = moments(len);
    EvalStats stats;
    stats.mean_disc = d.mean;
    stats.std_disc = d.std;
    stats.mean_undisc = u.mean;
    stats.std_undisc = u.std;
    stats.mean_len = l.mean;
    stats.std_len = l.std;
    stats.episodes = episodes;
    return stats;
}

std::string curve_csv(const TrainingCurve& curve) {
    std::string out = std::string(kCurveHeader) + "\n";
    for (const auto& row : curve.rows)
        out += fmt::format("{},{},{},{}\n", row.step, row.estimate, row.oracle, row.cumulative_samples);
    return out;
}

std::string eval_csv(const std::vector<EvalStats>& stats) {
    std::string out = std::string(kEvalHeader) + "\n";
    for (const auto& s : stats)
        out += fmt::format("{},{},{},{},{},{},{},{},{}\n", s.perturbation, s.mean_disc, s.std_disc,
                           s.mean_undisc, s.std_undisc, s.mean_len, s.std_len, s.episodes, s.seed);
    return out;
}

std::string q_csv(const QTable& q) {
    std::string out = "state,action,q\n";
    for (std::size_t s = 0; s < q.num_states(); ++s)
        for (std::size_t a = 0; a < q.num_actions(); ++a) out += fmt::format("{},{},{}\n", s, a, q(s, a));
    return out;
}

QTable parse_q_csv(const std::string& text) {
    std::stringstream stream(text);
    std::string line;
    if (!std::getline(stream, line) || line != "state,action,q")
        throw std::runtime_error("Q table CSV: missing header");
    std::vector<std::tuple<std::size_t, std::size_t, double>> entries;
    std::size_t max_s = 0, max_a = 0;
    while (std::getline(stream, line)) {
        if (line.empty()) continue;
        std::size_t s = 0, a = 0;
        double v = 0.0;
        char c1 = 0, c2 = 0;
        std::stringstream fields(line);
        if (!(fields >> s >> c1 >> a >> c2 >> v) || c1 != ',' || c2 != ',')
            throw std::runtime_error("Q table CSV: malformed row '" + line + "'");
        entries.emplace_back(s, a, v);
        max_s = std::max(max_s, s);
        max_a = std::max(max_a, a);
    }
    if (entries.empty()) throw std::runtime_error("Q table CSV: no rows");
    QTable q(max_s + 1, max_a + 1);
    if (entries.size() != q.num_states() * q.num_actions())
        throw std::runtime_error("Q table CSV: incomplete table");
    for (const auto& [s, a, v] : entries) q(s, a) = v;
    return q;
}

ViResult solve_oracle(const ExperimentConfig& config) {
    const TabularMdp model = nominal_model(config);
    const double rho = config.algorithm == Algorithm::qlearning ? 0.0 : config.rho;
    return robust_value_iteration(model, CressieReadParams(config.k, rho), config.oracle_tol);
}

SeedRun run_seed(const ExperimentConfig& config, std::uint64_t seed, double oracle_value) {
    const TabularMdp model = nominal_model(config);
    RngStream rng = RngStream::substream(seed, kTrainStream);
    SeedRun run;
    run.seed = seed;
    switch (config.algorithm) {
        case Algorithm::drq: {
            const DrqConfig drq = config.drq_config(model.discount());
            auto [state, curve] =
                config.mode == DrqMode::synchronous
                    ? train_synchronous(model, drq, config.total_steps, rng, config.curve_every)
                    : train_single_trajectory(model, drq, config.total_steps, rng, config.curve_every);
            run.q = std::move(state.q);
            run.curve = std::move(curve);
            break;
        }
        case Algorithm::qlearning: {
            auto [q, curve] = train_q_learning(model, config.exploration_eps,
                                               config.q_rate.value_or(RateFunction{0.05, 1.0}),
                                               config.total_steps, rng, config.curve_every);
            run.q = std::move(q);
            run.curve = std::move(curve);
            break;
        }
        case Algorithm::mlmc: {
            MlmcResult result = mlmc_train(model, config.mlmc_config(), config.total_steps, rng,
                                           config.curve_every);
            run.q = std::move(result.q);
            run.curve = std::move(result.curve);
            break;
        }
        case Algorithm::model_based: {
            // Doubling per-pair sample budgets up to total_steps.
            for (std::uint64_t n = 1; n <= config.total_steps; n *= 2) {
                const TabularMdp estimate = empirical_mdp(model, n, rng);
                ViResult vi = robust_value_iteration(estimate, config.params(), config.oracle_tol);
                run.curve.record(n, vi.q_star.state_value(model.start_state()), n * model.num_pairs());
                run.q = std::move(vi.q_star);
            }
            break;
        }
        case Algorithm::oracle:
            throw std::logic_error("run_seed: the oracle has no per-seed training");
    }
    run.curve.set_oracle(oracle_value);
    run.evals = evaluate_all(config, run.q, seed);
    return run;
}

ExperimentResult run_experiment(ExperimentConfig config, std::size_t jobs) {
    config.resolve();
    ensure_dir(config.out_dir);

    ExperimentResult result;
    const ViResult oracle = solve_oracle(config);
    if (!oracle.converged)
        throw std::runtime_error(fmt::format("oracle value iteration did not reach tol {} (residual {})",
                                             config.oracle_tol, oracle.final_residual));
    const TabularMdp model = nominal_model(config);
    result.oracle_q = oracle.q_star;
    result.oracle_value = oracle.q_star.state_value(model.start_state());

    write_manifest(config);
    result.artifacts.push_back(config.out_dir / "manifest.txt");

    if (config.algorithm == Algorithm::oracle) {
        write_file(config.out_dir / "oracle_q.csv", q_csv(result.oracle_q));
        write_file(config.out_dir / "oracle_value.csv",
                   fmt::format("k,rho,start_state,oracle_value\n{},{},{},{}\n", config.k, config.rho,
                               model.start_state(), result.oracle_value));
        result.artifacts.push_back(config.out_dir / "oracle_q.csv");
        result.artifacts.push_back(config.out_dir / "oracle_value.csv");
        result.config = std::move(config);
        return result;
    }

    std::vector<std::uint64_t> seeds = config.seeds;
    std::sort(seeds.begin(), seeds.end());
    seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
    result.runs.resize(seeds.size());
    parallel_for(seeds.size(), jobs, [&](std::size_t i) {
        result.runs[i] = run_seed(config, seeds[i], result.oracle_value);
    });

    for (const SeedRun& run : result.runs) {
        const auto curve_path = config.out_dir / fmt::format("curve_seed{}.csv", run.seed);
        const auto eval_path = config.out_dir / fmt::format("eval_seed{}.csv", run.seed);
        const auto q_path = config.out_dir / fmt::format("q_seed{}.csv", run.seed);
        write_file(curve_path, curve_csv(run.curve));
        write_file(eval_path, eval_csv(run.evals));
        write_file(q_path, q_csv(run.q));
        result.artifacts.insert(result.artifacts.end(), {curve_path, eval_path, q_path});
    }
    result.config = std::move(config);
    return result;
}

std::vector<fs::path> evaluate_saved(ExperimentConfig config) {
    config.resolve();
    std::vector<fs::path> written;
    for (std::uint64_t seed : config.seeds) {
        const QTable q =
            parse_q_csv(read_file(config.out_dir / fmt::format("q_seed{}.csv", seed)));
        const auto path = config.out_dir / fmt::format("eval_seed{}.csv", seed);
        write_file(path, eval_csv(evaluate_all(config, q, seed)));
        written.push_back(path);
    }
    return written;
}

std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& base) {
    const std::vector<double> ks = base.sweep_k.empty() ? std::vector<double>{base.k} : base.sweep_k;
    const std::vector<double> rhos =
        base.sweep_rho.empty() ? std::vector<double>{base.rho} : base.sweep_rho;
    std::vector<ExperimentConfig> out;
    for (double k : ks) {
        for (double rho : rhos) {
            ExperimentConfig c = base;
            c.k = k;
            c.rho = rho;
            c.sweep_k.clear();
            c.sweep_rho.clear();
            c.out_dir = base.out_dir / fmt::format("k{}_rho{}", k, rho);
            out.push_back(std::move(c));
        }
    }
    return out;
}

std::vector<SweepRow> sweep(const std::vector<ExperimentConfig>& configs, const fs::path& out_dir,
                            std::size_t jobs) {
    if (configs.empty()) throw std::invalid_argument("sweep: no configurations");
    ensure_dir(out_dir);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<SweepRow> rows;
    for (const ExperimentConfig& config : configs) {
        try {
            const ExperimentResult result = run_experiment(config, jobs);
            const auto& perturbations = *result.config.perturbations;
            for (std::size_t i = 0; i < perturbations.size(); ++i) {
                // Pool per-seed (mean, std, n) into statistics over all episodes.
                double n_total = 0.0, sum = 0.0, sum_sq = 0.0;
                for (const SeedRun& run : result.runs) {
                    const EvalStats& e = run.evals[i];
                    const double n = static_cast<double>(e.episodes);
                    n_total += n;
                    sum += n * e.mean_disc;
                    sum_sq += (n - 1.0) * e.std_disc * e.std_disc + n * e.mean_disc * e.mean_disc;
                }
                SweepRow row{config.k, config.rho, perturbations[i], result.oracle_value, 0.0, 0.0, false};
                if (n_total > 0) {
                    row.mean_disc = sum / n_total;
                    const double var = n_total > 1 ? (sum_sq - n_total * row.mean_disc * row.mean_disc) /
                                                         (n_total - 1.0)
                                                   : 0.0;
                    row.std_disc = std::sqrt(std::max(var, 0.0));
                }
                if (result.runs.empty()) row.mean_disc = row.std_disc = nan;
                rows.push_back(row);
            }
        } catch (const std::exception& e) {
            std::cerr << fmt::format("sweep: k={} rho={} failed: {}\n", config.k, config.rho, e.what());
            rows.push_back({config.k, config.rho, nan, nan, nan, nan, true});
        }
    }
    std::string body = std::string(kSummaryHeader) + "\n";
    for (const SweepRow& r : rows)
        body += fmt::format("{},{},{},{},{},{}\n", r.k, r.rho, r.perturbation, r.oracle_value,
                            r.mean_disc, r.std_disc);
    write_file(out_dir / "summary.csv", body);
    return rows;
}

}  // namespace drqlab
