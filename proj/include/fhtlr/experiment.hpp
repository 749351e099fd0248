#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "fhtlr/config.hpp"
#include "fhtlr/exact_solver.hpp"
#include "fhtlr/io.hpp"
#include "fhtlr/mdp.hpp"

namespace fhtlr {

// One evaluation checkpoint of one seeded run. elapsed_ms is 0 unless timing
// was requested: measured wall-clock would break byte-identical CSVs, which
// are the contract here.
struct RunRecord {
  std::uint64_t seed = 0;
  long episode = 0;
  double mean_return = 0.0;
  std::size_t params = 0;
  long long elapsed_ms = 0;
};

struct SeedResult {
  std::uint64_t seed = 0;
  bool failed = false;         // divergence guard tripped
  std::string failure_reason;
  std::vector<RunRecord> records;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<SeedResult> per_seed;
  std::vector<std::filesystem::path> seed_csvs;
  std::filesystem::path aggregate_csv;

  bool any_failed() const {
    for (const SeedResult& r : per_seed) {
      if (r.failed) return true;
    }
    return false;
  }
  // Across-seed mean of the final checkpoint's mean return (completed seeds).
  double mean_final_return() const {
    double sum = 0.0;
    long n = 0;
    for (const SeedResult& r : per_seed) {
      if (!r.failed && !r.records.empty()) {
        sum += r.records.back().mean_return;
        ++n;
      }
    }
    return n ? sum / n : 0.0;
  }
  double std_final_return() const {
    const double mean = mean_final_return();
    double ss = 0.0;
    long n = 0;
    for (const SeedResult& r : per_seed) {
      if (!r.failed && !r.records.empty()) {
        const double d = r.records.back().mean_return - mean;
        ss += d * d;
        ++n;
      }
    }
    return n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
  }
};

struct RunOptions {
  bool record_timing = false;
  bool quiet = false;
};

namespace detail {

// Greedy return averaged over fresh episodes; evaluation streams are derived
// with their own purpose tag, disjoint from every training stream.
inline double evaluate_greedy(const FiniteHorizonMdp& env, Agent& agent, long eval_episodes,
                              std::uint64_t seed, long checkpoint) {
  double sum = 0.0;
  for (long j = 1; j <= eval_episodes; ++j) {
    const std::uint64_t ep_seed =
        stream_seed(seed, Stream::kEval, static_cast<std::uint64_t>(checkpoint),
                    static_cast<std::uint64_t>(j));
    sum += run_episode(env, agent, 0.0, ep_seed, /*learn=*/false).episodic_return;
  }
  return sum / static_cast<double>(eval_episodes);
}

inline void write_seed_csv(const std::filesystem::path& path, const SeedResult& res) {
  auto out = open_for_write(path);
  out << "seed,episode,mean_return,params,elapsed_ms\n";
  for (const RunRecord& r : res.records) {
    out << r.seed << ',' << r.episode << ',' << format_double(r.mean_return) << ','
        << r.params << ',' << r.elapsed_ms << '\n';
  }
}

inline void write_aggregate_csv(const std::filesystem::path& path,
                                const ExperimentResult& result) {
  // Across-seed means per evaluation episode, over seeds that reached it;
  // failed seeds are counted so failures are visible in the aggregate.
  auto out = open_for_write(path);
  out << "episode,mean_return,params,seeds_ok,seeds_failed\n";
  std::vector<long> episodes;
  for (const SeedResult& r : result.per_seed) {
    for (const RunRecord& rec : r.records) {
      if (std::find(episodes.begin(), episodes.end(), rec.episode) == episodes.end()) {
        episodes.push_back(rec.episode);
      }
    }
  }
  std::sort(episodes.begin(), episodes.end());
  long failed = 0;
  for (const SeedResult& r : result.per_seed) failed += r.failed ? 1 : 0;
  for (long ep : episodes) {
    double sum = 0.0;
    long n = 0;
    std::size_t params = 0;
    for (const SeedResult& r : result.per_seed) {
      if (r.failed) continue;
      for (const RunRecord& rec : r.records) {
        if (rec.episode == ep) {
          sum += rec.mean_return;
          params = rec.params;
          ++n;
          break;
        }
      }
    }
    if (n == 0) continue;
    out << ep << ',' << format_double(sum / n) << ',' << params << ',' << n << ',' << failed
        << '\n';
  }
}

}  // namespace detail

// Trains one agent per seed under the epsilon-greedy sampling policy and
// periodically freezes it to measure the mean greedy return over fresh
// episodes. Writes one CSV per seed plus an across-seed aggregate.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                       const std::filesystem::path& out_dir,
                                       const RunOptions& opts = {}) {
  cfg.validate();
  ExperimentResult result;
  result.config = cfg;
  const auto env = make_environment(cfg.environment);

  for (const std::uint64_t seed : cfg.seeds) {
    SeedResult seed_result;
    seed_result.seed = seed;
    auto agent = make_agent(cfg, env->space(), seed);
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed_ms = [&]() -> long long {
      if (!opts.record_timing) return 0;
      return std::chrono::duration_cast<std::chrono::milliseconds>(
                 std::chrono::steady_clock::now() - t0)
          .count();
    };
    auto evaluate_at = [&](long episode) {
      const double mean = detail::evaluate_greedy(*env, *agent, cfg.eval_episodes, seed, episode);
      seed_result.records.push_back(
          {seed, episode, mean, agent->parameter_count(), elapsed_ms()});
    };

    try {
      if (cfg.episodes == 0) {
        evaluate_at(0);  // degenerate run: evaluate the initialized agent once
      } else {
        for (long episode = 1; episode <= cfg.episodes; ++episode) {
          const double eps = cfg.agent.epsilon.at(episode);
          const std::uint64_t ep_seed =
              stream_seed(seed, Stream::kTrain, static_cast<std::uint64_t>(episode));
          run_episode(*env, *agent, eps, ep_seed, /*learn=*/true);
          if (episode % cfg.eval_every == 0 || episode == cfg.episodes) {
            evaluate_at(episode);
          }
        }
      }
    } catch (const DivergenceError& e) {
      seed_result.failed = true;
      seed_result.failure_reason = e.what();
      if (!opts.quiet) {
        std::cerr << cfg.name << " seed " << seed << " FAILED: " << e.what() << "\n";
      }
    }

    const auto csv = out_dir / (cfg.name + "_seed" + std::to_string(seed) + ".csv");
    detail::write_seed_csv(csv, seed_result);  // partial CSV retained on failure
    result.seed_csvs.push_back(csv);
    if (!opts.quiet) {
      std::cerr << cfg.name << " seed " << seed;
      if (seed_result.failed) {
        std::cerr << " failed after " << seed_result.records.size() << " checkpoints";
      } else if (!seed_result.records.empty()) {
        std::cerr << " final mean return " << seed_result.records.back().mean_return;
      }
      if (opts.record_timing) std::cerr << " (" << elapsed_ms() << " ms)";
      std::cerr << "\n";
    }
    result.per_seed.push_back(std::move(seed_result));
  }

  result.aggregate_csv = out_dir / (cfg.name + "_aggregate.csv");
  detail::write_aggregate_csv(result.aggregate_csv, result);
  return result;
}

struct ComparisonRow {
  std::string environment;
  std::string agent;
  double mean_final_return = 0.0;
  double std_final_return = 0.0;
  std::size_t params = 0;
  bool failed = false;
};

// Runs every config and tabulates (environment, agent, mean final return
// across seeds, std, parameter count) in the given order.
inline std::vector<ComparisonRow> compare(const std::vector<ExperimentConfig>& configs,
                                          const std::filesystem::path& out_dir,
                                          const RunOptions& opts = {}) {
  std::vector<ComparisonRow> rows;
  for (const ExperimentConfig& cfg : configs) {
    const ExperimentResult res = run_experiment(cfg, out_dir, opts);
    ComparisonRow row;
    row.environment = cfg.environment.id;
    row.agent = cfg.agent.id;
    row.mean_final_return = res.mean_final_return();
    row.std_final_return = res.std_final_return();
    row.failed = res.any_failed();
    for (const SeedResult& r : res.per_seed) {
      if (!r.records.empty()) {
        row.params = r.records.back().params;
        break;
      }
    }
    rows.push_back(row);
  }
  auto out = open_for_write(out_dir / "comparison.csv");
  out << "environment,agent,mean_final_return,std_final_return,params,failed\n";
  for (const ComparisonRow& r : rows) {
    out << r.environment << ',' << r.agent << ',' << format_double(r.mean_final_return) << ','
        << format_double(r.std_final_return) << ',' << r.params << ',' << (r.failed ? 1 : 0)
        << '\n';
  }
  return rows;
}

struct SolveOutput {
  OptimalSolution solution;
  std::filesystem::path q_star_csv;
  std::filesystem::path pi_star_csv;
};

// Backward-induction oracle dump for environments that expose their dynamics.
inline SolveOutput solve_environment(const EnvironmentConfig& cfg,
                                     const std::filesystem::path& out_dir) {
  const auto env = make_environment(cfg);
  if (!env->has_explicit_dynamics()) {
    throw ValidationError("oracle unavailable for this environment");
  }
  const ExplicitDynamics dyn = env->explicit_dynamics();
  SolveOutput out;
  out.solution = backward_induction(dyn, env->space().horizon());
  out.q_star_csv = out_dir / (cfg.id + "_q_star.csv");
  out.pi_star_csv = out_dir / (cfg.id + "_pi_star.csv");
  write_value_table_csv(out.q_star_csv, out.solution.horizon,
                        static_cast<std::size_t>(out.solution.num_states),
                        static_cast<std::size_t>(out.solution.num_actions),
                        out.solution.q_star);
  write_policy_csv(out.pi_star_csv, out.solution.horizon,
                   static_cast<std::size_t>(out.solution.num_states), out.solution.pi_star);
  return out;
}

}  // namespace fhtlr
