#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "cuckoo/estimation.hpp"
#include "cuckoo/hash_pair.hpp"
#include "cuckoo/orientation.hpp"
#include "cuckoo/params.hpp"
#include "cuckoo/rng.hpp"
#include "cuckoo/stash_table.hpp"

namespace cuckoo {

/// oracle: decide each trial with the exact orientation solver (the
/// existential notion the analysis is about).
/// online: actually insert into a StashTable with a bounded eviction search
/// and no rehashing, i.e. what a deployed table would experience. An online
/// trial can fail on an instance the oracle solves, never the reverse.
enum class TrialMode { oracle, online };

inline const char* mode_name(TrialMode mode) {
  return mode == TrialMode::oracle ? "oracle" : "online";
}

inline TrialMode parse_mode(std::string_view name) {
  if (name == "oracle") return TrialMode::oracle;
  if (name == "online") return TrialMode::online;
  throw std::invalid_argument("unknown mode '" + std::string(name) +
                              "' (expected oracle or online)");
}

struct TrialOutcome {
  std::uint64_t trial_index = 0;
  bool suitable = true;
  /// Minimum stash the instance needed: exact up to s, saturated at s + 1
  /// (a failed trial is not solved to completion), so suitable == (overflow
  /// <= s) always.
  std::uint32_t overflow = 0;
  std::uint64_t seed_used = 0;
};

struct TrialScratch {
  OrientationSolver solver;
  HashPair pair;
};

/// One independent trial. All randomness comes from the trial's own
/// substream of the master seed, so trial t is the same no matter which
/// worker runs it or what happened before it.
inline TrialOutcome run_trial(const Params& p, Seed master, std::uint64_t trial_index,
                              TrialMode mode, TrialScratch& scratch) {
  const std::uint64_t sub = master.substream(StreamPurpose::trial, trial_index);
  Rng rng(sub);
  TrialOutcome out;
  out.trial_index = trial_index;
  out.seed_used = sub;
  if (mode == TrialMode::oracle) {
    OrientationSolver& solver = scratch.solver;
    solver.reset(p.m, p.d, p.n);
    for (std::uint64_t x = 0; x < p.n; ++x) {
      const auto u = static_cast<std::uint32_t>(rng.uniform_below(p.m));
      const auto v = static_cast<std::uint32_t>(rng.uniform_below(p.m));
      solver.add_edge(u, v);
      if (solver.overflow() > p.s) {
        out.suitable = false;
        out.overflow = p.s + 1;
        return out;
      }
    }
    out.overflow = static_cast<std::uint32_t>(solver.overflow());
    return out;
  }
  sample_hash_pair_into(p, rng, scratch.pair);
  StashTable<std::uint64_t, std::uint8_t, HashPairIndexer> table(
      p, master, TableLimits{500, 0}, HashPairIndexer{&scratch.pair});
  try {
    for (std::uint64_t x = 0; x < p.n; ++x) table.insert(x, 0);
  } catch (const table_full&) {
    out.suitable = false;
    out.overflow = p.s + 1;
    return out;
  }
  out.overflow = static_cast<std::uint32_t>(table.stash_size());
  return out;
}

inline TrialOutcome run_trial(const Params& p, Seed master, std::uint64_t trial_index,
                              TrialMode mode) {
  TrialScratch scratch;
  return run_trial(p, master, trial_index, mode, scratch);
}

struct PointResult {
  Params params;
  TrialMode mode = TrialMode::oracle;
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;   // 95% Wilson interval around p_hat
  double ci_high = 1.0;
  std::uint64_t master_seed = 0;

  FailureEstimate estimate() const {
    return {trials, failures, p_hat, ci_low, ci_high};
  }
};

struct RunOptions {
  TrialMode mode = TrialMode::oracle;
  std::uint32_t workers = 1;
  /// When set, receives one outcome per trial (resized to trials).
  std::vector<TrialOutcome>* outcomes = nullptr;
};

/// Runs a fixed number of trials. Workers split the trial index range into
/// contiguous chunks; results are byte-identical for any worker count
/// because every trial derives its randomness from its own index.
inline PointResult run_point(const Params& p, Seed seed, std::uint64_t trials,
                             const RunOptions& opt = {}) {
  std::uint32_t workers = opt.workers == 0 ? 1 : opt.workers;
  if (trials > 0 && workers > trials) workers = static_cast<std::uint32_t>(trials);
  if (opt.outcomes) opt.outcomes->assign(trials, {});

  std::vector<std::uint64_t> fails(workers, 0);
  auto body = [&](std::uint32_t w) {
    TrialScratch scratch;
    const std::uint64_t begin = trials / workers * w + std::min<std::uint64_t>(w, trials % workers);
    const std::uint64_t len = trials / workers + (w < trials % workers ? 1 : 0);
    std::uint64_t f = 0;
    for (std::uint64_t t = begin; t < begin + len; ++t) {
      const TrialOutcome out = run_trial(p, seed, t, opt.mode, scratch);
      if (!out.suitable) ++f;
      if (opt.outcomes) (*opt.outcomes)[t] = out;
    }
    fails[w] = f;
  };
  if (workers <= 1) {
    body(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::uint32_t w = 0; w < workers; ++w) pool.emplace_back(body, w);
    for (std::thread& th : pool) th.join();
  }

  PointResult res;
  res.params = p;
  res.mode = opt.mode;
  res.trials = trials;
  for (const std::uint64_t f : fails) res.failures += f;
  res.master_seed = seed.master;
  if (trials > 0) {
    res.p_hat = static_cast<double>(res.failures) / static_cast<double>(trials);
    const WilsonInterval wi = wilson_interval(res.failures, trials, 0.95);
    res.ci_low = wi.low;
    res.ci_high = wi.high;
  }
  return res;
}

struct AdaptiveConfig {
  std::uint64_t target_failures = 30;
  std::uint64_t budget = 100'000'000;  // cap on total trials across rounds
  std::uint64_t initial_trials = 1024;
};

struct AdaptiveResult {
  PointResult point;
  std::uint64_t trials_executed = 0;
  bool reached_target = false;
};

/// Doubles the trial count until enough failures have been seen or the
/// budget would be exceeded. Each round restarts from trial 0 with the same
/// seed, so the returned point is reproducible by a plain fixed-trials run.
inline AdaptiveResult run_point_adaptive(const Params& p, Seed seed,
                                         const RunOptions& opt = {},
                                         const AdaptiveConfig& cfg = {}) {
  if (cfg.budget == 0)
    throw std::invalid_argument("run_point_adaptive: budget must be positive");
  AdaptiveResult ar;
  std::uint64_t T = std::max<std::uint64_t>(1, std::min(cfg.initial_trials, cfg.budget));
  while (true) {
    ar.point = run_point(p, seed, T, opt);
    ar.trials_executed += T;
    if (ar.point.failures >= cfg.target_failures) {
      ar.reached_target = true;
      break;
    }
    const std::uint64_t next = T * 2;
    if (ar.trials_executed + next > cfg.budget) break;
    T = next;
  }
  return ar;
}

struct SweepSpec {
  std::vector<std::uint64_t> ns;
  double epsilon = 0.25;
  std::uint32_t d = 1;
  std::uint32_t s = 0;
  TrialMode mode = TrialMode::oracle;
  std::uint64_t trials = 0;  // 0 = adaptive per point
  AdaptiveConfig adaptive;
  std::uint32_t workers = 1;
};

/// One point per n. Every point gets its own master seed derived from the
/// sweep seed and n, recorded in the row, so any single point can be rerun
/// in isolation with the same numbers.
inline std::vector<PointResult> run_sweep(const SweepSpec& spec, Seed seed) {
  for (std::size_t i = 1; i < spec.ns.size(); ++i)
    if (spec.ns[i] <= spec.ns[i - 1])
      throw std::invalid_argument("run_sweep: n values must be strictly increasing");
  std::vector<PointResult> rows;
  rows.reserve(spec.ns.size());
  for (const std::uint64_t n : spec.ns) {
    const Params p = derive_params(n, spec.epsilon, spec.d, spec.s);
    const Seed point_seed{seed.substream(StreamPurpose::sweep_point, n)};
    RunOptions opt;
    opt.mode = spec.mode;
    opt.workers = spec.workers;
    if (spec.trials > 0) {
      rows.push_back(run_point(p, point_seed, spec.trials, opt));
    } else {
      rows.push_back(run_point_adaptive(p, point_seed, opt, spec.adaptive).point);
    }
  }
  return rows;
}

/// Exponent fit over sweep rows, weighting each point by its failure count.
inline ExponentFit fit_sweep_exponent(const std::vector<PointResult>& rows,
                                      std::uint64_t min_failures = 30) {
  std::vector<ExponentPoint> pts;
  pts.reserve(rows.size());
  for (const PointResult& r : rows) pts.push_back({r.params.n, r.trials, r.failures});
  return fit_exponent(pts, min_failures);
}

}  // namespace cuckoo
