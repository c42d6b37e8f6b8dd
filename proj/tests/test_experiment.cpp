#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <numeric>
#include <vector>

#include <cuckoo/experiment.hpp>

using namespace cuckoo;

namespace {

// Independent oracle for d=1, s=0: a graph is orientable with max load 1
// iff no connected component has more edges than vertices (at most one
// cycle per component). Union-find over buckets.
struct Dsu {
  std::vector<std::uint32_t> parent;
  explicit Dsu(std::uint64_t m) : parent(m) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) { parent[find(a)] = find(b); }
};

bool unicyclic_everywhere(const CuckooGraph& g) {
  Dsu dsu(g.m);
  for (const auto& [u, v] : g.edges) dsu.unite(u, v);
  std::vector<std::uint64_t> edges_in(g.m, 0), vertices_in(g.m, 0);
  for (std::uint64_t b = 0; b < g.m; ++b)
    ++vertices_in[dsu.find(static_cast<std::uint32_t>(b))];
  for (const auto& [u, v] : g.edges) ++edges_in[dsu.find(u)];
  for (std::uint64_t b = 0; b < g.m; ++b)
    if (edges_in[b] > vertices_in[b]) return false;
  return true;
}

}  // namespace

TEST_CASE("mode names round-trip", "[experiment]") {
  CHECK(parse_mode("oracle") == TrialMode::oracle);
  CHECK(parse_mode("online") == TrialMode::online);
  CHECK(mode_name(TrialMode::oracle) == std::string("oracle"));
  CHECK(mode_name(TrialMode::online) == std::string("online"));
  CHECK_THROWS_AS(parse_mode("table"), std::invalid_argument);
}

TEST_CASE("trials are pure functions of (seed, index)", "[experiment]") {
  const Params p = derive_params(64, 0.25, 2, 1);
  for (const TrialMode mode : {TrialMode::oracle, TrialMode::online}) {
    const TrialOutcome a = run_trial(p, Seed{5}, 17, mode);
    const TrialOutcome b = run_trial(p, Seed{5}, 17, mode);
    CHECK(a.suitable == b.suitable);
    CHECK(a.overflow == b.overflow);
    CHECK(a.seed_used == b.seed_used);
    CHECK(a.trial_index == 17);
    CHECK(a.seed_used == Seed{5}.substream(StreamPurpose::trial, 17));
  }
}

TEST_CASE("outcome invariant: suitable iff overflow within stash",
          "[experiment]") {
  const Params p = derive_params(48, 0.25, 1, 1);
  for (std::uint64_t t = 0; t < 300; ++t) {
    const TrialOutcome o = run_trial(p, Seed{3}, t, TrialMode::oracle);
    REQUIRE(o.suitable == (o.overflow <= p.s));
    REQUIRE(o.overflow <= p.s + 1);
  }
}

TEST_CASE("oracle trials agree with a union-find oracle at d=1 s=0",
          "[experiment]") {
  const Params p = derive_params(64, 0.25, 1, 0);
  TrialScratch scratch;
  for (std::uint64_t t = 0; t < 20000; ++t) {
    const TrialOutcome o = run_trial(p, Seed{21}, t, TrialMode::oracle, scratch);
    // rebuild the same graph from the trial's substream
    Rng rng(o.seed_used);
    CuckooGraph g;
    g.m = p.m;
    for (std::uint64_t x = 0; x < p.n; ++x) {
      const auto u = static_cast<std::uint32_t>(rng.uniform_below(p.m));
      const auto v = static_cast<std::uint32_t>(rng.uniform_below(p.m));
      g.edges.emplace_back(u, v);
    }
    REQUIRE(o.suitable == unicyclic_everywhere(g));
  }
}

TEST_CASE("online failures contain the oracle failures", "[experiment]") {
  // same seed, same trial index -> same instance; a bounded online insert
  // can fail where the oracle succeeds but never the other way
  for (const Params& p :
       {derive_params(64, 0.25, 1, 0), derive_params(96, 0.25, 2, 1)}) {
    std::uint64_t oracle_fails = 0, online_fails = 0;
    TrialScratch scratch;
    for (std::uint64_t t = 0; t < 2000; ++t) {
      const bool oracle_ok =
          run_trial(p, Seed{8}, t, TrialMode::oracle, scratch).suitable;
      const bool online_ok =
          run_trial(p, Seed{8}, t, TrialMode::online, scratch).suitable;
      if (!oracle_ok) ++oracle_fails;
      if (!online_ok) ++online_fails;
      if (!oracle_ok) REQUIRE_FALSE(online_ok);
    }
    CHECK(oracle_fails <= online_fails);
  }
}

TEST_CASE("run_point counts failures and wraps a Wilson interval",
          "[experiment]") {
  const Params p = derive_params(64, 0.25, 1, 0);
  std::vector<TrialOutcome> outcomes;
  RunOptions opt;
  opt.outcomes = &outcomes;
  const PointResult r = run_point(p, Seed{2}, 500, opt);
  REQUIRE(outcomes.size() == 500);
  std::uint64_t fails = 0;
  for (const TrialOutcome& o : outcomes)
    if (!o.suitable) ++fails;
  CHECK(r.failures == fails);
  CHECK(r.trials == 500);
  CHECK(r.p_hat == Catch::Approx(static_cast<double>(fails) / 500.0));
  const WilsonInterval wi = wilson_interval(fails, 500, 0.95);
  CHECK(r.ci_low == wi.low);
  CHECK(r.ci_high == wi.high);
  CHECK(r.master_seed == 2);
  CHECK(mode_name(r.mode) == std::string("oracle"));
  // outcomes are indexed by trial
  for (std::size_t t = 0; t < outcomes.size(); ++t)
    REQUIRE(outcomes[t].trial_index == t);
}

TEST_CASE("worker count never changes the result", "[experiment]") {
  const Params p = derive_params(80, 0.25, 1, 0);
  RunOptions base;
  std::vector<TrialOutcome> o1, o8;
  base.outcomes = &o1;
  const PointResult r1 = run_point(p, Seed{9}, 1000, base);
  RunOptions eight;
  eight.workers = 8;
  eight.outcomes = &o8;
  const PointResult r8 = run_point(p, Seed{9}, 1000, eight);
  CHECK(r1.failures == r8.failures);
  CHECK(r1.p_hat == r8.p_hat);
  CHECK(r1.ci_low == r8.ci_low);
  CHECK(r1.ci_high == r8.ci_high);
  REQUIRE(o1.size() == o8.size());
  for (std::size_t t = 0; t < o1.size(); ++t) {
    REQUIRE(o1[t].suitable == o8[t].suitable);
    REQUIRE(o1[t].overflow == o8[t].overflow);
    REQUIRE(o1[t].seed_used == o8[t].seed_used);
  }
  // more workers than trials is fine too
  RunOptions many;
  many.workers = 64;
  CHECK(run_point(p, Seed{9}, 10, many).trials == 10);
}

TEST_CASE("tiny instances never fail", "[experiment]") {
  // n <= d + s: every subset X has |X| <= d*|N(X)| + s
  const Params p = derive_params(3, 0.25, 2, 1);
  const PointResult r = run_point(p, Seed{1}, 2000);
  CHECK(r.failures == 0);
}

TEST_CASE("zero trials produce an empty but sane point", "[experiment]") {
  const Params p = derive_params(16, 0.25, 1, 0);
  const PointResult r = run_point(p, Seed{1}, 0);
  CHECK(r.trials == 0);
  CHECK(r.failures == 0);
  CHECK(r.p_hat == 0.0);
  CHECK(r.ci_low == 0.0);
  CHECK(r.ci_high == 1.0);
}

TEST_CASE("adaptive escalation reaches its failure target", "[experiment]") {
  const Params p = derive_params(64, 0.25, 2, 0);  // moderately rare failures
  AdaptiveConfig cfg;
  cfg.target_failures = 5;
  cfg.budget = 1u << 22;
  cfg.initial_trials = 4;
  const AdaptiveResult ar = run_point_adaptive(p, Seed{13}, {}, cfg);
  if (ar.reached_target) {
    CHECK(ar.point.failures >= 5);
  } else {
    CHECK(ar.point.failures < 5);
  }
  CHECK(ar.trials_executed >= ar.point.trials);
  // the final round is a plain fixed-trials run, reproducible directly
  const PointResult again = run_point(p, Seed{13}, ar.point.trials);
  CHECK(again.failures == ar.point.failures);
}

TEST_CASE("adaptive runs respect the budget", "[experiment]") {
  const Params p = derive_params(40, 0.25, 3, 2);  // failures are very rare
  AdaptiveConfig cfg;
  cfg.target_failures = 1000000;  // unreachable
  cfg.budget = 3000;
  cfg.initial_trials = 512;
  const AdaptiveResult ar = run_point_adaptive(p, Seed{4}, {}, cfg);
  CHECK_FALSE(ar.reached_target);
  CHECK(ar.trials_executed <= cfg.budget);
  // 512 + 1024 executed; the next doubling would burst the budget
  CHECK(ar.trials_executed == 1536);
  CHECK(ar.point.trials == 1024);

  AdaptiveConfig zero;
  zero.budget = 0;
  CHECK_THROWS_AS(run_point_adaptive(p, Seed{4}, {}, zero), std::invalid_argument);
}

TEST_CASE("sweep rows are per-n reproducible and validated", "[experiment]") {
  SweepSpec spec;
  spec.ns = {32, 64};
  spec.epsilon = 0.25;
  spec.d = 1;
  spec.s = 0;
  spec.trials = 400;
  const std::vector<PointResult> rows = run_sweep(spec, Seed{6});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].params.n == 32);
  CHECK(rows[1].params.n == 64);

  // a sweep containing only n=64 reproduces that row exactly
  SweepSpec just64 = spec;
  just64.ns = {64};
  const std::vector<PointResult> alone = run_sweep(just64, Seed{6});
  REQUIRE(alone.size() == 1);
  CHECK(alone[0].failures == rows[1].failures);
  CHECK(alone[0].master_seed == rows[1].master_seed);
  CHECK(rows[1].master_seed == Seed{6}.substream(StreamPurpose::sweep_point, 64));

  SweepSpec bad = spec;
  bad.ns = {64, 64};
  CHECK_THROWS_AS(run_sweep(bad, Seed{6}), std::invalid_argument);
  bad.ns = {64, 32};
  CHECK_THROWS_AS(run_sweep(bad, Seed{6}), std::invalid_argument);
}

TEST_CASE("fit_sweep_exponent feeds rows through the exponent fit",
          "[experiment]") {
  std::vector<PointResult> rows;
  for (std::uint64_t n : {100ull, 200ull, 400ull}) {
    PointResult r;
    r.params = derive_params(n, 0.25, 1, 0);
    r.trials = 100000;
    r.failures = 40000000 / (n * n);  // p ~ n^-2
    rows.push_back(r);
  }
  const ExponentFit fit = fit_sweep_exponent(rows);
  CHECK(fit.slope == Catch::Approx(-2.0).margin(1e-3));
}
