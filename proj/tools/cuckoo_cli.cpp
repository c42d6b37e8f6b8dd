#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>

#include <cuckoo/cuckoo.hpp>
#include <cuckoo/report.hpp>

namespace {

using namespace cuckoo;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitBudget = 2;
constexpr int kExitInvariant = 3;

struct OutputTarget {
  std::string path;  // empty = stdout
  std::ofstream file;

  std::ostream* open() {
    if (path.empty()) return &std::cout;
    file.open(path);
    if (!file) {
      std::cerr << "error: cannot open output file '" << path << "'\n";
      return nullptr;
    }
    return &file;
  }
};

struct PointArgs {
  std::uint64_t n = 0;
  std::vector<std::uint64_t> n_list;
  double epsilon = 0.25;
  std::uint32_t d = 1;
  std::uint32_t s = 0;
  std::uint64_t trials = 0;
  std::uint64_t budget = 100'000'000;
  std::uint64_t seed = 1;
  std::string mode = "oracle";
  std::string format = "csv";
  std::uint32_t workers = 1;
  bool verbose = false;
  OutputTarget out;
};

void add_param_flags(CLI::App* cmd, PointArgs& a) {
  cmd->add_option("--epsilon", a.epsilon, "space overhead epsilon (> 0)")
      ->capture_default_str();
  cmd->add_option("--d", a.d, "bucket capacity")->capture_default_str();
  cmd->add_option("--s", a.s, "stash capacity")->capture_default_str();
  cmd->add_option("--seed", a.seed, "master seed (decimal 64-bit)")
      ->capture_default_str();
}

void add_run_flags(CLI::App* cmd, PointArgs& a) {
  cmd->add_option("--budget", a.budget,
                  "max total trials when escalating adaptively")
      ->capture_default_str();
  cmd->add_option("--mode", a.mode, "failure notion: oracle or online")
      ->check(CLI::IsMember({"oracle", "online"}))
      ->capture_default_str();
  cmd->add_option("--workers", a.workers, "worker threads (identical output)")
      ->capture_default_str();
  cmd->add_option("--format", a.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--out", a.out.path, "write report to PATH instead of stdout");
  cmd->add_flag("--verbose", a.verbose, "progress and detail on stderr");
}

int cmd_simulate(PointArgs& a) {
  const Params params = derive_params(a.n, a.epsilon, a.d, a.s);
  RunOptions opt;
  opt.mode = parse_mode(a.mode);
  opt.workers = a.workers;

  PointResult row;
  bool reached = true;
  if (a.trials > 0) {
    row = run_point(params, Seed{a.seed}, a.trials, opt);
  } else {
    AdaptiveConfig cfg;
    cfg.budget = a.budget;
    const AdaptiveResult ar = run_point_adaptive(params, Seed{a.seed}, opt, cfg);
    row = ar.point;
    reached = ar.reached_target;
    if (a.verbose)
      std::cerr << "adaptive: " << ar.trials_executed << " trials executed, "
                << row.failures << " failures at final size " << row.trials << "\n";
  }

  std::ostream* os = a.out.open();
  if (!os) return kExitUsage;
  if (a.format == "json")
    write_json(*os, {row});
  else
    write_csv(*os, {row});
  if (!reached) {
    std::cerr << "budget exhausted: " << row.failures
              << " failures after " << row.trials
              << " trials (target 30); estimate is low-confidence\n";
    return kExitBudget;
  }
  return kExitOk;
}

int cmd_sweep(PointArgs& a) {
  SweepSpec spec;
  spec.ns = a.n_list;
  spec.epsilon = a.epsilon;
  spec.d = a.d;
  spec.s = a.s;
  spec.mode = parse_mode(a.mode);
  spec.trials = a.trials;
  spec.adaptive.budget = a.budget;
  spec.workers = a.workers;

  const std::vector<PointResult> rows = run_sweep(spec, Seed{a.seed});

  bool budget_ok = true;
  if (a.trials == 0)
    for (const PointResult& r : rows)
      if (r.failures < spec.adaptive.target_failures) budget_ok = false;

  ExponentFit fit;
  bool have_fit = false;
  std::string fit_note;
  if (rows.size() >= 3) {
    try {
      fit = fit_sweep_exponent(rows);
      have_fit = true;
    } catch (const std::invalid_argument& e) {
      fit_note = e.what();
    }
  } else {
    fit_note = "need at least 3 points";
  }

  std::ostream* os = a.out.open();
  if (!os) return kExitUsage;
  if (a.format == "json") {
    write_json(*os, rows, have_fit ? &fit : nullptr);
  } else {
    write_csv(*os, rows);
  }
  if (have_fit)
    std::cerr << "fit: slope=" << fit.slope << " +- " << fit.slope_stderr
              << " intercept=" << fit.intercept << " points=" << fit.points.size()
              << "\n";
  else
    std::cerr << "fit skipped: " << fit_note << "\n";
  if (!budget_ok) {
    std::cerr << "budget exhausted on at least one point (target 30 failures); "
                 "estimates are low-confidence\n";
    return kExitBudget;
  }
  return kExitOk;
}

int cmd_bound(const PointArgs& a) {
  const Params params = derive_params(a.n, a.epsilon, a.d, a.s);
  const UnionBoundResult res = union_bound_total(params);
  std::cout << "params: n=" << params.n << " m=" << params.m
            << " epsilon=" << params.epsilon << " d=" << params.d
            << " s=" << params.s << "\n";
  std::cout << "j range: 1.." << res.j_max << " (" << res.in_domain
            << " in-domain, " << res.impossible << " impossible, "
            << res.domain_violations << " domain violations)\n";
  if (!res.terms.empty() && res.terms[0].status == TermStatus::in_domain)
    std::cout << "first term: log F(1) = " << res.terms[0].log_value
              << "  F(1) = " << std::exp(res.terms[0].log_value) << "\n";
  else
    std::cout << "first term: not applicable\n";
  if (a.verbose) {
    for (const BoundTerm& t : res.terms) {
      std::cout << "  j=" << t.j;
      switch (t.status) {
        case TermStatus::in_domain:
          std::cout << " log F(j)=" << t.log_value << " F(j)=" << std::exp(t.log_value);
          break;
        case TermStatus::impossible:
          std::cout << " impossible (j*d+s+1 > n), contributes 0";
          break;
        case TermStatus::domain_violation:
          std::cout << " DOMAIN VIOLATION (j*d+s+1 == n)";
          break;
      }
      std::cout << "\n";
    }
  }
  std::cout << "total bound: " << res.total << " (raw sum " << res.raw_total
            << ")\n";
  if (res.domain_violations > 0) {
    std::cerr << "warning: " << res.domain_violations
              << " term(s) outside the formula's domain; the bound is incomplete\n";
    return kExitBudget;
  }
  return kExitOk;
}

struct VerifyArgs {
  std::string path;
  std::uint32_t d = 1;
  std::uint32_t s = 0;
  bool brute = false;
  bool verbose = false;
};

int cmd_verify(const VerifyArgs& a) {
  std::ifstream in(a.path);
  if (!in) {
    std::cerr << "error: cannot open '" << a.path << "'\n";
    return kExitUsage;
  }
  CuckooGraph g;
  try {
    g = parse_graph(in, a.path);
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const OverflowResult ov = min_overflow(g, a.d);
  const bool suitable = ov.overflow <= a.s;
  std::cout << "graph: m=" << g.m << " edges=" << g.edge_count() << "\n";
  std::cout << "suitable (d=" << a.d << ", s=" << a.s << "): "
            << (suitable ? "yes" : "no") << "\n";
  std::cout << "overflow: " << ov.overflow << "\n";

  const auto witness_stash =
      std::max<std::uint64_t>(a.s, ov.overflow);
  if (!audit_assignment(g, a.d, static_cast<std::uint32_t>(witness_stash),
                        ov.assignment)) {
    std::cerr << "internal error: witness assignment violates capacities\n";
    return kExitInvariant;
  }

  if (!suitable && g.edge_count() <= kBruteForceEdgeLimit) {
    const SubsetCondition sc = subset_condition(g, a.d, a.s);
    if (sc.holds) {
      std::cerr << "internal error: flow says unsuitable but no violating subset exists\n";
      return kExitInvariant;
    }
    std::cout << "violating X = {";
    for (std::size_t i = 0; i < sc.violator.edges.size(); ++i)
      std::cout << (i ? ", " : "") << sc.violator.edges[i];
    std::cout << "}  |X|=" << sc.violator.edges.size()
              << " deficiency=" << sc.violator.deficiency << "\n";
  }

  if (a.verbose) {
    for (std::size_t i = 0; i < ov.assignment.size(); ++i) {
      std::cout << "item " << i << " -> ";
      if (ov.assignment[i] == kStash)
        std::cout << "stash\n";
      else
        std::cout << "bucket " << ov.assignment[i] << "\n";
    }
  }

  if (a.brute) {
    if (g.edge_count() > kBruteForceEdgeLimit) {
      std::cerr << "error: graph has " << g.edge_count()
                << " edges; brute-force oracles are limited to "
                << kBruteForceEdgeLimit << "\n";
      return kExitBudget;
    }
    const bool subset_ok = subset_condition_holds(g, a.d, a.s);
    const std::uint64_t brute_ov = min_overflow_brute(g, a.d);
    const bool enum_ok = brute_ov <= a.s;
    std::cout << "oracle agreement: flow=" << (suitable ? "suitable" : "unsuitable")
              << " subset=" << (subset_ok ? "suitable" : "unsuitable")
              << " enumeration=" << (enum_ok ? "suitable" : "unsuitable") << "\n";
    if (subset_ok != suitable || enum_ok != suitable || brute_ov != ov.overflow) {
      std::cerr << "internal error: oracles disagree (flow overflow " << ov.overflow
                << ", enumerated overflow " << brute_ov << ")\n";
      return kExitInvariant;
    }
    std::cout << "enumerated overflow: " << brute_ov << " (matches flow)\n";
  }
  return kExitOk;
}

struct BenchArgs {
  std::uint64_t n = 10'000;
  double epsilon = 0.25;
  std::uint32_t d = 6;
  std::uint32_t s = 4;
  std::uint64_t seed = 1;
  std::string mix = "1:2:0.5";
};

bool parse_mix(const std::string& text, double out[3]) {
  std::istringstream ss(text);
  char c1 = 0, c2 = 0;
  if (!(ss >> out[0] >> c1 >> out[1] >> c2 >> out[2]) || c1 != ':' || c2 != ':')
    return false;
  std::string rest;
  if (ss >> rest) return false;
  return out[0] >= 0 && out[1] >= 0 && out[2] >= 0;
}

int cmd_bench(const BenchArgs& a) {
  double mix[3];
  if (!parse_mix(a.mix, mix)) {
    std::cerr << "error: --mix expects I:L:R ratios, e.g. 1:2:0.5\n";
    return kExitUsage;
  }
  const Params params =
      derive_params(std::max<std::uint64_t>(a.n, 1), a.epsilon, a.d, a.s);
  const auto inserts = static_cast<std::uint64_t>(mix[0] * static_cast<double>(a.n));
  const auto lookups = static_cast<std::uint64_t>(mix[1] * static_cast<double>(a.n));
  const auto removes = static_cast<std::uint64_t>(mix[2] * static_cast<double>(a.n));

  const Seed master{a.seed};
  const std::uint64_t key_space = master.substream(StreamPurpose::bench, 0);
  auto key_for = [&](std::uint64_t i) { return mix64(key_space ^ i); };
  Rng rng(master.substream(StreamPurpose::bench, 1));

  StashTable<std::uint64_t, std::uint64_t> table(params, master);
  std::vector<std::uint64_t> stash_hist(params.s + 2, 0);
  auto sample_stash = [&] { ++stash_hist[table.stash_size()]; };

  using clock = std::chrono::steady_clock;
  auto mops = [](std::uint64_t ops, clock::duration dt) {
    const double sec = std::chrono::duration<double>(dt).count();
    return sec > 0 ? static_cast<double>(ops) / sec / 1e6 : 0.0;
  };

  const auto t0 = clock::now();
  try {
    for (std::uint64_t i = 0; i < inserts; ++i) {
      table.insert(key_for(i), i);
      sample_stash();
    }
  } catch (const table_full& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBudget;
  }
  const auto t1 = clock::now();

  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < lookups; ++i) {
    // even draws probe a stored key, odd draws probe a key that was never
    // inserted (key_for is a bijection, so offsetting by `inserts` misses)
    const std::uint64_t pick = rng.uniform_below(inserts > 0 ? inserts : 1);
    const std::uint64_t key = key_for((i % 2 == 0) ? pick : inserts + pick);
    if (table.find(key) != nullptr) ++hits;
    sample_stash();
  }
  const auto t2 = clock::now();

  std::uint64_t removed = 0;
  for (std::uint64_t i = 0; i < removes; ++i) {
    const std::uint64_t key = key_for(rng.uniform_below(inserts > 0 ? inserts : 1));
    if (table.erase(key)) ++removed;
    sample_stash();
  }
  const auto t3 = clock::now();

  const TableStats st = table.stats();
  std::cout << "params: n=" << a.n << " m=" << params.m << " d=" << params.d
            << " s=" << params.s << " epsilon=" << params.epsilon << "\n";
  std::cout << "inserts: " << inserts << " (" << mops(inserts, t1 - t0)
            << " Mops/s)\n";
  std::cout << "lookups: " << lookups << " (" << mops(lookups, t2 - t1)
            << " Mops/s, " << hits << " hits)\n";
  std::cout << "removes: " << removes << " (" << mops(removes, t3 - t2)
            << " Mops/s, " << removed << " removed)\n";
  std::cout << "load_factor: " << st.load_factor << "\n";
  std::cout << "stash_occupancy: " << st.stash_occupancy << "\n";
  std::cout << "rehash_count: " << st.rehash_count << "\n";
  std::cout << "max_probe: " << st.max_probe << " (bound " << 2 * params.d + params.s
            << ")\n";
  std::cout << "evictions: " << st.evict_moves << "\n";
  std::cout << "stash occupancy histogram (samples after each op):\n";
  for (std::size_t i = 0; i < stash_hist.size(); ++i)
    if (stash_hist[i] > 0)
      std::cout << "  " << i << ": " << stash_hist[i] << "\n";
  if (!table.audit()) {
    std::cerr << "internal error: table audit failed after workload\n";
    return kExitInvariant;
  }
  return kExitOk;
}

int cmd_selftest(bool verbose) {
  int bad = 0;
  auto check = [&](bool ok, const std::string& name) {
    std::cout << (ok ? "[ok]   " : "[FAIL] ") << name << "\n";
    if (!ok) ++bad;
  };

  // Three oracles on every small multigraph: the incremental flow solver,
  // the subset condition, and direct orientation enumeration.
  {
    bool agree = true;
    bool duality = true;
    OrientationSolver scratch;
    for (std::size_t k = 0; k <= 4 && (agree && duality); ++k) {
      for_each_multigraph(3, k, [&](const CuckooGraph& g) {
        for (std::uint32_t d = 1; d <= 3; ++d) {
          const std::uint64_t flow_ov = min_overflow(g, d, scratch).overflow;
          if (flow_ov != min_overflow_brute(g, d)) duality = false;
          if (flow_ov !=
              static_cast<std::uint64_t>(max_deficiency(g, d).deficiency))
            duality = false;
          for (std::uint32_t s = 0; s <= 2; ++s) {
            const bool a = is_suitable(g, d, s, scratch);
            const bool b = subset_condition_holds(g, d, s);
            if (a != b || a != (flow_ov <= s)) agree = false;
          }
        }
      });
    }
    check(agree, "oracle agreement on enumerated multigraphs (m=3, |E|<=4)");
    check(duality, "overflow equals max deficiency on enumerated multigraphs");
  }

  // Random instances, wider shapes.
  {
    Rng rng(Seed{12345}.substream(StreamPurpose::graph_gen, 0));
    bool ok = true;
    OrientationSolver scratch;
    for (int i = 0; i < 200 && ok; ++i) {
      const std::uint64_t m = 2 + rng.uniform_below(5);
      const std::size_t k = rng.uniform_below(13);
      const CuckooGraph g = random_multigraph(m, k, rng);
      for (std::uint32_t d = 1; d <= 3; ++d) {
        const std::uint64_t flow_ov = min_overflow(g, d, scratch).overflow;
        if (flow_ov != min_overflow_brute(g, d)) ok = false;
        if (flow_ov != static_cast<std::uint64_t>(max_deficiency(g, d).deficiency))
          ok = false;
      }
    }
    check(ok, "overflow agreement on 200 random multigraphs (m<=6, |E|<=12)");
  }

  // Pinned-loop construction: d+s+1 loops need exactly a stash of s+1.
  {
    bool ok = true;
    for (std::uint32_t d = 1; d <= 3; ++d) {
      for (std::uint32_t s = 0; s <= 2; ++s) {
        CuckooGraph g;
        g.m = 2;
        for (std::uint32_t i = 0; i < d + s + 1; ++i) g.edges.emplace_back(0, 0);
        const std::uint64_t ov = min_overflow(g, d).overflow;
        if (ov != s + 1 || is_suitable(g, d, s) || !is_suitable(g, d, s + 1))
          ok = false;
      }
    }
    check(ok, "loop construction needs stash s+1 exactly");
  }

  // Tail complement identity and the exact-rational path.
  {
    bool ok = true;
    for (std::uint64_t n : {5ull, 16ull, 64ull}) {
      for (double p : {0.001, 0.0625, 0.5}) {
        for (std::uint64_t k = 0; k <= n; ++k) {
          const double up = binomial_upper_tail(n, p, k + 1);
          const double lo = binomial_lower_tail(n, p, k);
          if (std::abs(up + lo - 1.0) > 1e-12) ok = false;
        }
      }
    }
    const double exact =
        exact_binomial_upper_tail(16, 1, 16, 2).convert_to<double>();
    if (std::abs(binomial_upper_tail(16, 1.0 / 16.0, 2) - exact) > 1e-13) ok = false;
    check(ok, "binomial tail complement identity and exact-rational agreement");
  }

  // Table versus a shadow map under random operations.
  {
    StashTable<std::uint64_t, std::uint64_t> table(derive_params(500, 0.25, 4, 2),
                                                   Seed{99});
    std::unordered_map<std::uint64_t, std::uint64_t> shadow;
    Rng rng(Seed{99}.substream(StreamPurpose::bench, 7));
    bool ok = true;
    for (int op = 0; op < 4000 && ok; ++op) {
      const std::uint64_t key = rng.uniform_below(600);
      const std::uint64_t action = rng.uniform_below(3);
      if (action < 2 && shadow.size() < 450) {
        table.insert(key, static_cast<std::uint64_t>(op));
        shadow[key] = static_cast<std::uint64_t>(op);
      } else {
        const bool t = table.erase(key);
        const bool s = shadow.erase(key) > 0;
        if (t != s) ok = false;
      }
      if (op % 256 == 0 && !table.audit()) ok = false;
    }
    for (std::uint64_t key = 0; key < 600 && ok; ++key) {
      const std::uint64_t* v = table.find(key);
      const auto it = shadow.find(key);
      if ((v != nullptr) != (it != shadow.end())) ok = false;
      if (v && it != shadow.end() && *v != it->second) ok = false;
    }
    check(ok && table.audit(), "stash table agrees with shadow map (4000 ops)");
  }

  // Worker count must not change results.
  {
    const Params p = derive_params(64, 0.25, 1, 0);
    RunOptions one;
    RunOptions four;
    four.workers = 4;
    const PointResult r1 = run_point(p, Seed{7}, 2000, one);
    const PointResult r4 = run_point(p, Seed{7}, 2000, four);
    check(r1.failures == r4.failures, "run_point is worker-count invariant");
  }

  if (verbose) std::cout << (bad ? "selftest failed\n" : "selftest passed\n");
  return bad == 0 ? kExitOk : kExitInvariant;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generalized cuckoo hashing: experiments, bounds, verification"};
  app.require_subcommand(1);

  PointArgs sim;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Monte Carlo failure estimate at a single size");
  simulate->add_option("--n", sim.n, "item count")->required();
  add_param_flags(simulate, sim);
  simulate->add_option("--trials", sim.trials,
                       "trial count (0 = adaptive until 30 failures)")
      ->capture_default_str();
  add_run_flags(simulate, sim);

  PointArgs swp;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "failure estimates across sizes plus an exponent fit");
  sweep->add_option("--n-list", swp.n_list, "item counts, strictly increasing")
      ->required()
      ->delimiter(',');
  add_param_flags(sweep, swp);
  sweep->add_option("--trials", swp.trials,
                    "trials per point (0 = adaptive until 30 failures)")
      ->capture_default_str();
  add_run_flags(sweep, swp);

  PointArgs bnd;
  CLI::App* bound = app.add_subcommand(
      "bound", "analytic union bound on the failure probability");
  bound->add_option("--n", bnd.n, "item count")->required();
  add_param_flags(bound, bnd);
  bound->add_flag("--verbose", bnd.verbose, "print every term");

  VerifyArgs ver;
  CLI::App* verify =
      app.add_subcommand("verify", "check suitability of a graph file");
  verify->add_option("file", ver.path, "graph file (m, then 'u v' per line)")
      ->required();
  verify->add_option("--d", ver.d, "bucket capacity")->capture_default_str();
  verify->add_option("--s", ver.s, "stash capacity")->capture_default_str();
  verify->add_flag("--brute", ver.brute,
                   "cross-check with subset and orientation enumeration");
  verify->add_flag("--verbose", ver.verbose, "print the witness assignment");

  BenchArgs ben;
  CLI::App* bench =
      app.add_subcommand("bench", "stash table workload benchmark");
  bench->add_option("--n", ben.n, "key count")->capture_default_str();
  bench->add_option("--epsilon", ben.epsilon, "space overhead")->capture_default_str();
  bench->add_option("--d", ben.d, "bucket capacity")->capture_default_str();
  bench->add_option("--s", ben.s, "stash capacity")->capture_default_str();
  bench->add_option("--seed", ben.seed, "workload seed")->capture_default_str();
  bench->add_option("--mix", ben.mix, "insert:lookup:remove ratios of n")
      ->capture_default_str();

  bool selftest_verbose = false;
  CLI::App* selftest =
      app.add_subcommand("selftest", "run the oracle-agreement suite");
  selftest->add_flag("--verbose", selftest_verbose, "print a summary line");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (app.got_subcommand(simulate)) return cmd_simulate(sim);
    if (app.got_subcommand(sweep)) return cmd_sweep(swp);
    if (app.got_subcommand(bound)) return cmd_bound(bnd);
    if (app.got_subcommand(verify)) return cmd_verify(ver);
    if (app.got_subcommand(bench)) return cmd_bench(ben);
    if (app.got_subcommand(selftest)) return cmd_selftest(selftest_verbose);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBudget;
  }
  return kExitUsage;
}
