// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "oracles.hpp"

using namespace pbs;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

template <class F>
double median_ms(int repeat, F&& f) {
  std::vector<double> ms;
  for (int i = 0; i < repeat; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    ms.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  std::sort(ms.begin(), ms.end());
  return ms[ms.size() / 2];
}

const double kDeltas[] = {0.2, 0.5, 1.0};
const Metric kMetrics[] = {Metric::Hausdorff, Metric::Frechet};

// ------------------------------------------------------------ criteria

Outcome dp_optimality() {
  Rng rng(1001);
  std::size_t instances = 0, runs = 0, mismatches = 0;
  while (instances < 500) {
    const auto b = ref::random_ptb(rng, 5 + rng.below(14), 0.4 + rng.uniform(0.0, 1.2));
    if (ref::removable_count(b) > 12) continue;
    ++instances;
    for (Metric m : kMetrics)
      for (double d : kDeltas) {
        ++runs;
        if (simplify_tree(b, d, m).size() != brute_force_pbs(b, d, m).size()) ++mismatches;
      }
  }
  return {mismatches == 0, fmt("%zu PTBs, %zu runs, %zu size mismatches", instances, runs, mismatches)};
}

Outcome sweep_correctness() {
  Rng rng(1002);
  std::size_t tree_bad = 0, line_bad = 0;
  for (int it = 0; it < 250; ++it) {
    const auto b = ref::random_ptb(rng, 5 + rng.below(56));
    const auto tree = build_tree_graph(b);
    const double d = rng.uniform(0.05, 1.5);
    if (!(build_tree_hausdorff(b, tree, d) == build_naive(b, tree, d, Metric::Hausdorff))) ++tree_bad;
  }
  for (int it = 0; it < 250; ++it) {
    const auto pts = ref::random_walk(rng, 3 + rng.below(58), rng.uniform(0.2, 2.5));
    const double d = rng.uniform(0.05, 1.5);
    std::vector<std::pair<PointId, PointId>> sweep;
    for (auto [i, j] : chan_chin_shortcuts(pts, d))
      sweep.emplace_back(static_cast<PointId>(i), static_cast<PointId>(j));
    if (sweep != ref::graph_pairs(build_naive(ref::single_line(pts), d, Metric::Hausdorff))) ++line_bad;
  }
  return {tree_bad == 0 && line_bad == 0,
          fmt("250 PTBs: %zu differ; 250 polylines: %zu differ", tree_bad, line_bad)};
}

Outcome metric_ordering() {
  Rng rng(1003);
  std::size_t checks = 0, violations = 0, separated = 0;
  for (int it = 0; it < 2000; ++it) {
    const auto pts = ref::random_walk(rng, 3 + rng.below(12), rng.uniform(0.3, 3.0));
    for (double d : {0.05, 0.2, 0.5, 1.0, 2.0}) {
      ++checks;
      const bool f = frechet_ok(pts.front(), pts.back(), pts, d);
      const bool h = hausdorff_ok(pts.front(), pts.back(), pts, d);
      if (f && !h) ++violations;
      if (h && !f) ++separated;
    }
  }
  // Backtracking along the segment: Hausdorff-valid, Fréchet-invalid.
  Bundle zig;
  zig.points = {{0, 0}, {6, 0.1}, {4, -0.1}, {10, 0}};
  zig.lines = {{{0, 1, 2, 3}}};
  const std::vector<PointId> kept{0, 3};
  const bool h = validate_simplification(zig, kept, 0.2, Metric::Hausdorff).valid;
  const bool f = validate_simplification(zig, kept, 0.2, Metric::Frechet).valid;
  return {violations == 0 && h && !f,
          fmt("%zu checks, %zu violations, %zu separating; backtracking example hausdorff=%s frechet=%s",
              checks, violations, separated, h ? "valid" : "invalid", f ? "valid" : "invalid")};
}

Outcome single_polyline() {
  Rng rng(1004);
  std::size_t runs = 0, bad = 0;
  for (int it = 0; it < 250; ++it) {
    const auto pts = ref::random_walk(rng, 2 + rng.below(60), rng.uniform(0.2, 2.0));
    const auto b = ref::single_line(pts);
    const double d = rng.uniform(0.05, 2.0);
    for (Metric m : kMetrics) {
      ++runs;
      const auto g = build_naive(b, d, m);
      if (simplify_tree(b, d, m).size() != 1 + min_link_path(g, 0, static_cast<PointId>(pts.size() - 1)))
        ++bad;
    }
  }
  return {bad == 0, fmt("250 polylines, %zu runs, %zu mismatches", runs, bad)};
}

Outcome tbd_validity() {
  Rng rng(1005);
  std::size_t bad_dec = 0, bad_simpl = 0, not_independent = 0, total = 0;
  for (int it = 0; it < 250; ++it) {
    Bundle b;
    if (it % 2)
      b = ref::random_general(rng, 2 + rng.below(12), 4 + rng.below(6), 3 + rng.below(20));
    else {
      const auto g = grid_road_graph({.rows = 12, .cols = 12, .subdivide = rng.below(3)}, rng.bits());
      const std::size_t trees = 2 + rng.below(4);
      std::vector<std::uint32_t> roots;
      for (std::size_t t = 0; t < trees; ++t) roots.push_back(static_cast<std::uint32_t>(rng.below(g.nodes.size())));
      b = gen_general_bundle(g, roots, std::vector<std::size_t>(trees, 20 + rng.below(60)), rng.bits());
    }
    ++total;
    const auto dec = greedy_tbd(b);
    if (!validate_decomposition(b, dec).ok) ++bad_dec;
    const double d1 = rng.uniform(0.05, 1.0), d2 = rng.uniform(1.0, 5.0);
    const Metric m = kMetrics[it % 2];
    const auto r1 = simplify_general(b, d1, m);
    const auto r2 = simplify_general(b, d2, m);
    if (!validate_simplification(b, r1.simplification.kept, d1, m).valid ||
        !validate_simplification(b, r2.simplification.kept, d2, m).valid)
      ++bad_simpl;
    if (!(r1.decomposition == dec) || !(r2.decomposition == dec)) ++not_independent;
  }
  return {bad_dec == 0 && bad_simpl == 0 && not_independent == 0,
          fmt("%zu bundles: %zu invalid decompositions, %zu invalid simplifications, %zu delta-dependent",
              total, bad_dec, bad_simpl, not_independent)};
}

Outcome bca_contract() {
  Rng rng(1006);
  std::size_t total = 0, over_2d = 0, half_over = 0, in_cap = 0, below_opt = 0;
  double worst_ratio = 0.0;
  for (int it = 0; it < 300; ++it) {
    const auto b = it % 2 ? ref::random_general(rng, 2 + rng.below(6), 5, 3 + rng.below(8))
                          : ref::random_ptb(rng, 6 + rng.below(30));
    for (double d : kDeltas) {
      ++total;
      const auto s = bca_simplify(b, d);
      const auto half = bca_simplify(b, d / 2.0);
      worst_ratio = std::max(worst_ratio, s.max_achieved() / d);
      if (s.max_achieved() > 2.0 * d || !validate_simplification(b, s.kept, 2.0 * d, Metric::Frechet).valid)
        ++over_2d;
      if (half.max_achieved() > d || !validate_simplification(b, half.kept, d, Metric::Frechet).valid)
        ++half_over;
      if (ref::removable_count(b) <= 12) {
        ++in_cap;
        if (s.size() < brute_force_pbs(b, d, Metric::Frechet).size()) ++below_opt;
      }
    }
  }
  return {over_2d == 0 && half_over == 0 && below_opt == 0,
          fmt("%zu runs: %zu above 2*delta (worst ratio %.3f), %zu halved above delta; "
              "%zu in-cap runs, %zu with |S_BCA| < optimum",
              total, over_2d, worst_ratio, half_over, in_cap, below_opt)};
}

Outcome road_tree_comparison() {
  const double delta = 0.25;
  const int instances = 10, repeat = 3;
  std::map<std::size_t, double> dp_ms, bca_ms;
  std::size_t compared = 0, dp_not_worse = 0;
  for (std::size_t n : {500u, 2000u}) {
    for (int i = 0; i < instances; ++i) {
      const std::uint64_t seed = 7000 + n + static_cast<std::uint64_t>(i);
      const auto g = grid_road_graph({.rows = 40, .cols = 40, .subdivide = 2}, seed);
      Rng rng(seed);
      const auto b = gen_tree_bundle(g, static_cast<std::uint32_t>(rng.below(g.nodes.size())), n, seed);
      Simplification dp, bca;
      dp_ms[n] += median_ms(repeat, [&] { dp = simplify_tree(b, delta, Metric::Frechet); });
      bca_ms[n] += median_ms(repeat, [&] { bca = bca_simplify(b, delta); });
      ++compared;
      if (dp.size() <= bca.size()) ++dp_not_worse;
    }
  }
  const double share = static_cast<double>(dp_not_worse) / static_cast<double>(compared);
  // Two doublings from 500 to 2000.
  const double per_doubling = std::sqrt(dp_ms[2000] / dp_ms[500]);
  const bool quality = share >= 0.95;
  const bool growth = per_doubling >= 3.0 && per_doubling <= 5.0;
  const bool bca_slower = bca_ms[2000] > dp_ms[2000];
  return {quality && growth && bca_slower,
          fmt("|S_DP| <= |S_BCA| on %zu/%zu (%s); DP time %.1f -> %.1f ms, %.2fx per doubling "
              "(want 3-5: %s); BCA %.1f ms vs DP %.1f ms at n=2000 (%s)",
              dp_not_worse, compared, quality ? "ok" : "low", dp_ms[500] / instances,
              dp_ms[2000] / instances, per_doubling, growth ? "ok" : "outside", bca_ms[2000] / instances,
              dp_ms[2000] / instances, bca_slower ? "ok" : "not slower")};
}

Outcome delta_sweep() {
  const auto g = grid_road_graph({.rows = 30, .cols = 30, .subdivide = 2}, 1008);
  const auto b = gen_tree_bundle(g, 17, 500, 1008);
  std::vector<PointId> ends;
  for (const auto& l : b.lines) {
    ends.push_back(l.front());
    ends.push_back(l.back());
  }
  std::sort(ends.begin(), ends.end());
  ends.erase(std::unique(ends.begin(), ends.end()), ends.end());
  bool monotone = true, converged = true;
  std::string sizes;
  for (Metric m : kMetrics) {
    std::size_t prev = b.n() + 1, last = 0;
    for (int k = -8; k <= 12; ++k) {
      const double d = 0.01 * std::pow(2.0, k + 8);
      last = simplify_tree(b, d, m).size();
      if (last > prev) monotone = false;
      prev = last;
    }
    if (last != ends.size()) converged = false;
    sizes += fmt("%s final %zu; ", to_string(m), last);
  }
  return {monotone && converged,
          fmt("n=%zu, %zu line endpoints incl. root; %smonotone=%s", b.n(), ends.size(), sizes.c_str(),
              monotone ? "yes" : "no")};
}

Outcome gadgets() {
  std::size_t graphs = 0, bad_checks = 0, ids_fail = 0, violating_pass = 0, wrong_line = 0;
  for (std::size_t n = 2; n <= 3; ++n) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (std::uint32_t u = 0; u < n; ++u)
      for (std::uint32_t v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
    for (unsigned mask = 0; mask < (1u << pairs.size()); ++mask) {
      MidsGraph g;
      g.n = n;
      for (std::size_t i = 0; i < pairs.size(); ++i)
        if (mask >> i & 1) g.edges.push_back(pairs[i]);
      ++graphs;
      GadgetInstance inst;
      try {
        inst = gen_gadget_instance(g);
      } catch (const GadgetError&) {
        ++bad_checks;
        continue;
      }
      const auto rep = check_gadget_instance(g, inst);
      if (!rep.ok || !rep.planar || !rep.point_bound || !rep.vertex_single_shortcut ||
          !rep.no_new_shortcuts || static_cast<double>(inst.bundle.n()) > gadget_point_bound(g))
        ++bad_checks;
      for (unsigned s = 1; s < (1u << n); ++s) {
        std::vector<std::uint32_t> set;
        for (std::uint32_t v = 0; v < n; ++v)
          if (s >> v & 1) set.push_back(v);
        const double d = inst.meta.params.delta;
        if (g.independent(set) && g.dominating(set)) {
          if (!validate_simplification(inst.bundle, intended_solution(g, set, inst), d, Metric::Frechet).valid)
            ++ids_fail;
        } else if (!g.independent(set)) {
          const auto r = validate_simplification(inst.bundle, intended_solution(g, set, inst, true), d,
                                                 Metric::Frechet);
          if (r.valid) ++violating_pass;
          // The edge line of every adjacent chosen pair loses its cheap skip.
          for (const auto& gd : inst.meta.gadgets)
            if (gd.kind == GadgetKind::Edge && (s >> gd.members[0] & 1) && (s >> gd.members[1] & 1) &&
                r.per_line[gd.line] <= d)
              ++wrong_line;
        }
      }
    }
  }
  return {bad_checks == 0 && ids_fail == 0 && violating_pass == 0 && wrong_line == 0,
          fmt("%zu graphs: %zu failed self-checks, %zu IDS invalid, %zu violating sets valid, "
              "%zu violating edges still within delta",
              graphs, bad_checks, ids_fail, violating_pass, wrong_line)};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome round_trip() {
  Rng rng(1010);
  std::size_t bundle_bad = 0, gtfs_bad = 0, lib_nondet = 0, cli_nondet = 0, cli_errors = 0;
  for (int it = 0; it < 50; ++it) {
    const auto g = grid_road_graph({.rows = 15, .cols = 15, .spacing = rng.uniform(1e-4, 10.0), .subdivide = 2},
                                   rng.bits());
    const auto b = gen_general_bundle(g, {0, static_cast<std::uint32_t>(g.nodes.size() - 1)}, {60, 60},
                                      rng.bits());
    const std::string text = write_bundle(b);
    if (write_bundle(read_bundle(text)) != text) ++bundle_bad;
    // GTFS: geometry of every line survives, and a second pass is a fixed point.
    const auto once = ingest_gtfs(write_gtfs_shapes(b)).bundle;
    bool same = once.ell() == b.ell();
    for (LineId l = 0; same && l < b.ell(); ++l) {
      const auto p = b.line_points(l), q = once.line_points(l);
      same = p.size() == q.size() &&
             std::equal(p.begin(), p.end(), q.begin(), [](Point x, Point y) { return x.x == y.x && x.y == y.y; });
    }
    if (!same || write_bundle(ingest_gtfs(write_gtfs_shapes(once)).bundle) != write_bundle(once)) ++gtfs_bad;
    // Library determinism.
    if (simplify_general(b, 0.3, Metric::Frechet, 1).simplification.kept !=
            simplify_general(b, 0.3, Metric::Frechet, 4).simplification.kept ||
        bca_simplify(b, 0.3).kept != bca_simplify(b, 0.3).kept)
      ++lib_nondet;
  }

  // Every CLI command twice with the same arguments; outputs must match byte for byte.
  const fs::path dir = fs::temp_directory_path() / "pbs_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream(dir / "shapes.txt") << write_gtfs_shapes(gen_tree_bundle(
        grid_road_graph({.rows = 10, .cols = 10}, 3), 0, 60, 3));
  }
  const std::string in = (dir / "bundle.txt").string();
  const std::string tree = (dir / "tree.txt").string();
  const std::vector<std::string> commands = {
      "gen-tree --rows 20 --cols 20 --subdivide 2 --size 150 --trees 3 --seed 11 --out " + in,
      "gen-tree --rows 20 --cols 20 --size 150 --seed 12 --out " + tree,
      "gen-gadget --n 3 --edges 0-1,1-2",
      "ingest-gtfs --input " + (dir / "shapes.txt").string(),
      "simplify-tree --input " + tree + " --delta 0.3 --csv --no-timing",
      "simplify --input " + in + " --delta 0.3 --jobs 4 --csv --no-timing",
      "bca --input " + in + " --delta 0.3 --halve --csv --no-timing",
      "bench --input " + in + " --deltas 0.1,0.4,1.6 --algos tbd,bca,bca-half --no-timing",
  };
  for (std::size_t c = 0; c < commands.size(); ++c) {
    std::string outputs[2];
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path out = dir / fmt("out_%zu_%d.txt", c, rep);
      const std::string cmd =
          std::string("\"") + PBS_CLI + "\" " + commands[c] + " > \"" + out.string() + "\" 2>/dev/null";
      const int status = std::system(cmd.c_str());
      if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) ++cli_errors;
      outputs[rep] = read_file(out) + (c < 2 ? read_file(c == 0 ? in : tree) : "");
    }
    if (outputs[0] != outputs[1]) ++cli_nondet;
  }
  fs::remove_all(dir);
  return {bundle_bad == 0 && gtfs_bad == 0 && lib_nondet == 0 && cli_nondet == 0 && cli_errors == 0,
          fmt("50 bundles: %zu bundle-file and %zu GTFS round-trip failures, %zu nondeterministic; "
              "%zu CLI commands: %zu differ, %zu errors",
              bundle_bad, gtfs_bad, lib_nondet, commands.size(), cli_nondet, cli_errors)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"DP optimality against exhaustive search", dp_optimality},
      {"Hausdorff sweeps match pairwise construction", sweep_correctness},
      {"Frechet validity implies Hausdorff validity", metric_ordering},
      {"single polyline: DP size is 1 + minimum-link path", single_polyline},
      {"tree bundle decomposition validity", tbd_validity},
      {"bi-criteria approximation contract", bca_contract},
      {"road tree bundles: DP versus BCA", road_tree_comparison},
      {"delta sweep is monotone and converges", delta_sweep},
      {"hardness gadget generator", gadgets},
      {"round trips and determinism", round_trip},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %zu: %s  %s  [%s] (%.1f s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                o.detail.c_str(), s);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
