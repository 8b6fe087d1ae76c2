// pbs: command-line front end and benchmark harness.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pbs/pbs.hpp"

namespace {

using namespace pbs;

constexpr int kExitOk = 0;
constexpr int kExitOther = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitParse = 3;

/// Exit with a given code after printing a report.
struct ExitRequest {
  int code;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

Bundle load_bundle(const std::string& path) { return read_bundle(slurp(path)); }

struct Timing {
  int repeat = 1;
  bool disabled = false;
};

// Median wall time of `repeat` runs in milliseconds; the last run's result
// is kept by the callee.
template <class F>
double timed(const Timing& t, F&& f) {
  std::vector<double> ms;
  for (int i = 0; i < std::max(1, t.repeat); ++i) {
    const auto start = std::chrono::steady_clock::now();
    f();
    const auto stop = std::chrono::steady_clock::now();
    ms.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
  }
  if (t.disabled) return 0.0;
  std::sort(ms.begin(), ms.end());
  const std::size_t k = ms.size();
  return k % 2 ? ms[k / 2] : 0.5 * (ms[k / 2 - 1] + ms[k / 2]);
}

void print_row(const ResultRow& row, bool csv) {
  if (csv) {
    std::cout << ResultRow::kHeader << '\n' << row.csv() << '\n';
  } else {
    std::printf("%s: |S| = %zu of n = %zu (l = %zu), delta = %.9g, achieved = %.9g (ratio %.4g), "
                "%.3f ms\n",
                row.algo.c_str(), row.size, row.n, row.ell, row.delta, row.delta_f, row.ratio,
                row.time_ms);
  }
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    double v = 0.0;
    if (!detail::parse_number(std::string_view(tok), v)) throw Error("bad number '" + tok + "'");
    out.push_back(v);
  }
  return out;
}

void require_ptb(const Bundle& b) {
  const auto rep = validate_ptb(b);
  if (!rep.ok) {
    std::cerr << "input is not a polyline tree bundle: " << rep.message << '\n';
    throw ExitRequest{kExitInvalid};
  }
}

// ------------------------------------------------------------------ commands

struct CommonOpts {
  std::string input;
  std::string out;
  double delta = 0.0;
  std::string metric = "frechet";
  bool csv = false;
  Timing timing;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_metric = true) {
  cmd->add_option("--input", o.input, "bundle file")->required();
  cmd->add_option("--delta", o.delta, "distance threshold")->required()->check(
      CLI::NonNegativeNumber);
  if (with_metric)
    cmd->add_option("--metric", o.metric, "hausdorff or frechet")
        ->check(CLI::IsMember({"hausdorff", "frechet"}));
  cmd->add_option("--out", o.out, "write the kept point set here");
  cmd->add_flag("--csv", o.csv, "print a CSV row");
  cmd->add_option("--repeat", o.timing.repeat, "runs to take the median time over")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--no-timing", o.timing.disabled, "report time_ms as 0");
}

int run_simplify_tree(const CommonOpts& o, bool no_prune) {
  const Bundle b = load_bundle(o.input);
  require_ptb(b);
  const Metric metric = parse_metric(o.metric);
  Simplification s;
  const double ms = timed(o.timing, [&] { s = simplify_tree(b, o.delta, metric, {!no_prune}); });
  print_row(make_row("dp", o.delta, b, s, ms), o.csv);
  if (!o.out.empty()) spit(o.out, write_kept(s.kept));
  return kExitOk;
}

int run_simplify(const CommonOpts& o, unsigned jobs, const std::string& dec_out) {
  const Bundle b = load_bundle(o.input);
  check_bundle(b);
  const Metric metric = parse_metric(o.metric);
  GeneralResult res;
  const double ms = timed(o.timing, [&] { res = simplify_general(b, o.delta, metric, jobs); });
  std::cerr << "decomposition: |D| = " << res.decomposition.d_set.size() << ", "
            << res.decomposition.components.size() << " tree bundles\n";
  print_row(make_row("tbd+dp", o.delta, b, res.simplification, ms), o.csv);
  if (!o.out.empty()) spit(o.out, write_kept(res.simplification.kept));
  if (!dec_out.empty()) spit(dec_out, write_decomposition(res.decomposition));
  return kExitOk;
}

int run_bca(const CommonOpts& o, bool halve) {
  const Bundle b = load_bundle(o.input);
  check_bundle(b);
  Simplification s;
  const double run_delta = halve ? o.delta / 2.0 : o.delta;
  const double ms = timed(o.timing, [&] { s = bca_simplify(b, run_delta); });
  print_row(make_row(halve ? "bca-half" : "bca", o.delta, b, s, ms), o.csv);
  if (!o.out.empty()) spit(o.out, write_kept(s.kept));
  return kExitOk;
}

int run_oracle(const CommonOpts& o, std::size_t cap) {
  const Bundle b = load_bundle(o.input);
  const Metric metric = parse_metric(o.metric);
  std::vector<PointId> kept;
  const double ms = timed(o.timing, [&] { kept = brute_force_pbs(b, o.delta, metric, cap); });
  print_row(make_row("oracle", o.delta, b, make_simplification(b, kept, metric), ms), o.csv);
  if (!o.out.empty()) spit(o.out, write_kept(kept));
  return kExitOk;
}

int run_validate(const std::string& input, const std::string& kept_path, double delta,
                 const std::string& metric_name) {
  const Bundle b = load_bundle(input);
  std::istringstream kin(slurp(kept_path));
  const auto kept = read_kept(kin);
  const auto rep = validate_simplification(b, kept, delta, parse_metric(metric_name));
  std::printf("valid: %s\nendpoints kept: %s\nworst: line %u, %u-%u, %.9g\n",
              rep.valid ? "yes" : "no", rep.endpoints_kept ? "yes" : "no", rep.worst.line,
              rep.worst.from, rep.worst.to, rep.worst.distance);
  if (!rep.valid) std::printf("reason: %s\n", rep.message.c_str());
  return rep.valid ? kExitOk : kExitInvalid;
}

struct GenOpts {
  std::string graph;
  GridGraphParams grid;
  std::int64_t root = -1;
  std::size_t size = 100;
  std::size_t trees = 1;
  std::uint64_t seed = 1;
  std::string out;
  std::string graph_out;
};

EmbeddedGraph make_graph(const GenOpts& o) {
  if (!o.graph.empty()) {
    std::istringstream in(slurp(o.graph));
    return read_graph(in);
  }
  return grid_road_graph(o.grid, o.seed);
}

int run_gen_tree(const GenOpts& o) {
  const EmbeddedGraph g = make_graph(o);
  if (g.nodes.empty()) throw Error("graph has no nodes");
  Rng rng(o.seed ^ 0x9e3779b97f4a7c15ULL);
  Bundle b;
  if (o.trees <= 1) {
    const auto root = o.root >= 0 ? static_cast<std::uint32_t>(o.root)
                                  : static_cast<std::uint32_t>(rng.below(g.nodes.size()));
    b = gen_tree_bundle(g, root, o.size, o.seed);
  } else {
    std::vector<std::uint32_t> roots;
    for (std::size_t i = 0; i < o.trees; ++i)
      roots.push_back(static_cast<std::uint32_t>(rng.below(g.nodes.size())));
    b = gen_general_bundle(g, roots, std::vector<std::size_t>(o.trees, o.size), o.seed);
  }
  if (!o.graph_out.empty()) spit(o.graph_out, write_graph(g));
  if (o.out.empty())
    std::cout << write_bundle(b);
  else
    spit(o.out, write_bundle(b));
  std::cerr << "generated bundle: n = " << b.n() << ", l = " << b.ell() << '\n';
  return kExitOk;
}

MidsGraph parse_mids(std::size_t n, const std::string& edges) {
  MidsGraph g;
  g.n = n;
  std::stringstream ss(edges);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    const auto dash = tok.find('-');
    std::uint32_t u = 0, v = 0;
    if (dash == std::string::npos ||
        !detail::parse_number(std::string_view(tok).substr(0, dash), u) ||
        !detail::parse_number(std::string_view(tok).substr(dash + 1), v))
      throw Error("edge '" + tok + "' is not of the form u-v");
    g.edges.emplace_back(u, v);
  }
  return g;
}

std::string describe_gadgets(const GadgetInstance& inst) {
  std::ostringstream os;
  const auto& p = inst.meta.params;
  os << "params delta " << detail::format_real(p.delta) << " gamma "
     << detail::format_real(p.gamma) << " x_spacing " << detail::format_real(p.x_spacing)
     << " t " << detail::format_real(p.t) << " eta " << detail::format_real(p.eta) << '\n';
  for (const auto& gd : inst.meta.gadgets) {
    os << "gadget " << to_string(gd.kind) << ' ' << gd.owner << " line " << gd.line << " ends "
       << gd.first << ' ' << gd.last << " shared";
    for (PointId s : gd.shared) os << ' ' << s;
    os << '\n';
  }
  for (const auto& c : inst.meta.crossings)
    os << "crossing " << c.p << " vertex_skip " << c.v_star << " horizontal_skip " << c.h_star
       << '\n';
  return os.str();
}

int run_gen_gadget(std::size_t n, const std::string& edges, GadgetParams params,
                   const std::string& out, const std::string& meta_out) {
  const MidsGraph g = parse_mids(n, edges);
  const GadgetInstance inst = gen_gadget_instance(g, params);
  std::cerr << "gadget instance: n = " << inst.bundle.n() << " (bound "
            << gadget_point_bound(g) << "), l = " << inst.bundle.ell() << ", "
            << inst.meta.crossings.size() << " crossings, self-check passed\n";
  if (out.empty())
    std::cout << write_bundle(inst.bundle);
  else
    spit(out, write_bundle(inst.bundle));
  if (!meta_out.empty()) spit(meta_out, describe_gadgets(inst));
  return kExitOk;
}

int run_ingest(const std::string& input, double snap, const std::string& out) {
  const auto res = ingest_gtfs(slurp(input), snap);
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
  std::cerr << "ingested " << res.bundle.ell() << " shapes over " << res.bundle.n() << " points\n";
  if (out.empty())
    std::cout << write_bundle(res.bundle);
  else
    spit(out, write_bundle(res.bundle));
  return kExitOk;
}

// ---------------------------------------------------------------------- bench

struct BenchOpts {
  std::string input;
  std::string deltas;
  double delta_min = 0.0, delta_max = 0.0;
  std::size_t steps = 10;
  std::string algos = "dp,bca";
  std::string metric = "frechet";
  std::string out;
  std::string svg;
  std::string kept_dir;
  unsigned jobs = 1;
  Timing timing;
};

std::string render_svg(const std::vector<ResultRow>& rows) {
  const double W = 640, H = 400, pad = 50;
  std::vector<std::string> algos;
  for (const auto& r : rows)
    if (std::find(algos.begin(), algos.end(), r.algo) == algos.end()) algos.push_back(r.algo);
  double x0 = rows.front().delta, x1 = x0, y1 = 0;
  for (const auto& r : rows) {
    x0 = std::min(x0, r.delta);
    x1 = std::max(x1, r.delta);
    y1 = std::max(y1, static_cast<double>(r.size));
  }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == 0) y1 = 1;
  auto X = [&](double v) { return pad + (v - x0) / (x1 - x0) * (W - 2 * pad); };
  auto Y = [&](double v) { return H - pad - v / y1 * (H - 2 * pad); };
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\">\n", W, H);
  os << buf;
  std::snprintf(buf, sizeof buf,
                "<rect width=\"100%%\" height=\"100%%\" fill=\"white\"/>\n"
                "<line x1=\"%.0f\" y1=\"%.0f\" x2=\"%.0f\" y2=\"%.0f\" stroke=\"black\"/>\n"
                "<line x1=\"%.0f\" y1=\"%.0f\" x2=\"%.0f\" y2=\"%.0f\" stroke=\"black\"/>\n",
                pad, H - pad, W - pad, H - pad, pad, pad, pad, H - pad);
  os << buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.0f\" y=\"%.0f\" font-size=\"12\">delta %.4g .. %.4g</text>\n"
                "<text x=\"5\" y=\"%.0f\" font-size=\"12\">|S| (max %.0f)</text>\n",
                W / 2 - 60, H - 15, x0, x1, pad - 10, y1);
  os << buf;
  for (std::size_t a = 0; a < algos.size(); ++a) {
    os << "<polyline fill=\"none\" stroke=\"" << colors[a % 5] << "\" points=\"";
    for (const auto& r : rows)
      if (r.algo == algos[a]) {
        std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X(r.delta), Y(static_cast<double>(r.size)));
        os << buf;
      }
    os << "\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.0f\" y=\"%.0f\" font-size=\"12\" fill=\"%s\">%s</text>\n",
                  W - pad - 80, pad + 15.0 * static_cast<double>(a), colors[a % 5],
                  algos[a].c_str());
    os << buf;
  }
  os << "</svg>\n";
  return os.str();
}

int run_bench(const BenchOpts& o) {
  const Bundle b = load_bundle(o.input);
  check_bundle(b);
  const Metric metric = parse_metric(o.metric);
  std::vector<double> grid;
  if (!o.deltas.empty()) {
    grid = parse_list(o.deltas);
  } else {
    if (!(o.delta_min > 0.0 && o.delta_max >= o.delta_min) || o.steps == 0)
      throw Error("give --deltas or 0 < --delta-min <= --delta-max with --steps");
    for (std::size_t i = 0; i < o.steps; ++i) {
      const double f = o.steps == 1 ? 0.0 : static_cast<double>(i) / (o.steps - 1);
      grid.push_back(o.delta_min * std::pow(o.delta_max / o.delta_min, f));
    }
  }
  std::vector<std::string> algos;
  {
    std::stringstream ss(o.algos);
    std::string a;
    while (std::getline(ss, a, ','))
      if (!a.empty()) algos.push_back(a);
  }
  for (const auto& a : algos)
    if (a != "dp" && a != "tbd" && a != "bca" && a != "bca-half")
      throw Error("unknown algorithm '" + a + "' (dp, tbd, bca, bca-half)");
  if (std::find(algos.begin(), algos.end(), "dp") != algos.end()) require_ptb(b);
  if (!o.kept_dir.empty()) std::filesystem::create_directories(o.kept_dir);

  std::vector<ResultRow> rows;
  std::ostringstream csv;
  csv << ResultRow::kHeader << '\n';
  for (const auto& algo : algos)
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double d = grid[i];
      Simplification s;
      double ms = 0.0;
      if (algo == "dp")
        ms = timed(o.timing, [&] { s = simplify_tree(b, d, metric); });
      else if (algo == "tbd")
        ms = timed(o.timing, [&] { s = simplify_general(b, d, metric, o.jobs).simplification; });
      else
        ms = timed(o.timing, [&] { s = bca_simplify(b, algo == "bca" ? d : d / 2.0); });
      rows.push_back(make_row(algo, d, b, s, ms));
      csv << rows.back().csv() << '\n';
      if (!o.kept_dir.empty())
        spit((std::filesystem::path(o.kept_dir) / (algo + "_" + std::to_string(i) + ".kept"))
                 .string(),
             write_kept(s.kept));
    }
  if (o.out.empty())
    std::cout << csv.str();
  else
    spit(o.out, csv.str());
  if (!o.svg.empty() && !rows.empty()) spit(o.svg, render_svg(rows));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consistent simplification of polyline bundles"};
  app.require_subcommand(1);

  CommonOpts tree_o, gen_o, bca_o, oracle_o;
  bool no_prune = false, halve = false;
  unsigned jobs = 1;
  std::string dec_out;
  std::size_t cap = 20;

  auto* c_tree = app.add_subcommand("simplify-tree", "exact DP on a polyline tree bundle");
  add_common(c_tree, tree_o);
  c_tree->add_flag("--no-prune", no_prune, "evaluate helping values on whole subtrees");

  auto* c_gen = app.add_subcommand("simplify", "tree decomposition followed by the DP");
  add_common(c_gen, gen_o);
  c_gen->add_option("--jobs", jobs, "threads over tree components")->check(CLI::PositiveNumber);
  c_gen->add_option("--decomposition-out", dec_out, "write the decomposition here");

  auto* c_bca = app.add_subcommand("bca", "bi-criteria star-cover approximation (Frechet)");
  add_common(c_bca, bca_o, false);
  c_bca->add_flag("--halve", halve, "run at delta/2 so the result obeys delta");

  auto* c_oracle = app.add_subcommand("oracle", "exhaustive optimum for small bundles");
  add_common(c_oracle, oracle_o);
  c_oracle->add_option("--cap", cap, "maximum number of removable points");

  std::string v_input, v_kept, v_metric = "frechet";
  double v_delta = 0.0;
  auto* c_val = app.add_subcommand("validate", "check a kept point set");
  c_val->add_option("--input", v_input, "bundle file")->required();
  c_val->add_option("--kept", v_kept, "kept point file")->required();
  c_val->add_option("--delta", v_delta, "distance threshold")->required();
  c_val->add_option("--metric", v_metric)->check(CLI::IsMember({"hausdorff", "frechet"}));

  GenOpts g_o;
  auto* c_gt = app.add_subcommand("gen-tree", "generate tree or general bundles from a graph");
  c_gt->add_option("--graph", g_o.graph, "embedded graph file (default: generated grid)");
  c_gt->add_option("--rows", g_o.grid.rows);
  c_gt->add_option("--cols", g_o.grid.cols);
  c_gt->add_option("--spacing", g_o.grid.spacing);
  c_gt->add_option("--subdivide", g_o.grid.subdivide, "max extra points per grid edge");
  c_gt->add_option("--root", g_o.root, "root node (default: drawn from the seed)");
  c_gt->add_option("--size", g_o.size, "nodes per tree");
  c_gt->add_option("--trees", g_o.trees, "number of trees (more than one gives a general bundle)");
  c_gt->add_option("--seed", g_o.seed);
  c_gt->add_option("--out", g_o.out);
  c_gt->add_option("--graph-out", g_o.graph_out);

  std::size_t gg_n = 2;
  std::string gg_edges, gg_out, gg_meta;
  GadgetParams gg_params;
  auto* c_gg = app.add_subcommand("gen-gadget", "planar hardness instance from a small graph");
  c_gg->add_option("--n", gg_n, "vertex count")->required();
  c_gg->add_option("--edges", gg_edges, "edges as u-v,u-v,...");
  c_gg->add_option("--delta", gg_params.delta);
  c_gg->add_option("--gamma", gg_params.gamma);
  c_gg->add_option("--x-spacing", gg_params.x_spacing);
  c_gg->add_option("--out", gg_out);
  c_gg->add_option("--meta-out", gg_meta, "write gadget and crossing metadata here");

  std::string i_input, i_out;
  double i_snap = 0.0;
  auto* c_in = app.add_subcommand("ingest-gtfs", "build a bundle from a GTFS shapes.txt");
  c_in->add_option("--input", i_input)->required();
  c_in->add_option("--snap", i_snap, "merge points closer than this");
  c_in->add_option("--out", i_out);

  BenchOpts b_o;
  auto* c_bench = app.add_subcommand("bench", "sweep a delta grid and emit CSV");
  c_bench->add_option("--input", b_o.input)->required();
  c_bench->add_option("--deltas", b_o.deltas, "comma-separated thresholds");
  c_bench->add_option("--delta-min", b_o.delta_min);
  c_bench->add_option("--delta-max", b_o.delta_max);
  c_bench->add_option("--steps", b_o.steps);
  c_bench->add_option("--algos", b_o.algos, "subset of dp,tbd,bca,bca-half");
  c_bench->add_option("--metric", b_o.metric)->check(CLI::IsMember({"hausdorff", "frechet"}));
  c_bench->add_option("--out", b_o.out, "CSV file (default: stdout)");
  c_bench->add_option("--svg", b_o.svg, "line chart of |S| over delta");
  c_bench->add_option("--kept-dir", b_o.kept_dir, "write each row's kept set here");
  c_bench->add_option("--jobs", b_o.jobs)->check(CLI::PositiveNumber);
  c_bench->add_option("--repeat", b_o.timing.repeat)->check(CLI::PositiveNumber);
  c_bench->add_flag("--no-timing", b_o.timing.disabled);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*c_tree) return run_simplify_tree(tree_o, no_prune);
    if (*c_gen) return run_simplify(gen_o, jobs, dec_out);
    if (*c_bca) return run_bca(bca_o, halve);
    if (*c_oracle) return run_oracle(oracle_o, cap);
    if (*c_val) return run_validate(v_input, v_kept, v_delta, v_metric);
    if (*c_gt) return run_gen_tree(g_o);
    if (*c_gg) return run_gen_gadget(gg_n, gg_edges, gg_params, gg_out, gg_meta);
    if (*c_in) return run_ingest(i_input, i_snap, i_out);
    if (*c_bench) return run_bench(b_o);
  } catch (const ExitRequest& e) {
    return e.code;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitOther;
}
