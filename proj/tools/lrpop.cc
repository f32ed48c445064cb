// Command-line front end: solve problem files, run the benchmark families,
// print expansions and sparsity graphs.

#include <atomic>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lrpop/bench.h"
#include "lrpop/cp_json.h"
#include "lrpop/errors.h"
#include "lrpop/lifting.h"
#include "lrpop/pipeline.h"
#include "lrpop/sparsity.h"

namespace {

using namespace lrpop;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitOrder = 3;
constexpr int kExitSolver = 4;

constexpr double kDefaultTol = 1e-7;

std::atomic<bool> g_cancel{false};

extern "C" void on_sigint(int) { g_cancel.store(true); }

// Options shared by solve and bench.
struct CommonFlags {
  int order = 0;
  std::string basis;
  bool t_bounds = false;
  bool strict_degree = false;
  double tol = kDefaultTol;
  double timeout = 0.0;
  std::string backend = "embedded";
  std::string external_cmd;
  std::uint64_t seed = 0;
  std::string out;
  std::string sdp_out;
  bool verbose = false;
};

void add_model_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--basis", f.basis, "Convert factors to this basis before solving")
      ->check(CLI::IsMember({"monomial", "bernstein"}));
  cmd->add_flag("--t-bounds", f.t_bounds, "Add B^2 - t^2 >= 0 bounds on the lifted variables");
  cmd->add_flag("--strict-degree", f.strict_degree,
                "Keep lifting rows with deg(q h) < 2k only (default <= 2k)");
  cmd->add_option("--tol", f.tol, "Solver tolerance on relative residuals and gap")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--backend", f.backend, "Solver backend")
      ->check(CLI::IsMember({"embedded", "external"}));
  cmd->add_option("--external-cmd", f.external_cmd,
                  "External solver command with {input} and {output} placeholders "
                  "(default: $LRPOP_EXTERNAL_CMD)");
  cmd->add_flag("-v,--verbose", f.verbose, "Print solver iterations to stderr");
}

std::optional<Basis> parse_basis(const std::string& s) {
  if (s == "monomial") return Basis::Monomial;
  if (s == "bernstein") return Basis::Bernstein;
  return std::nullopt;
}

PipelineOptions pipeline_options(const CommonFlags& f) {
  PipelineOptions o;
  o.order = f.order;
  o.t_bounds = f.t_bounds;
  o.strict_degree = f.strict_degree;
  o.solver.tol = f.tol;
  o.solver.verbose = f.verbose;
  o.sdp_out = f.sdp_out;
  o.solver.cancel = &g_cancel;
  if (f.backend == "external") {
    o.solver.backend = Backend::External;
    o.solver.external_command = f.external_cmd;
    if (o.solver.external_command.empty()) {
      if (const char* env = std::getenv("LRPOP_EXTERNAL_CMD")) o.solver.external_command = env;
    }
    if (o.solver.external_command.empty()) {
      throw InvalidInput("the external backend needs --external-cmd or LRPOP_EXTERNAL_CMD");
    }
  }
  return o;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  out << text << "\n";
  if (!out) throw InvalidInput("cannot write " + path);
}

CPPoly load(const std::string& path, const std::string& basis) {
  CPPoly f = read_cp_file(path);
  if (!basis.empty()) f = basis_convert(f, *parse_basis(basis));
  return f;
}

// ---------------------------------------------------------------------------

struct SolveFlags {
  CommonFlags common;
  std::string input;
  std::string family;
  int n = 10;
  int r = 2;
  int d = 2;
  double delta = 1.0;
  bool dense = false;
};

int run_solve(const SolveFlags& s) {
  const CommonFlags& f = s.common;
  PipelineOptions opts = pipeline_options(f);
  if (f.timeout > 0.0) {
    opts.solver.deadline = std::chrono::steady_clock::now() +
                           std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                               std::chrono::duration<double>(f.timeout));
  }
  std::optional<CPPoly> poly;
  InstanceInfo info;
  if (!s.input.empty()) {
    poly = load(s.input, f.basis);
    info = describe(*poly, s.input);
  } else {
    BenchSpec spec = default_bench(*parse_family(s.family));
    spec.r = s.r;
    spec.d = s.d;
    spec.delta = s.delta;
    spec.seed = f.seed;
    if (!f.basis.empty()) spec.basis = parse_basis(f.basis);
    poly = make_instance(spec, s.n);
    info = describe(*poly, s.family);
    info.seed = instance_seed(f.seed, s.n);
    if (spec.family == Family::Bernstein) info.delta = s.delta;
  }
  const RunReport rep = s.dense ? solve_dense(*poly, opts, info) : solve_cp(*poly, opts, info);
  std::cout << format_report(rep);
  if (!f.out.empty()) write_file(f.out, serialize_report(rep));
  return rep.status == SolveStatus::Optimal ? kExitOk : kExitSolver;
}

// ---------------------------------------------------------------------------

struct BenchFlags {
  CommonFlags common;
  std::string family;
  std::vector<int> n_values;
  std::vector<int> orders;
  int r = 0;
  int d = -1;
  double delta = 1.0;
  bool dense = false;
  int jobs = 1;
  double timeout = 300.0;
};

int run_bench_cmd(const BenchFlags& b) {
  const CommonFlags& f = b.common;
  BenchSpec spec = default_bench(*parse_family(b.family));
  if (!b.n_values.empty()) spec.n_values = b.n_values;
  if (!b.orders.empty()) spec.orders = b.orders;
  if (b.r > 0) spec.r = b.r;
  if (b.d >= 0) spec.d = b.d;
  spec.delta = b.delta;
  spec.dense = b.dense;
  spec.seed = f.seed;
  spec.jobs = b.jobs;
  spec.timeout_seconds = b.timeout;
  if (!f.basis.empty()) spec.basis = parse_basis(f.basis);
  spec.pipeline = pipeline_options(f);

  std::signal(SIGINT, on_sigint);
  const BenchTable table = run_bench(spec, &g_cancel, [&](const BenchCell& c) {
    std::fprintf(stderr, "  %s k=%d n=%d: %s\n", method_name(c.method), c.order, c.n,
                 c.timed_out ? "timeout"
                 : !c.error.empty() ? "rejected"
                                    : status_name(c.report.status));
  });
  std::cout << format_bench(table);
  if (!f.out.empty()) write_file(f.out, bench_to_json(table).dump(2));
  return kExitOk;
}

// ---------------------------------------------------------------------------

int run_expand(const std::string& input, const std::string& basis, std::size_t budget) {
  const CPPoly f = load(input, basis);
  const DensePoly p = cp_expand(f, budget);
  std::cout << p.to_string([](int i) { return "x" + std::to_string(i + 1); }) << "\n";
  return kExitOk;
}

struct GraphFlags {
  std::string input;
  int r = 0;
  int n = 0;
  std::string kind = "tree";
  std::string out;
};

int run_graph(const GraphFlags& g) {
  int r = g.r;
  int n = g.n;
  if (!g.input.empty()) {
    const CPPoly f = read_cp_file(g.input);
    r = f.r();
    n = f.n();
  }
  if (r < 1 || n < 1) throw InvalidInput("graph needs a problem file or positive --r and --n");
  const SparsityGraph graph = build_lr_graph(r, n);
  std::string dot;
  if (g.kind == "graph") {
    dot = to_dot(graph);
  } else {
    const std::vector<int> order = peo_order(r, n);
    const SparsityGraph chordal = chordal_extend(graph, order);
    dot = g.kind == "chordal" ? to_dot(chordal) : to_dot(clique_tree(chordal, order), chordal);
  }
  if (g.out.empty()) {
    std::cout << dot;
  } else {
    write_file(g.out, dot);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-rank moment relaxations for polynomials in CP form"};
  app.require_subcommand(1);

  SolveFlags solve;
  auto* cmd_solve = app.add_subcommand("solve", "Solve one problem and report the bounds");
  cmd_solve->add_option("input", solve.input, "Problem JSON file");
  cmd_solve->add_option("--order,-k", solve.common.order, "Relaxation order (default: smallest admissible)")
      ->check(CLI::PositiveNumber);
  cmd_solve->add_option("--timeout", solve.common.timeout, "Wall-clock limit in seconds")
      ->check(CLI::PositiveNumber);
  cmd_solve->add_option("--out,-o", solve.common.out, "Write the JSON report here");
  cmd_solve->add_option("--family", solve.family, "Generate the instance instead of reading a file")
      ->check(CLI::IsMember({"monomial", "bernstein"}));
  cmd_solve->add_option("--n", solve.n, "Generated instance: number of variables")->check(CLI::PositiveNumber);
  cmd_solve->add_option("--r", solve.r, "Generated instance: rank")->check(CLI::PositiveNumber);
  cmd_solve->add_option("--d", solve.d, "Generated instance: factor degree")->check(CLI::NonNegativeNumber);
  cmd_solve->add_option("--delta", solve.delta, "Generated Bernstein instance: coefficient spread");
  cmd_solve->add_option("--seed", solve.common.seed, "Generated instance: base seed");
  cmd_solve->add_flag("--dense", solve.dense, "Solve the dense hierarchy instead");
  cmd_solve->add_option("--sdp-out", solve.common.sdp_out, "Also write the assembled block SDP as JSON");
  add_model_flags(cmd_solve, solve.common);

  BenchFlags bench;
  auto* cmd_bench = app.add_subcommand("bench", "Run a benchmark table");
  cmd_bench->add_option("family", bench.family, "monomial or bernstein")
      ->required()
      ->check(CLI::IsMember({"monomial", "bernstein"}));
  cmd_bench->add_option("--n", bench.n_values, "Variable counts (columns)")->delimiter(',');
  cmd_bench->add_option("--order,-k", bench.orders, "Relaxation orders (rows)")->delimiter(',');
  cmd_bench->add_option("--r", bench.r, "Rank")->check(CLI::PositiveNumber);
  cmd_bench->add_option("--d", bench.d, "Factor degree")->check(CLI::NonNegativeNumber);
  cmd_bench->add_option("--delta", bench.delta, "Bernstein coefficient spread");
  cmd_bench->add_flag("--dense", bench.dense, "Add a dense-hierarchy row at order ceil(nd/2)");
  cmd_bench->add_option("--seed", bench.common.seed, "Base seed");
  cmd_bench->add_option("--jobs,-j", bench.jobs, "Concurrent cells")->check(CLI::PositiveNumber);
  cmd_bench->add_option("--timeout", bench.timeout, "Per-cell limit in seconds (default 300)")
      ->check(CLI::PositiveNumber);
  cmd_bench->add_option("--out,-o", bench.common.out, "Write the JSON archive here");
  add_model_flags(cmd_bench, bench.common);

  std::string expand_input, expand_basis;
  std::size_t expand_budget = kDefaultExpandBudget;
  auto* cmd_expand = app.add_subcommand("expand", "Print the monomial expansion of a problem");
  cmd_expand->add_option("input", expand_input, "Problem JSON file")->required();
  cmd_expand->add_option("--basis", expand_basis, "Convert factors first")
      ->check(CLI::IsMember({"monomial", "bernstein"}));
  cmd_expand->add_option("--budget", expand_budget, "Maximum number of expanded terms");

  GraphFlags graph;
  auto* cmd_graph = app.add_subcommand("graph", "Print the sparsity graph or clique tree as DOT");
  cmd_graph->add_option("input", graph.input, "Problem JSON file (or give --r and --n)");
  cmd_graph->add_option("--r", graph.r, "Rank")->check(CLI::PositiveNumber);
  cmd_graph->add_option("--n", graph.n, "Number of variables")->check(CLI::PositiveNumber);
  cmd_graph->add_option("--kind", graph.kind, "graph, chordal or tree")
      ->check(CLI::IsMember({"graph", "chordal", "tree"}));
  cmd_graph->add_option("--out,-o", graph.out, "Write the DOT file here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*cmd_solve) {
      if (solve.input.empty() == solve.family.empty()) {
        throw InvalidInput("solve needs either a problem file or --family");
      }
      return run_solve(solve);
    }
    if (*cmd_bench) return run_bench_cmd(bench);
    if (*cmd_expand) return run_expand(expand_input, expand_basis, expand_budget);
    if (*cmd_graph) return run_graph(graph);
  } catch (const OrderTooSmall& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOrder;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const StructuralError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitOk;
}
