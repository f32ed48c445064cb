#include "lrpop/pipeline.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lrpop/errors.h"
#include "lrpop/lifting.h"
#include "lrpop/sparsity.h"

namespace lrpop {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

const char* method_name(Method m) {
  return m == Method::LowRank ? "lr" : "dense";
}

InstanceInfo describe(const CPPoly& f, std::string source) {
  InstanceInfo info;
  info.source = std::move(source);
  info.n = f.n();
  info.r = f.r();
  info.d = f.max_degree();
  info.basis = f.basis();
  return info;
}

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool expired(const PipelineOptions& opts) {
  if (opts.solver.cancel && opts.solver.cancel->load(std::memory_order_relaxed)) return true;
  return opts.solver.deadline && Clock::now() > *opts.solver.deadline;
}

RunReport start_report(const PipelineOptions& opts, InstanceInfo info, Method m) {
  RunReport rep;
  rep.instance = std::move(info);
  rep.method = m;
  rep.tol = opts.solver.tol;
  rep.t_bounds = opts.t_bounds;
  rep.strict_degree = opts.strict_degree;
  return rep;
}

void record_solve(RunReport& rep, const SolveResult& res) {
  rep.status = res.status;
  rep.message = res.message;
  rep.iterations = res.iterations;
  rep.primal_residual = res.primal_residual;
  rep.dual_residual = res.dual_residual;
  rep.gap = res.gap;
}

// Moments are usable unless the solver proved there is nothing to read or
// never got to iterate.
bool has_moments(const SolveResult& res) {
  switch (res.status) {
    case SolveStatus::Infeasible:
    case SolveStatus::Unbounded:
    case SolveStatus::TimeLimit:
      return false;
    default:
      return !res.y.empty() && std::isfinite(res.lower_bound);
  }
}

void maybe_write_sdp(const PipelineOptions& opts, const BlockSDP& sdp) {
  if (opts.sdp_out.empty()) return;
  std::ofstream out(opts.sdp_out);
  out << sdp_to_json(sdp).dump() << "\n";
  if (!out) throw InvalidInput("cannot write " + opts.sdp_out);
}

void mark_timeout(RunReport& rep) {
  rep.status = SolveStatus::TimeLimit;
  rep.message = "time limit reached before solving";
}

}  // namespace

RunReport solve_cp(const CPPoly& f, const PipelineOptions& opts, InstanceInfo info) {
  const auto t0 = Clock::now();
  RunReport rep = start_report(opts, std::move(info), Method::LowRank);

  LiftedPOP pop = build_lifted_pop(f, opts.box_radius, opts.t_bounds);
  if (opts.rescale) pop = rescale_lifted_pop(pop, natural_scales(f, opts.box_radius));
  const int k = opts.order > 0 ? opts.order : minimal_lr_order(pop);
  rep.order = k;
  const CliqueTree tree = lr_clique_tree(f.r(), f.n());
  const CliqueAssignment asg = assign_to_cliques(pop, tree);
  if (expired(opts)) {
    mark_timeout(rep);
    rep.wall_time_seconds = seconds_since(t0);
    return rep;
  }
  const BlockSDP sdp = assemble_lr_moment_sdp(pop, tree, asg, k, opts.strict_degree);
  maybe_write_sdp(opts, sdp);
  rep.complexity = complexity_report(sdp, tree, pop, k, opts.strict_degree);
  rep.y_count = sdp.y_count;
  rep.equality_count = sdp.equalities.num_rows();
  if (expired(opts)) {
    mark_timeout(rep);
    rep.wall_time_seconds = seconds_since(t0);
    return rep;
  }

  const SolveResult res = solve_block_sdp(sdp, opts.solver);
  record_solve(rep, res);
  if (has_moments(res)) {
    rep.lower_bound = res.lower_bound;
    const Candidate c = extract_candidate(res, sdp, pop, f);
    rep.point = c.point;
    rep.upper_bound = c.upper_bound;
  }
  rep.wall_time_seconds = seconds_since(t0);
  return rep;
}

RunReport solve_dense(const CPPoly& f, const PipelineOptions& opts, InstanceInfo info) {
  const auto t0 = Clock::now();
  RunReport rep = start_report(opts, std::move(info), Method::Dense);
  const DensePoly p = cp_expand(f);
  const int k = opts.order > 0 ? opts.order : std::max(1, (p.degree() + 1) / 2);
  rep.order = k;
  const BlockSDP sdp = assemble_dense_moment_sdp(p, opts.box_radius, k);
  maybe_write_sdp(opts, sdp);
  rep.y_count = sdp.y_count;
  rep.equality_count = sdp.equalities.num_rows();
  if (expired(opts)) {
    mark_timeout(rep);
    rep.wall_time_seconds = seconds_since(t0);
    return rep;
  }
  const SolveResult res = solve_block_sdp(sdp, opts.solver);
  record_solve(rep, res);
  if (has_moments(res)) {
    rep.lower_bound = res.lower_bound;
    std::vector<double> x(f.n(), 0.0);
    for (int i = 0; i < f.n(); ++i) {
      const int v = sdp.find_moment(Monomial::variable(i));
      if (v >= 0) x[i] = std::clamp(res.y[v], -opts.box_radius, opts.box_radius);
    }
    rep.upper_bound = cp_eval(f, x);
    rep.point = std::move(x);
  }
  rep.wall_time_seconds = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json optional_number(const std::optional<double>& v) {
  if (v && std::isfinite(*v)) return *v;
  return nullptr;
}

json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

const json& field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw InvalidInput(std::string("report is missing field '") + key + "'");
  return *it;
}

double number_or_nan(const json& v, const char* key) {
  if (v.is_null()) return std::nan("");
  if (!v.is_number()) throw InvalidInput(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

std::optional<double> optional_field(const json& obj, const char* key) {
  const json& v = field(obj, key);
  if (v.is_null()) return std::nullopt;
  return number_or_nan(v, key);
}

template <typename T>
T typed(const json& obj, const char* key) {
  const json& v = field(obj, key);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw InvalidInput(std::string("field '") + key + "' has the wrong type");
  }
}

void reject_unknown(const json& obj, std::initializer_list<const char*> keys, const char* what) {
  if (!obj.is_object()) throw InvalidInput(std::string(what) + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) throw InvalidInput(std::string("unknown field '") + it.key() + "' in " + what);
  }
}

json complexity_to_json(const ComplexityReport& c) {
  return {
      {"n_blocks", c.n_blocks},
      {"n_localizing_blocks", c.n_localizing_blocks},
      {"max_block_size", c.max_block_size},
      {"n_separator_equalities", c.n_separator_equalities},
      {"n_lifting_equalities", c.n_lifting_equalities},
      {"predicted_max_blocks", c.predicted_max_blocks},
      {"predicted_max_block_size", c.predicted_max_block_size},
      {"predicted_separator_equalities", c.predicted_separator_equalities},
      {"predicted_lifting_equalities", c.predicted_lifting_equalities},
  };
}

ComplexityReport complexity_from_json(const json& j) {
  reject_unknown(j,
                 {"n_blocks", "n_localizing_blocks", "max_block_size", "n_separator_equalities",
                  "n_lifting_equalities", "predicted_max_blocks", "predicted_max_block_size",
                  "predicted_separator_equalities", "predicted_lifting_equalities"},
                 "complexity");
  ComplexityReport c;
  c.n_blocks = typed<int>(j, "n_blocks");
  c.n_localizing_blocks = typed<int>(j, "n_localizing_blocks");
  c.max_block_size = typed<int>(j, "max_block_size");
  c.n_separator_equalities = typed<std::int64_t>(j, "n_separator_equalities");
  c.n_lifting_equalities = typed<std::int64_t>(j, "n_lifting_equalities");
  c.predicted_max_blocks = typed<int>(j, "predicted_max_blocks");
  c.predicted_max_block_size = typed<int>(j, "predicted_max_block_size");
  c.predicted_separator_equalities = typed<std::int64_t>(j, "predicted_separator_equalities");
  c.predicted_lifting_equalities = typed<std::int64_t>(j, "predicted_lifting_equalities");
  return c;
}

}  // namespace

json report_to_json(const RunReport& r) {
  json inst = {
      {"source", r.instance.source},
      {"n", r.instance.n},
      {"r", r.instance.r},
      {"d", r.instance.d},
      {"basis", basis_name(r.instance.basis)},
      {"seed", r.instance.seed ? json(*r.instance.seed) : json(nullptr)},
      {"delta", optional_number(r.instance.delta)},
  };
  json point = json::array();
  for (double v : r.point) point.push_back(finite_or_null(v));
  return {
      {"instance", inst},
      {"method", method_name(r.method)},
      {"order", r.order},
      {"status", status_name(r.status)},
      {"message", r.message},
      {"lower_bound", optional_number(r.lower_bound)},
      {"upper_bound", optional_number(r.upper_bound)},
      {"point", point},
      {"wall_time_seconds", finite_or_null(r.wall_time_seconds)},
      {"iterations", r.iterations},
      {"residuals",
       {{"primal", finite_or_null(r.primal_residual)},
        {"dual", finite_or_null(r.dual_residual)},
        {"gap", finite_or_null(r.gap)}}},
      {"complexity", r.complexity ? complexity_to_json(*r.complexity) : json(nullptr)},
      {"sdp", {{"y_count", r.y_count}, {"equalities", r.equality_count}}},
      {"options",
       {{"tol", r.tol}, {"t_bounds", r.t_bounds}, {"strict_degree", r.strict_degree}}},
  };
}

RunReport report_from_json(const json& doc) {
  reject_unknown(doc,
                 {"instance", "method", "order", "status", "message", "lower_bound", "upper_bound",
                  "point", "wall_time_seconds", "iterations", "residuals", "complexity", "sdp",
                  "options"},
                 "report");
  RunReport r;
  const json& inst = field(doc, "instance");
  reject_unknown(inst, {"source", "n", "r", "d", "basis", "seed", "delta"}, "instance");
  r.instance.source = typed<std::string>(inst, "source");
  r.instance.n = typed<int>(inst, "n");
  r.instance.r = typed<int>(inst, "r");
  r.instance.d = typed<int>(inst, "d");
  const std::string basis = typed<std::string>(inst, "basis");
  if (basis == "monomial") {
    r.instance.basis = Basis::Monomial;
  } else if (basis == "bernstein") {
    r.instance.basis = Basis::Bernstein;
  } else {
    throw InvalidInput("unknown basis '" + basis + "'");
  }
  if (!field(inst, "seed").is_null()) r.instance.seed = typed<std::uint64_t>(inst, "seed");
  r.instance.delta = optional_field(inst, "delta");

  const std::string method = typed<std::string>(doc, "method");
  if (method == "lr") {
    r.method = Method::LowRank;
  } else if (method == "dense") {
    r.method = Method::Dense;
  } else {
    throw InvalidInput("unknown method '" + method + "'");
  }
  r.order = typed<int>(doc, "order");
  const auto status = parse_status(typed<std::string>(doc, "status"));
  if (!status) throw InvalidInput("unknown solver status");
  r.status = *status;
  r.message = typed<std::string>(doc, "message");
  r.lower_bound = optional_field(doc, "lower_bound");
  r.upper_bound = optional_field(doc, "upper_bound");
  const json& point = field(doc, "point");
  if (!point.is_array()) throw InvalidInput("field 'point' must be an array");
  for (const json& v : point) r.point.push_back(number_or_nan(v, "point"));
  r.wall_time_seconds = number_or_nan(field(doc, "wall_time_seconds"), "wall_time_seconds");
  r.iterations = typed<int>(doc, "iterations");
  const json& res = field(doc, "residuals");
  reject_unknown(res, {"primal", "dual", "gap"}, "residuals");
  r.primal_residual = number_or_nan(field(res, "primal"), "primal");
  r.dual_residual = number_or_nan(field(res, "dual"), "dual");
  r.gap = number_or_nan(field(res, "gap"), "gap");
  const json& cx = field(doc, "complexity");
  if (!cx.is_null()) r.complexity = complexity_from_json(cx);
  const json& sdp = field(doc, "sdp");
  reject_unknown(sdp, {"y_count", "equalities"}, "sdp");
  r.y_count = typed<int>(sdp, "y_count");
  r.equality_count = typed<int>(sdp, "equalities");
  const json& o = field(doc, "options");
  reject_unknown(o, {"tol", "t_bounds", "strict_degree"}, "options");
  r.tol = typed<double>(o, "tol");
  r.t_bounds = typed<bool>(o, "t_bounds");
  r.strict_degree = typed<bool>(o, "strict_degree");
  return r;
}

std::string serialize_report(const RunReport& r) { return report_to_json(r).dump(2); }

RunReport parse_report(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("report is not valid JSON: ") + e.what());
  }
  return report_from_json(doc);
}

std::string format_report(const RunReport& r) {
  std::ostringstream os;
  char buf[128];
  auto num = [&](const std::optional<double>& v) -> std::string {
    if (!v) return "-";
    std::snprintf(buf, sizeof(buf), "%.8g", *v);
    return buf;
  };
  os << "instance     " << r.instance.source << "  (n=" << r.instance.n << ", r=" << r.instance.r
     << ", d=" << r.instance.d << ", " << basis_name(r.instance.basis) << ")\n";
  os << "method       " << method_name(r.method) << ", order " << r.order << "\n";
  os << "status       " << status_name(r.status);
  if (!r.message.empty()) os << " (" << r.message << ")";
  os << "\n";
  os << "lower bound  " << num(r.lower_bound) << "\n";
  os << "upper bound  " << num(r.upper_bound) << "\n";
  if (!r.point.empty()) {
    os << "point        [";
    // Long points are cut short; the JSON report keeps every coordinate.
    constexpr std::size_t kShown = 12;
    const std::size_t shown = std::min(r.point.size(), kShown);
    for (std::size_t i = 0; i < shown; ++i) {
      std::snprintf(buf, sizeof(buf), "%.6g", r.point[i]);
      os << (i ? ", " : "") << buf;
    }
    if (shown < r.point.size()) os << ", ... (" << r.point.size() << " coordinates)";
    os << "]\n";
  }
  std::snprintf(buf, sizeof(buf), "%d iterations, residuals %.1e / %.1e, gap %.1e", r.iterations,
                r.primal_residual, r.dual_residual, r.gap);
  os << "solver       " << buf << "\n";
  os << "sdp          " << r.y_count << " moments, " << r.equality_count << " equalities";
  if (r.complexity) {
    os << ", " << r.complexity->n_blocks << " moment blocks (max size "
       << r.complexity->max_block_size << "), " << r.complexity->n_localizing_blocks
       << " localizing blocks";
  }
  os << "\n";
  std::snprintf(buf, sizeof(buf), "%.3f s", r.wall_time_seconds);
  os << "wall time    " << buf << "\n";
  return os.str();
}

}  // namespace lrpop
