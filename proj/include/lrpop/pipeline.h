#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrpop/polyrep.h"
#include "lrpop/relaxation.h"
#include "lrpop/solver.h"

namespace lrpop {

enum class Method { LowRank, Dense };

const char* method_name(Method m);

struct PipelineOptions {
  /// Relaxation order; 0 selects the smallest admissible order.
  int order = 0;
  double box_radius = 1.0;
  bool t_bounds = false;
  bool strict_degree = false;
  /// Rescale the t variables to unit magnitude before assembly. The optimal
  /// value is unchanged.
  bool rescale = true;
  /// When set, the assembled BlockSDP is also written here as JSON.
  std::string sdp_out;
  SolverOptions solver;
};

/// Where an instance came from. `seed` and `delta` are set for generated
/// instances only.
struct InstanceInfo {
  std::string source;
  int n = 0;
  int r = 0;
  int d = 0;
  Basis basis = Basis::Monomial;
  std::optional<std::uint64_t> seed;
  std::optional<double> delta;

  bool operator==(const InstanceInfo&) const = default;
};

InstanceInfo describe(const CPPoly& f, std::string source);

/// One solved relaxation. Bounds are absent when the solver produced no
/// usable moments (infeasible, unbounded, out of time).
struct RunReport {
  InstanceInfo instance;
  Method method = Method::LowRank;
  int order = 0;
  SolveStatus status = SolveStatus::NumericalLimit;
  std::string message;
  std::optional<double> lower_bound;
  std::optional<double> upper_bound;
  std::vector<double> point;
  double wall_time_seconds = 0.0;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  /// Only for the low-rank method.
  std::optional<ComplexityReport> complexity;
  int y_count = 0;
  int equality_count = 0;
  double tol = 0.0;
  bool t_bounds = false;
  bool strict_degree = false;

  bool operator==(const RunReport&) const = default;
};

/// lift -> graph -> clique tree -> assemble -> solve -> extract.
/// Throws InvalidInput, OrderTooSmall or StructuralError before solving;
/// solver outcomes are reported through `status`.
RunReport solve_cp(const CPPoly& f, const PipelineOptions& opts,
                   InstanceInfo info);

/// Dense hierarchy baseline at order opts.order (0 selects ceil(deg f / 2)).
RunReport solve_dense(const CPPoly& f, const PipelineOptions& opts,
                      InstanceInfo info);

/// RunReport <-> JSON. Serialization is canonical: keys sorted, doubles in
/// shortest round-trip form, absent values as null.
nlohmann::json report_to_json(const RunReport& r);
RunReport report_from_json(const nlohmann::json& doc);
std::string serialize_report(const RunReport& r);
RunReport parse_report(const std::string& text);

/// Human-readable multi-line summary.
std::string format_report(const RunReport& r);

}  // namespace lrpop
