#pragma once

#include <atomic>
#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "lrpop/block_sdp.h"
#include "lrpop/lifting.h"
#include "lrpop/polyrep.h"

namespace lrpop {

enum class SolveStatus {
  Optimal,
  Infeasible,      // the moment problem has no feasible point
  Unbounded,       // the moment objective is unbounded below
  NumericalLimit,  // progress stalled before reaching the tolerance
  IterationLimit,
  TimeLimit,       // deadline reached (cooperative cancellation)
};

const char* status_name(SolveStatus s);
std::optional<SolveStatus> parse_status(const std::string& s);

enum class Backend { Embedded, External };

struct SolverOptions {
  double tol = 1e-8;
  int max_iters = 200;
  Backend backend = Backend::Embedded;
  /// External backend command; "{input}" and "{output}" are replaced by the
  /// paths of the BlockSDP JSON and the expected result JSON.
  std::string external_command;
  /// Solve gives up with TimeLimit once this instant has passed.
  std::optional<std::chrono::steady_clock::time_point> deadline;
  /// Cooperative cancellation: once the flag is set the solve stops with
  /// TimeLimit at its next check.
  const std::atomic<bool>* cancel = nullptr;
  bool verbose = false;
};

struct SolveResult {
  SolveStatus status = SolveStatus::NumericalLimit;
  /// Optimal value p_k of the moment relaxation, taken as the smaller of the
  /// primal and dual objectives; meaningful when Optimal.
  double lower_bound = 0.0;
  double primal_objective = 0.0;  // moment side, c^T y
  double dual_objective = 0.0;    // SOS side, b^T w
  std::vector<double> y;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  std::string message;
};

/// Solves the block SDP. Infeasibility, unboundedness and stalls are
/// reported through `status`; the call itself only throws on malformed input.
SolveResult solve_block_sdp(const BlockSDP& sdp, const SolverOptions& opts = {});

struct Candidate {
  std::vector<double> point;
  double upper_bound = 0.0;
};

/// First-moment heuristic: x_i is read from the moment of the monomial x_i
/// and clamped to the box; the upper bound is f evaluated there.
Candidate extract_candidate(const SolveResult& res, const BlockSDP& sdp,
                            const LiftedPOP& p, const CPPoly& f);

}  // namespace lrpop
