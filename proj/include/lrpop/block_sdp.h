#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "lrpop/monomial.h"

namespace lrpop {

enum class BlockKind { Moment, Localizing };

/// Coefficient `coeff` of unknown `var` in entry (row, col) of a block,
/// row <= col. The block matrix is symmetric: the mirrored entry carries the
/// same linear form.
struct BlockTerm {
  int row = 0;
  int col = 0;
  int var = 0;
  double coeff = 0.0;
};

struct SdpBlock {
  std::string label;
  int size = 0;
  BlockKind kind = BlockKind::Moment;
  int clique = -1;  // owning clique, -1 if not applicable
  std::vector<BlockTerm> terms;
};

/// Sparse equality system A y = b in coordinate form.
struct LinearEqualities {
  std::vector<int> rows;
  std::vector<int> cols;
  std::vector<double> vals;
  std::vector<double> rhs;

  int num_rows() const { return static_cast<int>(rhs.size()); }
  /// Appends one row given as (var, coeff) pairs; returns its index.
  int add_row(const std::vector<std::pair<int, double>>& entries, double b);
};

struct LinearObjective {
  std::vector<int> vars;
  std::vector<double> coeffs;
  double constant = 0.0;
};

enum class RowKind { Normalization, Lifting, Other };

struct RowOrigin {
  RowKind kind = RowKind::Other;
  int clique = -1;
  int l = 0;  // lifting rows: equality h_{l,i}
  int i = 0;
};

/// Solver-agnostic block SDP in moment form:
///
///   min  c^T y + c0
///   s.t. sum_v y_v A_{b,v} ⪰ 0   for every block b,
///        A y = b.
///
/// Each unknown y_v is a pseudo-moment; `y_monomials[v]` names it when the
/// SDP came from a polynomial relaxation (empty otherwise).
struct BlockSDP {
  int y_count = 0;
  std::vector<SdpBlock> blocks;
  LinearEqualities equalities;
  LinearObjective objective;
  std::vector<Monomial> y_monomials;
  std::vector<RowOrigin> row_origins;  // parallel to equality rows, optional

  /// Index of the y variable for monomial m, or -1.
  int find_moment(const Monomial& m) const;
};

/// Checks structural invariants (indices in range, row <= col < size, ...).
/// Throws InvalidInput describing the first violation.
void validate(const BlockSDP& sdp);

/// Interchange format, documented in docs/blocksdp-format.md.
nlohmann::json sdp_to_json(const BlockSDP& sdp);
BlockSDP sdp_from_json(const nlohmann::json& doc);

}  // namespace lrpop
