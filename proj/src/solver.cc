#include "lrpop/solver.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <unordered_map>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "lrpop/errors.h"

namespace lrpop {

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::NumericalLimit: return "numerical_limit";
    case SolveStatus::IterationLimit: return "iteration_limit";
    case SolveStatus::TimeLimit: return "time_limit";
  }
  return "unknown";
}

std::optional<SolveStatus> parse_status(const std::string& s) {
  for (SolveStatus st : {SolveStatus::Optimal, SolveStatus::Infeasible,
                         SolveStatus::Unbounded, SolveStatus::NumericalLimit,
                         SolveStatus::IterationLimit, SolveStatus::TimeLimit}) {
    if (s == status_name(st)) return st;
  }
  return std::nullopt;
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

struct Entry {
  int row;
  int col;
  double coeff;
};

// One PSD block. Coefficient matrices A_v are kept as mirrored entry lists
// per local variable; `slots` maps local pairs (li >= lj) to KKT values.
struct BlockData {
  int size = 0;
  std::vector<int> vars;
  std::vector<std::vector<Entry>> entries;
  std::vector<int> slots;
  int slot(int li, int lj) const { return slots[li * (li + 1) / 2 + lj]; }
};

// Nesterov-Todd scaling of one block: W = G G^T with W S W = X and
// G^T S G = G^{-1} X G^{-T} = diag(lambda).
struct Scaling {
  MatrixXd G;
  VectorXd lambda;
};

// KKT diagonal shifts: relative on the Schur block, absolute on the equality block.
constexpr double kRegPrimal = 1e-15;
constexpr double kRegDual = 1e-10;

MatrixXd sym(const MatrixXd& M) { return 0.5 * (M + M.transpose()); }

// Largest step a <= 1e30 keeping diag(lambda) + a*D positive semidefinite.
double max_step(const VectorXd& lambda, const MatrixXd& D) {
  const VectorXd is = lambda.cwiseSqrt().cwiseInverse();
  const MatrixXd T = is.asDiagonal() * sym(D) * is.asDiagonal();
  const double lmin =
      Eigen::SelfAdjointEigenSolver<MatrixXd>(T, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  if (lmin >= 0.0) return 1e30;
  return -1.0 / lmin;
}

struct Iterate {
  std::vector<MatrixXd> X;  // SOS-side Gram matrices
  std::vector<MatrixXd> S;  // moment matrices, S = A(y) at feasibility
  VectorXd y;
  VectorXd w;
};

class InteriorPoint {
 public:
  InteriorPoint(const BlockSDP& sdp, const SolverOptions& opts)
      : sdp_(sdp), opts_(opts), m_(sdp.y_count), p_(sdp.equalities.num_rows()) {
    setup();
  }

  SolveResult run();

 private:
  void setup();
  bool past_deadline() const {
    if (opts_.cancel && opts_.cancel->load(std::memory_order_relaxed)) return true;
    return opts_.deadline && std::chrono::steady_clock::now() > *opts_.deadline;
  }

  MatrixXd apply_block(int b, const VectorXd& y) const {
    const BlockData& bd = blocks_[b];
    MatrixXd out = MatrixXd::Zero(bd.size, bd.size);
    for (std::size_t li = 0; li < bd.vars.size(); ++li) {
      const double v = y[bd.vars[li]];
      if (v == 0.0) continue;
      for (const Entry& e : bd.entries[li]) out(e.row, e.col) += e.coeff * v;
    }
    return out;
  }

  void add_adjoint(int b, const MatrixXd& Z, VectorXd& out) const {
    const BlockData& bd = blocks_[b];
    for (std::size_t li = 0; li < bd.vars.size(); ++li) {
      double acc = 0.0;
      for (const Entry& e : bd.entries[li]) acc += e.coeff * Z(e.row, e.col);
      out[bd.vars[li]] += acc;
    }
  }

  VectorXd adjoint(const std::vector<MatrixXd>& Z) const {
    VectorXd out = VectorXd::Zero(m_);
    for (std::size_t b = 0; b < blocks_.size(); ++b) add_adjoint(static_cast<int>(b), Z[b], out);
    return out;
  }

  // Scaled adjoint: out_v += <G^T A_v G, Z> = <A_v, G Z G^T>.
  void add_scaled_adjoint(int b, const MatrixXd& Z, VectorXd& out) const {
    const MatrixXd& G = scal_[b].G;
    add_adjoint(b, G * Z * G.transpose(), out);
  }

  // Scaled operator: sum_v y_v G^T A_v G.
  MatrixXd scaled_apply(int b, const VectorXd& y) const {
    const MatrixXd& G = scal_[b].G;
    return sym(G.transpose() * apply_block(b, y) * G);
  }

  bool compute_scaling(const std::vector<MatrixXd>& X, const std::vector<MatrixXd>& S);
  bool factorize_kkt();
  VectorXd apply_kkt(const VectorXd& x) const;
  VectorXd precondition(const VectorXd& r) const;
  VectorXd solve_kkt(const VectorXd& rhs) const;

  const BlockSDP& sdp_;
  const SolverOptions& opts_;
  int m_;
  int p_;
  std::vector<BlockData> blocks_;
  std::vector<Scaling> scal_;
  SpMat E_;
  VectorXd e_;
  VectorXd c_;
  int total_dim_ = 0;

  SpMat kkt_;  // lower triangle, includes regularization
  std::vector<double> base_values_;
  std::vector<int> diag_slots_;
  std::vector<int> eq_diag_slots_;
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
};

void InteriorPoint::setup() {
  validate(sdp_);
  c_ = VectorXd::Zero(m_);
  for (std::size_t k = 0; k < sdp_.objective.vars.size(); ++k) {
    c_[sdp_.objective.vars[k]] += sdp_.objective.coeffs[k];
  }
  e_ = Eigen::Map<const VectorXd>(sdp_.equalities.rhs.data(), p_);
  {
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t k = 0; k < sdp_.equalities.rows.size(); ++k) {
      trip.emplace_back(sdp_.equalities.rows[k], sdp_.equalities.cols[k], sdp_.equalities.vals[k]);
    }
    E_.resize(p_, m_);
    E_.setFromTriplets(trip.begin(), trip.end());
    E_.makeCompressed();
  }

  blocks_.reserve(sdp_.blocks.size());
  for (const SdpBlock& blk : sdp_.blocks) {
    BlockData bd;
    bd.size = blk.size;
    std::map<int, std::vector<Entry>> by_var;
    for (const BlockTerm& t : blk.terms) {
      if (t.coeff == 0.0) continue;
      auto& list = by_var[t.var];
      list.push_back({t.row, t.col, t.coeff});
      if (t.row != t.col) list.push_back({t.col, t.row, t.coeff});
    }
    for (auto& [var, list] : by_var) {
      bd.vars.push_back(var);
      bd.entries.push_back(std::move(list));
    }
    blocks_.push_back(std::move(bd));
  }
  scal_.resize(blocks_.size());

  // KKT pattern: Schur complement (pairs of variables sharing a block) and
  // the equality rows below it, plus both regularization diagonals.
  total_dim_ = m_ + p_;
  std::vector<Eigen::Triplet<double>> trip;
  for (int v = 0; v < m_; ++v) trip.emplace_back(v, v, 0.0);
  for (const BlockData& bd : blocks_) {
    const int q = static_cast<int>(bd.vars.size());
    for (int li = 0; li < q; ++li) {
      for (int lj = 0; lj <= li; ++lj) trip.emplace_back(bd.vars[li], bd.vars[lj], 0.0);
    }
  }
  for (int k = 0; k < E_.outerSize(); ++k) {
    for (SpMat::InnerIterator it(E_, k); it; ++it) trip.emplace_back(m_ + it.row(), it.col(), 0.0);
  }
  for (int r = 0; r < p_; ++r) trip.emplace_back(m_ + r, m_ + r, 0.0);
  kkt_.resize(total_dim_, total_dim_);
  kkt_.setFromTriplets(trip.begin(), trip.end());
  kkt_.makeCompressed();

  auto find_slot = [this](int row, int col) {
    const int* inner = kkt_.innerIndexPtr();
    const int begin = kkt_.outerIndexPtr()[col];
    const int end = kkt_.outerIndexPtr()[col + 1];
    const int* it = std::lower_bound(inner + begin, inner + end, row);
    return static_cast<int>(it - inner);
  };
  for (BlockData& bd : blocks_) {
    const int q = static_cast<int>(bd.vars.size());
    bd.slots.resize(static_cast<std::size_t>(q) * (q + 1) / 2);
    for (int li = 0; li < q; ++li) {
      for (int lj = 0; lj <= li; ++lj) bd.slots[li * (li + 1) / 2 + lj] = find_slot(bd.vars[li], bd.vars[lj]);
    }
  }
  diag_slots_.resize(m_);
  for (int v = 0; v < m_; ++v) diag_slots_[v] = find_slot(v, v);

  base_values_.assign(kkt_.nonZeros(), 0.0);
  for (int k = 0; k < E_.outerSize(); ++k) {
    for (SpMat::InnerIterator it(E_, k); it; ++it) {
      base_values_[find_slot(m_ + it.row(), it.col())] += it.value();
    }
  }
  eq_diag_slots_.resize(p_);
  for (int r = 0; r < p_; ++r) eq_diag_slots_[r] = find_slot(m_ + r, m_ + r);
  ldlt_.analyzePattern(kkt_);
}

bool InteriorPoint::compute_scaling(const std::vector<MatrixXd>& X,
                                    const std::vector<MatrixXd>& S) {
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    Eigen::LLT<MatrixXd> lx(X[b]), ls(S[b]);
    if (lx.info() != Eigen::Success || ls.info() != Eigen::Success) return false;
    const MatrixXd Lx = lx.matrixL();
    const MatrixXd Ls = ls.matrixL();
    Eigen::JacobiSVD<MatrixXd> svd(Lx.transpose() * Ls, Eigen::ComputeFullU);
    const VectorXd d = svd.singularValues();
    if (!(d.minCoeff() > 0.0)) return false;
    Scaling& sc = scal_[b];
    sc.lambda = d;
    sc.G = Lx * svd.matrixU() * d.cwiseSqrt().cwiseInverse().asDiagonal();
    if ((b & 63) == 0 && past_deadline()) return false;
  }
  return true;
}

bool InteriorPoint::factorize_kkt() {
  double* values = kkt_.valuePtr();
  std::copy(base_values_.begin(), base_values_.end(), values);
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    const BlockData& bd = blocks_[b];
    // Schur entries tr(A_i W A_j W) = <A_j, W A_i W> with W = G G^T.
    const MatrixXd W = scal_[b].G * scal_[b].G.transpose();
    const int q = static_cast<int>(bd.vars.size());
    MatrixXd T(bd.size, bd.size);
    for (int li = 0; li < q; ++li) {
      T.setZero();
      for (const Entry& e : bd.entries[li]) T.noalias() += e.coeff * W.col(e.row) * W.row(e.col);
      for (int lj = 0; lj <= li; ++lj) {
        double acc = 0.0;
        for (const Entry& e : bd.entries[lj]) acc += e.coeff * T(e.row, e.col);
        values[bd.slot(li, lj)] += acc;
      }
    }
    if ((b & 63) == 0 && past_deadline()) return false;
  }
  double max_diag = 0.0;
  for (int v = 0; v < m_; ++v) max_diag = std::max(max_diag, values[diag_slots_[v]]);
  const std::vector<double> assembled(values, values + kkt_.nonZeros());
  // Larger shifts are tried when a pivot breaks down; GMRES against the
  // exact operator absorbs the extra perturbation.
  for (double boost : {1.0, 1e3, 1e6}) {
    std::copy(assembled.begin(), assembled.end(), values);
    const double rho = boost * kRegPrimal * (1.0 + max_diag);
    for (int v = 0; v < m_; ++v) values[diag_slots_[v]] += rho;
    for (int r = 0; r < p_; ++r) values[eq_diag_slots_[r]] -= boost * kRegDual;
    ldlt_.factorize(kkt_);
    if (ldlt_.info() == Eigen::Success) return true;
  }
  return false;
}

VectorXd InteriorPoint::precondition(const VectorXd& r) const { return ldlt_.solve(r); }

VectorXd InteriorPoint::apply_kkt(const VectorXd& x) const {
  const VectorXd u = x.head(m_);
  VectorXd out(total_dim_);
  VectorXd head = VectorXd::Zero(m_);
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    add_scaled_adjoint(static_cast<int>(b), scaled_apply(static_cast<int>(b), u), head);
  }
  out.head(m_) = head + E_.transpose() * x.tail(p_);
  out.tail(p_) = E_ * u;
  out.tail(p_) -= kRegDual * x.tail(p_);
  return out;
}

VectorXd InteriorPoint::solve_kkt(const VectorXd& rhs) const {
  // GMRES on the unregularized system, right-preconditioned by the
  // regularized LDL^T factors. The Schur part is applied blockwise.
  constexpr int kMaxIter = 10;
  const double target = 1e-10 * rhs.norm();
  VectorXd x = precondition(rhs);
  for (int restart = 0; restart < 2; ++restart) {
    VectorXd r = rhs - apply_kkt(x);
    const double beta = r.norm();
    if (!(beta > target)) break;
    std::vector<VectorXd> V{r / beta};
    std::vector<VectorXd> Z;
    MatrixXd H = MatrixXd::Zero(kMaxIter + 1, kMaxIter);
    VectorXd cs = VectorXd::Zero(kMaxIter), sn = VectorXd::Zero(kMaxIter);
    VectorXd g = VectorXd::Zero(kMaxIter + 1);
    g[0] = beta;
    int j = 0;
    for (; j < kMaxIter; ++j) {
      Z.push_back(precondition(V[j]));
      VectorXd w = apply_kkt(Z[j]);
      for (int i = 0; i <= j; ++i) {
        H(i, j) = w.dot(V[i]);
        w -= H(i, j) * V[i];
      }
      const double hnext = w.norm();
      H(j + 1, j) = hnext;
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
        H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = t;
      }
      const double den = std::hypot(H(j, j), H(j + 1, j));
      if (den == 0.0) break;
      cs[j] = H(j, j) / den;
      sn[j] = H(j + 1, j) / den;
      H(j, j) = den;
      H(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      if (std::abs(g[j + 1]) <= target || hnext == 0.0) {
        ++j;
        break;
      }
      V.push_back(w / hnext);
    }
    if (j == 0) break;
    const VectorXd coef = H.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
    for (int i = 0; i < j; ++i) x += coef[i] * Z[i];
  }
  return x;
}

SolveResult InteriorPoint::run() {
  SolveResult res;
  const int nb = static_cast<int>(blocks_.size());
  int total_size = 0;
  for (const BlockData& bd : blocks_) total_size += bd.size;
  if (total_size == 0) {
    res.status = SolveStatus::NumericalLimit;
    res.message = "no PSD blocks";
    return res;
  }

  Iterate it;
  it.X.resize(nb);
  it.S.resize(nb);
  for (int b = 0; b < nb; ++b) {
    it.X[b] = MatrixXd::Identity(blocks_[b].size, blocks_[b].size);
    it.S[b] = MatrixXd::Identity(blocks_[b].size, blocks_[b].size);
  }
  it.y = VectorXd::Zero(m_);
  it.w = VectorXd::Zero(p_);

  const double norm_c = c_.norm();
  const double norm_e = e_.norm();
  const double c0 = sdp_.objective.constant;
  std::vector<MatrixXd> Rp(nb), Rt(nb), dXt(nb), dSt(nb), corr(nb);
  int stall = 0;
  double best_merit = INFINITY;
  double best_pinf = INFINITY, best_dinf = INFINITY, best_gap = INFINITY;
  SolveResult best;
  // Non-certificate exits report the best iterate seen so far.
  auto finish = [&](SolveStatus status, std::string message) {
    SolveResult out = best_merit < INFINITY ? best : res;
    out.iterations = res.iterations;
    out.status = status;
    out.message = std::move(message);
    return out;
  };

  for (int iter = 0;; ++iter) {
    res.iterations = iter;
    // Residuals are measured relative to the terms they are formed from.
    double r_norm2 = 0.0;
    double s_norm2 = 0.0;
    double mu = 0.0;
    for (int b = 0; b < nb; ++b) {
      Rp[b] = it.S[b] - apply_block(b, it.y);
      r_norm2 += Rp[b].squaredNorm();
      s_norm2 += it.S[b].squaredNorm();
      mu += it.X[b].cwiseProduct(it.S[b]).sum();
    }
    mu /= total_size;
    const VectorXd Ey = E_ * it.y;
    const VectorXd AX = adjoint(it.X);
    const VectorXd Ew = E_.transpose() * it.w;
    const VectorXd rE = e_ - Ey;
    const VectorXd rc = c_ - AX - Ew;
    const double pobj = c_.dot(it.y) + c0;
    const double dobj = e_.dot(it.w) + c0;
    const double pinf = std::max(std::sqrt(r_norm2) / (1.0 + std::sqrt(s_norm2)),
                                 rE.norm() / (1.0 + std::max(norm_e, Ey.norm())));
    const double dinf = rc.norm() / (1.0 + std::max({norm_c, AX.norm(), Ew.norm()}));
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    res.primal_objective = pobj;
    res.dual_objective = dobj;
    res.lower_bound = std::min(pobj, dobj);
    res.primal_residual = pinf;
    res.dual_residual = dinf;
    res.gap = gap;
    res.y.assign(it.y.data(), it.y.data() + m_);

    if (opts_.verbose) {
      std::fprintf(stderr, "%3d pobj %+.10e dobj %+.10e pinf %.2e dinf %.2e gap %.2e mu %.2e\n",
                   iter, pobj, dobj, pinf, dinf, gap, mu);
    }
    if (pinf <= opts_.tol && dinf <= opts_.tol && gap <= opts_.tol) {
      res.status = SolveStatus::Optimal;
      return res;
    }
    // Farkas-type certificates, normalized by the size of the ray.
    const double w_scale = e_.dot(it.w);
    if (w_scale > 1e6 * (1.0 + norm_c)) {
      const double ray_res = (adjoint(it.X) + E_.transpose() * it.w).norm() / w_scale;
      if (ray_res < 1e-6) {
        res.status = SolveStatus::Infeasible;
        res.message = "moment problem infeasible (dual ray)";
        return res;
      }
    }
    // A primal-feasible sequence whose objective keeps falling is a ray.
    const double y_scale = -c_.dot(it.y);
    if (y_scale > 1e8 * (1.0 + norm_c + std::abs(c0)) && pinf < 1e-6) {
      res.status = SolveStatus::Unbounded;
      res.message = "moment objective unbounded";
      return res;
    }
    const double merit = std::max({pinf, dinf, gap});
    if (merit < best_merit) {
      best_merit = merit;
      best = res;
    }
    // A clear drop in any measure not yet within tolerance resets the
    // counter. Values already within tolerance are not recorded, so that the
    // zero gap of the starting point does not mask later progress.
    bool progress = false;
    for (auto [value, lowest] : {std::pair{pinf, &best_pinf}, std::pair{dinf, &best_dinf},
                                 std::pair{gap, &best_gap}}) {
      if (value <= opts_.tol) continue;
      if (value < 0.9 * *lowest) progress = true;
      *lowest = std::min(*lowest, value);
    }
    stall = progress ? 0 : stall + 1;
    if (it.y.lpNorm<Eigen::Infinity>() > 1e12 || it.w.lpNorm<Eigen::Infinity>() > 1e12) {
      return finish(SolveStatus::NumericalLimit, "iterates diverged");
    }
    if (iter >= opts_.max_iters) return finish(SolveStatus::IterationLimit, "");
    if (past_deadline()) return finish(SolveStatus::TimeLimit, "deadline reached or cancelled");
    // A nearly feasible primal whose objective has fallen well below the
    // dual bound points at an unbounded moment problem.
    const bool on_ray = pinf < 1e-3 && y_scale > 1e3 * (1.0 + norm_c + std::abs(c0)) &&
                        pobj < dobj - 0.1 * std::abs(dobj);
    auto unbounded = [&] {
      res.status = SolveStatus::Unbounded;
      res.message = "moment objective unbounded (stalled on a primal ray)";
      return res;
    };
    // Near the solution, progress is limited by conditioning; give up sooner.
    if (stall >= (best_merit < 100.0 * opts_.tol ? 5 : 10)) {
      if (on_ray) return unbounded();
      return finish(SolveStatus::NumericalLimit, "no progress");
    }

    if (!compute_scaling(it.X, it.S) || !factorize_kkt()) {
      if (past_deadline()) return finish(SolveStatus::TimeLimit, "deadline reached or cancelled");
      if (on_ray) return unbounded();
      return finish(SolveStatus::NumericalLimit, "scaling or KKT factorization failed");
    }
    for (int b = 0; b < nb; ++b) Rt[b] = scal_[b].G.transpose() * Rp[b] * scal_[b].G;

    // Direction in the scaled space for centering target sigma*mu with an
    // optional second-order term.
    auto direction = [&](double sigma_mu, bool with_corr, VectorXd& dy, VectorXd& dw) {
      std::vector<MatrixXd> H(nb);
      VectorXd rhs = VectorXd::Zero(total_dim_);
      VectorXd head = VectorXd::Zero(m_);
      for (int b = 0; b < nb; ++b) {
        const VectorXd& lam = scal_[b].lambda;
        const int s = blocks_[b].size;
        MatrixXd Rc = -lam.cwiseAbs2().asDiagonal().toDenseMatrix();
        Rc.diagonal().array() += sigma_mu;
        if (with_corr) Rc -= corr[b];
        H[b].resize(s, s);
        for (int j = 0; j < s; ++j) {
          for (int i = 0; i < s; ++i) H[b](i, j) = 2.0 * Rc(i, j) / (lam[i] + lam[j]);
        }
        add_scaled_adjoint(b, H[b] + Rt[b], head);
      }
      rhs.head(m_) = head - rc;
      rhs.tail(p_) = rE;
      const VectorXd sol = solve_kkt(rhs);
      dy = sol.head(m_);
      dw = -sol.tail(p_);
      for (int b = 0; b < nb; ++b) {
        dSt[b] = scaled_apply(b, dy) - Rt[b];
        dXt[b] = H[b] - dSt[b];
      }
    };
    auto step_lengths = [&](double& ap, double& ad) {
      ap = 1e30;
      ad = 1e30;
      for (int b = 0; b < nb; ++b) {
        ap = std::min(ap, max_step(scal_[b].lambda, dXt[b]));
        ad = std::min(ad, max_step(scal_[b].lambda, dSt[b]));
      }
    };

    VectorXd dy, dw;
    direction(0.0, false, dy, dw);
    double ap, ad;
    step_lengths(ap, ad);
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    double mu_aff = 0.0;
    for (int b = 0; b < nb; ++b) {
      const MatrixXd L = scal_[b].lambda.asDiagonal();
      mu_aff += ((L + ap * dXt[b]).cwiseProduct(L + ad * dSt[b])).sum();
      corr[b] = sym(dXt[b] * dSt[b]);
    }
    mu_aff /= total_size;
    const double sigma = std::clamp(std::pow(std::max(0.0, mu_aff) / mu, 3), 0.0, 1.0);

    direction(sigma * mu, true, dy, dw);
    step_lengths(ap, ad);
    const double gamma = 0.9 + 0.09 * std::min({1.0, ap, ad});
    ap = std::min(1.0, gamma * ap);
    ad = std::min(1.0, gamma * ad);
    if (ap < 1e-10 && ad < 1e-10) return finish(SolveStatus::NumericalLimit, "step length collapsed");
    std::vector<MatrixXd> dX(nb), dS(nb);
    for (int b = 0; b < nb; ++b) {
      dX[b] = scal_[b].G * dXt[b] * scal_[b].G.transpose();
      dS[b] = apply_block(b, dy) - Rp[b];
    }
    // Roundoff can push a step taken close to the boundary out of the cone.
    auto stays_pd = [&](const std::vector<MatrixXd>& V, const std::vector<MatrixXd>& dV, double a) {
      for (int b = 0; b < nb; ++b) {
        if (Eigen::LLT<MatrixXd>(sym(V[b] + a * dV[b])).info() != Eigen::Success) return false;
      }
      return true;
    };
    for (int tries = 0; tries < 30 && !stays_pd(it.X, dX, ap); ++tries) ap *= 0.8;
    for (int tries = 0; tries < 30 && !stays_pd(it.S, dS, ad); ++tries) ad *= 0.8;
    for (int b = 0; b < nb; ++b) {
      it.X[b] = sym(it.X[b] + ap * dX[b]);
      it.S[b] = sym(it.S[b] + ad * dS[b]);
    }
    it.w += ap * dw;
    it.y += ad * dy;
  }
}

std::string replace_all(std::string s, const std::string& what, const std::string& with) {
  for (std::size_t pos = s.find(what); pos != std::string::npos; pos = s.find(what, pos + with.size())) {
    s.replace(pos, what.size(), with);
  }
  return s;
}

SolveResult solve_external(const BlockSDP& sdp, const SolverOptions& opts) {
  if (opts.external_command.empty()) {
    throw InvalidInput("external backend selected without a command");
  }
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path();
  const std::string stem = "lrpop_" + std::to_string(reinterpret_cast<std::uintptr_t>(&sdp)) +
                           "_" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count());
  const fs::path input = dir / (stem + "_sdp.json");
  const fs::path output = dir / (stem + "_result.json");
  {
    std::ofstream out(input);
    out << sdp_to_json(sdp).dump();
  }
  std::string cmd = replace_all(opts.external_command, "{input}", input.string());
  cmd = replace_all(cmd, "{output}", output.string());
  const int rc = std::system(cmd.c_str());
  SolveResult res;
  std::error_code ec;
  if (rc != 0 || !fs::exists(output)) {
    fs::remove(input, ec);
    fs::remove(output, ec);
    res.status = SolveStatus::NumericalLimit;
    res.message = "external solver failed (exit " + std::to_string(rc) + ")";
    return res;
  }
  nlohmann::json doc;
  try {
    std::ifstream in(output);
    doc = nlohmann::json::parse(in);
    const auto status = parse_status(doc.at("status").get<std::string>());
    if (!status) throw InvalidInput("unknown status in external result");
    res.status = *status;
    res.primal_objective = doc.at("objective").get<double>();
    res.dual_objective = res.primal_objective;
    res.lower_bound = res.primal_objective;
    res.y = doc.at("y").get<std::vector<double>>();
    if (res.status == SolveStatus::Optimal && static_cast<int>(res.y.size()) != sdp.y_count) {
      throw InvalidInput("external result has the wrong number of moments");
    }
  } catch (const nlohmann::json::exception& ex) {
    fs::remove(input, ec);
    fs::remove(output, ec);
    throw InvalidInput(std::string("malformed external result: ") + ex.what());
  }
  fs::remove(input, ec);
  fs::remove(output, ec);
  return res;
}

}  // namespace

SolveResult solve_block_sdp(const BlockSDP& sdp, const SolverOptions& opts) {
  if (!(opts.tol > 0.0)) throw InvalidInput("solver tolerance must be positive");
  if (opts.backend == Backend::External) return solve_external(sdp, opts);
  InteriorPoint ipm(sdp, opts);
  return ipm.run();
}

Candidate extract_candidate(const SolveResult& res, const BlockSDP& sdp,
                            const LiftedPOP& p, const CPPoly& f) {
  if (static_cast<int>(res.y.size()) != sdp.y_count) {
    throw InvalidInput("solve result does not match the SDP");
  }
  std::unordered_map<Monomial, int, MonomialHash> index;
  for (std::size_t v = 0; v < sdp.y_monomials.size(); ++v) index.emplace(sdp.y_monomials[v], static_cast<int>(v));
  Candidate c;
  c.point.assign(f.n(), 0.0);
  for (int i = 0; i < f.n(); ++i) {
    const int v = lifted_index(p.n, LiftedVar::x(i + 1));
    auto it = index.find(Monomial::variable(v));
    if (it == index.end()) continue;
    const double scale = p.var_scale.empty() ? 1.0 : p.var_scale[v];
    c.point[i] = std::clamp(scale * res.y[it->second], -p.box_radius, p.box_radius);
  }
  c.upper_bound = cp_eval(f, c.point);
  return c;
}

}  // namespace lrpop
