#include "nsinfer/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "nsinfer/error.hpp"

namespace nsinfer {

std::string to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal:
      return "Optimal";
    case LpStatus::Infeasible:
      return "Infeasible";
    case LpStatus::Unbounded:
      return "Unbounded";
    case LpStatus::IterationLimit:
      return "IterationLimit";
  }
  return "Unknown";
}

void LpProblem::validate() const {
  const Index d = objective.size();
  const Index m = constraint_matrix.rows();
  if (constraint_matrix.cols() != d && m > 0) {
    throw ShapeError("LpProblem: constraint matrix has " + std::to_string(constraint_matrix.cols()) +
                     " columns, objective has " + std::to_string(d));
  }
  if (rhs.size() != m) throw ShapeError("LpProblem: rhs length does not match constraint rows");
  if (lower_bounds.size() != d || upper_bounds.size() != d) {
    throw ShapeError("LpProblem: bound vectors must have one entry per variable");
  }
  if (!objective.allFinite() || !constraint_matrix.allFinite() || !rhs.allFinite()) {
    throw ParameterError("LpProblem: objective, constraints and rhs must be finite");
  }
  for (Index j = 0; j < d; ++j) {
    const double l = lower_bounds(j), u = upper_bounds(j);
    if (std::isnan(l) || std::isnan(u) || l > u || l == std::numeric_limits<double>::infinity() ||
        u == -std::numeric_limits<double>::infinity()) {
      throw ParameterError("LpProblem: invalid bounds for variable " + std::to_string(j));
    }
  }
}

FeasibilityReport check_feasibility(const LpProblem& problem, const DenseVector& x) {
  FeasibilityReport rep;
  if (problem.num_rows() > 0) {
    const DenseVector r = problem.constraint_matrix * x - problem.rhs;
    rep.max_row_violation = std::max(0.0, r.maxCoeff());
  }
  for (Index j = 0; j < x.size(); ++j) {
    rep.max_bound_violation = std::max(rep.max_bound_violation, problem.lower_bounds(j) - x(j));
    rep.max_bound_violation = std::max(rep.max_bound_violation, x(j) - problem.upper_bounds(j));
  }
  return rep;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPrimalTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr double kDegenerateStep = 1e-12;
constexpr int kDegenerateRunForBland = 50;
constexpr int kRefactorInterval = 100;

enum class VarState : unsigned char { Basic, AtLower, AtUpper, AtZero };

enum class LoopResult { Optimal, Infeasible, Unbounded, IterationLimit, NeedPrimal };

// Standard form: columns 0..d-1 structural, d..d+m-1 slacks s_i with
// A x + s = b, s >= 0.
class BoundedSimplex {
 public:
  BoundedSimplex(const LpProblem& p, Index max_iters)
      : A_(p.constraint_matrix),
        b_(p.rhs),
        m_(p.num_rows()),
        d_(p.num_vars()),
        n_(p.num_vars() + p.num_rows()),
        lo_(static_cast<std::size_t>(n_)),
        up_(static_cast<std::size_t>(n_)),
        cost_(static_cast<std::size_t>(n_), 0.0),
        state_(static_cast<std::size_t>(n_)),
        x_(static_cast<std::size_t>(n_), 0.0),
        basis_(static_cast<std::size_t>(m_)),
        row_of_(static_cast<std::size_t>(n_), -1),
        colnorm_(static_cast<std::size_t>(n_), 1.0),
        dj_(static_cast<std::size_t>(n_), 0.0),
        max_iters_(max_iters) {
    for (Index j = 0; j < d_; ++j) {
      lo_[j] = p.lower_bounds(j);
      up_[j] = p.upper_bounds(j);
      cost_[j] = p.objective(j);
      colnorm_[j] = std::max(1.0, m_ > 0 ? A_.col(j).norm() : 0.0);
    }
    for (Index i = 0; i < m_; ++i) {
      lo_[d_ + i] = 0.0;
      up_[d_ + i] = kInf;
    }
  }

  LpSolution run(SimplexMethod method) {
    const bool dual_ok = place_nonbasics_for_dual();
    for (Index i = 0; i < m_; ++i) {
      basis_[i] = d_ + i;
      row_of_[d_ + i] = i;
      state_[d_ + i] = VarState::Basic;
    }
    binv_ = DenseMatrix::Identity(m_, m_);
    recompute_basics();

    LoopResult res;
    bool use_dual = (method == SimplexMethod::Dual) || (method == SimplexMethod::Auto && dual_ok);
    if (method == SimplexMethod::Dual && !dual_ok) use_dual = false;
    res = use_dual ? dual_loop() : primal_loop();
    if (res == LoopResult::NeedPrimal) res = primal_loop();

    // Clean-up rounds: a fresh factorization may expose small primal or dual
    // infeasibilities hidden by accumulated update error.
    for (int round = 0; round < 3 && res == LoopResult::Optimal; ++round) {
      refactor();
      if (max_primal_infeasibility() <= kPrimalTol && max_dual_infeasibility() <= kDualTol) break;
      res = primal_loop();
    }

    LpSolution sol;
    sol.iterations = iters_;
    sol.x.resize(d_);
    for (Index j = 0; j < d_; ++j) sol.x(j) = x_[j];
    switch (res) {
      case LoopResult::Optimal:
        sol.status = LpStatus::Optimal;
        break;
      case LoopResult::Infeasible:
        sol.status = LpStatus::Infeasible;
        break;
      case LoopResult::Unbounded:
        sol.status = LpStatus::Unbounded;
        break;
      default:
        sol.status = LpStatus::IterationLimit;
        break;
    }
    sol.objective_value = 0.0;
    for (Index j = 0; j < d_; ++j) sol.objective_value += cost_[j] * x_[j];
    return sol;
  }

 private:
  bool boxed(Index j) const { return std::isfinite(lo_[j]) && std::isfinite(up_[j]); }
  bool fixed(Index j) const { return lo_[j] == up_[j]; }

  // Initial nonbasic positions chosen so that the slack basis is dual
  // feasible where the bounds allow it. Returns whether it is.
  bool place_nonbasics_for_dual() {
    bool feasible = true;
    for (Index j = 0; j < d_; ++j) {
      const double c = cost_[j];
      const bool has_lo = std::isfinite(lo_[j]);
      const bool has_up = std::isfinite(up_[j]);
      if (has_lo && has_up) {
        set_nonbasic(j, c >= 0.0 ? VarState::AtLower : VarState::AtUpper);
      } else if (has_lo) {
        set_nonbasic(j, VarState::AtLower);
        if (c < -kDualTol) feasible = false;
      } else if (has_up) {
        set_nonbasic(j, VarState::AtUpper);
        if (c > kDualTol) feasible = false;
      } else {
        set_nonbasic(j, VarState::AtZero);
        if (std::abs(c) > kDualTol) feasible = false;
      }
    }
    return feasible;
  }

  void set_nonbasic(Index j, VarState s) {
    state_[j] = s;
    row_of_[j] = -1;
    switch (s) {
      case VarState::AtLower:
        x_[j] = lo_[j];
        break;
      case VarState::AtUpper:
        x_[j] = up_[j];
        break;
      default:
        x_[j] = 0.0;
        break;
    }
  }

  void column(Index j, DenseVector& out) const {
    if (j < d_) {
      out = A_.col(j);
    } else {
      out.setZero(m_);
      out(j - d_) = 1.0;
    }
  }

  void ftran(Index j, DenseVector& out) const {
    if (j < d_) {
      out.noalias() = binv_ * A_.col(j);
    } else {
      out = binv_.col(j - d_);
    }
  }

  void refactor() {
    since_refactor_ = 0;
    if (m_ == 0) return;
    DenseMatrix B(m_, m_);
    DenseVector col;
    for (Index i = 0; i < m_; ++i) {
      column(basis_[i], col);
      B.col(i) = col;
    }
    Eigen::PartialPivLU<DenseMatrix> lu(B);
    if (!(lu.rcond() > 1e-14)) throw NumericalError("solve_lp: basis matrix became singular");
    binv_ = lu.inverse();
    recompute_basics();
  }

  void recompute_basics() {
    DenseVector rhs = b_;
    if (d_ > 0) {
      DenseVector xn(d_);
      for (Index j = 0; j < d_; ++j) xn(j) = state_[j] == VarState::Basic ? 0.0 : x_[j];
      rhs.noalias() -= A_ * xn;
    }
    for (Index i = 0; i < m_; ++i) {
      const Index j = d_ + i;
      if (state_[j] != VarState::Basic) rhs(i) -= x_[j];
    }
    const DenseVector xb = binv_ * rhs;
    for (Index i = 0; i < m_; ++i) x_[basis_[i]] = xb(i);
  }

  // y = B^{-T} c_B and d_j = c_j - y^T a_j for every variable.
  void compute_reduced_costs(const DenseVector& cb, const std::vector<double>& c) {
    DenseVector y = m_ > 0 ? DenseVector(binv_.transpose() * cb) : DenseVector();
    DenseVector ay = m_ > 0 ? DenseVector(A_.transpose() * y) : DenseVector::Zero(d_);
    for (Index j = 0; j < d_; ++j) dj_[j] = c[j] - ay(j);
    for (Index i = 0; i < m_; ++i) dj_[d_ + i] = c[d_ + i] - y(i);
    for (Index i = 0; i < m_; ++i) dj_[basis_[i]] = 0.0;
  }

  double infeasibility(Index j) const {
    if (x_[j] < lo_[j]) return lo_[j] - x_[j];
    if (x_[j] > up_[j]) return x_[j] - up_[j];
    return 0.0;
  }

  double max_primal_infeasibility() const {
    double worst = 0.0;
    for (Index i = 0; i < m_; ++i) worst = std::max(worst, infeasibility(basis_[i]));
    return worst;
  }

  double dual_violation(Index j) const {
    switch (state_[j]) {
      case VarState::AtLower:
        return fixed(j) ? 0.0 : std::max(0.0, -dj_[j]);
      case VarState::AtUpper:
        return fixed(j) ? 0.0 : std::max(0.0, dj_[j]);
      case VarState::AtZero:
        return std::abs(dj_[j]);
      default:
        return 0.0;
    }
  }

  double max_dual_infeasibility() {
    DenseVector cb(m_);
    for (Index i = 0; i < m_; ++i) cb(i) = cost_[basis_[i]];
    compute_reduced_costs(cb, cost_);
    double worst = 0.0;
    for (Index j = 0; j < n_; ++j) worst = std::max(worst, dual_violation(j));
    return worst;
  }

  // Replace basis_[r] by variable q; alpha = B^{-1} a_q.
  void pivot(Index r, Index q, const DenseVector& alpha) {
    const double piv = alpha(r);
    const Eigen::RowVectorXd pivot_row = binv_.row(r) / piv;
    for (Index i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double a = alpha(i);
      if (a != 0.0) binv_.row(i).noalias() -= a * pivot_row;
    }
    binv_.row(r) = pivot_row;
    basis_[r] = q;
    row_of_[q] = r;
    state_[q] = VarState::Basic;
    if (++since_refactor_ >= kRefactorInterval) refactor();
  }

  void note_step(double step) {
    if (step <= kDegenerateStep) {
      if (++degenerate_run_ >= kDegenerateRunForBland) bland_ = true;
    } else {
      degenerate_run_ = 0;
      bland_ = false;
    }
  }

  // ---------------------------------------------------------------- primal

  LoopResult primal_loop() {
    degenerate_run_ = 0;
    bland_ = false;
    DenseVector cb(m_), alpha;
    std::vector<double> zero_cost(static_cast<std::size_t>(n_), 0.0);
    int stalled_phase1 = 0;
    while (true) {
      if (iters_ >= max_iters_) return LoopResult::IterationLimit;

      bool phase1 = false;
      for (Index i = 0; i < m_; ++i) {
        const Index j = basis_[i];
        if (x_[j] < lo_[j] - kPrimalTol) {
          cb(i) = -1.0;
          phase1 = true;
        } else if (x_[j] > up_[j] + kPrimalTol) {
          cb(i) = 1.0;
          phase1 = true;
        } else {
          cb(i) = 0.0;
        }
      }
      if (!phase1) {
        for (Index i = 0; i < m_; ++i) cb(i) = cost_[basis_[i]];
      }
      compute_reduced_costs(cb, phase1 ? zero_cost : cost_);

      // Pricing.
      Index q = -1;
      double best = 0.0;
      for (Index j = 0; j < n_; ++j) {
        if (state_[j] == VarState::Basic || fixed(j)) continue;
        const double dj = dj_[j];
        bool eligible = false;
        switch (state_[j]) {
          case VarState::AtLower:
            eligible = dj < -kDualTol;
            break;
          case VarState::AtUpper:
            eligible = dj > kDualTol;
            break;
          case VarState::AtZero:
            eligible = std::abs(dj) > kDualTol;
            break;
          default:
            break;
        }
        if (!eligible) continue;
        if (bland_) {
          q = j;
          break;
        }
        const double score = std::abs(dj) / colnorm_[j];
        if (score > best) {
          best = score;
          q = j;
        }
      }
      if (q < 0) return phase1 ? LoopResult::Infeasible : LoopResult::Optimal;

      const double dir = dj_[q] < 0.0 ? 1.0 : -1.0;
      ftran(q, alpha);

      // Ratio test. For row i, the basic variable changes at rate
      // -dir * alpha_i per unit step of the entering variable.
      struct Block {
        double ratio;
        double harris;
        bool to_upper;
      };
      std::vector<std::pair<Index, Block>> blocks;
      for (Index i = 0; i < m_; ++i) {
        const double a = alpha(i);
        if (std::abs(a) <= kPivotTol) continue;
        const double rate = -dir * a;
        const Index j = basis_[i];
        const double xi = x_[j];
        if (rate < 0.0) {
          if (xi > up_[j] + kPrimalTol) {
            const double r = (xi - up_[j]) / -rate;
            blocks.push_back({i, {r, r, true}});
          } else if (xi >= lo_[j] - kPrimalTol && std::isfinite(lo_[j])) {
            const double r = std::max(0.0, xi - lo_[j]) / -rate;
            blocks.push_back({i, {r, (xi - lo_[j] + kPrimalTol) / -rate, false}});
          }
        } else {
          if (xi < lo_[j] - kPrimalTol) {
            const double r = (lo_[j] - xi) / rate;
            blocks.push_back({i, {r, r, false}});
          } else if (xi <= up_[j] + kPrimalTol && std::isfinite(up_[j])) {
            const double r = std::max(0.0, up_[j] - xi) / rate;
            blocks.push_back({i, {r, (up_[j] - xi + kPrimalTol) / rate, true}});
          }
        }
      }

      Index leave = -1;
      double step = kInf;
      bool leave_to_upper = false;
      if (!blocks.empty()) {
        if (bland_) {
          double min_ratio = kInf;
          for (const auto& [i, bl] : blocks) min_ratio = std::min(min_ratio, bl.ratio);
          Index best_var = std::numeric_limits<Index>::max();
          for (const auto& [i, bl] : blocks) {
            if (bl.ratio <= min_ratio && basis_[i] < best_var) {
              best_var = basis_[i];
              leave = i;
              leave_to_upper = bl.to_upper;
            }
          }
          step = min_ratio;
        } else {
          double theta_max = kInf;
          for (const auto& [i, bl] : blocks) theta_max = std::min(theta_max, bl.harris);
          double best_piv = -1.0;
          for (const auto& [i, bl] : blocks) {
            if (bl.ratio <= theta_max && std::abs(alpha(i)) > best_piv) {
              best_piv = std::abs(alpha(i));
              leave = i;
              leave_to_upper = bl.to_upper;
              step = bl.ratio;
            }
          }
        }
      }

      const double range = up_[q] - lo_[q];
      ++iters_;
      if (std::isfinite(range) && range <= step) {
        // Bound flip, basis unchanged.
        for (Index i = 0; i < m_; ++i) x_[basis_[i]] += -dir * alpha(i) * range;
        set_nonbasic(q, state_[q] == VarState::AtLower ? VarState::AtUpper : VarState::AtLower);
        note_step(range);
        continue;
      }
      if (leave < 0) {
        if (!phase1) return LoopResult::Unbounded;
        // Cannot happen in exact arithmetic; refresh and retry a few times.
        refactor();
        if (++stalled_phase1 > 3) throw NumericalError("solve_lp: inconsistent phase-1 direction");
        continue;
      }

      for (Index i = 0; i < m_; ++i) x_[basis_[i]] += -dir * alpha(i) * step;
      x_[q] += dir * step;
      const Index out = basis_[leave];
      pivot(leave, q, alpha);
      set_nonbasic(out, leave_to_upper ? VarState::AtUpper : VarState::AtLower);
      note_step(step);
    }
  }

  // ------------------------------------------------------------------ dual

  // Makes the nonbasic reduced costs dual feasible by bound flips where the
  // variable is boxed. Returns false if some unboxed variable stays dual
  // infeasible.
  bool restore_dual_feasibility() {
    bool flipped = false;
    for (Index j = 0; j < n_; ++j) {
      if (state_[j] == VarState::Basic || dual_violation(j) <= kDualTol) continue;
      if (!boxed(j)) return false;
      set_nonbasic(j, dj_[j] >= 0.0 ? VarState::AtLower : VarState::AtUpper);
      flipped = true;
    }
    if (flipped) recompute_basics();
    return true;
  }

  LoopResult dual_loop() {
    degenerate_run_ = 0;
    bland_ = false;
    DenseVector cb(m_), alpha;
    for (Index i = 0; i < m_; ++i) cb(i) = cost_[basis_[i]];
    compute_reduced_costs(cb, cost_);
    if (!restore_dual_feasibility()) return LoopResult::NeedPrimal;
    Index last_refactor_seen = 0;
    std::vector<double> row_alpha(static_cast<std::size_t>(n_), 0.0);

    while (true) {
      if (iters_ >= max_iters_) return LoopResult::IterationLimit;
      if (since_refactor_ == 0 && iters_ != last_refactor_seen) {
        // Fresh factorization: recompute duals exactly.
        last_refactor_seen = iters_;
        for (Index i = 0; i < m_; ++i) cb(i) = cost_[basis_[i]];
        compute_reduced_costs(cb, cost_);
        if (!restore_dual_feasibility()) return LoopResult::NeedPrimal;
      }

      // Leaving row: largest squared infeasibility over the squared norm of
      // the corresponding row of B^{-1}.
      Index r = -1;
      double best = 0.0;
      for (Index i = 0; i < m_; ++i) {
        const Index j = basis_[i];
        const double inf = infeasibility(j);
        if (inf <= kPrimalTol) continue;
        if (bland_) {
          if (r < 0 || j < basis_[r]) r = i;
          continue;
        }
        const double score = inf * inf / binv_.row(i).squaredNorm();
        if (score > best) {
          best = score;
          r = i;
        }
      }
      if (r < 0) return LoopResult::Optimal;

      const Index leaving = basis_[r];
      const bool to_lower = x_[leaving] < lo_[leaving];
      const double target = to_lower ? lo_[leaving] : up_[leaving];
      const double sgn = to_lower ? -1.0 : 1.0;

      const DenseVector rho = binv_.row(r).transpose();
      if (d_ > 0) {
        const DenseVector ar = A_.transpose() * rho;
        for (Index j = 0; j < d_; ++j) row_alpha[j] = ar(j);
      }
      for (Index i = 0; i < m_; ++i) row_alpha[d_ + i] = rho(i);

      // Dual ratio test (two-pass).
      double theta_max = kInf;
      for (Index j = 0; j < n_; ++j) {
        if (state_[j] == VarState::Basic || fixed(j)) continue;
        const double a = row_alpha[j];
        const double at = sgn * a;
        const bool cand = (state_[j] == VarState::AtLower && at > kPivotTol) ||
                          (state_[j] == VarState::AtUpper && at < -kPivotTol) ||
                          (state_[j] == VarState::AtZero && std::abs(at) > kPivotTol);
        if (!cand) continue;
        theta_max = std::min(theta_max, (std::abs(dj_[j]) + kDualTol) / std::abs(a));
      }
      if (!std::isfinite(theta_max)) return LoopResult::Infeasible;

      Index q = -1;
      double best_piv = -1.0;
      double best_ratio = kInf;
      for (Index j = 0; j < n_; ++j) {
        if (state_[j] == VarState::Basic || fixed(j)) continue;
        const double a = row_alpha[j];
        const double at = sgn * a;
        const bool cand = (state_[j] == VarState::AtLower && at > kPivotTol) ||
                          (state_[j] == VarState::AtUpper && at < -kPivotTol) ||
                          (state_[j] == VarState::AtZero && std::abs(at) > kPivotTol);
        if (!cand) continue;
        const double ratio = std::abs(dj_[j]) / std::abs(a);
        if (bland_) {
          if (ratio < best_ratio) {
            best_ratio = ratio;
            q = j;
          }
        } else if (ratio <= theta_max && std::abs(a) > best_piv) {
          best_piv = std::abs(a);
          q = j;
        }
      }

      ftran(q, alpha);
      const double arq = alpha(r);
      if (std::abs(arq - row_alpha[q]) > 1e-7 * (1.0 + std::abs(arq)) || std::abs(arq) <= kPivotTol) {
        // Row and column disagree: accumulated error. Refactor and retry.
        refactor();
        last_refactor_seen = iters_;
        for (Index i = 0; i < m_; ++i) cb(i) = cost_[basis_[i]];
        compute_reduced_costs(cb, cost_);
        if (!restore_dual_feasibility()) return LoopResult::NeedPrimal;
        if (++numerical_retries_ > 20) throw NumericalError("solve_lp: unstable pivot sequence");
        continue;
      }
      ++iters_;

      const double theta_d = dj_[q] / arq;
      for (Index j = 0; j < n_; ++j) {
        if (state_[j] == VarState::Basic || j == q) continue;
        dj_[j] -= theta_d * row_alpha[j];
        if (state_[j] == VarState::AtLower && dj_[j] < 0.0) dj_[j] = 0.0;
        if (state_[j] == VarState::AtUpper && dj_[j] > 0.0) dj_[j] = 0.0;
        if (state_[j] == VarState::AtZero) dj_[j] = 0.0;
      }
      dj_[q] = 0.0;
      dj_[leaving] = -theta_d;
      if (to_lower && dj_[leaving] < 0.0) dj_[leaving] = 0.0;
      if (!to_lower && dj_[leaving] > 0.0) dj_[leaving] = 0.0;

      const double delta = (x_[leaving] - target) / arq;
      for (Index i = 0; i < m_; ++i) x_[basis_[i]] -= alpha(i) * delta;
      x_[q] += delta;

      pivot(r, q, alpha);
      set_nonbasic(leaving, to_lower ? VarState::AtLower : VarState::AtUpper);
      note_step(std::abs(theta_d));
    }
  }

  const DenseMatrix& A_;
  const DenseVector& b_;
  Index m_, d_, n_;
  std::vector<double> lo_, up_, cost_;
  std::vector<VarState> state_;
  std::vector<double> x_;
  std::vector<Index> basis_;
  std::vector<Index> row_of_;
  std::vector<double> colnorm_;
  std::vector<double> dj_;
  DenseMatrix binv_;
  Index iters_ = 0;
  Index max_iters_;
  int since_refactor_ = 0;
  int degenerate_run_ = 0;
  int numerical_retries_ = 0;
  bool bland_ = false;
};

}  // namespace

LpSolution solve_lp(const LpProblem& problem, const LpOptions& options) {
  problem.validate();
  const Index d = problem.num_vars();
  const Index m = problem.num_rows();
  const Index max_iters = options.max_iters > 0 ? options.max_iters : 50 * (d + m);
  BoundedSimplex simplex(problem, max_iters);
  return simplex.run(options.method);
}

LpSolution solve_lp(const LpProblem& problem, Index max_iters) {
  LpOptions opts;
  opts.max_iters = max_iters;
  return solve_lp(problem, opts);
}

}  // namespace nsinfer
