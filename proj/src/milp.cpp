#include "mtlplan/milp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace mtlplan::milp {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kRatioTie = 1e-9;
constexpr double kDegenStep = 1e-10;
constexpr int kStallLimit = 1000;

enum class VarSt : unsigned char { Basic, AtLower, AtUpper, FreeAtZero };
enum class PhaseOutcome { Optimal, Unbounded, IterationLimit };

class Simplex {
 public:
  Simplex(const MilpModel& model, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
          const LpOptions& opts)
      : model_(model), opts_(opts), m_(model.num_constraints()), ns_(model.num_vars()) {
    slack_col_.assign(m_, -1);
    int nslack = 0;
    for (int i = 0; i < m_; ++i)
      if (model.constraints[i].rel == Relation::LessEq) slack_col_[i] = ns_ + nslack++;
    art_col_.assign(m_, 0);
    for (int i = 0; i < m_; ++i) art_col_[i] = ns_ + nslack + i;
    n_ = ns_ + nslack + m_;

    a_.setZero(m_, n_);
    b_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      for (const auto& t : model.constraints[i].terms) a_(i, t.var) += t.coef;
      if (slack_col_[i] >= 0) a_(i, slack_col_[i]) = 1.0;
      b_[i] = model.constraints[i].rhs;
    }

    lo_.setConstant(n_, 0.0);
    hi_.setConstant(n_, kInf);
    lo_.head(ns_) = lo;
    hi_.head(ns_) = hi;

    x_.setZero(n_);
    st_.assign(n_, VarSt::AtLower);
    for (int j = 0; j < ns_; ++j) {
      if (lo_[j] > -kInf) {
        st_[j] = VarSt::AtLower;
        x_[j] = lo_[j];
      } else if (hi_[j] < kInf) {
        st_[j] = VarSt::AtUpper;
        x_[j] = hi_[j];
      } else {
        st_[j] = VarSt::FreeAtZero;
        x_[j] = 0.0;
      }
    }

    // Starting basis: slack where the residual allows it, otherwise a
    // signed artificial absorbing the residual.
    basis_.assign(m_, -1);
    Eigen::VectorXd rho = b_ - a_.leftCols(ns_) * x_.head(ns_);
    t_ = a_;
    for (int i = 0; i < m_; ++i) {
      const int art = art_col_[i];
      if (slack_col_[i] >= 0 && rho[i] >= 0) {
        basis_[i] = slack_col_[i];
        x_[slack_col_[i]] = rho[i];
        st_[slack_col_[i]] = VarSt::Basic;
        a_(i, art) = 1.0;
        hi_[art] = 0.0;  // never used
      } else {
        const double sigma = rho[i] >= 0 ? 1.0 : -1.0;
        a_(i, art) = sigma;
        basis_[i] = art;
        x_[art] = std::abs(rho[i]);
        st_[art] = VarSt::Basic;
        if (sigma < 0) t_.row(i) = -a_.row(i);
      }
      t_(i, art) = 1.0;
    }
  }

  LpResult run() {
    LpResult res;
    int iters_left = opts_.max_iterations;

    // Phase 1: drive artificials to zero.
    Eigen::RowVectorXd cost1 = Eigen::RowVectorXd::Zero(n_);
    for (int i = 0; i < m_; ++i) cost1[art_col_[i]] = 1.0;
    set_costs(cost1);
    const PhaseOutcome ph1 = iterate(iters_left);
    if (ph1 == PhaseOutcome::IterationLimit) {
      res.status = LpStatus::IterationLimit;
      res.iterations = iters_done_;
      return res;
    }
    if (ph1 == PhaseOutcome::Unbounded)
      throw std::logic_error("phase-1 relaxation cannot be unbounded");
    refine();
    double infeas = 0;
    for (int i = 0; i < m_; ++i) infeas += std::abs(x_[art_col_[i]]);
    if (infeas > opts_.feas_tol) {
      res.status = LpStatus::Infeasible;
      res.iterations = iters_done_;
      return res;
    }

    // Phase 2: pin artificials and restore the real objective.
    for (int i = 0; i < m_; ++i) {
      const int art = art_col_[i];
      hi_[art] = 0.0;
      if (st_[art] != VarSt::Basic) {
        st_[art] = VarSt::AtLower;
        x_[art] = 0.0;
      }
    }
    Eigen::RowVectorXd cost2 = Eigen::RowVectorXd::Zero(n_);
    for (const auto& t : model_.objective) cost2[t.var] += t.coef;
    set_costs(cost2);
    const PhaseOutcome ph2 = iterate(iters_left);
    res.iterations = iters_done_;
    if (ph2 == PhaseOutcome::IterationLimit) {
      res.status = LpStatus::IterationLimit;
      return res;
    }
    if (ph2 == PhaseOutcome::Unbounded) {
      res.status = LpStatus::Unbounded;
      return res;
    }
    refine();
    res.status = LpStatus::Optimal;
    res.x = x_.head(ns_);
    res.objective = model_.eval_objective(res.x);
    return res;
  }

 private:
  void set_costs(const Eigen::RowVectorXd& cost) {
    cost_ = cost;
    d_ = cost_;
    for (int i = 0; i < m_; ++i)
      if (cost_[basis_[i]] != 0.0) d_ -= cost_[basis_[i]] * t_.row(i);
    stall_ = 0;
    bland_ = false;
  }

  // Recompute basic values from the original columns; pivoting the
  // dense tableau for thousands of iterations drifts otherwise.
  void refine() {
    if (m_ == 0) return;
    Eigen::VectorXd xnb = x_;
    for (int i = 0; i < m_; ++i) xnb[basis_[i]] = 0.0;
    const Eigen::VectorXd rhs = b_ - a_ * xnb;
    Eigen::MatrixXd bmat(m_, m_);
    for (int i = 0; i < m_; ++i) bmat.col(i) = a_.col(basis_[i]);
    const Eigen::VectorXd xb = bmat.partialPivLu().solve(rhs);
    for (int i = 0; i < m_; ++i) x_[basis_[i]] = xb[i];
  }

  PhaseOutcome iterate(int& iters_left) {
    while (true) {
      if (iters_left <= 0) return PhaseOutcome::IterationLimit;
      --iters_left;
      ++iters_done_;

      int enter = -1, sig = 0;
      double best = opts_.opt_tol;
      for (int j = 0; j < n_; ++j) {
        if (st_[j] == VarSt::Basic || hi_[j] - lo_[j] <= 0) continue;
        const double dj = d_[j];
        double score = 0;
        int s = 0;
        if (st_[j] == VarSt::AtLower) {
          if (dj < -opts_.opt_tol) score = -dj, s = 1;
        } else if (st_[j] == VarSt::AtUpper) {
          if (dj > opts_.opt_tol) score = dj, s = -1;
        } else {
          if (dj < -opts_.opt_tol)
            score = -dj, s = 1;
          else if (dj > opts_.opt_tol)
            score = dj, s = -1;
        }
        if (s == 0) continue;
        if (bland_) {
          enter = j;
          sig = s;
          break;
        }
        if (score > best) {
          best = score;
          enter = j;
          sig = s;
        }
      }
      if (enter < 0) return PhaseOutcome::Optimal;

      double tmax = hi_[enter] - lo_[enter];
      int leave = -1;
      double leave_pivot = 0;
      for (int i = 0; i < m_; ++i) {
        const double coef = sig * t_(i, enter);
        const int vb = basis_[i];
        double lim;
        if (coef > kPivotTol)
          lim = (x_[vb] - lo_[vb]) / coef;
        else if (coef < -kPivotTol)
          lim = (hi_[vb] - x_[vb]) / (-coef);
        else
          continue;
        if (lim < 0) lim = 0;
        if (lim < tmax - kRatioTie) {
          tmax = lim;
          leave = i;
          leave_pivot = std::abs(t_(i, enter));
        } else if (leave >= 0 && lim <= tmax + kRatioTie) {
          const bool better = bland_ ? vb < basis_[leave]
                                     : std::abs(t_(i, enter)) > leave_pivot + kRatioTie;
          if (better) {
            leave = i;
            leave_pivot = std::abs(t_(i, enter));
          }
        }
      }
      if (!std::isfinite(tmax)) return PhaseOutcome::Unbounded;
      if (tmax < 0) tmax = 0;

      for (int i = 0; i < m_; ++i) x_[basis_[i]] -= sig * tmax * t_(i, enter);
      if (leave < 0) {
        st_[enter] = sig > 0 ? VarSt::AtUpper : VarSt::AtLower;
        x_[enter] = sig > 0 ? hi_[enter] : lo_[enter];
      } else {
        const double start =
            st_[enter] == VarSt::AtLower ? lo_[enter]
                                         : (st_[enter] == VarSt::AtUpper ? hi_[enter] : 0.0);
        x_[enter] = start + sig * tmax;
        const int lv = basis_[leave];
        if (sig * t_(leave, enter) > 0) {
          st_[lv] = VarSt::AtLower;
          x_[lv] = lo_[lv];
        } else {
          st_[lv] = VarSt::AtUpper;
          x_[lv] = hi_[lv];
        }

        const double p = t_(leave, enter);
        Eigen::VectorXd col = t_.col(enter);
        const Eigen::RowVectorXd prow = t_.row(leave) / p;
        col[leave] = 0;
        t_.noalias() -= col * prow;
        t_.row(leave) = prow;
        d_ -= d_[enter] * prow;
        basis_[leave] = enter;
        st_[enter] = VarSt::Basic;
      }

      if (tmax <= kDegenStep) {
        if (++stall_ >= kStallLimit) bland_ = true;
      } else {
        stall_ = 0;
      }
    }
  }

  const MilpModel& model_;
  LpOptions opts_;
  int m_, ns_, n_ = 0;
  std::vector<int> slack_col_, art_col_, basis_;
  std::vector<VarSt> st_;
  Eigen::MatrixXd a_, t_;
  Eigen::VectorXd b_, lo_, hi_, x_;
  Eigen::RowVectorXd cost_, d_;
  int iters_done_ = 0, stall_ = 0;
  bool bland_ = false;
};

LpResult lp_with_bounds(const MilpModel& model, const Eigen::VectorXd& lo,
                        const Eigen::VectorXd& hi, const LpOptions& opts) {
  return Simplex(model, lo, hi, opts).run();
}

}  // namespace

LpResult solve_lp(const MilpModel& model, const LpOptions& opts) {
  model.validate();
  Eigen::VectorXd lo(model.num_vars()), hi(model.num_vars());
  for (int j = 0; j < model.num_vars(); ++j) {
    lo[j] = model.vars[j].lower;
    hi[j] = model.vars[j].upper;
  }
  return lp_with_bounds(model, lo, hi, opts);
}

namespace {

struct Node {
  double bound = 0;
  long id = 0;
  std::vector<std::pair<int, double>> fixed;
  Eigen::VectorXd x;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

int most_fractional_binary(const MilpModel& model, const Eigen::VectorXd& x, double int_tol) {
  int pick = -1;
  double best = int_tol;
  for (int j = 0; j < model.num_vars(); ++j) {
    if (model.vars[j].kind != VarKind::Binary) continue;
    const double frac = std::min(x[j] - std::floor(x[j]), std::ceil(x[j]) - x[j]);
    if (frac > best) {
      best = frac;
      pick = j;
    }
  }
  return pick;
}

}  // namespace

MilpResult solve_milp(const MilpModel& model, const MilpOptions& opts) {
  model.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const auto elapsed = [&t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  Eigen::VectorXd base_lo(model.num_vars()), base_hi(model.num_vars());
  for (int j = 0; j < model.num_vars(); ++j) {
    base_lo[j] = model.vars[j].lower;
    base_hi[j] = model.vars[j].upper;
  }

  MilpResult res;
  bool have_incumbent = false;
  bool capped = false;
  long next_id = 0;
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;

  auto offer_incumbent = [&](const Eigen::VectorXd& x, double obj) {
    if (!have_incumbent || obj < res.objective - 1e-12) {
      have_incumbent = true;
      res.objective = obj;
      res.x = x;
    }
  };

  // Solves one node; returns false when the search must stop.
  auto expand = [&](std::vector<std::pair<int, double>> fixed) -> bool {
    if (res.nodes_explored >= opts.node_limit ||
        (opts.time_limit > 0 && elapsed() > opts.time_limit)) {
      capped = true;
      return false;
    }
    Eigen::VectorXd lo = base_lo, hi = base_hi;
    for (const auto& [var, val] : fixed) {
      if (val <= 0.5)
        hi[var] = std::min(hi[var], 0.0);
      else
        lo[var] = std::max(lo[var], 1.0);
      if (lo[var] > hi[var]) {
        ++res.nodes_explored;
        return true;
      }
    }
    const LpResult lp = lp_with_bounds(model, lo, hi, opts.lp);
    ++res.nodes_explored;
    if (lp.status == LpStatus::Infeasible) return true;
    if (lp.status == LpStatus::Unbounded)
      throw std::runtime_error("relaxation is unbounded; refusing to branch");
    if (lp.status == LpStatus::IterationLimit) {
      capped = true;
      return false;
    }
    if (have_incumbent && lp.objective >= res.objective - 1e-9) return true;
    if (most_fractional_binary(model, lp.x, opts.int_tol) < 0) {
      offer_incumbent(lp.x, lp.objective);
      return true;
    }
    if (opts.hint) {
      if (auto guess = opts.hint(model, lp.x)) {
        if (guess->size() == model.num_vars() &&
            most_fractional_binary(model, *guess, opts.int_tol) < 0 &&
            check_solution(model, *guess, 1e-6).ok()) {
          offer_incumbent(*guess, model.eval_objective(*guess));
        }
      }
      if (have_incumbent && lp.objective >= res.objective - 1e-9) return true;
    }
    Node node;
    node.bound = lp.objective;
    node.id = next_id++;
    node.fixed = std::move(fixed);
    node.x = lp.x;
    open.push(std::move(node));
    return true;
  };

  if (expand({})) {
    while (!open.empty()) {
      if (opts.time_limit > 0 && elapsed() > opts.time_limit) {
        capped = true;
        break;
      }
      const Node node = open.top();
      if (have_incumbent && node.bound >= res.objective - 1e-9) break;
      open.pop();
      const int var = most_fractional_binary(model, node.x, opts.int_tol);
      bool ok = true;
      for (const double val : {0.0, 1.0}) {
        auto fixed = node.fixed;
        fixed.emplace_back(var, val);
        if (!(ok = expand(std::move(fixed)))) break;
      }
      if (!ok) break;
    }
  }

  res.best_bound = open.empty() ? (have_incumbent ? res.objective : kInf) : open.top().bound;
  const bool closed =
      have_incumbent && (open.empty() || open.top().bound >= res.objective - 1e-9);
  if (closed)
    res.status = MilpStatus::Optimal;
  else if (capped)
    res.status = MilpStatus::NodeLimit;
  else
    res.status = have_incumbent ? MilpStatus::Optimal : MilpStatus::Infeasible;
  res.wall_time = elapsed();
  return res;
}

}  // namespace mtlplan::milp
