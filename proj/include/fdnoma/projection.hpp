#pragma once

#include "fdnoma/ipm.hpp"
#include "fdnoma/model.hpp"

namespace fdnoma {

// Polyblock vertex: ratio variables z (4T, z >= 1, blocks u/v/zeta/xi) and
// SIC slack variables t (T, >= 0). Pinned coordinates of degenerate tuples
// stay at z = 1 / t = 0.
struct Vertex {
  RVec z;
  RVec t;

  bool dominated_by(const Vertex& o, double tol = 1e-12) const {
    for (int i = 0; i < z.size(); ++i)
      if (z[i] > o.z[i] + tol) return false;
    for (int i = 0; i < t.size(); ++i)
      if (t[i] > o.t[i] + tol) return false;
    return true;
  }

  std::uint64_t hash() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](const RVec& v) {
      for (int i = 0; i < v.size(); ++i) {
        std::uint64_t bits;
        double d = v[i];
        std::memcpy(&bits, &d, 8);
        h = (h ^ bits) * 1099511628211ull;
      }
    };
    mix(z);
    mix(t);
    return h;
  }
};

struct ProjectionResult {
  double lambda = 0.0;       // achievable projection multiplier (lower bound)
  double lambda_cut = 0.0;   // valid multiplier for polyblock cuts (>= true lambda)
  double beta_star = 0.0;
  double alpha_final = 0.0;
  std::vector<double> alpha_trace;  // non-decreasing Dinkelbach sequence
  double final_residual = 0.0;      // subproblem optimum at the last alpha
  RVec x;                           // projection SDP solution (W~, p~, Z, slacks)
  bool exact = true;   // false when the SDPs stalled; lambda_cut falls back to beta*
  bool rank_one_ok = true;          // all W~ blocks passed the eigenvalue test
  int sdp_solves = 0;
};

// Projections run along the segment from the box lower corner
// a = (1,...,1; 0,...,0): the point at parameter beta has coordinates
// (1 + beta (z - 1), beta t). Largest beta in [0,1] keeping the C1a side
//   log2(1 + beta (z_D - 1)) + beta t_D <= log2(1 + P/sigma_m^2)
// for every tuple carrying a SIC slack; the left side is strictly
// increasing in beta, so bisection is exact up to tol.
inline double beta_bisection(const Vertex& v, const TupleTable& tb,
                             const ScaledScenario& sc, double tol = 1e-9) {
  std::vector<double> rhs(tb.count());
  for (int k = 0; k < tb.count(); ++k)
    rhs[k] = log2_safe(1.0 + sc.cfg.p_max_dl / sc.cfg.noise_dl[tb[k].m]);
  auto feasible = [&](double beta) {
    for (int k = 0; k < tb.count(); ++k) {
      if (!tb[k].has_n()) continue;
      if (log2_safe(1.0 + beta * (v.z[k] - 1.0)) + beta * v.t[k] > rhs[k])
        return false;
    }
    return true;
  };
  if (feasible(1.0)) return 1.0;
  double lo = 0.0, hi = 1.0;
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    (feasible(mid) ? lo : hi) = mid;
  }
  return lo;
}

// Assembles and solves the Dinkelbach projection SDPs for a fixed scenario.
// The static parts of problem (34) are built once; per-alpha only the C14
// rows change.
class Projector {
 public:
  Projector(const ScaledScenario& sc, const TupleTable& tb)
      : sc_(sc), tb_(tb) {
    mv_ = add_model_vars(base_, tb_, sc_);
    tau_ = base_.vars.add_scalar("tau");
    rows_ = build_ratio_rows(mv_, tb_, sc_);
    add_c2_row(base_, mv_, tb_, sc_);
    add_ul_power_rows(base_, mv_, tb_, sc_);
    add_robust_blocks(base_, mv_, tb_, sc_);
    add_psd_blocks(base_, mv_, tb_);
    base_.objective.add(tau_, 1.0);

    // Per-row scale so all C14 rows are commensurate in tau: 1 over the
    // largest value f_d can take inside the power box. The weighted max-min
    // has the same Dinkelbach fixed point (weights cancel in the ratios).
    RVec ub = RVec::Zero(base_.vars.size());
    for (int i = 0; i < (int)mv_.z.size(); ++i)
      for (int c = 0; c < mv_.z[i].coords(); ++c)
        ub[mv_.z[i].offset + c] = sc_.cfg.p_max_dl;
    for (int k = 0; k < tb_.count(); ++k) {
      auto bound_beam = [&](const BeamRef& b) {
        if (!b.valid()) return;
        if (b.is_herm())
          for (int c = 0; c < b.herm.coords(); ++c)
            ub[b.herm.offset + c] = sc_.cfg.p_max_dl;
        else
          ub[b.scalar] = sc_.cfg.p_max_dl;
      };
      bound_beam(mv_.tv[k].wt_m);
      bound_beam(mv_.tv[k].wt_n);
      if (mv_.tv[k].pt_r >= 0) ub[mv_.tv[k].pt_r] = sc_.cfg.p_max_ul[tb_[k].r];
      if (mv_.tv[k].pt_t >= 0) ub[mv_.tv[k].pt_t] = sc_.cfg.p_max_ul[tb_[k].t];
    }
    row_scale_.assign(rows_.size(), 1.0);
    for (size_t d = 0; d < rows_.size(); ++d) {
      if (rows_[d].pinned) continue;
      double fmax = std::abs(rows_[d].f.constant);
      for (auto& [j, c] : rows_[d].f.terms) fmax += std::abs(c) * ub[j];
      row_scale_[d] = 1.0 / std::max(fmax, 1e-300);
    }

    // Saturation level for the C1b decodability factor. Unsaturated, a kappa
    // near the best-case SINR bound pins the v-row denominator within a hair
    // of the noise floor, which double precision cannot resolve against the
    // O(1) power scales; saturating kappa relaxes C1b only for vertices deep
    // in that zone (a valid enlargement: cuts stay safe, recovered policies
    // are SIC-checked separately).
    kappa_cap_.assign(tb_.count(), 0.0);
    for (int k = 0; k < tb_.count(); ++k) {
      if (!tb_[k].has_n()) continue;
      const auto& tp = tb_[k];
      double best_at_n = sc_.ch.h[tp.i][tp.n].squaredNorm() * sc_.cfg.p_max_dl /
                         sc_.cfg.noise_dl[tp.n];
      kappa_cap_[k] = 1e-3 * best_at_n;
    }
  }

  const std::vector<RatioRow>& rows() const { return rows_; }
  const ModelVars& model_vars() const { return mv_; }
  const TupleTable& tuples() const { return tb_; }
  const ScaledScenario& scenario() const { return sc_; }

  // Problem (34) at Dinkelbach parameter alpha for vertex v. C1b is
  // linearized per tuple at the vertex's own slack sigma = t_Delta, which is
  // vacuous at the initial vertex and tightens as the polyblock shrinks t;
  // any feasible point dominated by v satisfies the milder row, so the cut
  // never excises feasible points.
  ConicProblem assemble(const Vertex& v, double alpha) const {
    ConicProblem cp = base_;
    for (size_t d = 0; d < rows_.size(); ++d) {
      double zt = v.z[d] - 1.0;  // box extent of the coordinate
      if (rows_[d].pinned || zt <= 1e-12) continue;
      // anchored C14 row: (f - g) - alpha (z - 1) g >= tau
      AffineForm c14;
      c14.add_form(rows_[d].f, row_scale_[d]);
      c14.add_form(rows_[d].g, -(1.0 + alpha * zt) * row_scale_[d]);
      c14.add(tau_, -1.0);
      cp.add_row(std::move(c14), "C14");
    }
    int tcount = tb_.count();
    for (int k = 0; k < tcount; ++k) {
      if (!tb_[k].has_n()) continue;
      double kappa = (1.0 + sc_.cfg.p_max_dl / sc_.cfg.noise_dl[tb_[k].m]) /
                         std::exp2(v.t[k]) -
                     1.0;
      kappa = std::min(kappa, kappa_cap_[k]);
      if (kappa <= 0.0) continue;
      const auto& tp = tb_[k];
      CMat hn = sc_.ch.h[tp.i][tp.n] * sc_.ch.h[tp.i][tp.n].adjoint();
      AffineForm c1b;
      double s = row_scale_[tcount + k] / (1.0 + kappa);
      add_beam_trace(c1b, mv_.tv[k].wt_m, hn, s);
      c1b.add_form(rows_[tcount + k].g, -kappa * s);
      cp.add_row(std::move(c1b), "C1b");
    }
    return cp;
  }

  // Algorithm 2: Dinkelbach iteration alpha_1 = 0, alpha_{x+1} = min_d
  // f_d / (z_d g_d) at the max-min solution, until the subproblem optimum
  // drops to delta (relative to the first subproblem value, since the rows
  // carry arbitrary positive scales). lambda = min(alpha_final, beta*).
  // An accurate alpha matters beyond delta: the polyblock cut with an
  // underestimated projection can excise feasible points, so iteration also
  // continues while alpha still moves relatively.
  ProjectionResult project(const Vertex& v, double delta, int max_iters = 40) const {
    constexpr double kRelTol = 1e-3;  // relative accuracy of alpha^*
    ProjectionResult pr;
    pr.beta_star = beta_bisection(v, tb_, sc_);
    bool any_live = false;
    for (size_t d = 0; d < rows_.size(); ++d)
      if (!rows_[d].pinned && v.z[d] - 1.0 > 1e-12) any_live = true;
    if (!any_live) {
      // the segment [a, v] is the single point a, which lies in G
      pr.alpha_final = 1.0;
      pr.alpha_trace = {0.0, 1.0};
      pr.lambda = std::min(1.0, pr.beta_star);
      pr.lambda_cut = pr.lambda;
      return pr;
    }
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();  // alpha with tau* < 0
    double alpha = 0.0, prev_step = -1.0;
    double tau_first = -1.0, last_feas_tau = std::numeric_limits<double>::infinity();
    int usable_solves = 0;
    pr.alpha_trace.push_back(0.0);
    for (int x = 1; x <= max_iters; ++x) {
      ConicProblem cp = assemble(v, alpha);
      auto sol = solve_sdp(cp, 1e-8, 1e-8);
      pr.sdp_solves++;
      // a near-converged iterate is still a feasible max-min point; the
      // alpha update below only needs feasibility of the point
      bool usable = sol.status == SolveStatus::Optimal ||
                    (sol.gap_residual <= 1e-5 && sol.feas_residual <= 1e-6);
      if (!usable) {
        // numerically unresolvable corner (razor-thin C1b geometry): fall
        // back to the always-valid bounds instead of guessing
        pr.exact = false;
        break;
      }
      usable_solves++;
      double tau_star = sol.x[tau_];
      if (tau_first < 0.0) tau_first = std::max(tau_star, 1e-300);
      double rho = std::numeric_limits<double>::infinity();
      for (size_t d = 0; d < rows_.size(); ++d) {
        double zt = v.z[d] - 1.0;
        if (rows_[d].pinned || zt <= 1e-12) continue;
        double fd = rows_[d].f.eval(sol.x);
        double gd = rows_[d].g.eval(sol.x);
        rho = std::min(rho, (fd - gd) / (zt * gd));
      }
      rho = std::max(rho, 0.0);
      // the solution is a feasible policy regardless of the sign of tau*,
      // so its min ratio always lower-bounds alpha*
      double step = std::max(0.0, rho - lo);
      if (rho > lo || pr.x.size() == 0) {
        lo = std::max(lo, rho);
        pr.x = sol.x;
      }
      pr.alpha_trace.push_back(lo);
      pr.alpha_final = lo;
      if (tau_star < 0.0)
        hi = std::min(hi, alpha);
      else
        last_feas_tau = tau_star;
      pr.final_residual = last_feas_tau == std::numeric_limits<double>::infinity()
                              ? tau_star
                              : last_feas_tau;

      bool residual_met = last_feas_tau <= delta * tau_first;
      bool bracket_met =
          std::isfinite(hi) && (hi - lo) <= kRelTol * std::max(lo, 1e-300);
      if (residual_met && bracket_met) break;

      double probe = kRelTol * std::max(lo, 1e-300);
      if (bracket_met) {
        alpha = lo;  // certify the termination residual at the lower bound
      } else if (std::isfinite(hi)) {
        alpha = 0.5 * (lo + hi);
      } else if (prev_step > 0.0 && step > 0.0 && step < 0.95 * prev_step) {
        // linear tail: extrapolate past the geometric remainder
        double c = step / prev_step;
        alpha = lo + std::max(1.5 * step * c / (1.0 - c), probe);
      } else {
        alpha = lo + probe;
      }
      prev_step = step;
    }
    pr.alpha_final = lo;
    pr.lambda = std::min(lo, pr.beta_star);
    // cuts may use any multiplier >= the true one: the certified upper end
    // of the alpha bracket when available, beta* otherwise
    pr.exact = pr.exact && usable_solves > 0;
    pr.lambda_cut = pr.exact && std::isfinite(hi)
                        ? std::min(std::max(hi, lo), pr.beta_star)
                        : pr.beta_star;
    if (usable_solves == 0) pr.x = RVec();
    return pr;
  }

  int tau_var() const { return tau_; }

 private:
  ScaledScenario sc_;
  TupleTable tb_;
  ConicProblem base_;
  ModelVars mv_;
  std::vector<RatioRow> rows_;
  std::vector<double> row_scale_;
  std::vector<double> kappa_cap_;
  int tau_ = -1;
};

}  // namespace fdnoma
