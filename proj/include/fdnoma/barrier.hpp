#pragma once

#include "fdnoma/conic.hpp"

namespace fdnoma {

// Path-following barrier engine. Handles the full ConicProblem surface
// including log2-of-affine objective terms and log rows, so it backs the SCA
// subproblems; on pure SDPs it doubles as an independent cross-check for the
// HKM engine. Needs a strictly feasible start.
namespace barrier {

struct Options {
  double gap_tol = 1e-8;        // relative complementarity target nu/t
  double inner_tol = 1e-9;      // Newton decrement^2 threshold
  int max_newton = 400;
  double t_init = 1.0;
  double t_factor = 20.0;
};

struct Result {
  SolveStatus status = SolveStatus::NumericalFailure;
  RVec x;
  double objective = 0.0;  // maximized objective value
  RVec row_dual;           // multipliers for rows
  std::vector<double> log_row_dual;
  double gap = 0.0;
  int newton_steps = 0;
  std::string message;
};

class Solver {
 public:
  Solver(const ConicProblem& p, Options opt = {}) : p_(p), opt_(opt) {}

  // Strict feasibility check used by line searches and callers.
  bool strictly_feasible(const RVec& x) const {
    for (auto& r : p_.rows)
      if (!(r.eval(x) > 0.0)) return false;
    for (auto& t : p_.obj_logs)
      if (!(t.arg.eval(x) > 0.0)) return false;
    for (auto& lr : p_.log_rows) {
      double v = lr.affine.eval(x);
      for (auto& t : lr.logs) {
        double f = t.arg.eval(x);
        if (!(f > 0.0)) return false;
        v += t.weight * log2_safe(f);
      }
      if (!(v > 0.0)) return false;
    }
    for (auto& b : p_.blocks) {
      Eigen::LLT<CMat> llt(b.eval(x));
      if (llt.info() != Eigen::Success) return false;
    }
    return true;
  }

  Result run(const RVec& x0) {
    const int n = p_.vars.size();
    Result res;
    if (!strictly_feasible(x0)) {
      res.message = "initial point not strictly feasible";
      return res;
    }
    RVec x = x0;
    double nu = (double)p_.rows.size() + 2.0 * (double)p_.log_rows.size();
    for (auto& lr : p_.log_rows) nu += (double)lr.logs.size() - 1.0;
    for (auto& b : p_.blocks) nu += b.dim;
    nu = std::max(nu, 1.0);

    double t = opt_.t_init;
    RVec g(n), dx(n);
    RMat H(n, n);
    int total_newton = 0;

    while (true) {
      // center at barrier parameter t
      bool centered = false;
      for (int it = 0; it < opt_.max_newton; ++it) {
        if (!assemble(x, t, g, H)) {
          res.message = "gradient/Hessian assembly failed";
          return res;
        }
        Eigen::LLT<RMat> llt;
        double jitter = 0.0;
        for (int att = 0; att < 8; ++att) {
          RMat Hj = H;
          if (jitter > 0.0) Hj.diagonal().array() += jitter;
          llt.compute(Hj);
          if (llt.info() == Eigen::Success) break;
          double base = std::max(1e-300, H.diagonal().cwiseAbs().maxCoeff());
          jitter = (jitter == 0.0) ? 1e-14 * base : jitter * 100.0;
        }
        if (llt.info() != Eigen::Success) {
          res.message = "Hessian factorization failed";
          return res;
        }
        dx = llt.solve(-g);
        double dec2 = -g.dot(dx);
        if (!(dec2 > 0.0)) dec2 = 0.0;
        total_newton++;
        if (dec2 <= opt_.inner_tol * std::max(1.0, std::abs(value(x, t)))) {
          centered = true;
          break;
        }
        // damped step with feasibility backtracking
        double alpha = 1.0;
        double f0 = value(x, t);
        bool moved = false;
        for (int ls = 0; ls < 60; ++ls) {
          RVec xn = x + alpha * dx;
          if (strictly_feasible(xn)) {
            double f1 = value(xn, t);
            if (f1 <= f0 - 1e-4 * alpha * dec2 || f1 < f0) {
              x = xn;
              moved = true;
              break;
            }
          }
          alpha *= 0.5;
        }
        if (!moved) {
          centered = true;  // cannot improve further at this t
          break;
        }
      }
      if (!centered) {
        res.message = "Newton centering did not converge";
        res.status = SolveStatus::MaxIters;
        res.x = x;
        res.objective = p_.objective_value(x);
        return res;
      }
      double obj = p_.objective_value(x);
      double gap = nu / t;
      if (gap <= opt_.gap_tol * (1.0 + std::abs(obj))) {
        res.status = SolveStatus::Optimal;
        res.x = x;
        res.objective = obj;
        res.gap = gap / (1.0 + std::abs(obj));
        res.newton_steps = total_newton;
        res.row_dual.resize(p_.rows.size());
        for (size_t r = 0; r < p_.rows.size(); ++r)
          res.row_dual[r] = 1.0 / (t * p_.rows[r].eval(x));
        res.log_row_dual.resize(p_.log_rows.size());
        for (size_t r = 0; r < p_.log_rows.size(); ++r) {
          double v = p_.log_rows[r].affine.eval(x);
          for (auto& lt : p_.log_rows[r].logs)
            v += lt.weight * log2_safe(lt.arg.eval(x));
          res.log_row_dual[r] = 1.0 / (t * v);
        }
        return res;
      }
      t *= opt_.t_factor;
      if (total_newton > 50 * opt_.max_newton) {
        res.status = SolveStatus::MaxIters;
        res.message = "newton budget exhausted";
        res.x = x;
        res.objective = obj;
        return res;
      }
    }
  }

 private:
  // t * (-objective) + barrier
  double value(const RVec& x, double t) const {
    double f = -p_.objective.eval(x);
    for (auto& lt : p_.obj_logs) f -= lt.weight * log2_safe(lt.arg.eval(x));
    double phi = 0.0;
    for (auto& r : p_.rows) phi -= std::log(r.eval(x));
    for (auto& lr : p_.log_rows) {
      double v = lr.affine.eval(x);
      for (auto& lt : lr.logs) {
        double fv = lt.arg.eval(x);
        v += lt.weight * log2_safe(fv);
        phi -= std::log(fv);
      }
      phi -= std::log(v);
    }
    for (auto& b : p_.blocks) {
      Eigen::LLT<CMat> llt(b.eval(x));
      double ld = 0.0;
      for (int k = 0; k < b.dim; ++k) ld += std::log(std::real(llt.matrixL()(k, k)));
      phi -= 2.0 * ld;
    }
    return t * f + phi;
  }

  bool assemble(const RVec& x, double t, RVec& g, RMat& H) const {
    const int n = p_.vars.size();
    g.setZero();
    H.setZero();
    auto rank1 = [&](const AffineForm& a, double gscale, double hscale) {
      a.add_gradient_to(g, gscale);
      for (auto& [i, ci] : a.terms)
        for (auto& [j, cj] : a.terms)
          if (j <= i) H(i, j) += hscale * ci * cj;
    };

    // objective: minimize -lin - sum w log2(arg)
    for (auto& [i, c] : p_.objective.terms) g[i] -= t * c;
    for (auto& lt : p_.obj_logs) {
      double f = lt.arg.eval(x);
      if (!(f > 0.0)) return false;
      double w = t * lt.weight / kLn2;
      rank1(lt.arg, -w / f, w / (f * f));
    }
    // plain rows
    for (auto& r : p_.rows) {
      double v = r.eval(x);
      if (!(v > 0.0)) return false;
      rank1(r, -1.0 / v, 1.0 / (v * v));
    }
    // log rows: -ln(u) with u = affine + sum w log2(f), plus domain barriers
    for (auto& lr : p_.log_rows) {
      double u = lr.affine.eval(x);
      std::vector<double> fv(lr.logs.size());
      for (size_t k = 0; k < lr.logs.size(); ++k) {
        fv[k] = lr.logs[k].arg.eval(x);
        if (!(fv[k] > 0.0)) return false;
        u += lr.logs[k].weight * log2_safe(fv[k]);
      }
      if (!(u > 0.0)) return false;
      // grad u as a dense scratch vector
      RVec du = RVec::Zero(n);
      lr.affine.add_gradient_to(du, 1.0);
      for (size_t k = 0; k < lr.logs.size(); ++k)
        lr.logs[k].arg.add_gradient_to(du, lr.logs[k].weight / (kLn2 * fv[k]));
      g -= du / u;
      for (int i = 0; i < n; ++i) {
        if (du[i] == 0.0) continue;
        for (int j = 0; j <= i; ++j) H(i, j) += du[i] * du[j] / (u * u);
      }
      for (size_t k = 0; k < lr.logs.size(); ++k) {
        double wk = lr.logs[k].weight / kLn2;
        double f2 = fv[k] * fv[k];
        // domain barrier -ln(f_k) plus the curvature of -ln(u) through f_k
        rank1(lr.logs[k].arg, -1.0 / fv[k], (1.0 + wk / u) / f2);
      }
    }
    // PSD blocks: -logdet
    for (auto& b : p_.blocks) {
      CMat bm = b.eval(x);
      Eigen::LLT<CMat> llt(bm);
      if (llt.info() != Eigen::Success) return false;
      CMat binv = llt.solve(CMat::Identity(b.dim, b.dim));
      std::vector<std::pair<int, CMat>> tcache;
      tcache.reserve(b.coeff.size());
      for (auto& [i, a] : b.coeff) {
        CMat ta = binv * a;
        g[i] -= std::real(ta.trace());
        tcache.emplace_back(i, std::move(ta));
      }
      for (size_t p = 0; p < tcache.size(); ++p)
        for (size_t q = 0; q <= p; ++q) {
          double v = std::real((tcache[p].second.array() *
                                tcache[q].second.transpose().array())
                                   .sum());
          H(std::max(tcache[p].first, tcache[q].first),
            std::min(tcache[p].first, tcache[q].first)) += v;
        }
    }
    H = H.selfadjointView<Eigen::Lower>();
    return true;
  }

  const ConicProblem& p_;
  Options opt_;
};

}  // namespace barrier

// Convex solve with the barrier engine. `x0` must be strictly feasible.
inline ConicSolution solve_barrier(const ConicProblem& cp, const RVec& x0,
                                   double gap_tol = 1e-8) {
  barrier::Options opt;
  opt.gap_tol = gap_tol;
  auto r = barrier::Solver(cp, opt).run(x0);
  ConicSolution sol;
  sol.status = r.status;
  sol.x = r.x;
  sol.objective = r.x.size() ? cp.objective_value(r.x) : 0.0;
  sol.gap_residual = r.gap;
  sol.feas_residual = 0.0;  // interior method: iterates stay strictly feasible
  sol.iterations = r.newton_steps;
  sol.message = r.message;
  if (r.row_dual.size() == (Eigen::Index)cp.rows.size())
    for (size_t i = 0; i < cp.rows.size(); ++i)
      if (!cp.row_tags[i].empty()) sol.duals[cp.row_tags[i]] += r.row_dual[i];
  for (size_t i = 0; i < cp.log_rows.size() && i < r.log_row_dual.size(); ++i)
    if (!cp.log_rows[i].tag.empty()) sol.duals[cp.log_rows[i].tag] += r.log_row_dual[i];
  return sol;
}

}  // namespace fdnoma
