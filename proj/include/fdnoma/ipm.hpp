#pragma once
#include <cstdlib>
#include <cstdio>

#include <functional>

#include "fdnoma/conic.hpp"

namespace fdnoma {

// Real-symmetric embedding of a complex Hermitian matrix. H >= 0 iff the
// embedding is PSD; the transformation is lossless for feasibility.
inline RMat real_embed(const CMat& h) {
  int d = h.rows();
  RMat e(2 * d, 2 * d);
  e.topLeftCorner(d, d) = h.real();
  e.bottomRightCorner(d, d) = h.real();
  e.topRightCorner(d, d) = -h.imag();
  e.bottomLeftCorner(d, d) = h.imag();
  return e;
}

namespace ipm {

struct Block {
  int dim = 0;
  RMat c;                                       // constant part
  std::vector<std::pair<int, RMat>> a;          // var -> coefficient of -x_i... stored as A with S = c - sum x_i a_i
};

struct LpPart {
  RVec c;                                       // s = c - Abar y
  std::vector<std::vector<std::pair<int, double>>> a;  // per-row sparse abar
};

// Internal canonical form:  maximize b'y  s.t.  S_k = C_k - sum_i y_i A_ki >= 0,
// lp: s_r = c_r - abar_r'y >= 0. The ConicProblem's blocks B(x) = C0 + sum x A
// map via A_ki = -A0_ki.
struct Problem {
  int n = 0;
  RVec b;
  std::vector<Block> blocks;
  LpPart lp;
};

struct Options {
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_iters = 100;
  std::function<void(int, double, double, double, double, double)> trace;  // iter, pobj, dobj, pinf, dinf, mu
};

struct Result {
  SolveStatus status = SolveStatus::NumericalFailure;
  RVec y;                      // decision variables
  RVec lp_dual;                // multipliers of the lp rows
  double pobj = 0.0, dobj = 0.0;
  double rel_gap = 0.0, rel_pinf = 0.0, rel_dinf = 0.0;
  int iterations = 0;
  std::string message;
};

inline double frac_to_boundary_lp(const RVec& x, const RVec& dx) {
  double a = std::numeric_limits<double>::infinity();
  for (int i = 0; i < x.size(); ++i)
    if (dx[i] < 0.0) a = std::min(a, -x[i] / dx[i]);
  return a;
}

inline double frac_to_boundary_psd(const RMat& x, const RMat& dx) {
  Eigen::LLT<RMat> llt(x);
  if (llt.info() != Eigen::Success) return 0.0;
  RMat l = llt.matrixL();
  RMat w = l.triangularView<Eigen::Lower>().solve(dx);
  w = l.triangularView<Eigen::Lower>().solve(RMat(w.transpose()));
  Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (w + w.transpose()),
                                         Eigen::EigenvaluesOnly);
  double lmin = es.eigenvalues().minCoeff();
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

class Solver {
 public:
  explicit Solver(const Problem& p, Options opt = {}) : p_(p), opt_(opt) {}

  Result run() {
    const int n = p_.n;
    const int nb = (int)p_.blocks.size();
    const int nl = p_.lp.c.size();
    Result res;
    res.y = RVec::Zero(n);
    if (n == 0) {
      res.status = SolveStatus::Optimal;
      return res;
    }

    double nu = nl;
    for (auto& blk : p_.blocks) nu += blk.dim;
    nu = std::max(nu, 1.0);

    // infeasible start: identity-scaled X and S
    std::vector<RMat> X(nb), S(nb);
    double data_scale = 1.0 + p_.b.cwiseAbs().maxCoeff();
    for (int k = 0; k < nb; ++k) {
      double sc = 1.0 + p_.blocks[k].c.norm();
      for (auto& [i, a] : p_.blocks[k].a) sc = std::max(sc, a.norm());
      S[k] = sc * RMat::Identity(p_.blocks[k].dim, p_.blocks[k].dim);
      X[k] = data_scale * RMat::Identity(p_.blocks[k].dim, p_.blocks[k].dim);
    }
    RVec xl = RVec::Constant(nl, data_scale), sl(nl);
    for (int r = 0; r < nl; ++r) {
      double sc = 1.0 + std::abs(p_.lp.c[r]);
      for (auto& [i, a] : p_.lp.a[r]) sc = std::max(sc, std::abs(a));
      sl[r] = sc;
    }

    RVec y = RVec::Zero(n);
    std::vector<RMat> Rd(nb);
    RVec rd_lp(nl), rp(n);
    std::vector<std::vector<RMat>> W;  // per block, per local var: X*A_j*Sinv scratch

    RMat M(n, n);
    RVec rhs(n), dy(n), dy_a(n);
    std::vector<RMat> dX(nb), dS(nb), dXa(nb), dSa(nb);
    RVec dxl(nl), dsl(nl), dxl_a(nl), dsl_a(nl);

    auto block_residuals = [&]() {
      for (int k = 0; k < nb; ++k) {
        Rd[k] = p_.blocks[k].c - S[k];
        for (auto& [i, a] : p_.blocks[k].a) Rd[k] -= y[i] * a;
      }
      for (int r = 0; r < nl; ++r) {
        double v = p_.lp.c[r] - sl[r];
        for (auto& [i, a] : p_.lp.a[r]) v -= y[i] * a;
        rd_lp[r] = v;
      }
      rp = p_.b;
      for (int k = 0; k < nb; ++k)
        for (auto& [i, a] : p_.blocks[k].a) rp[i] -= (a.array() * X[k].array()).sum();
      for (int r = 0; r < nl; ++r)
        for (auto& [i, a] : p_.lp.a[r]) rp[i] -= a * xl[r];
    };

    double mu = 0.0;
    double best_merit = std::numeric_limits<double>::infinity();
    Result best = res;
    int stall = 0;
    for (int iter = 0; iter < opt_.max_iters; ++iter) {
      block_residuals();
      double ip = 0.0;
      for (int k = 0; k < nb; ++k) ip += (X[k].array() * S[k].array()).sum();
      ip += xl.dot(sl);
      mu = ip / nu;

      double pobj = xl.dot(p_.lp.c);
      for (int k = 0; k < nb; ++k) pobj += (p_.blocks[k].c.array() * X[k].array()).sum();
      double dobj = p_.b.dot(y);
      double dinf = 0.0, cnorm = 1.0;
      for (int k = 0; k < nb; ++k) {
        dinf = std::max(dinf, Rd[k].norm());
        cnorm = std::max(cnorm, p_.blocks[k].c.norm());
      }
      if (nl) dinf = std::max(dinf, rd_lp.cwiseAbs().maxCoeff());
      double rel_pinf = rp.norm() / (1.0 + p_.b.norm());
      double rel_dinf = dinf / cnorm;
      double rel_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

      res.iterations = iter;
      res.pobj = pobj;
      res.dobj = dobj;
      res.rel_gap = rel_gap;
      res.rel_pinf = rel_pinf;
      res.rel_dinf = rel_dinf;
      if (opt_.trace) opt_.trace(iter, pobj, dobj, rel_pinf, rel_dinf, mu);
      if (rel_gap <= opt_.gap_tol && rel_pinf <= opt_.feas_tol &&
          rel_dinf <= opt_.feas_tol) {
        res.status = SolveStatus::Optimal;
        res.y = y;
        res.lp_dual = xl;
        return res;
      }
      double merit = std::max({rel_gap, rel_pinf, rel_dinf});
      if (merit < best_merit * 0.9) {
        best_merit = merit;
        best = res;
        best.y = y;
        best.lp_dual = xl;
        stall = 0;
      } else if (++stall >= 15) {
        // no progress: hand back the best iterate with honest residuals
        best.status = y.cwiseAbs().maxCoeff() > 1e10 * data_scale
                          ? SolveStatus::Infeasible
                          : SolveStatus::MaxIters;
        best.message = "progress stalled";
        best.iterations = iter;
        return best;
      }

      // Schur complement and factor caches
      std::vector<Eigen::LLT<RMat>> slt(nb);
      std::vector<RMat> sinv(nb);
      bool fail = false;
      for (int k = 0; k < nb; ++k) {
        slt[k].compute(S[k]);
        if (slt[k].info() != Eigen::Success) {
          fail = true;
          break;
        }
        sinv[k] = slt[k].solve(RMat::Identity(p_.blocks[k].dim, p_.blocks[k].dim));
      }
      if (fail) {
        res.status = SolveStatus::NumericalFailure;
        res.message = "slack block lost positive definiteness";
        return res;
      }

      M.setZero();
      W.assign(nb, {});
      for (int k = 0; k < nb; ++k) {
        auto& avec = p_.blocks[k].a;
        int m = (int)avec.size();
        W[k].resize(m);
        for (int j = 0; j < m; ++j) W[k][j] = X[k] * (avec[j].second * sinv[k]);
        for (int j = 0; j < m; ++j) {
          int vj = avec[j].first;
          for (int i = 0; i <= j; ++i) {
            int vi = avec[i].first;
            double v = (avec[i].second.array() * W[k][j].array()).sum();
            M(std::max(vi, vj), std::min(vi, vj)) += v;
          }
        }
      }
      for (int r = 0; r < nl; ++r) {
        double w = xl[r] / sl[r];
        auto& row = p_.lp.a[r];
        for (size_t j = 0; j < row.size(); ++j)
          for (size_t i = 0; i <= j; ++i) {
            int vi = row[i].first, vj = row[j].first;
            M(std::max(vi, vj), std::min(vi, vj)) += w * row[i].second * row[j].second;
          }
      }
      M = M.selfadjointView<Eigen::Lower>();

      Eigen::LLT<RMat> mllt;
      double jitter = 0.0;
      for (int attempt = 0; attempt < 6; ++attempt) {
        RMat Mj = M;
        if (jitter > 0.0) Mj.diagonal().array() += jitter;
        mllt.compute(Mj);
        if (mllt.info() == Eigen::Success) break;
        jitter = (jitter == 0.0) ? 1e-12 * M.diagonal().maxCoeff() : jitter * 100.0;
      }
      if (mllt.info() != Eigen::Success) {
        res.status = SolveStatus::NumericalFailure;
        res.message = "Schur complement factorization failed";
        return res;
      }

      // base rhs pieces shared by predictor and corrector
      RVec rhs_base = p_.b;
      for (int k = 0; k < nb; ++k) {
        RMat t = X[k] * (Rd[k] * sinv[k]);
        RMat h = 0.5 * (t + t.transpose());
        for (auto& [i, a] : p_.blocks[k].a) rhs_base[i] += (a.array() * h.array()).sum();
      }
      for (int r = 0; r < nl; ++r) {
        double v = xl[r] * rd_lp[r] / sl[r];
        for (auto& [i, a] : p_.lp.a[r]) rhs_base[i] += a * v;
      }
      RVec sinv_proj = RVec::Zero(n);
      for (int k = 0; k < nb; ++k)
        for (auto& [i, a] : p_.blocks[k].a)
          sinv_proj[i] += (a.array() * sinv[k].array()).sum();
      for (int r = 0; r < nl; ++r)
        for (auto& [i, a] : p_.lp.a[r]) sinv_proj[i] += a / sl[r];

      auto compute_direction = [&](double mu_hat, bool with_corr, RVec& dy_out,
                                   std::vector<RMat>& dX_out, std::vector<RMat>& dS_out,
                                   RVec& dxl_out, RVec& dsl_out) {
        rhs = rhs_base - mu_hat * sinv_proj;
        if (with_corr) {
          for (int k = 0; k < nb; ++k) {
            RMat t = dXa[k] * (dSa[k] * sinv[k]);
            RMat h = 0.5 * (t + t.transpose());
            for (auto& [i, a] : p_.blocks[k].a)
              rhs[i] += (a.array() * h.array()).sum();
          }
          for (int r = 0; r < nl; ++r) {
            double v = dxl_a[r] * dsl_a[r] / sl[r];
            for (auto& [i, a] : p_.lp.a[r]) rhs[i] += a * v;
          }
        }
        dy_out = mllt.solve(rhs);
        for (int k = 0; k < nb; ++k) {
          dS_out[k] = Rd[k];
          for (auto& [i, a] : p_.blocks[k].a) dS_out[k] -= dy_out[i] * a;
          RMat t = X[k] * (dS_out[k] * sinv[k]);
          dX_out[k] = mu_hat * sinv[k] - X[k] - 0.5 * (t + t.transpose());
          if (with_corr) {
            RMat u = dXa[k] * (dSa[k] * sinv[k]);
            dX_out[k] -= 0.5 * (u + u.transpose());
          }
        }
        for (int r = 0; r < nl; ++r) {
          double ds = rd_lp[r];
          for (auto& [i, a] : p_.lp.a[r]) ds -= dy_out[i] * a;
          dsl_out[r] = ds;
          dxl_out[r] = (mu_hat - xl[r] * ds - (with_corr ? dxl_a[r] * dsl_a[r] : 0.0)) /
                           sl[r] -
                       xl[r];
        }
      };

      // predictor
      compute_direction(0.0, false, dy_a, dXa, dSa, dxl_a, dsl_a);
      double ap = frac_to_boundary_lp(xl, dxl_a);
      double ad = frac_to_boundary_lp(sl, dsl_a);
      for (int k = 0; k < nb; ++k) {
        ap = std::min(ap, frac_to_boundary_psd(X[k], dXa[k]));
        ad = std::min(ad, frac_to_boundary_psd(S[k], dSa[k]));
      }
      ap = std::min(1.0, 0.98 * ap);
      ad = std::min(1.0, 0.98 * ad);
      double ip_aff = 0.0;
      for (int k = 0; k < nb; ++k)
        ip_aff += ((X[k] + ap * dXa[k]).array() * (S[k] + ad * dSa[k]).array()).sum();
      ip_aff += (xl + ap * dxl_a).dot(sl + ad * dsl_a);
      double sigma = std::pow(std::max(0.0, ip_aff / ip), 3.0);
      sigma = std::min(1.0, std::max(sigma, 1e-8));

      // corrector
      compute_direction(sigma * mu, true, dy, dX, dS, dxl, dsl);
      double bp = frac_to_boundary_lp(xl, dxl);
      double bd = frac_to_boundary_lp(sl, dsl);
      for (int k = 0; k < nb; ++k) {
        bp = std::min(bp, frac_to_boundary_psd(X[k], dX[k]));
        bd = std::min(bd, frac_to_boundary_psd(S[k], dS[k]));
      }
      bp = std::min(1.0, 0.98 * bp);
      bd = std::min(1.0, 0.98 * bd);
      if (bp < 0.01 && bd < 0.01) {
        // poor combined step: fall back to a pure centering direction
        compute_direction(mu, false, dy, dX, dS, dxl, dsl);
        bp = frac_to_boundary_lp(xl, dxl);
        bd = frac_to_boundary_lp(sl, dsl);
        for (int k = 0; k < nb; ++k) {
          bp = std::min(bp, frac_to_boundary_psd(X[k], dX[k]));
          bd = std::min(bd, frac_to_boundary_psd(S[k], dS[k]));
        }
        bp = std::min(1.0, 0.9 * bp);
        bd = std::min(1.0, 0.9 * bd);
      }
      if (bp < 1e-10 && bd < 1e-10) {
        res.status = SolveStatus::NumericalFailure;
        res.message = "step lengths collapsed";
        res.y = y;
        res.lp_dual = xl;
        return res;
      }

      // verified update: back off until both cones stay PD under roundoff
      bool stepped = false;
      for (int attempt = 0; attempt < 40 && !stepped; ++attempt) {
        bool ok = true;
        for (int k = 0; k < nb && ok; ++k) {
          RMat xn = X[k] + bp * dX[k];
          RMat sn = S[k] + bd * dS[k];
          xn = 0.5 * (xn + xn.transpose());
          sn = 0.5 * (sn + sn.transpose());
          if (Eigen::LLT<RMat>(xn).info() != Eigen::Success ||
              Eigen::LLT<RMat>(sn).info() != Eigen::Success)
            ok = false;
        }
        if (ok) {
          for (int r = 0; r < nl && ok; ++r)
            if (xl[r] + bp * dxl[r] <= 0.0 || sl[r] + bd * dsl[r] <= 0.0) ok = false;
        }
        if (ok) {
          stepped = true;
        } else {
          bp *= 0.6;
          bd *= 0.6;
          if (bp < 1e-12 && bd < 1e-12) break;
        }
      }
      if (!stepped) {
        res.status = SolveStatus::NumericalFailure;
        res.message = "step lengths collapsed";
        res.y = y;
        res.lp_dual = xl;
        return res;
      }

      for (int k = 0; k < nb; ++k) {
        X[k] += bp * dX[k];
        S[k] += bd * dS[k];
        X[k] = 0.5 * (X[k] + X[k].transpose());
        S[k] = 0.5 * (S[k] + S[k].transpose());
      }
      xl += bp * dxl;
      sl += bd * dsl;
      y += bd * dy;
    }
    if (best_merit < std::max({res.rel_gap, res.rel_pinf, res.rel_dinf})) {
      best.status = SolveStatus::MaxIters;
      best.message = "iteration limit reached";
      return best;
    }
    res.status = SolveStatus::MaxIters;
    res.message = "iteration limit reached";
    res.y = y;
    res.lp_dual = xl;
    return res;
  }

 private:
  const Problem& p_;
  Options opt_;
};

// Lower the public complex-Hermitian problem to the embedded real form.
inline Problem lower(const ConicProblem& cp) {
  Problem p;
  p.n = cp.vars.size();
  p.b = RVec::Zero(p.n);
  for (auto& [i, c] : cp.objective.terms) p.b[i] += c;
  for (auto& blk : cp.blocks) {
    Block b;
    b.dim = 2 * blk.dim;
    b.c = real_embed(blk.constant);
    for (auto& [i, m] : blk.coeff) b.a.emplace_back(i, RMat(-real_embed(m)));
    p.blocks.push_back(std::move(b));
  }
  p.lp.c.resize(cp.rows.size());
  p.lp.a.resize(cp.rows.size());
  for (size_t r = 0; r < cp.rows.size(); ++r) {
    p.lp.c[r] = cp.rows[r].constant;
    for (auto& [i, c] : cp.rows[r].terms) p.lp.a[r].emplace_back(i, -c);
  }
  return p;
}

}  // namespace ipm

// Interior-point solve of a pure SDP (no log terms). Status, duals of tagged
// rows and KKT residuals per the conic contract.
inline ConicSolution solve_sdp(const ConicProblem& cp, double feas_tol = 1e-8,
                               double gap_tol = 1e-8, int max_iters = 100) {
  if (cp.has_logs()) throw std::logic_error("solve_sdp: problem has log terms");
  ipm::Problem low = ipm::lower(cp);
  ipm::Options opt;
  opt.feas_tol = feas_tol;
  opt.gap_tol = gap_tol;
  opt.max_iters = max_iters;
  if (std::getenv("FDNOMA_IPM_TRACE"))
    opt.trace = [](int it, double po, double dob, double pinf, double dinf, double mu) {
      std::fprintf(stderr, "ipm %2d pobj %+.6e dobj %+.6e pinf %.2e dinf %.2e mu %.2e\n",
                   it, po, dob, pinf, dinf, mu);
    };
  auto r = ipm::Solver(low, opt).run();
  ConicSolution sol;
  sol.status = r.status;
  sol.x = r.y;
  sol.objective = cp.objective.eval(r.y);
  sol.feas_residual = std::max(r.rel_pinf, r.rel_dinf);
  sol.gap_residual = r.rel_gap;
  sol.iterations = r.iterations;
  sol.message = r.message;
  if (r.lp_dual.size() == (Eigen::Index)cp.rows.size())
    for (size_t i = 0; i < cp.rows.size(); ++i)
      if (!cp.row_tags[i].empty()) sol.duals[cp.row_tags[i]] += r.lp_dual[i];
  return sol;
}

}  // namespace fdnoma
