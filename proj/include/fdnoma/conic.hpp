#pragma once

#include <iomanip>
#include <map>
#include <ostream>

#include "fdnoma/common.hpp"

namespace fdnoma {

// ---------------------------------------------------------------------------
// Variable space: a flat vector of real scalars. Hermitian matrix variables
// of dimension d occupy d*d coordinates: the d diagonal entries first, then
// (re, im) pairs for the strict upper triangle in column-major order.
// ---------------------------------------------------------------------------

struct HermVar {
  int offset = -1;
  int dim = 0;
  int coords() const { return dim * dim; }
};

class VarSpace {
 public:
  int size() const { return n_; }

  int add_scalar(const std::string& name) {
    names_.push_back(name);
    return n_++;
  }

  int add_scalars(const std::string& name, int count) {
    int first = n_;
    for (int k = 0; k < count; ++k) names_.push_back(name + "[" + std::to_string(k) + "]");
    n_ += count;
    return first;
  }

  HermVar add_hermitian(const std::string& name, int dim) {
    HermVar v{n_, dim};
    for (int k = 0; k < dim * dim; ++k)
      names_.push_back(name + ".c" + std::to_string(k));
    n_ += dim * dim;
    return v;
  }

  const std::string& name(int i) const { return names_[i]; }

 private:
  int n_ = 0;
  std::vector<std::string> names_;
};

// Basis matrix of local coordinate k of a Hermitian variable of dimension d.
inline CMat herm_basis(int dim, int k) {
  CMat b = CMat::Zero(dim, dim);
  if (k < dim) {
    b(k, k) = 1.0;
    return b;
  }
  int idx = (k - dim) / 2;
  bool imag = ((k - dim) % 2) != 0;
  // strict upper triangle, column-major: (0,1), (0,2), (1,2), (0,3), ...
  int q = 1, cum = 0;
  while (cum + q <= idx) cum += q++;
  int p = idx - cum;
  if (!imag) {
    b(p, q) = 1.0;
    b(q, p) = 1.0;
  } else {
    b(p, q) = Complex(0.0, 1.0);
    b(q, p) = Complex(0.0, -1.0);
  }
  return b;
}

inline CMat herm_value(const RVec& x, const HermVar& v) {
  CMat m = CMat::Zero(v.dim, v.dim);
  for (int k = 0; k < v.dim; ++k) m(k, k) = x[v.offset + k];
  int c = v.dim;
  for (int q = 1; q < v.dim; ++q)
    for (int p = 0; p < q; ++p) {
      m(p, q) = Complex(x[v.offset + c], x[v.offset + c + 1]);
      m(q, p) = std::conj(m(p, q));
      c += 2;
    }
  return m;
}

inline void set_herm(RVec& x, const HermVar& v, const CMat& m) {
  for (int k = 0; k < v.dim; ++k) x[v.offset + k] = std::real(m(k, k));
  int c = v.dim;
  for (int q = 1; q < v.dim; ++q)
    for (int p = 0; p < q; ++p) {
      x[v.offset + c] = std::real(m(p, q));
      x[v.offset + c + 1] = std::imag(m(p, q));
      c += 2;
    }
}

// ---------------------------------------------------------------------------
// Sparse affine functional over the variable space.
// ---------------------------------------------------------------------------

struct AffineForm {
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;

  // var < 0 denotes a pinned-to-zero variable and is skipped
  void add(int var, double coef) {
    if (var >= 0 && coef != 0.0) terms.emplace_back(var, coef);
  }

  // Re Tr(H * V) for a Hermitian variable block V and Hermitian H.
  void add_trace(const HermVar& v, const CMat& h, double scale = 1.0) {
    for (int k = 0; k < v.dim; ++k) add(v.offset + k, scale * std::real(h(k, k)));
    int c = v.dim;
    for (int q = 1; q < v.dim; ++q)
      for (int p = 0; p < q; ++p) {
        add(v.offset + c, scale * 2.0 * std::real(h(p, q)));
        add(v.offset + c + 1, scale * 2.0 * std::imag(h(p, q)));
        c += 2;
      }
  }

  void add_form(const AffineForm& o, double scale = 1.0) {
    for (auto& [i, c] : o.terms) add(i, scale * c);
    constant += scale * o.constant;
  }

  void compress() {
    std::sort(terms.begin(), terms.end());
    std::vector<std::pair<int, double>> out;
    for (auto& [i, c] : terms) {
      if (!out.empty() && out.back().first == i)
        out.back().second += c;
      else
        out.emplace_back(i, c);
    }
    out.erase(std::remove_if(out.begin(), out.end(),
                             [](auto& t) { return t.second == 0.0; }),
              out.end());
    terms.swap(out);
  }

  double eval(const RVec& x) const {
    double s = constant;
    for (auto& [i, c] : terms) s += c * x[i];
    return s;
  }

  void add_gradient_to(RVec& g, double scale) const {
    for (auto& [i, c] : terms) g[i] += scale * c;
  }
};

// ---------------------------------------------------------------------------
// Symbolic Hermitian PSD block, affine in the decision variables:
//   B(x) = constant + sum_i x_i * coeff_i  >= 0   (Hermitian by construction)
// ---------------------------------------------------------------------------

struct LmiBlock {
  int dim = 0;
  CMat constant;
  std::map<int, CMat> coeff;
  std::string tag;

  explicit LmiBlock(int d = 0, std::string t = "")
      : dim(d), constant(CMat::Zero(d, d)), tag(std::move(t)) {}

  CMat& coeff_of(int var) {
    auto it = coeff.find(var);
    if (it == coeff.end())
      it = coeff.emplace(var, CMat::Zero(dim, dim)).first;
    return it->second;
  }

  // Place a constant sub-matrix at block position (r0, c0); the Hermitian
  // mirror is written automatically for off-diagonal placements.
  void add_const_at(const CMat& m, int r0, int c0) {
    constant.block(r0, c0, m.rows(), m.cols()) += m;
    if (r0 != c0) constant.block(c0, r0, m.cols(), m.rows()) += m.adjoint();
  }

  void add_scalar_at(int var, const CMat& m, int r0, int c0) {
    CMat& c = coeff_of(var);
    c.block(r0, c0, m.rows(), m.cols()) += m;
    if (r0 != c0) c.block(c0, r0, m.cols(), m.rows()) += m.adjoint();
  }

  // scale * left * V * right placed at (r0, c0), with its mirror; left has
  // as many columns as V, right as many rows.
  void add_herm_at(const HermVar& v, const CMat& left, const CMat& right, int r0,
                   int c0, double scale = 1.0) {
    for (int k = 0; k < v.coords(); ++k) {
      CMat contrib = scale * (left * herm_basis(v.dim, k) * right);
      CMat& c = coeff_of(v.offset + k);
      c.block(r0, c0, contrib.rows(), contrib.cols()) += contrib;
      if (r0 != c0)
        c.block(c0, r0, contrib.cols(), contrib.rows()) += contrib.adjoint();
    }
  }

  CMat eval(const RVec& x) const {
    CMat m = constant;
    for (auto& [i, c] : coeff) m += x[i] * c;
    return m;
  }
};

// B(x) = V itself (variable PSD constraint, e.g. C11 / C12).
inline LmiBlock psd_block(const HermVar& v, std::string tag = "") {
  LmiBlock b(v.dim, std::move(tag));
  for (int k = 0; k < v.coords(); ++k) b.coeff_of(v.offset + k) = herm_basis(v.dim, k);
  return b;
}

// ---------------------------------------------------------------------------
// Problem container. Pure SDPs leave the log parts empty; the SCA subproblem
// uses them for its log-of-affine objective terms and constraint rows.
// ---------------------------------------------------------------------------

struct LogTerm {
  double weight = 0.0;  // > 0
  AffineForm arg;       // must stay strictly positive
};

// affine + sum_t w_t * log2(arg_t) >= 0
struct LogRow {
  AffineForm affine;
  std::vector<LogTerm> logs;
  std::string tag;
};

struct ConicProblem {
  VarSpace vars;
  AffineForm objective;              // maximized
  std::vector<LogTerm> obj_logs;     // + sum w * log2(arg), maximized with it
  std::vector<AffineForm> rows;      // affine >= 0
  std::vector<std::string> row_tags;
  std::vector<LogRow> log_rows;
  std::vector<LmiBlock> blocks;

  void add_row(AffineForm f, std::string tag = "") {
    f.compress();
    rows.push_back(std::move(f));
    row_tags.push_back(std::move(tag));
  }

  bool has_logs() const { return !obj_logs.empty() || !log_rows.empty(); }

  double objective_value(const RVec& x) const {
    double v = objective.eval(x);
    for (auto& t : obj_logs) v += t.weight * log2_safe(t.arg.eval(x));
    return v;
  }

  // Sparse text dump: variable table, objective, constraint rows, PSD block
  // index lists. Meant for external cross-checking of assembled problems.
  void dump(std::ostream& os) const {
    os << "conicproblem v1\n";
    os << "vars " << vars.size() << "\n";
    for (int i = 0; i < vars.size(); ++i) os << "var " << i << " " << vars.name(i) << "\n";
    os << std::setprecision(17);
    auto put_form = [&](const AffineForm& f) {
      os << f.constant;
      for (auto& [i, c] : f.terms) os << " " << i << ":" << c;
    };
    os << "objective maximize ";
    put_form(objective);
    os << "\n";
    for (auto& t : obj_logs) {
      os << "objlog " << t.weight << " ";
      put_form(t.arg);
      os << "\n";
    }
    for (size_t r = 0; r < rows.size(); ++r) {
      os << "row " << (row_tags[r].empty() ? "-" : row_tags[r]) << " ";
      put_form(rows[r]);
      os << "\n";
    }
    for (auto& lr : log_rows) {
      os << "logrow " << (lr.tag.empty() ? "-" : lr.tag) << " ";
      put_form(lr.affine);
      for (auto& t : lr.logs) {
        os << " log " << t.weight << " ";
        put_form(t.arg);
      }
      os << "\n";
    }
    for (auto& b : blocks) {
      os << "block " << (b.tag.empty() ? "-" : b.tag) << " dim " << b.dim << " nvar "
         << b.coeff.size() << "\n";
      auto put_mat = [&](const CMat& m) {
        for (int q = 0; q < m.cols(); ++q)
          for (int p = 0; p <= q; ++p) {
            Complex z = m(p, q);
            if (z != Complex(0.0, 0.0))
              os << " " << p << "," << q << ":" << std::real(z) << "+" << std::imag(z)
                 << "i";
          }
      };
      os << "  const";
      put_mat(b.constant);
      os << "\n";
      for (auto& [i, c] : b.coeff) {
        os << "  coef " << i;
        put_mat(c);
        os << "\n";
      }
    }
    os << "end\n";
  }
};

enum class SolveStatus { Optimal, Infeasible, MaxIters, NumericalFailure };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::MaxIters: return "max-iters";
    default: return "numerical-failure";
  }
}

struct ConicSolution {
  SolveStatus status = SolveStatus::NumericalFailure;
  RVec x;
  double objective = 0.0;
  std::map<std::string, double> duals;  // tag -> summed multiplier
  double feas_residual = 0.0;
  double gap_residual = 0.0;
  int iterations = 0;
  std::string message;
};

// ---------------------------------------------------------------------------
// Rank-one recovery (Theorem 1 acceptance path).
// ---------------------------------------------------------------------------

struct RankOneResult {
  CVec w;
  bool ok = false;
  double ratio = 0.0;  // lambda_2 / lambda_1
};

inline RankOneResult extract_rank_one(const CMat& wt, double tol = 1e-5) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(wt));
  const auto& ev = es.eigenvalues();
  int d = wt.rows();
  double l1 = ev[d - 1];
  double lmin = ev[0];
  if (l1 <= 0.0) {
    if (lmin < -tol * std::max(1.0, std::abs(l1))) throw std::runtime_error("not PSD");
    return {CVec::Zero(d), true, 0.0};
  }
  if (lmin < -tol * l1) throw std::runtime_error("not PSD");
  double l2 = d >= 2 ? std::max(0.0, ev[d - 2]) : 0.0;
  RankOneResult r;
  r.ratio = l2 / l1;
  r.ok = r.ratio <= tol;
  r.w = std::sqrt(l1) * es.eigenvectors().col(d - 1);
  return r;
}

// Gaussian randomization fallback for non-rank-one blocks: draws candidates
// w ~ CN(0, W), rescales to Tr(W), keeps the one maximizing quality(w).
template <typename Quality>
inline CVec gaussian_randomization(const CMat& wt, Quality quality, Rng& rng,
                                   int samples = 100) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(wt));
  CMat root = es.eigenvectors() *
              es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
              es.eigenvectors().adjoint();
  double power = std::max(0.0, std::real(wt.trace()));
  CVec best = extract_rank_one(wt, 1e30).w;
  if (best.squaredNorm() > 0.0) best *= std::sqrt(power / best.squaredNorm());
  double best_q = quality(best);
  for (int s = 0; s < samples; ++s) {
    CVec cand = root * rng.cnormal_vec(wt.rows());
    double nrm = cand.squaredNorm();
    if (nrm <= 0.0) continue;
    cand *= std::sqrt(power / nrm);
    double q = quality(cand);
    if (q > best_q) {
      best_q = q;
      best = cand;
    }
  }
  return best;
}

}  // namespace fdnoma
