#pragma once

#include <optional>

#include "fdnoma/channel.hpp"

namespace fdnoma {

// Scheduling tuple (m, n, r, t) on one subcarrier. n / t are -1 when the
// partner role is absent (single-user scheduling, possible only for K == 1
// or J == 1 scenarios).
struct SchedTuple {
  int m = -1, n = -1, r = -1, t = -1;
  bool has_n() const { return n >= 0; }
  bool has_t() const { return t >= 0; }
};

// A full resource-allocation decision: subcarrier assignment, DL beamformers,
// AN covariances and UL powers. At most one tuple per subcarrier (C10);
// the binary map s_{m,n,r,t}^{[i]} is represented by `sched`.
struct Policy {
  int nf = 0, n_dl = 0, n_ul = 0, nt = 0;
  std::vector<std::optional<SchedTuple>> sched;  // [i]
  std::vector<std::vector<CVec>> w_dl;           // [i][m], zero when unused
  std::vector<CMat> z_an;                        // [i], Hermitian PSD
  std::vector<std::vector<double>> p_ul;         // [i][r]

  static Policy zero(const SystemConfig& cfg) {
    Policy p;
    p.nf = cfg.n_subcarriers;
    p.n_dl = cfg.n_dl_users;
    p.n_ul = cfg.n_ul_users;
    p.nt = cfg.n_antennas;
    p.sched.assign(p.nf, std::nullopt);
    p.w_dl.assign(p.nf, std::vector<CVec>(p.n_dl, CVec::Zero(p.nt)));
    p.z_an.assign(p.nf, CMat::Zero(p.nt, p.nt));
    p.p_ul.assign(p.nf, std::vector<double>(p.n_ul, 0.0));
    return p;
  }

  double dl_power(int i) const {
    double s = z_an[i].real().trace();
    if (sched[i]) {
      s += w_dl[i][sched[i]->m].squaredNorm();
      if (sched[i]->has_n()) s += w_dl[i][sched[i]->n].squaredNorm();
    }
    return s;
  }

  double total_dl_power() const {
    double s = 0.0;
    for (int i = 0; i < nf; ++i) s += dl_power(i);
    return s;
  }

  double ul_power_of_user(int u) const {
    double s = 0.0;
    for (int i = 0; i < nf; ++i)
      if (sched[i] && (sched[i]->r == u || sched[i]->t == u)) s += p_ul[i][u];
    return s;
  }
};

// Returns a description of the first violated structural constraint, or
// nullopt when the policy is structurally valid.
inline std::optional<std::string> check_policy_structure(const SystemConfig& cfg,
                                                         const Policy& p,
                                                         double tol = 1e-6) {
  if (p.nf != cfg.n_subcarriers || p.n_dl != cfg.n_dl_users || p.n_ul != cfg.n_ul_users ||
      p.nt != cfg.n_antennas)
    return "dimension mismatch";
  for (int i = 0; i < p.nf; ++i) {
    if (p.sched[i]) {
      const auto& s = *p.sched[i];
      if (s.m < 0 || s.m >= p.n_dl || (s.has_n() && s.n >= p.n_dl) || s.r < 0 ||
          s.r >= p.n_ul || (s.has_t() && s.t >= p.n_ul))
        return "C9: tuple index out of range";
      if (s.has_n() && s.n == s.m) return "C9: DL user paired with itself";
      if (s.has_t() && s.t == s.r) return "C9: UL user paired with itself";
    }
    for (int r = 0; r < p.n_ul; ++r)
      if (p.p_ul[i][r] < -tol) return "C8: negative UL power";
    double rel = std::max(1.0, p.z_an[i].cwiseAbs().maxCoeff());
    if ((p.z_an[i] - p.z_an[i].adjoint()).cwiseAbs().maxCoeff() > tol * rel)
      return "C11: Z not Hermitian";
    if (min_eigenvalue(p.z_an[i]) < -tol * rel) return "C11: Z not PSD";
  }
  if (p.total_dl_power() > cfg.p_max_dl * (1.0 + tol) + tol)
    return "C2: DL power budget exceeded";
  for (int u = 0; u < p.n_ul; ++u)
    if (p.ul_power_of_user(u) > cfg.p_max_ul[u] * (1.0 + tol) + tol)
      return "C7: UL power budget exceeded";
  return std::nullopt;
}

}  // namespace fdnoma
