#pragma once

#include "fdnoma/lmi.hpp"
#include "fdnoma/rates.hpp"

namespace fdnoma {

// ---------------------------------------------------------------------------
// Scheduling tuple table. Enumerates the schedulable (i, m, n, r, t)
// combinations in the canonical Delta order (i outermost, then m, n, r, t).
// Self-pairings m == n and r == t are not schedulable; when K == 1 or J == 1
// degenerate single-user tuples (absent partner role) are enumerated instead.
// ---------------------------------------------------------------------------

struct TupleRef {
  int i = 0, m = 0, n = -1, r = 0, t = -1;
  bool has_n() const { return n >= 0; }
  bool has_t() const { return t >= 0; }
  SchedTuple sched() const { return {m, n, r, t}; }
};

class TupleTable {
 public:
  static TupleTable build(const SystemConfig& cfg) {
    TupleTable tb;
    tb.nf_ = cfg.n_subcarriers;
    tb.k_ = cfg.n_dl_users;
    tb.j_ = cfg.n_ul_users;
    tb.first_.assign(tb.nf_ + 1, 0);
    for (int i = 0; i < tb.nf_; ++i) {
      for (int m = 0; m < tb.k_; ++m) {
        std::vector<int> ns = tb.k_ == 1 ? std::vector<int>{-1} : std::vector<int>{};
        if (tb.k_ > 1)
          for (int n = 0; n < tb.k_; ++n)
            if (n != m) ns.push_back(n);
        for (int n : ns) {
          std::vector<int> rs;
          for (int r = 0; r < tb.j_; ++r) rs.push_back(r);
          for (int r : rs) {
            std::vector<int> ts = tb.j_ == 1 ? std::vector<int>{-1} : std::vector<int>{};
            if (tb.j_ > 1)
              for (int t = 0; t < tb.j_; ++t)
                if (t != r) ts.push_back(t);
            for (int t : ts) tb.tuples_.push_back({i, m, n, r, t});
          }
        }
      }
      tb.first_[i + 1] = (int)tb.tuples_.size();
    }
    return tb;
  }

  int count() const { return (int)tuples_.size(); }
  const TupleRef& operator[](int k) const { return tuples_[k]; }
  int first_of(int i) const { return first_[i]; }
  int last_of(int i) const { return first_[i + 1]; }
  int count_of(int i) const { return first_[i + 1] - first_[i]; }

  // 1-based index in the paper's full N_F*K^2*J^2 enumeration
  //   Delta = (i-1)K^2J^2 + (m-1)KJ^2 + (n-1)J^2 + (r-1)J + t.
  long full_delta(int k) const {
    const auto& tp = tuples_[k];
    long kk = k_, jj = j_;
    return (long)tp.i * kk * kk * jj * jj + (long)tp.m * kk * jj * jj +
           (long)std::max(tp.n, 0) * jj * jj + (long)tp.r * jj + std::max(tp.t, 0) + 1;
  }

 private:
  int nf_ = 0, k_ = 0, j_ = 0;
  std::vector<TupleRef> tuples_;
  std::vector<int> first_;
};

// ---------------------------------------------------------------------------
// Unit normalization. Raw Table-I units span ~170 dB between transmit powers
// and noise floors, which destroys interior-point conditioning. Channels are
// divided by sqrt(chan_scale) and powers multiplied by power_scale; every
// SINR, rate and leakage value is invariant under the joint rescaling.
// ---------------------------------------------------------------------------

struct ScaledScenario {
  SystemConfig cfg;  // scaled powers/noises
  ChannelSet ch;     // scaled channels/radii
  std::vector<double> w_dl, w_ul;
  double chan_scale = 1.0;   // divide channel amplitudes by sqrt of this
  double power_scale = 1.0;  // multiply powers by this

  double to_physical_power(double p) const { return p / power_scale; }
  double to_scaled_power(double p) const { return p * power_scale; }
};

inline ScaledScenario scale_instance(const Instance& inst) {
  ScaledScenario s;
  s.cfg = inst.cfg;
  s.ch = inst.ch;
  s.w_dl = inst.w_dl;
  s.w_ul = inst.w_ul;

  double cs = 0.0;
  for (int i = 0; i < inst.ch.nf; ++i) {
    for (auto& v : inst.ch.h[i]) cs = std::max(cs, v.squaredNorm() / inst.ch.nt);
    for (auto& v : inst.ch.g[i]) cs = std::max(cs, v.squaredNorm() / inst.ch.nt);
    cs = std::max(cs, inst.ch.l_hat[i].squaredNorm() / (inst.ch.nt * inst.ch.n_eve));
  }
  if (cs <= 0.0) cs = 1.0;
  double p_ref = inst.cfg.p_max_dl;
  for (double p : inst.cfg.p_max_ul) p_ref = std::max(p_ref, p);
  if (p_ref <= 0.0) p_ref = 1.0;
  s.chan_scale = cs;
  s.power_scale = 1.0 / p_ref;
  double noise_scale = s.power_scale / cs;

  double ca = 1.0 / std::sqrt(cs);
  for (int i = 0; i < s.ch.nf; ++i) {
    for (auto& v : s.ch.h[i]) v *= ca;
    for (auto& v : s.ch.g[i]) v *= ca;
    for (auto& row : s.ch.f[i])
      for (auto& c : row) c *= ca;
    s.ch.h_si[i] *= ca;
    s.ch.l_hat[i] *= ca;
    for (auto& v : s.ch.e_hat[i]) v *= ca;
    s.ch.eps_dl[i] *= ca;
    for (auto& e : s.ch.eps_ul[i]) e *= ca;
  }
  s.cfg.p_max_dl *= s.power_scale;
  for (auto& p : s.cfg.p_max_ul) p *= s.power_scale;
  for (auto& n : s.cfg.noise_dl) n *= noise_scale;
  s.cfg.noise_bs *= noise_scale;
  s.cfg.noise_eve *= noise_scale;
  return s;
}

// ---------------------------------------------------------------------------
// Beam covariance reference: either a full Hermitian variable block or a
// nonnegative scalar power on a fixed unit-trace direction (baselines 1/2).
// ---------------------------------------------------------------------------

struct BeamRef {
  HermVar herm;
  int scalar = -1;
  CMat fixed_cov;  // unit-trace rank-one direction when scalar-parameterized
  bool valid() const { return herm.dim > 0 || scalar >= 0; }
  bool is_herm() const { return herm.dim > 0; }
};

inline void add_beam_trace(AffineForm& f, const BeamRef& b, const CMat& h,
                           double scale = 1.0) {
  if (!b.valid()) return;
  if (b.is_herm())
    f.add_trace(b.herm, h, scale);
  else
    f.add(b.scalar, scale * std::real((h * b.fixed_cov).trace()));
}

inline CMat beam_value(const RVec& x, const BeamRef& b) {
  if (!b.valid()) return CMat();
  if (b.is_herm()) return herm_value(x, b.herm);
  return x[b.scalar] * b.fixed_cov;
}

// Per-tuple decision variables shared by the projection SDP and the SCA
// subproblem (the monotonic-reformulation W-tilde / P-tilde variables plus
// the robust-constraint slacks).
struct TupleVars {
  BeamRef wt_m, wt_n;          // s-scaled beam covariances
  int pt_r = -1, pt_t = -1;    // s-scaled UL powers
  int rho_m = -1, rho_n = -1;  // C5bar slacks per DL role
  HermVar ms_r, ms_t;          // C6 slack matrices per UL role
  int alpha_r = -1, alpha_t = -1;
  int beta_r = -1, beta_t = -1;
};

struct ModelVars {
  std::vector<HermVar> z;      // AN covariance per subcarrier
  std::vector<TupleVars> tv;   // per tuple
};

// Optional fixed beam directions (unit vectors) per (i, m); empty -> full
// Hermitian beam variables.
using FixedDirections = std::vector<std::vector<CVec>>;

inline ModelVars add_model_vars(ConicProblem& cp, const TupleTable& tb,
                                const ScaledScenario& sc,
                                const FixedDirections* dirs = nullptr) {
  ModelVars mv;
  int nt = sc.ch.nt, m_eve = sc.ch.n_eve;
  bool dl_power = sc.cfg.p_max_dl > 0.0;  // zero budgets pin variables to 0
  for (int i = 0; i < sc.ch.nf; ++i)
    mv.z.push_back(dl_power
                       ? cp.vars.add_hermitian("Z[" + std::to_string(i) + "]", nt)
                       : HermVar{});
  mv.tv.resize(tb.count());
  for (int k = 0; k < tb.count(); ++k) {
    const auto& tp = tb[k];
    auto& tv = mv.tv[k];
    std::string base = "t" + std::to_string(k);
    auto make_beam = [&](int user, const char* role) {
      BeamRef b;
      if (!dl_power) return b;
      if (dirs) {
        CVec d = (*dirs)[tp.i][user].normalized();
        b.fixed_cov = d * d.adjoint();
        b.scalar = cp.vars.add_scalar(base + ".q" + role);
      } else {
        b.herm = cp.vars.add_hermitian(base + ".W" + role, nt);
      }
      return b;
    };
    tv.wt_m = make_beam(tp.m, "m");
    if (tp.has_n()) tv.wt_n = make_beam(tp.n, "n");
    if (sc.cfg.p_max_ul[tp.r] > 0.0) tv.pt_r = cp.vars.add_scalar(base + ".Pr");
    if (tp.has_t() && sc.cfg.p_max_ul[tp.t] > 0.0)
      tv.pt_t = cp.vars.add_scalar(base + ".Pt");
    if (tv.wt_m.valid()) tv.rho_m = cp.vars.add_scalar(base + ".rho_m");
    if (tv.wt_n.valid()) tv.rho_n = cp.vars.add_scalar(base + ".rho_n");
    if (tv.pt_r >= 0) {
      tv.ms_r = cp.vars.add_hermitian(base + ".Ms_r", m_eve);
      tv.alpha_r = cp.vars.add_scalar(base + ".alpha_r");
      tv.beta_r = cp.vars.add_scalar(base + ".beta_r");
    }
    if (tv.pt_t >= 0) {
      tv.ms_t = cp.vars.add_hermitian(base + ".Ms_t", m_eve);
      tv.alpha_t = cp.vars.add_scalar(base + ".alpha_t");
      tv.beta_t = cp.vars.add_scalar(base + ".beta_t");
    }
  }
  return mv;
}

// ---------------------------------------------------------------------------
// Numerator/denominator affine forms of the ratio variables u, v, zeta, xi.
// Row d = block*T + k (block 0..3, k the tuple index); f/g normalized by the
// row's noise constant so that ratios are unchanged but values are O(1).
// ---------------------------------------------------------------------------

struct RatioRow {
  AffineForm f, g;
  int tuple = 0;
  int block = 0;      // 0:u 1:v 2:zeta 3:xi 4:SIC decodability
  int user = 0;       // DL user for blocks 0/1, UL user for 2/3
  bool pinned = false;  // absent role; behaves as f/g == 1
  int bound_coord = -1;  // vertex coordinate this row bounds (block 4 -> u row)
};

// Ratio rows of the monotonic reformulation. With with_sic_rows an extra
// block of rows f_w/g_w = 1 + SINR of m's signal at user n is appended; the
// SIC condition C1 (via the C1a/C1b slack pair) is exactly z_u <= f_w/g_w,
// so these rows bound the u coordinates rather than coordinates of their own.
inline std::vector<RatioRow> build_ratio_rows(const ModelVars& mv, const TupleTable& tb,
                                              const ScaledScenario& sc,
                                              SicMode mode = SicMode::Noma,
                                              bool with_sic_rows = false) {
  const auto& ch = sc.ch;
  const auto& cfg = sc.cfg;
  int tcount = tb.count();
  std::vector<RatioRow> rows((with_sic_rows ? 5 : 4) * tcount);

  for (int k = 0; k < tcount; ++k) {
    const auto& tp = tb[k];
    const auto& tv = mv.tv[k];
    const HermVar& z = mv.z[tp.i];
    CMat hm = ch.h[tp.i][tp.m] * ch.h[tp.i][tp.m].adjoint();

    // u row: DL user m (SIC decoder order: m treats everything as noise)
    {
      RatioRow& row = rows[k];
      row = {AffineForm{}, AffineForm{}, k, 0, tp.m, false, k};
      auto interference = [&](AffineForm& f) {
        if (tp.has_n()) add_beam_trace(f, tv.wt_n, hm);
        f.add_trace(z, hm);
        f.add(tv.pt_r, ch.f2(tp.i, tp.r, tp.m));
        if (tp.has_t()) f.add(tv.pt_t, ch.f2(tp.i, tp.t, tp.m));
        f.constant += cfg.noise_dl[tp.m];
      };
      interference(row.g);
      interference(row.f);
      add_beam_trace(row.f, tv.wt_m, hm);
      row.f.compress();
      row.g.compress();
    }
    // v row: DL user n (m's signal removed by SIC under Noma)
    {
      RatioRow& row = rows[tcount + k];
      row = {AffineForm{}, AffineForm{}, k, 1, std::max(tp.n, 0), !tp.has_n()};
      if (tp.has_n()) {
        CMat hn = ch.h[tp.i][tp.n] * ch.h[tp.i][tp.n].adjoint();
        auto interference = [&](AffineForm& f) {
          f.add_trace(z, hn);
          f.add(tv.pt_r, ch.f2(tp.i, tp.r, tp.n));
          if (tp.has_t()) f.add(tv.pt_t, ch.f2(tp.i, tp.t, tp.n));
          if (mode == SicMode::NoSic) add_beam_trace(f, tv.wt_m, hn);
          f.constant += cfg.noise_dl[tp.n];
        };
        interference(row.g);
        interference(row.f);
        add_beam_trace(row.f, tv.wt_n, hn);
        row.f.compress();
        row.g.compress();
      }
    }
    // zeta row: UL user r decoded first at the BS
    CVec vr = mrc_receiver(ch, tp.i, tp.r);
    CMat dv = CMat::Zero(ch.nt, ch.nt);
    for (int a = 0; a < ch.nt; ++a) dv(a, a) = std::norm(vr[a]);
    CMat si_r = cfg.si_constant * (ch.h_si[tp.i].adjoint() * dv * ch.h_si[tp.i]);
    {
      RatioRow& row = rows[2 * tcount + k];
      row = {AffineForm{}, AffineForm{}, k, 2, tp.r, false};
      auto interference = [&](AffineForm& f) {
        if (tp.has_t())
          f.add(tv.pt_t, std::norm(Complex(ch.g[tp.i][tp.t].adjoint() * vr)));
        add_beam_trace(f, tv.wt_m, si_r);
        if (tp.has_n()) add_beam_trace(f, tv.wt_n, si_r);
        f.add_trace(z, si_r);
        f.constant += cfg.noise_bs;  // sigma_BS^2 ||v_r||^2, unit-norm MRC
      };
      interference(row.g);
      interference(row.f);
      row.f.add(tv.pt_r, ch.g[tp.i][tp.r].squaredNorm());
      row.f.compress();
      row.g.compress();
    }
    // xi row: UL user t decoded after r's signal is cancelled (Noma)
    {
      RatioRow& row = rows[3 * tcount + k];
      row = {AffineForm{}, AffineForm{}, k, 3, std::max(tp.t, 0), !tp.has_t()};
      if (tp.has_t()) {
        CVec vt = mrc_receiver(ch, tp.i, tp.t);
        CMat dvt = CMat::Zero(ch.nt, ch.nt);
        for (int a = 0; a < ch.nt; ++a) dvt(a, a) = std::norm(vt[a]);
        CMat si_t = cfg.si_constant * (ch.h_si[tp.i].adjoint() * dvt * ch.h_si[tp.i]);
        auto interference = [&](AffineForm& f) {
          add_beam_trace(f, tv.wt_m, si_t);
          if (tp.has_n()) add_beam_trace(f, tv.wt_n, si_t);
          f.add_trace(z, si_t);
          if (mode == SicMode::NoSic)
            f.add(tv.pt_r, std::norm(Complex(ch.g[tp.i][tp.r].adjoint() * vt)));
          f.constant += cfg.noise_bs;
        };
        interference(row.g);
        interference(row.f);
        row.f.add(tv.pt_t, std::norm(Complex(ch.g[tp.i][tp.t].adjoint() * vt)));
        row.f.compress();
        row.g.compress();
      }
    }
  }
  return rows;
}

// chi_d objective weights aligned with the ratio rows.
inline RVec chi_weights(const TupleTable& tb, const ScaledScenario& sc) {
  int tcount = tb.count();
  RVec chi = RVec::Zero(4 * tcount);
  for (int k = 0; k < tcount; ++k) {
    const auto& tp = tb[k];
    chi[k] = sc.w_dl[tp.m];
    if (tp.has_n()) chi[tcount + k] = sc.w_dl[tp.n];
    chi[2 * tcount + k] = sc.w_ul[tp.r];
    if (tp.has_t()) chi[3 * tcount + k] = sc.w_ul[tp.t];
  }
  return chi;
}

// ---------------------------------------------------------------------------
// Shared constraint groups.
// ---------------------------------------------------------------------------

// C2: total DL transmit power (beams of every tuple plus AN per subcarrier).
inline void add_c2_row(ConicProblem& cp, const ModelVars& mv, const TupleTable& tb,
                       const ScaledScenario& sc) {
  AffineForm f;
  f.constant = sc.cfg.p_max_dl;
  for (int k = 0; k < tb.count(); ++k) {
    add_beam_trace(f, mv.tv[k].wt_m, CMat::Identity(sc.ch.nt, sc.ch.nt), -1.0);
    if (tb[k].has_n())
      add_beam_trace(f, mv.tv[k].wt_n, CMat::Identity(sc.ch.nt, sc.ch.nt), -1.0);
  }
  for (auto& z : mv.z)
    if (z.dim > 0) f.add_trace(z, CMat::Identity(sc.ch.nt, sc.ch.nt), -1.0);
  if (!f.terms.empty()) cp.add_row(std::move(f), "C2");
}

// C7/C8: per-user UL power budgets and nonnegativity of the P-tilde vars.
inline void add_ul_power_rows(ConicProblem& cp, const ModelVars& mv,
                              const TupleTable& tb, const ScaledScenario& sc) {
  for (int h = 0; h < sc.ch.n_ul; ++h) {
    AffineForm f;
    f.constant = sc.cfg.p_max_ul[h];
    for (int k = 0; k < tb.count(); ++k) {
      if (tb[k].r == h) f.add(mv.tv[k].pt_r, -1.0);
      if (tb[k].t == h) f.add(mv.tv[k].pt_t, -1.0);
    }
    if (!f.terms.empty()) cp.add_row(std::move(f), "C7");
  }
  for (int k = 0; k < tb.count(); ++k) {
    if (mv.tv[k].pt_r >= 0) {
      AffineForm f;
      f.add(mv.tv[k].pt_r, 1.0);
      cp.add_row(std::move(f), "C8");
    }
    if (mv.tv[k].pt_t >= 0) {
      AffineForm g;
      g.add(mv.tv[k].pt_t, 1.0);
      cp.add_row(std::move(g), "C8");
    }
  }
}

// C11/C12 PSD blocks for Z and the Hermitian beam variables (scalar beams
// get nonnegativity rows instead).
inline void add_psd_blocks(ConicProblem& cp, const ModelVars& mv, const TupleTable& tb) {
  for (auto& z : mv.z)
    if (z.dim > 0) cp.blocks.push_back(psd_block(z, "C11"));
  auto add_beam_psd = [&](const BeamRef& b) {
    if (!b.valid()) return;
    if (b.is_herm()) {
      cp.blocks.push_back(psd_block(b.herm, "C12"));
    } else {
      AffineForm f;
      f.add(b.scalar, 1.0);
      cp.add_row(std::move(f), "C12");
    }
  };
  for (int k = 0; k < tb.count(); ++k) {
    add_beam_psd(mv.tv[k].wt_m);
    add_beam_psd(mv.tv[k].wt_n);
  }
}

// C5bar / C6abar / C6bbar robust LMIs for every tuple and scheduled role,
// plus nonnegativity of the scalar slack variables.
inline void add_robust_blocks(ConicProblem& cp, const ModelVars& mv,
                              const TupleTable& tb, const ScaledScenario& sc) {
  const auto& ch = sc.ch;
  auto nonneg = [&](int var, const char* tag) {
    if (var < 0) return;
    AffineForm f;
    f.add(var, 1.0);
    cp.add_row(std::move(f), tag);
  };
  for (int k = 0; k < tb.count(); ++k) {
    const auto& tp = tb[k];
    const auto& tv = mv.tv[k];
    const HermVar& z = mv.z[tp.i];
    double eps_l = ch.eps_dl[tp.i];

    auto add_c5 = [&](const BeamRef& beam, int rho_var, int user) {
      if (!beam.valid()) return;  // zero DL budget: no leakage possible
      double theta = secrecy_threshold(sc.cfg.r_tol_dl[user]);
      if (beam.is_herm()) {
        cp.blocks.push_back(build_c5_lmi(ch.l_hat[tp.i], eps_l, beam.herm, z, rho_var,
                                         theta, sc.cfg.noise_eve));
      } else {
        // scalar beam: subtract q * B^H D B instead of the Hermitian sandwich
        LmiBlock blk =
            build_c5_lmi(ch.l_hat[tp.i], eps_l, HermVar{0, 0}, z, rho_var, theta,
                         sc.cfg.noise_eve);
        int m = ch.n_eve, nt = ch.nt;
        CMat b_l(nt, m + nt);
        b_l.leftCols(m) = ch.l_hat[tp.i];
        b_l.rightCols(nt) = CMat::Identity(nt, nt);
        blk.add_scalar_at(beam.scalar, CMat(-(b_l.adjoint() * beam.fixed_cov * b_l)),
                          0, 0);
        cp.blocks.push_back(std::move(blk));
      }
      nonneg(rho_var, "slack");
    };
    add_c5(tv.wt_m, tv.rho_m, tp.m);
    if (tp.has_n()) add_c5(tv.wt_n, tv.rho_n, tp.n);

    auto add_c6 = [&](int pt_var, const HermVar& ms, int alpha, int beta, int user) {
      if (pt_var < 0) return;  // zero UL budget: no leakage possible
      double theta = secrecy_threshold(sc.cfg.r_tol_ul[user]);
      auto blocks = build_c6_lmis(ch.e_hat[tp.i][user], ch.eps_ul[tp.i][user],
                                  ch.l_hat[tp.i], eps_l, pt_var, z, ms, alpha, beta,
                                  theta, sc.cfg.noise_eve);
      cp.blocks.push_back(std::move(blocks.c6a));
      cp.blocks.push_back(std::move(blocks.c6b));
      nonneg(alpha, "slack");
      nonneg(beta, "slack");
    };
    add_c6(tv.pt_r, tv.ms_r, tv.alpha_r, tv.beta_r, tp.r);
    if (tp.has_t()) add_c6(tv.pt_t, tv.ms_t, tv.alpha_t, tv.beta_t, tp.t);
  }
}

// Read (W, p, Z) out of a solution vector for one tuple choice per
// subcarrier, undo the unit scaling, and build a physical Policy.
inline Policy policy_from_solution(const RVec& x, const ModelVars& mv,
                                   const TupleTable& tb, const ScaledScenario& sc,
                                   const Instance& inst,
                                   const std::vector<int>& chosen_tuple,
                                   double rank_one_tol = 1e-5,
                                   bool* rank_one_ok = nullptr) {
  Policy p = Policy::zero(inst.cfg);
  double ps = std::sqrt(1.0 / sc.power_scale);
  Rng rng(0xfdb0);
  if (rank_one_ok) *rank_one_ok = true;
  for (int i = 0; i < inst.cfg.n_subcarriers; ++i) {
    if (mv.z[i].dim > 0) p.z_an[i] = herm_value(x, mv.z[i]) / sc.power_scale;
    int k = chosen_tuple[i];
    if (k < 0) continue;
    const auto& tp = tb[k];
    p.sched[i] = tp.sched();
    auto extract = [&](const BeamRef& b, int user) {
      if (!b.valid()) return;
      CMat wt = beam_value(x, b);
      auto r1 = extract_rank_one(wt, rank_one_tol);
      CVec w = r1.w;
      if (!r1.ok) {
        if (rank_one_ok) *rank_one_ok = false;
        w = gaussian_randomization(
            wt,
            [&](const CVec& c) {
              return std::norm(Complex(sc.ch.h[i][user].adjoint() * c));
            },
            rng);
      }
      p.w_dl[i][user] = ps * w;
    };
    extract(mv.tv[k].wt_m, tp.m);
    if (tp.has_n()) extract(mv.tv[k].wt_n, tp.n);
    if (mv.tv[k].pt_r >= 0)
      p.p_ul[i][tp.r] = std::max(0.0, x[mv.tv[k].pt_r]) / sc.power_scale;
    if (tp.has_t() && mv.tv[k].pt_t >= 0)
      p.p_ul[i][tp.t] = std::max(0.0, x[mv.tv[k].pt_t]) / sc.power_scale;
  }
  return p;
}

}  // namespace fdnoma
