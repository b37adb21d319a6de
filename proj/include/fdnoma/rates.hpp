#pragma once

#include "fdnoma/policy.hpp"

namespace fdnoma {

// Noma: SIC at DL user n and at the BS (paper decoding order).
// NoSic: all multiuser interference treated as noise (baseline scheme 2).
enum class SicMode { Noma, NoSic };

// Unit-norm MRC receive vector for UL user r on subcarrier i.
inline CVec mrc_receiver(const ChannelSet& ch, int i, int r) {
  double n = ch.g[i][r].norm();
  if (!(n > 0.0)) throw std::runtime_error("degenerate UL channel");
  return ch.g[i][r] / n;
}

namespace detail {

inline double quad(const CVec& a, const CMat& z, const CVec& b) {
  return std::real(Complex(a.adjoint() * (z * b)));
}

// rho * v^H Diag(H_SI (W_m + W_n + Z) H_SI^H) v
inline double residual_si(const ChannelSet& ch, const Policy& p, int i, const CVec& v,
                          double rho) {
  const auto& s = *p.sched[i];
  CMat cov = p.z_an[i];
  cov += p.w_dl[i][s.m] * p.w_dl[i][s.m].adjoint();
  if (s.has_n()) cov += p.w_dl[i][s.n] * p.w_dl[i][s.n].adjoint();
  CMat prop = ch.h_si[i] * cov * ch.h_si[i].adjoint();
  double acc = 0.0;
  for (int k = 0; k < v.size(); ++k) acc += std::norm(v[k]) * std::real(prop(k, k));
  return rho * acc;
}

inline double logdet_psd(const CMat& a) {
  Eigen::LLT<CMat> llt(a);
  if (llt.info() != Eigen::Success) throw std::runtime_error("logdet: matrix not PD");
  double s = 0.0;
  for (int k = 0; k < a.rows(); ++k) s += std::log(std::real(llt.matrixL()(k, k)));
  return 2.0 * s;
}

}  // namespace detail

// Achievable DL rates of the scheduled pair on subcarrier i (Eqs. 5-6 style).
inline std::pair<double, double> dl_rates(const ChannelSet& ch, const Policy& p, int i,
                                          const SystemConfig& cfg,
                                          SicMode mode = SicMode::Noma) {
  const auto& s = *p.sched[i];
  const CVec& hm = ch.h[i][s.m];
  double pr = p.p_ul[i][s.r];
  double pt = s.has_t() ? p.p_ul[i][s.t] : 0.0;

  double den_m = detail::quad(hm, p.z_an[i], hm) + pr * ch.f2(i, s.r, s.m) +
                 (s.has_t() ? pt * ch.f2(i, s.t, s.m) : 0.0) + cfg.noise_dl[s.m];
  if (s.has_n()) den_m += std::norm(Complex(hm.adjoint() * p.w_dl[i][s.n]));
  double sig_m = std::norm(Complex(hm.adjoint() * p.w_dl[i][s.m]));
  double rate_m = log2_safe(1.0 + sig_m / den_m);

  double rate_n = 0.0;
  if (s.has_n()) {
    const CVec& hn = ch.h[i][s.n];
    double den_n = detail::quad(hn, p.z_an[i], hn) + pr * ch.f2(i, s.r, s.n) +
                   (s.has_t() ? pt * ch.f2(i, s.t, s.n) : 0.0) + cfg.noise_dl[s.n];
    if (mode == SicMode::NoSic)
      den_n += std::norm(Complex(hn.adjoint() * p.w_dl[i][s.m]));
    double sig_n = std::norm(Complex(hn.adjoint() * p.w_dl[i][s.n]));
    rate_n = log2_safe(1.0 + sig_n / den_n);
  }
  return {rate_m, rate_n};
}

// Achievable UL rates via MRC-SIC reception at the FD BS (Eqs. 7-8 style).
inline std::pair<double, double> ul_rates(const ChannelSet& ch, const Policy& p, int i,
                                          const SystemConfig& cfg,
                                          SicMode mode = SicMode::Noma) {
  const auto& s = *p.sched[i];
  double rho = cfg.si_constant;
  CVec vr = mrc_receiver(ch, i, s.r);
  double pr = p.p_ul[i][s.r];
  double pt = s.has_t() ? p.p_ul[i][s.t] : 0.0;

  double den_r = detail::residual_si(ch, p, i, vr, rho) + cfg.noise_bs * vr.squaredNorm();
  if (s.has_t()) den_r += pt * std::norm(Complex(ch.g[i][s.t].adjoint() * vr));
  double rate_r = log2_safe(1.0 + pr * std::norm(Complex(ch.g[i][s.r].adjoint() * vr)) / den_r);

  double rate_t = 0.0;
  if (s.has_t()) {
    CVec vt = mrc_receiver(ch, i, s.t);
    double den_t = detail::residual_si(ch, p, i, vt, rho) + cfg.noise_bs * vt.squaredNorm();
    if (mode == SicMode::NoSic)
      den_t += pr * std::norm(Complex(ch.g[i][s.r].adjoint() * vt));
    rate_t = log2_safe(1.0 + pt * std::norm(Complex(ch.g[i][s.t].adjoint() * vt)) / den_t);
  }
  return {rate_r, rate_t};
}

// SIC feasibility value J of Eq. 10: difference between the log-SINR of m's
// signal at user m and at user n. C1 requires J <= 0 on scheduled tuples.
inline double sic_condition(const ChannelSet& ch, const Policy& p, int i,
                            const SystemConfig& cfg) {
  const auto& s = *p.sched[i];
  if (!s.has_n()) return 0.0;
  const CVec& hm = ch.h[i][s.m];
  const CVec& hn = ch.h[i][s.n];
  double pr = p.p_ul[i][s.r];
  double pt = s.has_t() ? p.p_ul[i][s.t] : 0.0;

  double den_m = std::norm(Complex(hm.adjoint() * p.w_dl[i][s.n])) +
                 detail::quad(hm, p.z_an[i], hm) + pr * ch.f2(i, s.r, s.m) +
                 (s.has_t() ? pt * ch.f2(i, s.t, s.m) : 0.0) + cfg.noise_dl[s.m];
  double den_n = std::norm(Complex(hn.adjoint() * p.w_dl[i][s.n])) +
                 detail::quad(hn, p.z_an[i], hn) + pr * ch.f2(i, s.r, s.n) +
                 (s.has_t() ? pt * ch.f2(i, s.t, s.n) : 0.0) + cfg.noise_dl[s.n];
  double sinr_at_m = std::norm(Complex(hm.adjoint() * p.w_dl[i][s.m])) / den_m;
  double sinr_at_n = std::norm(Complex(hn.adjoint() * p.w_dl[i][s.m])) / den_n;
  return log2_safe(1.0 + sinr_at_m) - log2_safe(1.0 + sinr_at_n);
}

// Eavesdropper capacity for a DL beam w against the (true) channel L (Eq. 11).
inline double eve_capacity_dl(const CMat& l_true, const CVec& w, const CMat& z_an,
                              double noise_eve) {
  int m = l_true.cols();
  CMat x = hermitize(l_true.adjoint() * z_an * l_true) + noise_eve * CMat::Identity(m, m);
  CVec lw = l_true.adjoint() * w;
  CMat xq = x + lw * lw.adjoint();
  return (detail::logdet_psd(xq) - detail::logdet_psd(x)) / kLn2;
}

// Eavesdropper capacity for UL power P_r against true channels (Eq. 12).
inline double eve_capacity_ul(const CMat& l_true, const CVec& e_true, double p_r,
                              const CMat& z_an, double noise_eve) {
  int m = l_true.cols();
  CMat x = hermitize(l_true.adjoint() * z_an * l_true) + noise_eve * CMat::Identity(m, m);
  CMat xq = x + p_r * (e_true * e_true.adjoint());
  return (detail::logdet_psd(xq) - detail::logdet_psd(x)) / kLn2;
}

struct SubcarrierRates {
  SchedTuple tuple;
  double dl_m = 0.0, dl_n = 0.0, ul_r = 0.0, ul_t = 0.0;
  double weighted = 0.0;  // Eq. 9 contribution
};

struct RateBreakdown {
  std::vector<SubcarrierRates> per_subcarrier;                // [i], zero when idle
  std::vector<double> dl_user_total, ul_user_total;           // Eqs. 13-14 totals
  std::vector<std::vector<double>> dl_leak, ul_leak;          // [i][user] worst-case sampled
  std::vector<double> dl_secrecy, ul_secrecy;                 // sum_i [R - C]^+
  double objective = 0.0;                                     // weighted system throughput
  double secrecy_throughput() const {
    double s = 0.0;
    for (double v : dl_secrecy) s += v;
    for (double v : ul_secrecy) s += v;
    return s;
  }
};

struct EvalOptions {
  SicMode mode = SicMode::Noma;
  int eve_samples = 1000;       // worst-case sampling of the uncertainty balls
  std::uint64_t eve_seed = 1;
  // When set, leakage is evaluated against these true channels instead of
  // sampled ones (size nf each).
  const std::vector<CMat>* true_l = nullptr;
  const std::vector<std::vector<CVec>>* true_e = nullptr;
};

// Aggregates per-subcarrier rates into user totals, the weighted throughput
// objective and sampled worst-case secrecy rates.
inline RateBreakdown evaluate_policy(const Instance& inst, const Policy& p,
                                     const EvalOptions& opt = {}) {
  if (auto err = check_policy_structure(inst.cfg, p)) throw std::runtime_error(*err);
  const auto& ch = inst.ch;
  RateBreakdown rb;
  rb.per_subcarrier.resize(p.nf);
  rb.dl_user_total.assign(p.n_dl, 0.0);
  rb.ul_user_total.assign(p.n_ul, 0.0);
  rb.dl_leak.assign(p.nf, std::vector<double>(p.n_dl, 0.0));
  rb.ul_leak.assign(p.nf, std::vector<double>(p.n_ul, 0.0));
  rb.dl_secrecy.assign(p.n_dl, 0.0);
  rb.ul_secrecy.assign(p.n_ul, 0.0);

  std::vector<std::vector<double>> dl_rate_i(p.nf, std::vector<double>(p.n_dl, 0.0));
  std::vector<std::vector<double>> ul_rate_i(p.nf, std::vector<double>(p.n_ul, 0.0));

  for (int i = 0; i < p.nf; ++i) {
    if (!p.sched[i]) continue;
    const auto& s = *p.sched[i];
    auto& sr = rb.per_subcarrier[i];
    sr.tuple = s;
    std::tie(sr.dl_m, sr.dl_n) = dl_rates(ch, p, i, inst.cfg, opt.mode);
    std::tie(sr.ul_r, sr.ul_t) = ul_rates(ch, p, i, inst.cfg, opt.mode);
    sr.weighted = inst.w_dl[s.m] * sr.dl_m + inst.w_ul[s.r] * sr.ul_r;
    if (s.has_n()) sr.weighted += inst.w_dl[s.n] * sr.dl_n;
    if (s.has_t()) sr.weighted += inst.w_ul[s.t] * sr.ul_t;
    rb.objective += sr.weighted;
    dl_rate_i[i][s.m] += sr.dl_m;
    rb.dl_user_total[s.m] += sr.dl_m;
    ul_rate_i[i][s.r] += sr.ul_r;
    rb.ul_user_total[s.r] += sr.ul_r;
    if (s.has_n()) {
      dl_rate_i[i][s.n] += sr.dl_n;
      rb.dl_user_total[s.n] += sr.dl_n;
    }
    if (s.has_t()) {
      ul_rate_i[i][s.t] += sr.ul_t;
      rb.ul_user_total[s.t] += sr.ul_t;
    }

    // worst-case information leakage over the CSI uncertainty balls
    int samples = (opt.true_l || opt.true_e) ? 1 : std::max(1, opt.eve_samples);
    for (int k = 0; k < samples; ++k) {
      CMat l_true;
      CVec e_r, e_t;
      if (opt.true_l) {
        l_true = (*opt.true_l)[i];
      } else {
        auto u = sample_uncertainty(ch, i, opt.eve_seed + 977u * i + k);
        l_true = ch.l_hat[i] + u.delta_l;
        e_r = ch.e_hat[i][s.r] + u.delta_e[s.r];
        if (s.has_t()) e_t = ch.e_hat[i][s.t] + u.delta_e[s.t];
      }
      if (opt.true_e) {
        e_r = (*opt.true_e)[i][s.r];
        if (s.has_t()) e_t = (*opt.true_e)[i][s.t];
      }
      auto upd = [](double& dst, double v) { dst = std::max(dst, v); };
      upd(rb.dl_leak[i][s.m],
          eve_capacity_dl(l_true, p.w_dl[i][s.m], p.z_an[i], inst.cfg.noise_eve));
      if (s.has_n())
        upd(rb.dl_leak[i][s.n],
            eve_capacity_dl(l_true, p.w_dl[i][s.n], p.z_an[i], inst.cfg.noise_eve));
      upd(rb.ul_leak[i][s.r],
          eve_capacity_ul(l_true, e_r, p.p_ul[i][s.r], p.z_an[i], inst.cfg.noise_eve));
      if (s.has_t())
        upd(rb.ul_leak[i][s.t],
            eve_capacity_ul(l_true, e_t, p.p_ul[i][s.t], p.z_an[i], inst.cfg.noise_eve));
    }
  }

  for (int i = 0; i < p.nf; ++i) {
    for (int m = 0; m < p.n_dl; ++m)
      rb.dl_secrecy[m] += std::max(0.0, dl_rate_i[i][m] - rb.dl_leak[i][m]);
    for (int r = 0; r < p.n_ul; ++r)
      rb.ul_secrecy[r] += std::max(0.0, ul_rate_i[i][r] - rb.ul_leak[i][r]);
  }
  return rb;
}

}  // namespace fdnoma
