#pragma once

#include "fdnoma/config.hpp"

namespace fdnoma {

// One realization of all channels, CSI estimates and uncertainty radii.
// Estimated eavesdropper channels L_hat / e_hat are what the solvers see;
// true eavesdropper channels live inside the bounded uncertainty balls and
// are sampled only for validation (sample_uncertainty).
struct ChannelSet {
  int nf = 0, n_dl = 0, n_ul = 0, n_eve = 0, nt = 0;

  std::vector<std::vector<CVec>> h;   // [i][m]   BS -> DL user m
  std::vector<std::vector<CVec>> g;   // [i][r]   UL user r -> BS
  std::vector<std::vector<std::vector<Complex>>> f;  // [i][r][m] UL r -> DL m
  std::vector<CMat> h_si;             // [i]      N_T x N_T self-interference
  std::vector<CMat> l_hat;            // [i]      N_T x M   BS -> eavesdroppers
  std::vector<std::vector<CVec>> e_hat;  // [i][r] M-vector  UL r -> eavesdroppers

  std::vector<double> eps_dl;              // [i]
  std::vector<std::vector<double>> eps_ul;  // [i][r]

  std::vector<double> dist_dl, dist_ul, dist_eve;  // meters

  const CVec& h_of(int i, int m) const { return h[i][m]; }
  const CVec& g_of(int i, int r) const { return g[i][r]; }
  double f2(int i, int r, int m) const { return std::norm(f[i][r][m]); }
};

namespace detail {

struct Pos {
  double x, y;
};

inline double path_gain(double d, const SystemConfig& c) {
  double dd = std::max(d, c.reference_distance);
  return std::pow(dd / c.reference_distance, -c.path_loss_exponent);
}

}  // namespace detail

// Random scenario draw. Per-entry average channel power:
//   BS-side links (h, g, L_hat):  G_ant * (d/d_ref)^-alpha
//   user-side links (f, e_hat):   (d/d_ref)^-alpha  (distance between the users)
//   SI channel: unit power, Rician with the configured K-factor.
// Deterministic for a fixed (config, seed).
inline ChannelSet generate_channels(const SystemConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  ChannelSet ch;
  ch.nf = cfg.n_subcarriers;
  ch.n_dl = cfg.n_dl_users;
  ch.n_ul = cfg.n_ul_users;
  ch.n_eve = cfg.n_eavesdroppers;
  ch.nt = cfg.n_antennas;

  auto draw_pos = [&](int n, std::vector<double>& dist) {
    std::vector<detail::Pos> ps(n);
    dist.resize(n);
    for (int u = 0; u < n; ++u) {
      double d = rng.uniform(cfg.reference_distance, cfg.max_distance);
      double th = rng.uniform(0.0, 2.0 * M_PI);
      ps[u] = {d * std::cos(th), d * std::sin(th)};
      dist[u] = d;
    }
    return ps;
  };
  auto pos_dl = draw_pos(ch.n_dl, ch.dist_dl);
  auto pos_ul = draw_pos(ch.n_ul, ch.dist_ul);
  auto pos_eve = draw_pos(ch.n_eve, ch.dist_eve);

  auto user_gain = [&](const detail::Pos& a, const detail::Pos& b) {
    double d = std::hypot(a.x - b.x, a.y - b.y);
    return detail::path_gain(d, cfg);
  };

  double kap = cfg.rician_factor;
  double los_w = std::sqrt(kap / (1.0 + kap));
  double nlos_w = std::sqrt(1.0 / (1.0 + kap));

  ch.h.resize(ch.nf);
  ch.g.resize(ch.nf);
  ch.f.resize(ch.nf);
  ch.h_si.resize(ch.nf);
  ch.l_hat.resize(ch.nf);
  ch.e_hat.resize(ch.nf);
  ch.eps_dl.resize(ch.nf);
  ch.eps_ul.assign(ch.nf, std::vector<double>(ch.n_ul, 0.0));

  for (int i = 0; i < ch.nf; ++i) {
    ch.h[i].resize(ch.n_dl);
    for (int m = 0; m < ch.n_dl; ++m) {
      double amp = std::sqrt(cfg.antenna_gain * detail::path_gain(ch.dist_dl[m], cfg));
      ch.h[i][m] = amp * rng.cnormal_vec(ch.nt);
    }
    ch.g[i].resize(ch.n_ul);
    for (int r = 0; r < ch.n_ul; ++r) {
      double amp = std::sqrt(cfg.antenna_gain * detail::path_gain(ch.dist_ul[r], cfg));
      ch.g[i][r] = amp * rng.cnormal_vec(ch.nt);
    }
    ch.f[i].assign(ch.n_ul, std::vector<Complex>(ch.n_dl));
    for (int r = 0; r < ch.n_ul; ++r)
      for (int m = 0; m < ch.n_dl; ++m)
        ch.f[i][r][m] = std::sqrt(user_gain(pos_ul[r], pos_dl[m])) * rng.cnormal();

    ch.h_si[i] = los_w * CMat::Ones(ch.nt, ch.nt) + nlos_w * rng.cnormal_mat(ch.nt, ch.nt);

    ch.l_hat[i] = CMat(ch.nt, ch.n_eve);
    for (int e = 0; e < ch.n_eve; ++e) {
      double amp = std::sqrt(cfg.antenna_gain * detail::path_gain(ch.dist_eve[e], cfg));
      ch.l_hat[i].col(e) = amp * rng.cnormal_vec(ch.nt);
    }
    ch.eps_dl[i] = std::sqrt(cfg.kappa_dl_sq) * ch.l_hat[i].norm();

    ch.e_hat[i].resize(ch.n_ul);
    for (int r = 0; r < ch.n_ul; ++r) {
      CVec e(ch.n_eve);
      for (int m = 0; m < ch.n_eve; ++m)
        e[m] = std::sqrt(user_gain(pos_ul[r], pos_eve[m])) * rng.cnormal();
      ch.e_hat[i][r] = e;
      ch.eps_ul[i][r] = std::sqrt(cfg.kappa_ul_sq) * e.norm();
    }
  }
  return ch;
}

// Normalized-distance user weights: the farthest DL user and the farthest
// UL user each get weight exactly 1.
inline void compute_weights(const ChannelSet& ch, std::vector<double>& w_dl,
                            std::vector<double>& w_ul) {
  double dmax = *std::max_element(ch.dist_dl.begin(), ch.dist_dl.end());
  double umax = *std::max_element(ch.dist_ul.begin(), ch.dist_ul.end());
  if (dmax <= 0.0 || umax <= 0.0) throw std::runtime_error("degenerate geometry");
  w_dl.resize(ch.n_dl);
  w_ul.resize(ch.n_ul);
  for (int m = 0; m < ch.n_dl; ++m) w_dl[m] = ch.dist_dl[m] / dmax;
  for (int r = 0; r < ch.n_ul; ++r) w_ul[r] = ch.dist_ul[r] / umax;
}

struct UncertaintySample {
  CMat delta_l;               // ||.||_F <= eps_dl[i]
  std::vector<CVec> delta_e;  // per UL user, ||.|| <= eps_ul[i][r]
};

// Uniform draw from the uncertainty balls of subcarrier i. Validation only;
// solvers never see sampled perturbations.
inline UncertaintySample sample_uncertainty(const ChannelSet& ch, int i, std::uint64_t seed) {
  Rng rng(seed);
  UncertaintySample s;
  auto ball = [&](int rows, int cols, double eps) {
    CMat d = rng.cnormal_mat(rows, cols);
    double n = d.norm();
    if (n == 0.0 || eps == 0.0) return CMat(CMat::Zero(rows, cols));
    double radius = eps * std::pow(rng.uniform(), 1.0 / (2.0 * rows * cols));
    return CMat((radius / n) * d);
  };
  s.delta_l = ball(ch.nt, ch.n_eve, ch.eps_dl[i]);
  s.delta_e.resize(ch.n_ul);
  for (int r = 0; r < ch.n_ul; ++r)
    s.delta_e[r] = ball(ch.n_eve, 1, ch.eps_ul[i][r]).col(0);
  return s;
}

// Bundle handed to the solvers: one realization plus its user weights.
struct Instance {
  SystemConfig cfg;
  ChannelSet ch;
  std::vector<double> w_dl, w_ul;
};

inline Instance make_instance(const SystemConfig& cfg, std::uint64_t seed) {
  Instance inst;
  inst.cfg = cfg;
  inst.ch = generate_channels(cfg, seed);
  if (!cfg.weights_dl.empty() && !cfg.weights_ul.empty()) {
    inst.w_dl = cfg.weights_dl;
    inst.w_ul = cfg.weights_ul;
  } else {
    compute_weights(inst.ch, inst.w_dl, inst.w_ul);
  }
  return inst;
}

}  // namespace fdnoma
