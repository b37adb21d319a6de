#pragma once

#include "fdnoma/conic.hpp"

namespace fdnoma {

// SINR-like secrecy thresholds: theta = 2^R_tol - 1.
inline double secrecy_threshold(double r_tol) { return std::exp2(r_tol) - 1.0; }

// Generalized S-procedure block (Lemma 1): h(Theta) = Theta^H A Theta +
// Theta^H B + B^H Theta + C is PSD for every Tr(D Theta Theta^H) <= 1 iff
//   [[C - rho I_M, B^H], [B, A + rho D]] >= 0  for some rho >= 0.
inline CMat s_procedure_block(const CMat& a, const CMat& b, const CMat& c, const CMat& d,
                              double rho) {
  int n = a.rows(), m = c.rows();
  if (a.cols() != n || c.cols() != m || b.rows() != n || b.cols() != m ||
      d.rows() != n || d.cols() != n)
    throw std::invalid_argument("s_procedure_block: dimension mismatch");
  if (rho < 0.0) throw std::invalid_argument("s_procedure_block: rho must be >= 0");
  CMat blk(m + n, m + n);
  blk.topLeftCorner(m, m) = c - rho * CMat::Identity(m, m);
  blk.topRightCorner(m, n) = b.adjoint();
  blk.bottomLeftCorner(n, m) = b;
  blk.bottomRightCorner(n, n) = a + rho * d;
  return blk;
}

// Robust DL secrecy LMI (Eq. 30). Block of size (M + N_T), affine in
// (W_tilde, Z, rho):
//   [[th L^H Z L + (th s_E^2 - rho) I, th L^H Z ],
//    [th Z L,                th Z + rho eps^-2 I]]  -  B_L^H W_tilde B_L >= 0
// with B_L = [L_hat I].
inline LmiBlock build_c5_lmi(const CMat& l_hat, double eps_dl, const HermVar& w_tilde,
                             const HermVar& z, int rho_var, double theta_dl,
                             double noise_eve, std::string tag = "C5bar") {
  if (!(eps_dl > 0.0))
    throw std::invalid_argument("build_c5_lmi: zero uncertainty radius");
  int m = l_hat.cols(), nt = l_hat.rows();
  LmiBlock blk(m + nt, std::move(tag));
  CMat im = CMat::Identity(m, m);
  CMat it = CMat::Identity(nt, nt);

  blk.add_herm_at(z, theta_dl * l_hat.adjoint(), l_hat, 0, 0);
  blk.add_const_at(theta_dl * noise_eve * im, 0, 0);
  blk.add_scalar_at(rho_var, -im, 0, 0);
  blk.add_herm_at(z, theta_dl * l_hat.adjoint(), it, 0, m);
  blk.add_herm_at(z, theta_dl * it, it, m, m);
  blk.add_scalar_at(rho_var, std::pow(eps_dl, -2.0) * it, m, m);

  CMat b_l(nt, m + nt);
  b_l.leftCols(m) = l_hat;
  b_l.rightCols(nt) = it;
  blk.add_herm_at(w_tilde, b_l.adjoint(), b_l, 0, 0, -1.0);
  return blk;
}

// Robust UL secrecy LMIs (Eqs. 32-33). The C6 constraint is split with a
// Hermitian slack M_slack: C6a bounds the UL leakage by M_slack over the
// e-ball, C6b dominates M_slack by theta X over the L-ball.
inline LmiBlock build_c6a_lmi(const CVec& e_hat, double eps_ul, int p_tilde_var,
                              const HermVar& m_slack, int alpha_var,
                              std::string tag = "C6abar") {
  if (!(eps_ul > 0.0))
    throw std::invalid_argument("build_c6a_lmi: zero uncertainty radius");
  int m = e_hat.size();
  LmiBlock blk(m + 1, std::move(tag));
  CMat im = CMat::Identity(m, m);
  blk.add_herm_at(m_slack, im, im, 0, 0);
  blk.add_scalar_at(p_tilde_var, CMat(-e_hat * e_hat.adjoint()), 0, 0);
  blk.add_scalar_at(alpha_var, -im, 0, 0);
  blk.add_scalar_at(p_tilde_var, CMat(-e_hat), 0, m);
  blk.add_scalar_at(p_tilde_var, -CMat::Identity(1, 1), m, m);
  blk.add_scalar_at(alpha_var, std::pow(eps_ul, -2.0) * CMat::Identity(1, 1), m, m);
  return blk;
}

inline LmiBlock build_c6b_lmi(const CMat& l_hat, double eps_dl, const HermVar& z,
                              const HermVar& m_slack, int beta_var, double theta_ul,
                              double noise_eve, std::string tag = "C6bbar") {
  if (!(eps_dl > 0.0))
    throw std::invalid_argument("build_c6b_lmi: zero uncertainty radius");
  int m = l_hat.cols(), nt = l_hat.rows();
  LmiBlock blk(m + nt, std::move(tag));
  CMat im = CMat::Identity(m, m);
  CMat it = CMat::Identity(nt, nt);
  blk.add_herm_at(z, theta_ul * l_hat.adjoint(), l_hat, 0, 0);
  blk.add_const_at(theta_ul * noise_eve * im, 0, 0);
  blk.add_scalar_at(beta_var, -im, 0, 0);
  blk.add_herm_at(m_slack, im, im, 0, 0, -1.0);
  blk.add_herm_at(z, theta_ul * l_hat.adjoint(), it, 0, m);
  blk.add_herm_at(z, theta_ul * it, it, m, m);
  blk.add_scalar_at(beta_var, std::pow(eps_dl, -2.0) * it, m, m);
  return blk;
}

struct C6Blocks {
  LmiBlock c6a;
  LmiBlock c6b;
};

// Both halves of the C6 split (Eqs. 32-33 implemented verbatim: theta_UL
// appears inside Eq. 33 rather than the prose's theta_UL - 1).
inline C6Blocks build_c6_lmis(const CVec& e_hat, double eps_ul, const CMat& l_hat,
                              double eps_dl, int p_tilde_var, const HermVar& z,
                              const HermVar& m_slack, int alpha_var, int beta_var,
                              double theta_ul, double noise_eve,
                              const std::string& tag_prefix = "") {
  return {build_c6a_lmi(e_hat, eps_ul, p_tilde_var, m_slack, alpha_var,
                        tag_prefix + "C6abar"),
          build_c6b_lmi(l_hat, eps_dl, z, m_slack, beta_var, theta_ul, noise_eve,
                        tag_prefix + "C6bbar")};
}

}  // namespace fdnoma
