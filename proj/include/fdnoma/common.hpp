#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdnoma {

using Real = double;
using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr double kLn2 = 0.6931471805599453094;

inline double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w / 1e-3); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double log2_safe(double x) { return std::log(x) / kLn2; }

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Deterministic RNG. Normals come from an explicit Box-Muller pair so the
// stream does not depend on the standard library's distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {
    for (int i = 0; i < 4; ++i) next_u64();
  }

  std::uint64_t next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // uniform in (0,1)
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double th = 2.0 * M_PI * u2;
    spare_ = r * std::sin(th);
    have_spare_ = true;
    return r * std::cos(th);
  }

  // CN(0,1): unit-variance circularly symmetric complex Gaussian
  Complex cnormal() {
    double re = normal() * M_SQRT1_2;
    double im = normal() * M_SQRT1_2;
    return {re, im};
  }

  CVec cnormal_vec(int n) {
    CVec v(n);
    for (int i = 0; i < n; ++i) v[i] = cnormal();
    return v;
  }

  CMat cnormal_mat(int r, int c) {
    CMat m(r, c);
    for (int j = 0; j < c; ++j)
      for (int i = 0; i < r; ++i) m(i, j) = cnormal();
    return m;
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

inline CMat hermitize(const CMat& a) { return 0.5 * (a + a.adjoint()); }

inline double min_eigenvalue(const CMat& h) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(h), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline bool is_psd(const CMat& h, double tol = 1e-9) {
  if (h.rows() == 0) return true;
  double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  return min_eigenvalue(h) >= -tol * scale;
}

}  // namespace fdnoma
