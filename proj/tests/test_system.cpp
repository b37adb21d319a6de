#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fdnoma/channel.hpp"
#include "test_util.hpp"

using namespace fdnoma;

TEST_CASE("generated channels have the configured dimensions") {
  auto cfg = testutil::desk_config();
  auto ch = generate_channels(cfg, 7);
  CHECK(ch.nf == cfg.n_subcarriers);
  CHECK((int)ch.h.size() == cfg.n_subcarriers);
  for (int i = 0; i < ch.nf; ++i) {
    CHECK((int)ch.h[i].size() == cfg.n_dl_users);
    for (auto& v : ch.h[i]) CHECK(v.size() == cfg.n_antennas);
    CHECK((int)ch.g[i].size() == cfg.n_ul_users);
    CHECK(ch.h_si[i].rows() == cfg.n_antennas);
    CHECK(ch.h_si[i].cols() == cfg.n_antennas);
    CHECK(ch.l_hat[i].rows() == cfg.n_antennas);
    CHECK(ch.l_hat[i].cols() == cfg.n_eavesdroppers);
    for (auto& e : ch.e_hat[i]) CHECK(e.size() == cfg.n_eavesdroppers);
    CHECK((int)ch.f[i].size() == cfg.n_ul_users);
    for (auto& row : ch.f[i]) CHECK((int)row.size() == cfg.n_dl_users);
  }
  for (double d : ch.dist_dl) {
    CHECK(d >= cfg.reference_distance);
    CHECK(d <= cfg.max_distance);
  }
}

TEST_CASE("channel generation is deterministic in the seed") {
  auto cfg = testutil::desk_config();
  auto a = generate_channels(cfg, 42);
  auto b = generate_channels(cfg, 42);
  auto c = generate_channels(cfg, 43);
  CHECK(a.h[0][0] == b.h[0][0]);
  CHECK(a.h_si[1] == b.h_si[1]);
  CHECK(a.l_hat[0] == b.l_hat[0]);
  CHECK(a.e_hat[1][1] == b.e_hat[1][1]);
  CHECK(a.f[0][1][0] == b.f[0][1][0]);
  CHECK(a.dist_dl == b.dist_dl);
  CHECK(a.h[0][0] != c.h[0][0]);
}

TEST_CASE("channel energies are finite and strictly positive") {
  auto cfg = testutil::desk_config();
  for (std::uint64_t s = 1; s <= 20; ++s) {
    auto ch = generate_channels(cfg, s);
    for (int i = 0; i < ch.nf; ++i) {
      for (auto& v : ch.h[i]) {
        CHECK(v.allFinite());
        CHECK(v.squaredNorm() > 0.0);
      }
      for (auto& v : ch.g[i]) CHECK(v.squaredNorm() > 0.0);
      CHECK(ch.l_hat[i].norm() > 0.0);
      CHECK(ch.h_si[i].allFinite());
    }
  }
}

TEST_CASE("sample mean of |h|^2 per entry matches the path-loss model") {
  auto cfg = testutil::desk_config();
  double acc = 0.0;
  int count = 0;
  for (std::uint64_t s = 1; s <= 100; ++s) {
    auto ch = generate_channels(cfg, s);
    for (int i = 0; i < ch.nf; ++i)
      for (int m = 0; m < ch.n_dl; ++m) {
        double model = cfg.antenna_gain *
                       std::pow(ch.dist_dl[m] / cfg.reference_distance,
                                -cfg.path_loss_exponent);
        acc += ch.h[i][m].squaredNorm() / (cfg.n_antennas * model);
        count += cfg.n_antennas;  // entries averaged per vector
      }
  }
  double mean = acc / (count / (double)cfg.n_antennas) ;
  CHECK(mean == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("normalized-distance weights") {
  auto cfg = testutil::desk_config();
  auto ch = generate_channels(cfg, 3);

  SUBCASE("direct normalization") {
    ch.dist_dl = {100.0, 400.0};
    std::vector<double> w, mu;
    compute_weights(ch, w, mu);
    CHECK(w[0] == doctest::Approx(0.25));
    CHECK(w[1] == doctest::Approx(1.0));
  }
  SUBCASE("equal distances") {
    ch.dist_ul = {400.0, 400.0};
    std::vector<double> w, mu;
    compute_weights(ch, w, mu);
    CHECK(mu[0] == doctest::Approx(1.0));
    CHECK(mu[1] == doctest::Approx(1.0));
  }
  SUBCASE("random distances normalize to max 1") {
    for (std::uint64_t s = 1; s <= 10; ++s) {
      auto c2 = generate_channels(cfg, s);
      std::vector<double> w, mu;
      compute_weights(c2, w, mu);
      double wmax = *std::max_element(w.begin(), w.end());
      CHECK(wmax == doctest::Approx(1.0));
      for (double x : w) {
        CHECK(x > 0.0);
        CHECK(x <= 1.0);
        // independent check against a naive normalization
      }
      for (int m = 0; m < c2.n_dl; ++m) {
        double dmax = *std::max_element(c2.dist_dl.begin(), c2.dist_dl.end());
        CHECK(w[m] == doctest::Approx(c2.dist_dl[m] / dmax));
      }
    }
  }
  SUBCASE("degenerate geometry is rejected") {
    ch.dist_dl = {0.0, 0.0};
    std::vector<double> w, mu;
    CHECK_THROWS_WITH(compute_weights(ch, w, mu), "degenerate geometry");
  }
}

TEST_CASE("uncertainty sampling stays inside the balls") {
  auto cfg = testutil::tiny_config();
  auto ch = generate_channels(cfg, 5);

  SUBCASE("zero radius gives exactly zero") {
    ch.eps_dl[0] = 0.0;
    auto u = sample_uncertainty(ch, 0, 1);
    CHECK(u.delta_l.norm() == 0.0);
  }
  SUBCASE("all samples respect the Frobenius bound") {
    ch.eps_dl[0] = 0.1;
    for (std::uint64_t s = 0; s < 10000; ++s) {
      auto u = sample_uncertainty(ch, 0, s);
      CHECK(u.delta_l.norm() <= 0.1 + 1e-15);
      for (int r = 0; r < ch.n_ul; ++r)
        CHECK(u.delta_e[r].norm() <= ch.eps_ul[0][r] + 1e-15);
    }
  }
}

TEST_CASE("radii follow the normalized estimation error definition") {
  auto cfg = testutil::desk_config();
  cfg.kappa_dl_sq = 0.04;
  cfg.kappa_ul_sq = 0.04;
  auto ch = generate_channels(cfg, 11);
  for (int i = 0; i < ch.nf; ++i) {
    CHECK(ch.eps_dl[i] == doctest::Approx(0.2 * ch.l_hat[i].norm()).epsilon(1e-12));
    double ratio = ch.eps_dl[i] * ch.eps_dl[i] / ch.l_hat[i].squaredNorm();
    CHECK(ratio == doctest::Approx(cfg.kappa_dl_sq).epsilon(1e-12));
    for (int r = 0; r < ch.n_ul; ++r) {
      double rr = ch.eps_ul[i][r] * ch.eps_ul[i][r] / ch.e_hat[i][r].squaredNorm();
      CHECK(rr == doctest::Approx(cfg.kappa_ul_sq).epsilon(1e-12));
    }
  }
}

TEST_CASE("config validation catches bad scenarios") {
  auto cfg = testutil::desk_config();
  cfg.n_antennas = 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = testutil::desk_config();
  cfg.n_eavesdroppers = 3;  // N_T = 3 not > M
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = testutil::desk_config();
  cfg.si_constant = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = testutil::desk_config();
  cfg.weights_dl = {0.5, 1.2};
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("config file round trip with unit conversion") {
  const char* path = "test_cfg.txt";
  {
    std::ofstream out(path);
    out << "# comment line\n"
        << "n_subcarriers 2\n"
        << "n_dl_users 2\n"
        << "n_ul_users 2\n"
        << "n_eavesdroppers 1\n"
        << "n_antennas 4\n"
        << "p_max_dl_dbm 45\n"
        << "p_max_ul_dbm 22\n"
        << "noise_dl_dbm -125\n"
        << "noise_bs_dbm -125\n"
        << "si_constant_db -90\n"
        << "r_req_dl 1.0,0.5\n"
        << "kappa_est_sq 0.04\n"
        << "antenna_gain_dbi 10\n";
  }
  auto cfg = load_config(path);
  CHECK(cfg.n_antennas == 4);
  CHECK(cfg.p_max_dl == doctest::Approx(dbm_to_watt(45)));
  CHECK(cfg.p_max_ul[1] == doctest::Approx(dbm_to_watt(22)));
  CHECK(cfg.noise_dl[0] == doctest::Approx(3.1622776601683794e-16));
  CHECK(cfg.si_constant == doctest::Approx(1e-9));
  CHECK(cfg.r_req_dl[1] == doctest::Approx(0.5));
  CHECK(cfg.r_req_ul[0] == doctest::Approx(1.0));  // default
  CHECK(cfg.antenna_gain == doctest::Approx(10.0));
  std::remove(path);
}
