#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "fdnoma/common.hpp"

namespace fdnoma {

// Scenario parameters. All stored in linear units (watts, linear gains);
// dBm/dB keys in the config file are converted at load time.
struct SystemConfig {
  int n_subcarriers = 2;     // N_F
  int n_dl_users = 2;        // K
  int n_ul_users = 2;        // J
  int n_eavesdroppers = 1;   // M
  int n_antennas = 3;        // N_T

  double p_max_dl = dbm_to_watt(45.0);
  std::vector<double> p_max_ul;   // length J, watts
  std::vector<double> noise_dl;   // length K, watts
  double noise_bs = dbm_to_watt(-125.0);
  double noise_eve = dbm_to_watt(-125.0);
  double si_constant = db_to_linear(-90.0);  // rho

  std::vector<double> r_req_dl, r_req_ul;  // bits/s/Hz, lengths K and J
  std::vector<double> r_tol_dl, r_tol_ul;  // per subcarrier, lengths K and J

  double kappa_dl_sq = 0.04;  // eps_DL^2 / ||L_hat||_F^2
  double kappa_ul_sq = 0.04;  // eps_UL_r^2 / ||e_hat_r||^2

  // Optional fixed weights; empty means normalized-distance weights per realization.
  std::vector<double> weights_dl, weights_ul;

  // cell geometry
  double max_distance = 400.0;
  double reference_distance = 15.0;
  double path_loss_exponent = 3.6;
  double rician_factor = db_to_linear(5.0);
  double antenna_gain = db_to_linear(10.0);

  // algorithm tolerances (Table I: all 0.01)
  double tol_polyblock = 0.01;   // epsilon, Algorithm 1
  double tol_dinkelbach = 0.01;  // delta, Algorithm 2
  double tol_sca_1 = 0.01;       // epsilon_1, Algorithm 3
  double tol_sca_2 = 0.01;       // epsilon_2, Algorithm 3
  double penalty_eta = 0.0;      // 0 -> default 10*log2(1 + P_max^DL / max sigma_m^2)
  int max_iters = 100;           // N_max for Algorithm 3
  int polyblock_max_iters = 500;
  int polyblock_dim_cap = 5000;  // refuse optimal solver above this 5D

  int eve_sample_count = 1000;   // worst-case sampling for secrecy reporting

  double eta() const {
    if (penalty_eta > 0.0) return penalty_eta;
    double sig = *std::max_element(noise_dl.begin(), noise_dl.end());
    return 10.0 * log2_safe(1.0 + p_max_dl / sig);
  }

  void fill_defaults() {
    auto fill = [](std::vector<double>& v, int n, double x) {
      if (v.empty()) v.assign(n, x);
    };
    fill(p_max_ul, n_ul_users, dbm_to_watt(22.0));
    fill(noise_dl, n_dl_users, dbm_to_watt(-125.0));
    fill(r_req_dl, n_dl_users, 1.0);
    fill(r_req_ul, n_ul_users, 1.0);
    fill(r_tol_dl, n_dl_users, 0.001);
    fill(r_tol_ul, n_ul_users, 0.001);
  }

  void validate() const {
    auto req = [](bool ok, const std::string& msg) {
      if (!ok) throw ConfigError("config: " + msg);
    };
    req(n_subcarriers >= 1, "n_subcarriers must be >= 1");
    req(n_dl_users >= 1 && n_ul_users >= 1, "need at least one DL and one UL user");
    req(n_eavesdroppers >= 1, "n_eavesdroppers must be >= 1");
    req(n_antennas > 1, "N_T must exceed 1");
    req(n_antennas > n_eavesdroppers, "N_T must exceed M for secure communication");
    req(p_max_dl >= 0.0, "p_max_dl must be nonnegative");
    req((int)p_max_ul.size() == n_ul_users, "p_max_ul length mismatch");
    req((int)noise_dl.size() == n_dl_users, "noise_dl length mismatch");
    for (double p : p_max_ul) req(p >= 0.0, "p_max_ul entries must be nonnegative");
    for (double s : noise_dl) req(s > 0.0, "noise_dl entries must be positive");
    req(noise_bs > 0.0 && noise_eve > 0.0, "noise powers must be positive");
    req(si_constant > 0.0 && si_constant < 1.0, "rho must lie in (0,1)");
    req((int)r_req_dl.size() == n_dl_users && (int)r_req_ul.size() == n_ul_users,
        "r_req length mismatch");
    req((int)r_tol_dl.size() == n_dl_users && (int)r_tol_ul.size() == n_ul_users,
        "r_tol length mismatch");
    for (double r : r_req_dl) req(r >= 0.0, "r_req_dl must be nonnegative");
    for (double r : r_req_ul) req(r >= 0.0, "r_req_ul must be nonnegative");
    for (double r : r_tol_dl) req(r >= 0.0, "r_tol_dl must be nonnegative");
    for (double r : r_tol_ul) req(r >= 0.0, "r_tol_ul must be nonnegative");
    req(kappa_dl_sq >= 0.0 && kappa_ul_sq >= 0.0, "kappa^2 must be nonnegative");
    for (double w : weights_dl) req(w >= 0.0 && w <= 1.0, "weights must lie in [0,1]");
    for (double w : weights_ul) req(w >= 0.0 && w <= 1.0, "weights must lie in [0,1]");
    req(max_distance > reference_distance && reference_distance > 0.0,
        "service distances must satisfy 0 < reference < max");
    req(path_loss_exponent > 0.0, "path_loss_exponent must be positive");
    req(rician_factor >= 0.0, "rician_factor must be nonnegative");
    req(antenna_gain > 0.0, "antenna_gain must be positive");
    req(tol_polyblock > 0.0 && tol_dinkelbach > 0.0 && tol_sca_1 > 0.0 && tol_sca_2 > 0.0,
        "tolerances must be positive");
    req(max_iters >= 1 && polyblock_max_iters >= 1, "iteration caps must be >= 1");
  }
};

namespace detail {

inline std::map<std::string, std::string> parse_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::string rest;
    std::getline(ls, rest);
    auto b = rest.find_first_not_of(" \t");
    auto e = rest.find_last_not_of(" \t\r");
    if (b == std::string::npos) throw ConfigError("config key without value: " + key);
    kv[key] = rest.substr(b, e - b + 1);
  }
  return kv;
}

inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::string tok;
  std::istringstream ss(s);
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

}  // namespace detail

// Flat key-value config file. Keys mirror Table I; `_dbm` / `_db` / `_dbi`
// suffixed keys are converted to linear units. Per-user keys accept either a
// scalar (applied to every user) or a comma-separated list.
inline SystemConfig load_config(const std::string& path) {
  auto kv = detail::parse_kv_file(path);
  SystemConfig c;
  auto geti = [&](const char* k, int& dst) {
    if (kv.count(k)) dst = std::stoi(kv.at(k));
  };
  auto getd = [&](const char* k, double& dst) {
    if (kv.count(k)) dst = std::stod(kv.at(k));
  };
  auto get_dbm = [&](const char* k, double& dst) {
    if (kv.count(k)) dst = dbm_to_watt(std::stod(kv.at(k)));
  };
  auto get_db = [&](const char* k, double& dst) {
    if (kv.count(k)) dst = db_to_linear(std::stod(kv.at(k)));
  };
  auto get_vec = [&](const char* k, std::vector<double>& dst, int n, double unit_dbm) {
    if (!kv.count(k)) return;
    auto vals = detail::parse_list(kv.at(k));
    if ((int)vals.size() == 1) vals.assign(n, vals[0]);
    if ((int)vals.size() != n) throw ConfigError(std::string("bad list length for ") + k);
    if (unit_dbm != 0.0)
      for (double& v : vals) v = dbm_to_watt(v);
    dst = vals;
  };

  geti("n_subcarriers", c.n_subcarriers);
  geti("n_dl_users", c.n_dl_users);
  geti("n_ul_users", c.n_ul_users);
  geti("n_eavesdroppers", c.n_eavesdroppers);
  geti("n_antennas", c.n_antennas);
  get_dbm("p_max_dl_dbm", c.p_max_dl);
  getd("p_max_dl_w", c.p_max_dl);
  get_vec("p_max_ul_dbm", c.p_max_ul, c.n_ul_users, 1.0);
  get_vec("noise_dl_dbm", c.noise_dl, c.n_dl_users, 1.0);
  get_dbm("noise_bs_dbm", c.noise_bs);
  get_dbm("noise_eve_dbm", c.noise_eve);
  get_db("si_constant_db", c.si_constant);
  get_vec("r_req_dl", c.r_req_dl, c.n_dl_users, 0.0);
  get_vec("r_req_ul", c.r_req_ul, c.n_ul_users, 0.0);
  get_vec("r_tol_dl", c.r_tol_dl, c.n_dl_users, 0.0);
  get_vec("r_tol_ul", c.r_tol_ul, c.n_ul_users, 0.0);
  getd("kappa_est_sq", c.kappa_dl_sq);
  if (kv.count("kappa_est_sq")) c.kappa_ul_sq = c.kappa_dl_sq;
  getd("kappa_dl_sq", c.kappa_dl_sq);
  getd("kappa_ul_sq", c.kappa_ul_sq);
  get_vec("weights_dl", c.weights_dl, c.n_dl_users, 0.0);
  get_vec("weights_ul", c.weights_ul, c.n_ul_users, 0.0);
  getd("max_distance_m", c.max_distance);
  getd("reference_distance_m", c.reference_distance);
  getd("path_loss_exponent", c.path_loss_exponent);
  get_db("rician_factor_db", c.rician_factor);
  get_db("antenna_gain_dbi", c.antenna_gain);
  getd("tol_polyblock", c.tol_polyblock);
  getd("tol_dinkelbach", c.tol_dinkelbach);
  getd("tol_sca_1", c.tol_sca_1);
  getd("tol_sca_2", c.tol_sca_2);
  getd("penalty_eta", c.penalty_eta);
  geti("max_iters", c.max_iters);
  geti("polyblock_max_iters", c.polyblock_max_iters);
  geti("polyblock_dim_cap", c.polyblock_dim_cap);
  geti("eve_sample_count", c.eve_sample_count);

  c.fill_defaults();
  c.validate();
  return c;
}

}  // namespace fdnoma
