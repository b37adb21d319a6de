#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fdnoma/monotonic.hpp"
#include "test_util.hpp"

using namespace fdnoma;

namespace {

Instance tiny_instance(std::uint64_t seed, double r_req = 0.25, double r_tol = 0.1) {
  auto cfg = testutil::tiny_config();
  cfg.r_req_dl.assign(cfg.n_dl_users, r_req);
  cfg.r_req_ul.assign(cfg.n_ul_users, r_req);
  cfg.r_tol_dl.assign(cfg.n_dl_users, r_tol);
  cfg.r_tol_ul.assign(cfg.n_ul_users, r_tol);
  return make_instance(cfg, seed);
}

// Paper weight-index formulas (1-based, rem() == 0 wrapping to the modulus).
int rem_wrap(long a, int mod) {
  int r = (int)(a % mod);
  return r == 0 ? mod : r;
}

}  // namespace

TEST_CASE("tuple table enumerates valid combinations in Delta order") {
  SystemConfig cfg;
  cfg.n_subcarriers = 2;
  cfg.n_dl_users = 2;
  cfg.n_ul_users = 3;
  cfg.n_eavesdroppers = 1;
  cfg.n_antennas = 2;
  cfg.fill_defaults();
  auto tb = TupleTable::build(cfg);
  CHECK(tb.count() == 2 * (2 * 1) * (3 * 2));  // N_F * K(K-1) * J(J-1)
  long prev = 0;
  for (int k = 0; k < tb.count(); ++k) {
    CHECK(tb.full_delta(k) > prev);  // strictly increasing canonical order
    prev = tb.full_delta(k);
    CHECK(tb[k].m != tb[k].n);
    CHECK(tb[k].r != tb[k].t);
  }
  CHECK(tb.count_of(0) == tb.count() / 2);
}

TEST_CASE("chi weights match the paper's rem/ceil index formulas") {
  for (auto dims : {std::pair{2, 3}, std::pair{3, 2}}) {
    SystemConfig cfg;
    cfg.n_subcarriers = 2;
    cfg.n_dl_users = dims.first;
    cfg.n_ul_users = dims.second;
    cfg.n_eavesdroppers = 1;
    cfg.n_antennas = 2;
    cfg.fill_defaults();
    auto inst = make_instance(cfg, 3);
    auto sc = scale_instance(inst);
    auto tb = TupleTable::build(cfg);
    RVec chi = chi_weights(tb, sc);

    int K = cfg.n_dl_users, J = cfg.n_ul_users;
    long D = (long)cfg.n_subcarriers * K * K * J * J;
    int tcount = tb.count();
    for (int k = 0; k < tcount; ++k) {
      long delta = tb.full_delta(k);
      // block 1: w_m with m = rem(ceil(d / (K J^2)), K)
      long d1 = delta;
      int m = rem_wrap((d1 + (long)K * J * J - 1) / ((long)K * J * J), K);
      CHECK(chi[k] == doctest::Approx(sc.w_dl[m - 1]));
      // block 2: w_n with n = rem(ceil(d / J^2), K)
      long d2 = D + delta;
      int n = rem_wrap((d2 + (long)J * J - 1) / ((long)J * J), K);
      CHECK(chi[tcount + k] == doctest::Approx(sc.w_dl[n - 1]));
      // block 3: mu_r with r = rem(ceil(d / J), J)
      long d3 = 2 * D + delta;
      int r = rem_wrap((d3 + J - 1) / J, J);
      CHECK(chi[2 * tcount + k] == doctest::Approx(sc.w_ul[r - 1]));
      // block 4: mu_t with t = rem(d, J)
      long d4 = 3 * D + delta;
      int t = rem_wrap(d4, J);
      CHECK(chi[3 * tcount + k] == doctest::Approx(sc.w_ul[t - 1]));
    }
  }
}

TEST_CASE("initial vertex") {
  SUBCASE("zero budgets give the all-ones vertex with zero slacks") {
    auto inst = tiny_instance(5, 0.0, 0.1);
    inst.cfg.p_max_dl = 0.0;
    inst.cfg.p_max_ul.assign(2, 0.0);
    auto sc = scale_instance(inst);
    auto tb = TupleTable::build(inst.cfg);
    Vertex v = initial_vertex(tb, sc);
    CHECK(v.z.maxCoeff() == doctest::Approx(1.0));
    CHECK(v.z.minCoeff() == doctest::Approx(1.0));
    CHECK(v.t.maxCoeff() == doctest::Approx(0.0));
  }
  SUBCASE("direct substitution: |h|^2 = sigma^2 = P gives u = 2") {
    auto inst = tiny_instance(6, 0.0, 0.1);
    inst.cfg.p_max_dl = 1.0;
    inst.cfg.noise_dl.assign(2, 1.0);
    inst.cfg.noise_bs = 1.0;
    inst.cfg.noise_eve = 1.0;
    for (int m = 0; m < 2; ++m) {
      inst.ch.h[0][m].setZero();
      inst.ch.h[0][m][0] = 1.0;  // ||h||^2 = 1
    }
    auto sc = scale_instance(inst);
    auto tb = TupleTable::build(inst.cfg);
    Vertex v = initial_vertex(tb, sc);
    for (int k = 0; k < tb.count(); ++k) CHECK(v.z[k] == doctest::Approx(2.0));
    // slack bound log2(1 + P/sigma^2) = 1
    CHECK(v.t[0] == doctest::Approx(1.0));
  }
  SUBCASE("sampled feasible policies never exceed the initial box") {
    auto inst = tiny_instance(7);
    auto sc = scale_instance(inst);
    auto tb = TupleTable::build(inst.cfg);
    Vertex v0 = initial_vertex(tb, sc);
    ConicProblem cp;
    auto mv = add_model_vars(cp, tb, sc);
    auto rows = build_ratio_rows(mv, tb, sc);
    Rng rng(8);
    for (int trial = 0; trial < 200; ++trial) {
      RVec x = RVec::Zero(cp.vars.size());
      // random feasible power split across every tuple and the AN
      double dl_budget = sc.cfg.p_max_dl;
      for (int k = 0; k < tb.count(); ++k) {
        double q = rng.uniform(0.0, dl_budget / (2.0 * tb.count()));
        CVec u = rng.cnormal_vec(sc.ch.nt).normalized();
        set_herm(x, mv.tv[k].wt_m.herm, q * (u * u.adjoint()));
        CVec u2 = rng.cnormal_vec(sc.ch.nt).normalized();
        set_herm(x, mv.tv[k].wt_n.herm, q * (u2 * u2.adjoint()));
        x[mv.tv[k].pt_r] = rng.uniform(0.0, sc.cfg.p_max_ul[tb[k].r] / tb.count());
        x[mv.tv[k].pt_t] = rng.uniform(0.0, sc.cfg.p_max_ul[tb[k].t] / tb.count());
      }
      for (size_t d = 0; d < rows.size(); ++d) {
        double ratio = rows[d].f.eval(x) / rows[d].g.eval(x);
        CHECK(ratio <= v0.z[d] * (1.0 + 1e-9));
      }
    }
  }
}

TEST_CASE("beta bisection") {
  auto inst = tiny_instance(9);
  auto sc = scale_instance(inst);
  auto tb = TupleTable::build(inst.cfg);
  int tcount = tb.count();
  Vertex v = initial_vertex(tb, sc);

  SUBCASE("t = 0 reduces to the closed form min(1, (1+P/s)/z)") {
    v.t.setZero();
    for (int k = 0; k < tcount; ++k) v.z[k] = 1e9;
    double expect = 1.0;
    for (int k = 0; k < tcount; ++k) {
      double cap = 1.0 + sc.cfg.p_max_dl / sc.cfg.noise_dl[tb[k].m];
      expect = std::min(expect, cap / v.z[k]);
    }
    double beta = beta_bisection(v, tb, sc, 1e-12);
    CHECK(beta == doctest::Approx(expect).epsilon(1e-9));
  }
  SUBCASE("equality at beta = 1") {
    for (int k = 0; k < tcount; ++k) {
      v.z[k] = 1.0;
      v.t[k] = log2_safe(1.0 + sc.cfg.p_max_dl / sc.cfg.noise_dl[tb[k].m]);
    }
    CHECK(beta_bisection(v, tb, sc) == doctest::Approx(1.0));
  }
  SUBCASE("random vertices match a dense grid search") {
    Rng rng(10);
    for (int trial = 0; trial < 20; ++trial) {
      Vertex w = initial_vertex(tb, sc);
      for (int k = 0; k < tcount; ++k) {
        w.z[k] = 1.0 + rng.uniform() * (w.z[k] - 1.0);
        w.t[k] *= rng.uniform();
      }
      double beta = beta_bisection(w, tb, sc, 1e-10);
      auto ok = [&](double b) {
        for (int k = 0; k < tcount; ++k) {
          double rhs = log2_safe(1.0 + sc.cfg.p_max_dl / sc.cfg.noise_dl[tb[k].m]);
          if (log2_safe(b * w.z[k]) + b * w.t[k] > rhs) return false;
        }
        return true;
      };
      double grid_best = 0.0;
      for (int g = 1; g <= 10000; ++g) {
        double b = g / 10000.0;
        if (ok(b)) grid_best = b;
      }
      CHECK(std::abs(beta - grid_best) <= 2e-4);
    }
  }
}

TEST_CASE("dinkelbach projection") {
  auto inst = tiny_instance(11);
  auto sc = scale_instance(inst);
  auto tb = TupleTable::build(inst.cfg);
  Projector projector(sc, tb);

  SUBCASE("zero budgets: f = g everywhere so alpha converges to 1") {
    auto inst0 = tiny_instance(12, 0.0, 0.1);
    inst0.cfg.p_max_dl = 0.0;
    inst0.cfg.p_max_ul.assign(2, 0.0);
    auto sc0 = scale_instance(inst0);
    auto tb0 = TupleTable::build(inst0.cfg);
    Projector pr0(sc0, tb0);
    Vertex v = initial_vertex(tb0, sc0);
    auto pr = pr0.project(v, 0.01);
    CHECK(pr.alpha_final == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(pr.lambda == doctest::Approx(std::min(pr.alpha_final, pr.beta_star)));
  }
  SUBCASE("alpha sequence is non-decreasing and the residual meets delta") {
    Vertex v = initial_vertex(tb, sc);
    auto pr = projector.project(v, 0.01);
    for (size_t i = 1; i < pr.alpha_trace.size(); ++i)
      CHECK(pr.alpha_trace[i] >= pr.alpha_trace[i - 1] - 1e-9);
    CHECK(pr.final_residual <= 0.01);
    CHECK(pr.lambda == doctest::Approx(std::min(pr.alpha_final, pr.beta_star)));
    CHECK(pr.lambda >= 0.0);
    CHECK(pr.lambda <= 1.0 + 1e-9);
  }
  SUBCASE("lambda matches a definition-level bisection on beta*vertex in G") {
    Vertex v = initial_vertex(tb, sc);
    // shrink to a generic interior-ish vertex
    for (int d = 0; d < v.z.size(); ++d) v.z[d] = 1.0 + 0.3 * (v.z[d] - 1.0);
    for (int k = 0; k < v.t.size(); ++k) v.t[k] *= 0.5;
    auto pr = projector.project(v, 1e-5);

    // G membership at fixed beta: does any point of P satisfy f_d >= beta z_d g_d?
    auto member = [&](double beta) {
      ConicProblem cp = projector.assemble(v, beta);
      auto sol = solve_sdp(cp, 1e-8, 1e-8);
      return sol.status == SolveStatus::Optimal && sol.x[projector.tau_var()] >= 0.0;
    };
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 24; ++it) {
      double mid = 0.5 * (lo + hi);
      (member(mid) ? lo : hi) = mid;
    }
    double alpha_bisect = lo;
    CHECK(pr.alpha_final == doctest::Approx(alpha_bisect).epsilon(0.01));
    // power-grid lower bound: any sampled feasible policy's min ratio
    CHECK(pr.alpha_final >= -1e-9);
  }
}

TEST_CASE("schedule recovery from a projected vertex") {
  auto inst = tiny_instance(13);
  auto sc = scale_instance(inst);
  auto tb = TupleTable::build(inst.cfg);
  RVec chi = chi_weights(tb, sc);
  int tcount = tb.count();

  SUBCASE("all-ones vertex schedules nothing") {
    Vertex v;
    v.z = RVec::Ones(4 * tcount);
    v.t = RVec::Zero(tcount);
    auto chosen = recover_schedule(v, 1.0, tb, chi);
    for (int c : chosen) CHECK(c == -1);
  }
  SUBCASE("a single tuple clearing the threshold is selected") {
    Vertex v;
    v.z = RVec::Ones(4 * tcount);
    v.t = RVec::Zero(tcount);
    for (int b = 0; b < 4; ++b) v.z[b * tcount + 2] = 2.0;
    auto chosen = recover_schedule(v, 1.0, tb, chi);
    CHECK(chosen[0] == 2);
  }
  SUBCASE("ties break by weighted contribution") {
    Vertex v;
    v.z = RVec::Ones(4 * tcount);
    v.t = RVec::Zero(tcount);
    for (int b = 0; b < 4; ++b) {
      v.z[b * tcount + 0] = 1.5;
      v.z[b * tcount + 1] = 4.0;  // clearly better
    }
    auto chosen = recover_schedule(v, 1.0, tb, chi);
    CHECK(chosen[0] == 1);
  }
}

TEST_CASE("polyblock solve on trivial and tiny instances") {
  SUBCASE("zero budgets and zero QoS terminate immediately at zero") {
    auto inst = tiny_instance(14, 0.0, 0.1);
    inst.cfg.p_max_dl = 0.0;
    inst.cfg.p_max_ul.assign(2, 0.0);
    PolyblockOptions opt;
    auto res = polyblock_solve(inst, opt);
    CHECK(res.feasible);
    CHECK(res.converged);
    CHECK(res.iterations == 1);
    CHECK(res.objective == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("infeasible QoS is reported") {
    auto inst = tiny_instance(15, 100.0, 0.1);  // absurd rate requirement
    auto res = polyblock_solve(inst);
    CHECK_FALSE(res.feasible);
  }
  SUBCASE("dimension cap refuses oversized runs") {
    auto inst = tiny_instance(16);
    PolyblockOptions opt;
    opt.dim_cap = 10;
    CHECK_THROWS(polyblock_solve(inst, opt));
  }
  SUBCASE("tiny instance converges with monotone bounds and a valid policy") {
    auto inst = tiny_instance(17);
    PolyblockOptions opt;
    opt.max_iters = 300;
    auto res = polyblock_solve(inst, opt);
    REQUIRE(res.feasible);
    CHECK(res.converged);
    CHECK(res.final_gap <= opt.epsilon + 1e-12);
    for (size_t i = 1; i < res.trace.size(); ++i) {
      CHECK(res.trace[i].upper_bound <= res.trace[i - 1].upper_bound + 1e-9);
      CHECK(res.trace[i].cbv >= res.trace[i - 1].cbv - 1e-12);
      CHECK(res.trace[i].cbv <= res.trace[i].upper_bound + 1e-6);
    }
    CHECK_FALSE(check_policy_structure(inst.cfg, res.policy).has_value());
    auto rb = evaluate_policy(inst, res.policy, {.eve_samples = 50});
    CHECK(rb.objective == doctest::Approx(res.objective).epsilon(1e-9));
    // QoS honored by the returned policy
    for (int l = 0; l < inst.cfg.n_dl_users; ++l)
      CHECK(rb.dl_user_total[l] >= inst.cfg.r_req_dl[l] - 1e-6);
    for (int h = 0; h < inst.cfg.n_ul_users; ++h)
      CHECK(rb.ul_user_total[h] >= inst.cfg.r_req_ul[h] - 1e-6);
  }
}
