#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "fdnoma/barrier.hpp"
#include "fdnoma/ipm.hpp"

using namespace fdnoma;

TEST_CASE("hermitian coordinate layout round-trips") {
  Rng rng(1);
  VarSpace vs;
  HermVar v = vs.add_hermitian("W", 3);
  CMat a = rng.cnormal_mat(3, 3);
  CMat h = hermitize(a);
  RVec x = RVec::Zero(vs.size());
  set_herm(x, v, h);
  CHECK((herm_value(x, v) - h).norm() < 1e-14);
  // basis decomposition reproduces the matrix
  CMat rec = CMat::Zero(3, 3);
  for (int k = 0; k < v.coords(); ++k) rec += x[v.offset + k] * herm_basis(3, k);
  CHECK((rec - h).norm() < 1e-14);
  // trace form agrees with the dense trace
  CMat hh = hermitize(rng.cnormal_mat(3, 3));
  AffineForm f;
  f.add_trace(v, hh);
  CHECK(f.eval(x) == doctest::Approx(std::real((hh * h).trace())).epsilon(1e-12));
}

TEST_CASE("real embedding preserves definiteness") {
  Rng rng(2);
  for (int k = 0; k < 20; ++k) {
    CMat a = rng.cnormal_mat(3, 3);
    CMat h = hermitize(a);
    RMat e = real_embed(h);
    CHECK((e - e.transpose()).norm() < 1e-14);
    Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<RMat> er(e, Eigen::EigenvaluesOnly);
    CHECK(er.eigenvalues().minCoeff() ==
          doctest::Approx(es.eigenvalues().minCoeff()).epsilon(1e-10));
  }
}

TEST_CASE("lp-only sdp: min x subject to x >= 3") {
  ConicProblem cp;
  int x = cp.vars.add_scalar("x");
  cp.objective.add(x, -1.0);  // maximize -x == minimize x
  AffineForm row;
  row.add(x, 1.0);
  row.constant = -3.0;
  cp.add_row(row, "lb");
  auto sol = solve_sdp(cp);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.x[x] == doctest::Approx(3.0).epsilon(1e-7));
  CHECK(sol.duals.at("lb") == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("max trace of a PSD 2x2 Hermitian under a trace cap") {
  ConicProblem cp;
  HermVar w = cp.vars.add_hermitian("W", 2);
  cp.blocks.push_back(psd_block(w, "psd"));
  cp.objective.add_trace(w, CMat::Identity(2, 2));
  AffineForm cap;
  cap.add_trace(w, CMat::Identity(2, 2), -1.0);
  cap.constant = 5.0;
  cp.add_row(cap, "cap");
  auto sol = solve_sdp(cp);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(5.0).epsilon(1e-7));
  CHECK(is_psd(herm_value(sol.x, w), 1e-7));
}

TEST_CASE("random small SDPs: the two engines agree to 1e-6 relative") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    Rng rng(seed);
    ConicProblem cp;
    int n = 5;
    int x0v = cp.vars.add_scalars("x", n);
    RVec xt(n);
    for (int i = 0; i < n; ++i) xt[i] = rng.uniform(-1.0, 1.0);

    for (int b = 0; b < 2; ++b) {
      int d = 2 + (int)(seed + b) % 2;
      LmiBlock blk(d, "lmi");
      CMat shift = CMat::Zero(d, d);
      for (int i = 0; i < n; ++i) {
        CMat ai = hermitize(rng.cnormal_mat(d, d));
        blk.coeff_of(x0v + i) = ai;
        shift += xt[i] * ai;
      }
      blk.constant = (1.0 + rng.uniform()) * CMat::Identity(d, d) - shift;
      cp.blocks.push_back(blk);
    }
    for (int i = 0; i < n; ++i) {
      AffineForm lo, hi;
      lo.add(x0v + i, 1.0);
      lo.constant = 10.0;
      hi.add(x0v + i, -1.0);
      hi.constant = 10.0;
      cp.add_row(lo);
      cp.add_row(hi);
      cp.objective.add(x0v + i, rng.uniform(-1.0, 1.0));
    }

    auto hkm = solve_sdp(cp, 1e-9, 1e-9);
    RVec start = xt;
    auto bar = solve_barrier(cp, start, 1e-9);
    REQUIRE(hkm.status == SolveStatus::Optimal);
    REQUIRE(bar.status == SolveStatus::Optimal);
    double scale = std::max({1.0, std::abs(hkm.objective), std::abs(bar.objective)});
    CHECK(std::abs(hkm.objective - bar.objective) / scale < 1e-6);
    for (auto& blk : cp.blocks) CHECK(is_psd(blk.eval(hkm.x), 1e-7));
  }
}

TEST_CASE("barrier engine handles log objectives and log rows") {
  SUBCASE("max log2(x) with x <= 4") {
    ConicProblem cp;
    int x = cp.vars.add_scalar("x");
    LogTerm t;
    t.weight = 1.0;
    t.arg.add(x, 1.0);
    cp.obj_logs.push_back(t);
    AffineForm cap;
    cap.add(x, -1.0);
    cap.constant = 4.0;
    cp.add_row(cap, "cap");
    RVec x0 = RVec::Constant(1, 1.0);
    auto sol = solve_barrier(cp, x0, 1e-9);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.x[x] == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(sol.objective == doctest::Approx(2.0).epsilon(1e-6));
  }
  SUBCASE("interior optimum of 3 log2(x) - x matches calculus") {
    ConicProblem cp;
    int x = cp.vars.add_scalar("x");
    cp.objective.add(x, -1.0);
    LogTerm t;
    t.weight = 3.0;
    t.arg.add(x, 1.0);
    cp.obj_logs.push_back(t);
    AffineForm cap;  // keep the domain bounded
    cap.add(x, -1.0);
    cap.constant = 100.0;
    cp.add_row(cap);
    RVec x0 = RVec::Constant(1, 1.0);
    auto sol = solve_barrier(cp, x0, 1e-10);
    REQUIRE(sol.status == SolveStatus::Optimal);
    double xstar = 3.0 / kLn2;
    CHECK(sol.x[x] == doctest::Approx(xstar).epsilon(1e-5));
  }
  SUBCASE("log row: max y subject to y <= log2(x), x <= 8") {
    ConicProblem cp;
    int x = cp.vars.add_scalar("x");
    int y = cp.vars.add_scalar("y");
    cp.objective.add(y, 1.0);
    LogRow lr;
    lr.affine.add(y, -1.0);
    LogTerm t;
    t.weight = 1.0;
    t.arg.add(x, 1.0);
    lr.logs.push_back(t);
    lr.tag = "hypo";
    cp.log_rows.push_back(lr);
    AffineForm cap;
    cap.add(x, -1.0);
    cap.constant = 8.0;
    cp.add_row(cap);
    RVec x0(2);
    x0 << 2.0, 0.5;
    auto sol = solve_barrier(cp, x0, 1e-9);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.x[y] == doctest::Approx(3.0).epsilon(1e-5));
  }
}

TEST_CASE("rank-one extraction") {
  Rng rng(5);
  SUBCASE("exact rank-one matrix returns the generating vector up to phase") {
    CVec v = rng.cnormal_vec(3);
    CMat wt = v * v.adjoint();
    auto r = extract_rank_one(wt);
    REQUIRE(r.ok);
    CHECK(std::abs(std::abs(Complex(r.w.adjoint() * v)) - v.squaredNorm()) < 1e-10);
    CHECK((r.w * r.w.adjoint() - wt).norm() < 1e-10);
  }
  SUBCASE("identity is rejected at tol 1e-6") {
    auto r = extract_rank_one(CMat::Identity(2, 2), 1e-6);
    CHECK_FALSE(r.ok);
    CHECK(r.ratio == doctest::Approx(1.0));
  }
  SUBCASE("zero matrix is ok with zero vector") {
    auto r = extract_rank_one(CMat::Zero(2, 2));
    CHECK(r.ok);
    CHECK(r.w.norm() == 0.0);
  }
  SUBCASE("indefinite matrix is rejected") {
    CMat bad = CMat::Identity(2, 2);
    bad(1, 1) = -1.0;
    CHECK_THROWS_WITH(extract_rank_one(bad), "not PSD");
  }
  SUBCASE("gaussian randomization keeps the trace budget") {
    CMat wt = CMat::Identity(3, 3);
    Rng r2(7);
    CVec w = gaussian_randomization(
        wt, [](const CVec& c) { return -std::abs(c[0]); }, r2, 50);
    CHECK(w.squaredNorm() == doctest::Approx(3.0).epsilon(1e-9));
  }
}

TEST_CASE("problem dump emits the documented sections") {
  ConicProblem cp;
  HermVar w = cp.vars.add_hermitian("W", 2);
  cp.blocks.push_back(psd_block(w, "psd"));
  cp.objective.add_trace(w, CMat::Identity(2, 2));
  AffineForm cap;
  cap.add_trace(w, CMat::Identity(2, 2), -1.0);
  cap.constant = 5.0;
  cp.add_row(cap, "cap");
  std::ostringstream os;
  cp.dump(os);
  auto s = os.str();
  CHECK(s.find("conicproblem v1") != std::string::npos);
  CHECK(s.find("vars 4") != std::string::npos);
  CHECK(s.find("row cap") != std::string::npos);
  CHECK(s.find("block psd dim 2") != std::string::npos);
  CHECK(s.find("end") != std::string::npos);
}
