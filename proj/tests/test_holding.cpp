#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <sstream>

#include "erlangr/blocking.hpp"
#include "erlangr/errors.hpp"
#include "erlangr/holding.hpp"
#include "support/oracles.hpp"

using namespace erlangr;
using Catch::Approx;
using Eigen::MatrixXd;
using Eigen::RowVectorXd;

namespace {

const ModelParams kCase2{2.0, 1.0, 0.25, 0.75};

double max_abs(const MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("stability bound against the closed-ward chain", "[holding][oracle]") {
  const ModelParams p{1.0, 1.0, 0.25, 0.75};
  CHECK(rho_max(p, {1, 2}).rho_max == Approx(oracle::closed_ward_rho_max(p, {1, 2})).epsilon(1e-12));
  for (CapacityPair cap : {CapacityPair{3, 10}, CapacityPair{9, 40}, CapacityPair{30, 110}}) {
    CHECK(rho_max(kCase2, cap).rho_max ==
          Approx(oracle::closed_ward_rho_max(kCase2, cap)).epsilon(1e-10));
  }
}

TEST_CASE("one bed per server gives rho_max = r", "[holding]") {
  for (int n : {1, 5, 40, 300}) {
    CHECK(rho_max(kCase2, {n, n}).rho_max == Approx(0.25).margin(1e-10));
  }
}

TEST_CASE("stable load never exceeds servers or r n", "[holding][property]") {
  for (int s = 1; s <= 20; ++s) {
    for (int n = s; n <= 100; n += 7) {
      const StabilityBound b = rho_max(kCase2, {s, n});
      CHECK(b.r_max <= s);
      CHECK(b.r_max <= 0.25 * n + 1e-12);
    }
  }
}

TEST_CASE("rho_max tends to one along the square-root scaling", "[holding][property]") {
  double prev_gap = 1.0;
  for (double r1 : {10.0, 25.0, 50.0, 100.0, 250.0}) {
    const ModelParams p{r1 * 0.25, 1.0, 0.25, 0.75};
    const CapacityPair cap = qed_capacity(r1, 0.25, {1.0, 1.0});
    const double gap = 1.0 - rho_max(p, cap).rho_max;
    CHECK(gap < prev_gap);
    if (r1 == 100.0) CHECK(gap < 0.15);
    prev_gap = gap;
  }
}

TEST_CASE("blocks for one bed and one server", "[holding]") {
  const ModelParams p{0.7, 1.3, 0.4, 0.6};
  const QbdBlocks b = build_qbd_blocks(p, {1, 1});
  MatrixXd a0(2, 2), a1(2, 2), a2(2, 2);
  a0 << p.lambda, 0, 0, p.lambda;
  a2 << 0, 0, 0, (1 - p.p) * p.mu;
  a1 << -(p.lambda + p.delta), p.delta, p.p * p.mu, -(p.lambda + p.mu);
  CHECK(max_abs(b.a0 - a0) < 1e-15);
  CHECK(max_abs(b.a1 - a1) < 1e-15);
  CHECK(max_abs(b.a2 - a2) < 1e-15);
}

TEST_CASE("generator rows sum to zero", "[holding][property]") {
  const ModelParams p{1.7, 0.9, 0.35, 0.65};
  const CapacityPair cap{3, 7};
  const QbdBlocks b = build_qbd_blocks(p, cap);
  CHECK((b.a0 + b.a1 + b.a2).rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
  for (int i = 0; i <= cap.n; ++i) {
    Eigen::VectorXd rows = MatrixXd(b.boundary_diag[i]).rowwise().sum();
    if (i > 0) rows += MatrixXd(b.boundary_down[i]).rowwise().sum();
    if (i < cap.n) {
      rows += MatrixXd(b.boundary_up[i + 1]).rowwise().sum();
    } else {
      rows += b.a0.rowwise().sum();
    }
    CHECK(rows.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("interior transition rates", "[holding]") {
  const ModelParams p{1.7, 0.9, 0.35, 0.65};
  const CapacityPair cap{2, 6};
  const QbdBlocks b = build_qbd_blocks(p, cap);
  const int i = 4;
  const int j = 3;
  const double nu = std::min(j, cap.s) * p.mu;
  CHECK(b.boundary_up[i + 1].coeff(j, j + 1) == Approx(p.lambda));
  CHECK(b.boundary_diag[i].coeff(j, j + 1) == Approx((i - j) * p.delta));
  CHECK(b.boundary_diag[i].coeff(j, j - 1) == Approx(p.p * nu));
  CHECK(b.boundary_down[i].coeff(j, j - 1) == Approx((1 - p.p) * nu));
}

TEST_CASE("rate matrix solves its defining equation", "[holding]") {
  const QbdBlocks b = build_qbd_blocks(kCase2, {9, 40});
  for (GMethod m : {GMethod::Functional, GMethod::LogarithmicReduction}) {
    const RateMatrixG g = solve_rate_matrix(b, {m});
    const MatrixXd res = b.a0 + g.g * b.a1 + g.g * g.g * b.a2;
    CHECK(max_abs(res) < 1e-10);
    CHECK(g.g.minCoeff() >= -1e-14);
    CHECK(spectral_radius(g.g) < 1.0);
  }
  const MatrixXd f = solve_rate_matrix(b, {GMethod::Functional}).g;
  const MatrixXd lr = solve_rate_matrix(b, {GMethod::LogarithmicReduction}).g;
  CHECK(max_abs(f - lr) < 1e-9);
}

TEST_CASE("rate matrix vanishes without arrivals", "[holding]") {
  const RateMatrixG g = solve_rate_matrix(build_qbd_blocks({1e-9, 1.0, 0.25, 0.75}, {3, 8}));
  CHECK(max_abs(g.g) < 1e-8);
}

TEST_CASE("spectral radius grows toward one near the stability edge", "[holding][oracle]") {
  const CapacityPair cap{4, 14};
  const double edge = rho_max(kCase2, cap).r_max * (1 - kCase2.p) * kCase2.mu;
  double prev = 0.0;
  for (double frac : {0.5, 0.9, 0.99}) {
    const ModelParams p{frac * edge, 1.0, 0.25, 0.75};
    const RateMatrixG g = solve_rate_matrix(build_qbd_blocks(p, cap), {GMethod::LogarithmicReduction});
    const double rho = spectral_radius(g.g);
    CHECK(rho == Approx(oracle::power_iteration(g.g)).epsilon(1e-6));
    CHECK(rho > prev);
    CHECK(rho < 1.0);
    prev = rho;
  }
  CHECK(prev > 0.9);
}

TEST_CASE("unstable loads are refused and detectable", "[holding]") {
  CHECK_THROWS_AS(solve_holding({2.0, 1.0, 0.25, 0.75}, {8, 32}), NotStable);
  try {
    solve_holding({2.0, 1.0, 0.25, 0.75}, {8, 32});
  } catch (const NotStable& e) {
    CHECK(e.rho() == Approx(1.0));
    CHECK(e.rho_max() < 1.0);
  }
  const ModelParams over{2.4, 1.0, 0.25, 0.75};
  const QbdBlocks b = build_qbd_blocks(over, {9, 40});
  RateMatrixOptions opts{GMethod::LogarithmicReduction};
  opts.check_stability = false;
  const RateMatrixG g = solve_rate_matrix(b, opts);
  CHECK(spectral_radius(g.g) >= 1.0 - 1e-6);
}

TEST_CASE("stationary law matches a truncated chain", "[holding][oracle]") {
  const ModelParams p{0.1, 1.0, 0.25, 0.75};
  const CapacityPair cap{1, 2};
  const auto ref = oracle::holding_ctmc(p, cap, 400);
  const HoldingDistribution d = solve_holding(p, cap);
  for (const auto& [state, prob] : ref) {
    if (state.first > cap.n + 60) continue;
    CHECK(d.level(state.first)(state.second) == Approx(prob).margin(1e-8));
  }
  CHECK(d.total_mass() == Approx(1.0).margin(1e-8));
}

TEST_CASE("boundary solvers agree", "[holding]") {
  const ModelParams p{1.5, 1.0, 0.25, 0.75};
  const CapacityPair cap{7, 30};
  const QbdBlocks b = build_qbd_blocks(p, cap);
  const RateMatrixG g = solve_rate_matrix(b);
  const HoldingDistribution lu = stationary_holding(b, g, BoundarySolver::DenseLU);
  const HoldingDistribution lr = stationary_holding(b, g, BoundarySolver::LevelReduction);
  for (int i = 0; i <= cap.n; ++i) CHECK((lu.boundary[i] - lr.boundary[i]).cwiseAbs().maxCoeff() < 1e-10);
  for (const auto& v : lu.boundary) CHECK(v.minCoeff() >= -1e-15);
}

TEST_CASE("full-chain balance on the assembled generator", "[holding][property]") {
  const ModelParams p{1.5, 1.0, 0.25, 0.75};
  const CapacityPair cap{7, 30};
  const QbdBlocks b = build_qbd_blocks(p, cap);
  const HoldingDistribution d = stationary_holding(b, solve_rate_matrix(b));
  const int top = cap.n + 20;
  for (int i = 0; i < top; ++i) {
    // Flow into level i from i-1, i and i+1.
    RowVectorXd in;
    if (i < cap.n) {
      in = d.level(i) * MatrixXd(b.boundary_diag[i]);
      if (i > 0) in += d.level(i - 1) * MatrixXd(b.boundary_up[i]);
      in += d.level(i + 1) * MatrixXd(b.boundary_down[i + 1]);
    } else if (i == cap.n) {
      in = d.level(i) * MatrixXd(b.boundary_diag[i]) + d.level(i - 1) * MatrixXd(b.boundary_up[i]) +
           d.level(i + 1) * b.a2;
    } else {
      in = d.level(i) * b.a1 + d.level(i - 1) * b.a0 + d.level(i + 1) * b.a2;
    }
    CHECK(in.cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("no returns and ample beds give Erlang-C", "[holding][oracle]") {
  const ModelParams p{3.0, 1.0, 1.0, 0.0};
  const CapacityPair cap{4, 84};
  const HoldingDistribution d = solve_holding(p, cap);
  // M/M/4 queue-length law.
  const double a = 3.0;
  std::vector<double> w(cap.n, 1.0);
  for (int k = 1; k < cap.n; ++k) w[k] = w[k - 1] * a / std::min(k, cap.s);
  double z = 0.0;
  for (int k = 0; k < 4; ++k) z += w[k];
  z += w[4] / (1.0 - a / 4.0);
  for (int k = 0; k < cap.n; ++k) CHECK(d.level(k).sum() == Approx(w[k] / z).margin(1e-6));
  CHECK(perf_holding(d).p_delay == Approx(oracle::erlang_c(a, 4)).margin(1e-6));
}

TEST_CASE("holding queue mean matches the series", "[holding]") {
  const ModelParams p{1.8, 1.0, 0.25, 0.75};
  const HoldingDistribution d = solve_holding(p, {9, 40});
  double series = 0.0;
  for (int i = 1; i <= 200; ++i) series += i * d.level(40 + i).sum();
  CHECK(perf_holding(d).e_holding_queue == Approx(series).margin(1e-8));
}

TEST_CASE("congestion vanishes at light load", "[holding]") {
  const PerformanceReport rep = perf_holding(solve_holding({1e-6, 1.0, 0.25, 0.75}, {9, 40}));
  CHECK(rep.p_delay < 1e-12);
  CHECK(rep.p_boundary < 1e-12);
  CHECK(rep.e_holding_queue < 1e-12);
  CHECK(rep.rho_s < 1e-5);
}

TEST_CASE("delay near the tabulated simulation at R1 = 25", "[holding][paper]") {
  const ModelParams p{6.25, 1.0, 0.25, 0.75};
  const CapacityPair cap = qed_capacity(25.0, 0.25, {1.0, 1.0}, BedRounding::Nearest);
  REQUIRE(cap == CapacityPair{30, 110});
  const PerformanceReport rep = perf_holding(solve_holding(p, cap));
  CHECK(rep.p_delay == Approx(0.2204).margin(0.02));
  CHECK(rep.p_delay_request == Approx(0.2204).margin(0.005));
  CHECK(5.0 * rep.e_wait_request == Approx(0.1631).margin(0.005));
}

TEST_CASE("holding never blocks less than blocking", "[holding][property]") {
  for (int s : {5, 9}) {
    for (int n = s + 2; n <= 40; n += 4) {
      const ModelParams p{0.8 * 0.25 * rho_max(kCase2, {s, n}).r_max, 1.0, 0.25, 0.75};
      const PerformanceReport hold = perf_holding(solve_holding(p, {s, n}));
      const PerformanceReport block = perf_blocking(stationary_blocking(p, {s, n}));
      CHECK(block.p_boundary <= hold.p_boundary + 1e-12);
      CHECK(block.rho_n <= hold.rho_n + 1e-12);
    }
  }
}

TEST_CASE("matrix and level csv", "[holding][io]") {
  const HoldingDistribution d = solve_holding({0.1, 1.0, 0.25, 0.75}, {1, 2});
  std::ostringstream m;
  write_matrix_csv(m, d.g.g);
  CHECK(m.str().rfind("row,col,value\n", 0) == 0);
  std::ostringstream l;
  write_csv(l, d, 2);
  CHECK(l.str().rfind("level,j,prob\n", 0) == 0);
  int rows = 0;
  std::istringstream is(l.str());
  std::string line;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 1 + 1 + 2 + 3 + 3 + 3);
}
