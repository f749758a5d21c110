#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <sstream>
#include <vector>

#include "erlangr/blocking.hpp"
#include "erlangr/errors.hpp"
#include "erlangr/qed_limits.hpp"
#include "support/oracles.hpp"

using namespace erlangr;
using Catch::Approx;

namespace {

struct LimitFixture {
  double r;
  double beta;
  double gamma;
  double g;  // negative when the tabulated value is not a limit
  double f;
  double h;
};

const std::vector<LimitFixture> kBlockingRows = {
    {0.10, 1, 1, 0.1767, 0.0981, 0.1437}, {0.10, 1, 2, 0.2108, 0.0217, 0.1947},
    {0.10, 2, 1, 0.0188, 0.0914, 0.0084}, {0.10, 2, 2, 0.0247, 0.0177, 0.0118},
    {0.25, 1, 1, 0.1429, 0.1569, 0.0940}, {0.25, 1, 2, 0.1976, 0.0391, 0.1617},
    {0.25, 2, 1, 0.0126, 0.1445, 0.0048}, {0.25, 2, 2, 0.0220, 0.0284, 0.0097},
    {0.50, 1, 1, -1.0, 0.2185, 0.0478},   {0.50, 1, 2, 0.1792, 0.0605, 0.1199},
    {0.50, 2, 1, -1.0, 0.2039, 0.0014},   {0.50, 2, 2, 0.0173, 0.0404, 0.0063},
};

// M/M/s/n on 0..n in log space, for loads where the plain product overflows.
std::vector<double> mmsn_log(double a, int s, int n) {
  std::vector<double> lw(n + 1, 0.0);
  for (int k = 1; k <= n; ++k) lw[k] = lw[k - 1] + std::log(a / std::min(k, s));
  double top = lw[0];
  for (double x : lw) top = std::max(top, x);
  double z = 0.0;
  for (double& x : lw) {
    x = std::exp(x - top);
    z += x;
  }
  for (double& x : lw) x /= z;
  return lw;
}

}  // namespace

TEST_CASE("eta and omega", "[limits]") {
  const LimitInputs in{0.7, 1.3, 0.3};
  CHECK(in.eta() == Approx((1.3 - 0.7 * std::sqrt(0.3)) / std::sqrt(0.7)).epsilon(1e-14));
  CHECK(in.omega() == Approx((1.3 - 0.7 / std::sqrt(0.3)) / std::sqrt(0.7)).epsilon(1e-14));
  CHECK(in.omega() == Approx(in.eta() - 0.7 * std::sqrt(0.7 / 0.3)).epsilon(1e-13));
}

TEST_CASE("gaussian mixture integral against brute-force quadrature", "[limits][oracle]") {
  const double sr = std::sqrt(0.25);
  const double sq = std::sqrt(0.75);
  const auto kernel = [&](double t) { return oracle::big_phi((1.0 - t * sr) / sq) * oracle::phi(t); };
  const double ref = oracle::trapezoid(kernel, -12.0, 1.0, 10'000'000);
  CHECK(std::abs(gaussian_mix_integral(1.0, 1.0, 0.25) - ref) < 1e-9);
}

TEST_CASE("gaussian mixture integral in its degenerate limits", "[limits]") {
  for (double beta : {-1.5, 0.0, 0.8, 2.5}) {
    CHECK(std::abs(gaussian_mix_integral(beta, 40.0, 0.3) - oracle::big_phi(beta)) < 1e-10);
    CHECK(gaussian_mix_integral(beta, 0.7, 1e-12) ==
          Approx(oracle::big_phi(0.7) * oracle::big_phi(beta)).margin(1e-8));
  }
}

TEST_CASE("tabulated blocking limits", "[limits][paper]") {
  for (const auto& row : kBlockingRows) {
    CAPTURE(row.r, row.beta, row.gamma);
    const BlockingLimits lim = limits_blocking({row.beta, row.gamma, row.r});
    if (row.g >= 0.0) CHECK(lim.g == Approx(row.g).margin(5e-4));
    CHECK(lim.f == Approx(row.f).margin(5e-4));
    CHECK(lim.h == Approx(row.h).margin(5e-4));
  }
}

TEST_CASE("wait limit scales with the service rate", "[limits]") {
  const BlockingLimits one = limits_blocking({1.0, 1.0, 0.25}, 1.0);
  const BlockingLimits four = limits_blocking({1.0, 1.0, 0.25}, 4.0);
  CHECK(four.h == Approx(one.h / 4.0));
  CHECK(four.g == one.g);
  const BlockingLimits zero = limits_blocking({0.0, 1.0, 0.25}, 2.0);
  CHECK(zero.h == Approx(limits_blocking({0.0, 1.0, 0.25}).h / 2.0));
}

TEST_CASE("the beta = 0 branch joins the general formula", "[limits]") {
  for (double gamma : {0.5, 1.0, 2.0}) {
    for (double r : {0.1, 0.25, 0.5}) {
      CAPTURE(gamma, r);
      const BlockingLimits at = limits_blocking({0.0, gamma, r});
      for (double beta : {-1e-6, 1e-6}) {
        const BlockingLimits near = limits_blocking({beta, gamma, r});
        CHECK(std::abs(near.g - at.g) < 1e-4);
        CHECK(std::abs(near.f - at.f) < 1e-4);
        CHECK(std::abs(near.h - at.h) < 1e-4);
      }
    }
  }
}

TEST_CASE("limits reject r outside (0, 1)", "[limits]") {
  CHECK_THROWS_AS(limits_blocking({1.0, 1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(limits_blocking({1.0, 1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(halfin_whitt_delay(0.0), DomainError);
  CHECK_THROWS_AS(loss_model_limits(2.0, 2.0), DomainError);
}

TEST_CASE("Halfin-Whitt delay", "[limits]") {
  CHECK(halfin_whitt_delay(1e-9) == Approx(1.0).margin(1e-8));
  CHECK(halfin_whitt_delay(0.5) ==
        Approx(1.0 / (1.0 + 0.5 * oracle::big_phi(0.5) / oracle::phi(0.5))));
  CHECK(std::abs(limits_blocking({0.5, 40.0, 0.25}).g - halfin_whitt_delay(0.5)) < 1e-3);
  double prev = 1.0;
  for (int i = 1; i <= 100; ++i) {
    const double v = halfin_whitt_delay(0.04 * i);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("limits stay non-degenerate and ordered on a grid", "[limits][property]") {
  for (double r : {0.1, 0.25, 0.5}) {
    for (double beta = -2.0; beta <= 2.0 + 1e-9; beta += 0.25) {
      double prev_g = 0.0;
      double prev_f = INFINITY;
      for (double gamma = -1.0; gamma <= 2.0 + 1e-9; gamma += 0.25) {
        CAPTURE(r, beta, gamma);
        const BlockingLimits lim = limits_blocking({beta, gamma, r});
        CHECK(lim.g > 0.0);
        CHECK(lim.g < 1.0);
        CHECK(lim.f > 0.0);
        CHECK(lim.h > 0.0);
        CHECK(lim.g >= prev_g - 1e-12);
        CHECK(lim.f <= prev_f + 1e-12);
        if (beta > 0.0) CHECK(lim.g <= halfin_whitt_delay(beta) + 1e-12);
        prev_g = lim.g;
        prev_f = lim.f;
      }
    }
  }
}

TEST_CASE("extreme hedges stay finite", "[limits]") {
  for (double beta : {-6.0, -3.0, 6.0}) {
    for (double gamma : {-3.0, 0.0, 6.0}) {
      const BlockingLimits lim = limits_blocking({beta, gamma, 0.25});
      CHECK(std::isfinite(lim.g));
      CHECK(std::isfinite(lim.f));
      CHECK(std::isfinite(lim.h));
    }
  }
}

TEST_CASE("exact blocking measures approach the limits", "[limits][oracle]") {
  const BlockingLimits lim = limits_blocking({1.0, 1.0, 0.25});
  double prev_gap = INFINITY;
  for (double r1 : {25.0, 100.0, 250.0}) {
    const ModelParams p{r1 * 0.25, 1.0, 0.25, 0.75};
    const CapacityPair cap = qed_capacity(r1, 0.25, {1.0, 1.0}, BedRounding::Nearest);
    const PerformanceReport rep = perf_blocking(stationary_blocking(p, cap));
    const double gap = std::abs(rep.p_delay - lim.g);
    CHECK(gap < prev_gap);
    prev_gap = gap;
    if (r1 == 250.0) {
      CHECK(std::abs(rep.p_delay - lim.g) < 0.004);
      CHECK(std::abs(std::sqrt(r1) * rep.p_boundary - lim.f) < 0.005);
      CHECK(std::abs(std::sqrt(r1) * rep.e_wait - lim.h) < 0.003);
    }
  }
}

TEST_CASE("loss-model limits against M/M/s/n at R = 10^4", "[limits][oracle]") {
  const double a = 1e4;
  const int s = 10'100;
  const int n = 10'200;
  const std::vector<double> pi = mmsn_log(a, s, n);
  double delay = 0.0;
  for (int k = s; k <= n; ++k) delay += pi[k];
  const LossLimits lim = loss_model_limits(1.0, 2.0);
  CHECK(std::abs(lim.g - delay) < 0.01);
  CHECK(std::abs(lim.f - std::sqrt(a) * pi[n]) < 0.01);
  CHECK(lim.f / 1.0 + lim.g <= 1.0 + 1e-15);
}

TEST_CASE("loss-model limits for large bed hedge", "[limits]") {
  const LossLimits lim = loss_model_limits(0.8, 40.0);
  CHECK(lim.g == Approx(halfin_whitt_delay(0.8)).margin(1e-10));
  CHECK(lim.f < 1e-10);
  for (double beta : {0.3, 1.0, 2.0}) {
    const double gamma = beta + 0.7;
    const LossLimits l = loss_model_limits(beta, gamma);
    CHECK(beta * l.g / l.f == Approx(std::expm1(beta * (gamma - beta))).epsilon(1e-12));
  }
}

TEST_CASE("scaled Erlang-B tail as the large-beta floor", "[limits][paper]") {
  CHECK(erlang_b_tail(1.0, 0.5) ==
        Approx(std::sqrt(0.5) * oracle::phi(1.0) / oracle::big_phi(1.0)).epsilon(1e-14));
  CHECK(erlang_b_tail(40.0, 0.5) < 1e-300);
  for (double gamma : {0.0, 1.0, 2.0}) {
    CHECK(std::abs(limits_blocking({8.0, gamma, 0.5}).f - erlang_b_tail(gamma, 0.5)) < 0.02);
  }
}

TEST_CASE("limit grid from csv", "[limits][io]") {
  std::istringstream in("beta,gamma,r\n1,1,0.25\n# comment\n2,2,0.1\n");
  const auto rows = evaluate_limit_grid(in);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].out.g == Approx(0.1429).margin(5e-4));
  CHECK(rows[1].out.f == Approx(0.0177).margin(5e-4));
  std::ostringstream out;
  write_limit_rows(out, rows);
  CHECK(out.str().rfind("beta,gamma,r,g,f,h\n1,1,0.25,", 0) == 0);

  std::istringstream bad("1;2;3\n");
  CHECK_THROWS_AS(evaluate_limit_grid(bad), DomainError);
}
