#include "erlangr/qed_limits.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <iomanip>
#include <istream>
#include <locale>
#include <ostream>
#include <sstream>
#include <string>

#include "erlangr/errors.hpp"
#include "erlangr/normal.hpp"

namespace erlangr {

namespace {

using normal::cdf;
using normal::pdf;

constexpr double kQuadTol = 1e-12;
constexpr int kQuadMaxDepth = 48;
// Phi(-10) < 1e-23, so the integrand mass left of the cut is negligible.
constexpr double kLowerCut = -10.0;
// The general wait formula divides by beta^2 and loses digits to cancellation
// below this width, so h is interpolated through beta = 0 and +-kWaitBlend there.
constexpr double kWaitBlend = 1e-3;

void require_open_fraction(double r) {
  if (!(r > 0.0 && r < 1.0)) {
    throw DomainError("limit formulas need 0 < r < 1, got r = " + std::to_string(r) +
                      " (use the loss-model limits for r = 1)");
  }
}

template <class F>
double simpson_step(const F& f, double a, double b, double fa, double fm, double fb, double whole,
                    double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol) {
  if (!(b > a)) return 0.0;
  // Seed with a few panels so a narrow peak cannot hide between the first samples.
  constexpr int kPanels = 16;
  const double w = (b - a) / kPanels;
  double total = 0.0;
  for (int i = 0; i < kPanels; ++i) {
    const double lo = a + i * w;
    const double hi = i + 1 == kPanels ? b : lo + w;
    const double flo = f(lo);
    const double fhi = f(hi);
    const double fm = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
    total += simpson_step(f, lo, hi, flo, fm, fhi, whole, tol / kPanels, kQuadMaxDepth);
  }
  return total;
}

}  // namespace

double LimitInputs::eta() const { return (gamma - beta * std::sqrt(r)) / std::sqrt(1.0 - r); }

double LimitInputs::omega() const { return (gamma - beta / std::sqrt(r)) / std::sqrt(1.0 - r); }

double gaussian_mix_integral(double beta, double gamma, double r) {
  require_open_fraction(r);
  const double sr = std::sqrt(r);
  const double sq = std::sqrt(1.0 - r);
  const auto kernel = [&](double t) { return cdf((gamma - t * sr) / sq) * pdf(t); };
  const double lo = std::min(kLowerCut, beta + kLowerCut);
  return adaptive_simpson(kernel, lo, beta, kQuadTol);
}

BlockingLimits limits_blocking(const LimitInputs& in, double mu) {
  require_open_fraction(in.r);
  if (!(mu > 0.0)) throw DomainError("mu must be positive");
  const double beta = in.beta;
  const double gamma = in.gamma;
  const double r = in.r;
  const double sr = std::sqrt(r);
  const double eta = in.eta();
  const double omega = in.omega();
  const double phi_eta = pdf(eta);
  const double cdf_eta = cdf(eta);
  const double tail = sr * pdf(gamma) * cdf(-omega * sr);

  BlockingLimits out;
  if (std::abs(beta) < kBetaZeroThreshold) {
    const double integral = gaussian_mix_integral(0.0, gamma, r);
    const double xi = r / (1.0 - r);
    const double mix = eta * cdf_eta + phi_eta;
    const double b0 = std::sqrt(1.0 / xi) * normal::kInvSqrt2Pi * mix;
    out.g = 1.0 / (1.0 + integral / b0);
    out.f = (tail + cdf_eta * normal::kInvSqrt2Pi) / (integral + b0);
    out.h = 0.5 / mu * ((eta * eta + 1.0) * cdf_eta + eta * phi_eta) /
            (xi * normal::kSqrt2Pi * integral + std::sqrt(xi) * mix);
    return out;
  }

  const double integral = gaussian_mix_integral(beta, gamma, r);
  const double phi_beta = pdf(beta);
  // K = phi(sqrt(beta^2 + eta^2)) e^{omega^2/2} Phi(omega) grows like
  // exp(beta^2 / 2r) for very negative beta; every term is scaled by
  // e^{-shift} so that K never overflows.
  const double log_k = normal::log_damped_scaled_cdf(beta * beta + eta * eta, omega);
  const double shift = std::max(0.0, log_k);
  const double down = std::exp(-shift);
  const double k = std::exp(log_k - shift);
  const double edge = phi_beta * cdf_eta * down - k;
  const double denom = integral * down + edge / beta;
  out.g = 1.0 / (1.0 + beta * integral * down / edge);
  out.f = (tail * down + k) / denom;
  if (std::abs(beta) < kWaitBlend) {
    const double lo = limits_blocking({-kWaitBlend, gamma, r}, mu).h;
    const double mid = limits_blocking({0.0, gamma, r}, mu).h;
    const double hi = limits_blocking({kWaitBlend, gamma, r}, mu).h;
    const double x = beta / kWaitBlend;
    out.h = mid + 0.5 * x * (hi - lo) + 0.5 * x * x * (hi - 2.0 * mid + lo);
    return out;
  }
  out.h = (phi_beta * cdf_eta * down / (beta * beta) + (beta / r - gamma / sr - 1.0 / beta) * k / beta -
           std::sqrt((1.0 - r) / r) * phi_beta * phi_eta * down / beta) /
          denom / mu;
  return out;
}

double halfin_whitt_delay(double beta) {
  if (!(beta > 0.0)) throw DomainError("Halfin-Whitt delay probability needs beta > 0");
  return 1.0 / (1.0 + beta * normal::cdf_over_pdf(beta));
}

LossLimits loss_model_limits(double beta, double gamma) {
  if (!(gamma > beta)) throw DomainError("loss-model limits need gamma > beta");
  const double gap = gamma - beta;
  const double x = beta * gap;
  // (1 - e^{-x}) / beta = gap * (1 - e^{-x}) / x, with the ratio -> 1 as x -> 0
  const double ratio = x == 0.0 ? 1.0 : -std::expm1(-x) / x;
  const double head = gap * ratio;
  const double denom = head + normal::cdf_over_pdf(beta);
  return {head / denom, std::exp(-x) / denom};
}

double erlang_b_tail(double gamma, double r) {
  if (!(r > 0.0 && r <= 1.0)) throw DomainError("erlang_b_tail needs 0 < r <= 1");
  return std::sqrt(r) * normal::pdf_over_cdf(gamma);
}

std::vector<LimitRow> evaluate_limit_grid(std::istream& csv, double mu) {
  std::vector<LimitRow> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(csv, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (rows.empty() && std::isalpha(static_cast<unsigned char>(line[0]))) continue;  // header
    std::istringstream fields(line);
    fields.imbue(std::locale::classic());
    LimitInputs in;
    char c1 = 0;
    char c2 = 0;
    if (!(fields >> in.beta >> c1 >> in.gamma >> c2 >> in.r) || c1 != ',' || c2 != ',') {
      throw DomainError("malformed limit grid row " + std::to_string(line_no) + ": " + line);
    }
    rows.push_back({in, limits_blocking(in, mu)});
  }
  return rows;
}

void write_limit_rows(std::ostream& os, const std::vector<LimitRow>& rows) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf << std::setprecision(10);
  buf << "beta,gamma,r,g,f,h\n";
  for (const auto& row : rows) {
    buf << row.in.beta << ',' << row.in.gamma << ',' << row.in.r << ',' << row.out.g << ','
        << row.out.f << ',' << row.out.h << '\n';
  }
  os << buf.str();
}

}  // namespace erlangr
