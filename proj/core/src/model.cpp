#include "erlangr/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "erlangr/errors.hpp"

namespace erlangr {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(name) + " must be positive and finite, got " + std::to_string(v));
  }
}

void require_load(double r1, double r) {
  require_positive(r1, "r1");
  if (!(r > 0.0 && r <= 1.0)) {
    throw DomainError("needy fraction r must lie in (0, 1], got " + std::to_string(r));
  }
}

// Loads built from decimal inputs (p = 0.9, ...) land a few ulps off exact
// integers; snap those before rounding so 30.0000000000004 stays 30.
double snap(double x) {
  const double nearest = std::round(x);
  return std::abs(x - nearest) <= 1e-9 * std::max(1.0, std::abs(x)) ? nearest : x;
}

int clamp_count(double x) {
  if (!std::isfinite(x) || x < 1.0) return 1;
  if (x > 1e9) throw DomainError("capacity exceeds representable range");
  return static_cast<int>(x);
}

}  // namespace

void ModelParams::validate() const {
  require_positive(lambda, "lambda");
  require_positive(mu, "mu");
  require_positive(delta, "delta");
  if (p == 1.0) {
    throw DomainError("p = 1 gives an infinite offered load");
  }
  if (!(p >= 0.0 && p < 1.0)) {
    throw DomainError("return probability p must lie in [0, 1), got " + std::to_string(p));
  }
}

void validate(CapacityPair cap) {
  if (cap.s < 1 || cap.n < 1) {
    throw DomainError("capacity requires s >= 1 and n >= 1");
  }
}

DerivedLoads derive_loads(const ModelParams& params) {
  params.validate();
  DerivedLoads out;
  const double exit = 1.0 - params.p;
  out.r1 = params.lambda / (exit * params.mu);
  out.r2 = params.p * params.lambda / (exit * params.delta);
  out.r = params.delta / (params.delta + params.p * params.mu);
  return out;
}

DerivedLoads derive_loads(const ModelParams& params, CapacityPair cap) {
  validate(cap);
  DerivedLoads out = derive_loads(params);
  out.rho = out.r1 / cap.s;
  return out;
}

CapacityPair qed_capacity(double r1, double r, QedPair pair, BedRounding rounding) {
  require_load(r1, r);
  const double bed_load = r1 / r;
  const double s = std::ceil(snap(r1 + pair.beta * std::sqrt(r1)));
  const double n_raw = snap(bed_load + pair.gamma * std::sqrt(bed_load));
  const double n = rounding == BedRounding::Floor ? std::floor(n_raw) : std::round(n_raw);
  return {clamp_count(s), clamp_count(n)};
}

QedPair invert_capacity(CapacityPair cap, double r1, double r) {
  require_load(r1, r);
  const double bed_load = r1 / r;
  return {(cap.s - r1) / std::sqrt(r1), (cap.n - bed_load) / std::sqrt(bed_load)};
}

}  // namespace erlangr
