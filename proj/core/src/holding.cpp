#include "erlangr/holding.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <locale>
#include <ostream>
#include <sstream>
#include <string>

#include "erlangr/detail/numeric.hpp"
#include "erlangr/errors.hpp"

namespace erlangr {

using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;
using Sparse = QbdBlocks::Sparse;
using Triplet = Eigen::Triplet<double>;

namespace {

double service_rate(int j, int s, double mu) { return std::min(j, s) * mu; }

double max_abs(const MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

Sparse level_diag(const ModelParams& prm, int s, int size, int content_total) {
  std::vector<Triplet> t;
  for (int j = 0; j < size; ++j) {
    const double nu = service_rate(j, s, prm.mu);
    const int content = content_total - j;
    t.emplace_back(j, j, -(prm.lambda + content * prm.delta + nu));
    if (content > 0) t.emplace_back(j, j + 1, content * prm.delta);
    if (j > 0 && prm.p > 0.0) t.emplace_back(j, j - 1, prm.p * nu);
  }
  Sparse m(size, size);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

void check_residual(const MatrixXd& g, const QbdBlocks& b, RateMatrixG& out) {
  out.residual = max_abs(b.a0 + g * b.a1 + g * g * b.a2);
}

RateMatrixG functional_iteration(const QbdBlocks& b, const RateMatrixOptions& opts) {
  const int m = static_cast<int>(b.a1.rows());
  const MatrixXd a1_inv = b.a1.partialPivLu().inverse();
  const VectorXd down = b.a2.diagonal();
  const double lambda = b.params.lambda;

  RateMatrixG out;
  out.method = GMethod::Functional;
  MatrixXd g = MatrixXd::Zero(m, m);
  MatrixXd next(m, m);
  MatrixXd work(m, m);
  for (long it = 1; it <= opts.max_iter; ++it) {
    work.noalias() = g * g;
    work = work * down.asDiagonal();
    work.diagonal().array() += lambda;
    next.noalias() = -work * a1_inv;
    const double step = max_abs(next - g);
    g.swap(next);
    if (step < opts.tol) {
      out.g = std::move(g);
      out.iterations = it;
      check_residual(out.g, b, out);
      return out;
    }
  }
  throw ConvergenceError("rate matrix iteration did not converge in " +
                         std::to_string(opts.max_iter) + " iterations");
}

RateMatrixG logarithmic_reduction(const QbdBlocks& b, const RateMatrixOptions& opts) {
  const int m = static_cast<int>(b.a1.rows());
  const MatrixXd id = MatrixXd::Identity(m, m);
  const Eigen::PartialPivLU<MatrixXd> neg_a1((-b.a1).eval());
  MatrixXd up = neg_a1.solve(b.a0);
  MatrixXd down = neg_a1.solve(b.a2);
  // First-passage matrix to the level below, A2 + A1 D + A0 D^2 = 0.
  MatrixXd first_passage = down;
  MatrixXd carry = up;

  RateMatrixG out;
  out.method = GMethod::LogarithmicReduction;
  long it = 0;
  for (it = 1; it <= opts.max_iter; ++it) {
    const MatrixXd mix = up * down + down * up;
    const Eigen::PartialPivLU<MatrixXd> lu((id - mix).eval());
    const MatrixXd up_next = lu.solve(up * up);
    const MatrixXd down_next = lu.solve(down * down);
    const MatrixXd increment = carry * down_next;
    first_passage += increment;
    carry = carry * up_next;
    up = up_next;
    down = down_next;
    if (max_abs(increment) < opts.tol) break;
  }
  if (it > opts.max_iter) {
    throw ConvergenceError("logarithmic reduction did not converge in " +
                           std::to_string(opts.max_iter) + " steps");
  }
  const MatrixXd u = (-b.a1 - b.a0 * first_passage).eval();
  out.g = b.a0 * u.partialPivLu().inverse();
  out.iterations = it;
  check_residual(out.g, b, out);
  return out;
}

// Solves (I - G) x = 1.
VectorXd tail_weights(const MatrixXd& g) {
  const int m = static_cast<int>(g.rows());
  return (MatrixXd::Identity(m, m) - g).partialPivLu().solve(VectorXd::Ones(m));
}

std::vector<RowVectorXd> solve_dense(const QbdBlocks& b, const MatrixXd& g) {
  const int n = b.cap.n;
  std::vector<int> offset(n + 2, 0);
  for (int i = 0; i <= n; ++i) offset[i + 1] = offset[i] + i + 1;
  const int dim = offset[n + 1];

  // Column (s) of `eq` holds the balance equation of state s: x * eq = 0.
  MatrixXd eq = MatrixXd::Zero(dim, dim);
  auto place = [&](const MatrixXd& blk, int row0, int col0) {
    eq.block(row0, col0, blk.rows(), blk.cols()) += blk;
  };
  for (int i = 0; i <= n; ++i) {
    MatrixXd diag = MatrixXd(b.boundary_diag[i]);
    if (i == n) diag += g * b.a2;
    place(diag, offset[i], offset[i]);
    if (i < n) place(MatrixXd(b.boundary_up[i + 1]), offset[i], offset[i + 1]);
    if (i > 0) place(MatrixXd(b.boundary_down[i]), offset[i], offset[i - 1]);
  }
  MatrixXd sys = eq.transpose();
  VectorXd rhs = VectorXd::Zero(dim);
  sys.row(dim - 1).setOnes();
  sys.row(dim - 1).tail(n + 1) = tail_weights(g).transpose();
  rhs(dim - 1) = 1.0;

  const Eigen::PartialPivLU<MatrixXd> lu(sys);
  const VectorXd x = lu.solve(rhs);
  const double resid = max_abs(sys * x - rhs);
  if (!x.allFinite() || !(resid < 1e-8)) {
    throw SingularSystem("boundary system is singular (residual " + std::to_string(resid) + ")");
  }
  std::vector<RowVectorXd> out(n + 1);
  for (int i = 0; i <= n; ++i) out[i] = x.segment(offset[i], i + 1).transpose();
  return out;
}

std::vector<RowVectorXd> solve_level_reduction(const QbdBlocks& b, const MatrixXd& g) {
  const int n = b.cap.n;
  // pi_i = pi_{i-1} R_i for i = 1..n.
  std::vector<MatrixXd> rmat(n + 1);
  MatrixXd below_top;  // R_{i+1} B_{i+1,i}
  for (int i = n; i >= 1; --i) {
    MatrixXd local = MatrixXd(b.boundary_diag[i]);
    if (i == n) {
      local += g * b.a2;
    } else {
      local += below_top;
    }
    // Diagonal rebuilt from the off-diagonal mass plus the downward leak.
    const VectorXd leak = MatrixXd(b.boundary_down[i]).rowwise().sum();
    for (int k = 0; k <= i; ++k) {
      local(k, k) = 0.0;
      local(k, k) = -(local.row(k).sum() + leak(k));
    }
    const Eigen::PartialPivLU<MatrixXd> lu(local.transpose());
    const MatrixXd up = MatrixXd(b.boundary_up[i]);
    rmat[i] = lu.solve(-up.transpose()).transpose();
    if (!rmat[i].allFinite()) throw SingularSystem("level reduction hit a singular block");
    below_top = rmat[i] * MatrixXd(b.boundary_down[i]);
  }
  // Levels held at unit max-norm; log_scale carries the factor.
  std::vector<RowVectorXd> out(n + 1);
  std::vector<double> log_scale(n + 1, 0.0);
  out[0] = RowVectorXd::Ones(1);
  for (int i = 1; i <= n; ++i) {
    out[i] = out[i - 1] * rmat[i];
    const double top = out[i].cwiseAbs().maxCoeff();
    if (!(top > 0.0) || !std::isfinite(top)) {
      throw SingularSystem("level reduction produced a degenerate boundary vector");
    }
    out[i] /= top;
    log_scale[i] = log_scale[i - 1] + std::log(top);
  }
  const double peak = *std::max_element(log_scale.begin(), log_scale.end());
  for (int i = 0; i <= n; ++i) out[i] *= std::exp(log_scale[i] - peak);

  detail::Accumulator mass;
  for (int i = 0; i < n; ++i) mass += out[i].sum();
  mass += out[n].dot(tail_weights(g));
  const double total = mass.value();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw SingularSystem("level reduction produced a degenerate boundary vector");
  }
  for (auto& v : out) v /= total;
  return out;
}

}  // namespace

StabilityBound rho_max(const ModelParams& params, CapacityPair cap) {
  params.validate();
  validate(cap);
  const int s = cap.s;
  const int n = cap.n;
  if (params.p == 0.0) {
    const double v = static_cast<double>(std::min(n, s)) / s;
    return {v, s * v};
  }
  // Closed ward: pi_i ∝ b^i / (kappa(i) (n-i)!), b = delta/(p mu).
  const double log_b = std::log(params.delta / (params.p * params.mu));
  std::vector<double> logw(n + 1);
  double top = detail::kNegInf;
  for (int i = 0; i <= n; ++i) {
    const double log_kappa = i <= s ? std::lgamma(i + 1.0)
                                    : std::lgamma(s + 1.0) + (i - s) * std::log(double(s));
    logw[i] = i * log_b - log_kappa - std::lgamma(n - i + 1.0);
    top = std::max(top, logw[i]);
  }
  detail::Accumulator total;
  detail::Accumulator idle;
  for (int i = 0; i <= n; ++i) {
    const double w = std::exp(logw[i] - top);
    total += w;
    idle += w * (s - std::min(i, s));
  }
  const double r_max = s - idle.value() / total.value();
  return {r_max / s, r_max};
}

QbdBlocks build_qbd_blocks(const ModelParams& params, CapacityPair cap) {
  params.validate();
  validate(cap);
  const int s = cap.s;
  const int n = cap.n;
  QbdBlocks b;
  b.cap = cap;
  b.params = params;
  b.boundary_diag.resize(n + 1);
  b.boundary_up.resize(n + 1);
  b.boundary_down.resize(n + 1);
  for (int i = 0; i <= n; ++i) {
    b.boundary_diag[i] = level_diag(params, s, i + 1, i);
    if (i == 0) continue;
    std::vector<Triplet> up;
    std::vector<Triplet> down;
    for (int j = 0; j < i; ++j) up.emplace_back(j, j + 1, params.lambda);
    for (int j = 1; j <= i; ++j) {
      const double leave = (1.0 - params.p) * service_rate(j, s, params.mu);
      if (leave > 0.0) down.emplace_back(j, j - 1, leave);
    }
    b.boundary_up[i] = Sparse(i, i + 1);
    b.boundary_up[i].setFromTriplets(up.begin(), up.end());
    b.boundary_down[i] = Sparse(i + 1, i);
    b.boundary_down[i].setFromTriplets(down.begin(), down.end());
  }
  const int m = n + 1;
  b.a0 = params.lambda * MatrixXd::Identity(m, m);
  b.a1 = MatrixXd(b.boundary_diag[n]);
  b.a2 = MatrixXd::Zero(m, m);
  for (int j = 0; j <= n; ++j) b.a2(j, j) = (1.0 - params.p) * service_rate(j, s, params.mu);
  return b;
}

RateMatrixG solve_rate_matrix(const QbdBlocks& blocks, const RateMatrixOptions& opts) {
  if (opts.check_stability) {
    const DerivedLoads loads = derive_loads(blocks.params, blocks.cap);
    const StabilityBound bound = rho_max(blocks.params, blocks.cap);
    if (*loads.rho >= bound.rho_max) throw NotStable(*loads.rho, bound.rho_max);
  }
  if (opts.method == GMethod::LogarithmicReduction) return logarithmic_reduction(blocks, opts);
  return functional_iteration(blocks, opts);
}

double spectral_radius(const MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  const Eigen::EigenSolver<MatrixXd> es(m, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

RowVectorXd HoldingDistribution::level(int i) const {
  const int n = cap.n;
  if (i <= n) return boundary[i];
  RowVectorXd v = boundary[n];
  for (int k = n; k < i; ++k) v = v * g.g;
  return v;
}

RowVectorXd HoldingDistribution::upper_mass() const {
  const int m = static_cast<int>(g.g.rows());
  const MatrixXd ig = MatrixXd::Identity(m, m) - g.g;
  return ig.transpose().partialPivLu().solve(boundary[cap.n].transpose()).transpose();
}

double HoldingDistribution::total_mass() const {
  detail::Accumulator acc;
  for (int i = 0; i < cap.n; ++i) acc += boundary[i].sum();
  acc += upper_mass().sum();
  return acc.value();
}

HoldingDistribution stationary_holding(const QbdBlocks& blocks, const RateMatrixG& g,
                                       BoundarySolver solver) {
  HoldingDistribution d;
  d.g = g;
  d.cap = blocks.cap;
  d.params = blocks.params;
  const int n = blocks.cap.n;
  const long dim = static_cast<long>(n + 1) * (n + 2) / 2;
  if (solver == BoundarySolver::Auto) {
    solver = dim <= kDenseBoundaryLimit ? BoundarySolver::DenseLU : BoundarySolver::LevelReduction;
  }
  d.boundary = solver == BoundarySolver::DenseLU ? solve_dense(blocks, g.g)
                                                 : solve_level_reduction(blocks, g.g);
  return d;
}

HoldingDistribution solve_holding(const ModelParams& params, CapacityPair cap,
                                  const RateMatrixOptions& opts, BoundarySolver solver) {
  const QbdBlocks blocks = build_qbd_blocks(params, cap);
  const RateMatrixG g = solve_rate_matrix(blocks, opts);
  return stationary_holding(blocks, g, solver);
}

PerformanceReport perf_holding(const HoldingDistribution& dist) {
  const int n = dist.cap.n;
  const int s = dist.cap.s;
  const double mu = dist.params.mu;
  const RowVectorXd upper = dist.upper_mass();

  detail::Accumulator delay;
  detail::Accumulator wait;
  detail::Accumulator busy;
  detail::Accumulator census;
  auto visit = [&](const RowVectorXd& v, double level_weight) {
    for (int j = 0; j < v.size(); ++j) {
      busy += std::min(j, s) * v(j);
      if (j >= s) {
        delay += v(j);
        wait += (j - s + 1) / (s * mu) * v(j);
      }
    }
    census += level_weight * v.sum();
  };
  for (int i = 0; i < n; ++i) visit(dist.boundary[i], i);
  visit(upper, n);

  const int m = static_cast<int>(dist.g.g.rows());
  const VectorXd w = (MatrixXd::Identity(m, m) - dist.g.g).partialPivLu().solve(VectorXd::Ones(m));

  PerformanceReport rep;
  rep.p_boundary = upper.sum();
  rep.p_delay = delay.value();
  rep.e_wait = wait.value();
  rep.e_holding_queue = (upper * dist.g.g).dot(w);
  rep.rho_s = busy.value() / s;
  rep.rho_n = census.value() / n;

  // Requests come from admitted arrivals, content patients turning needy and,
  // above level n, holding-queue admissions triggered by a departure.
  const double lambda = dist.params.lambda;
  const double delta = dist.params.delta;
  const double exit_rate = (1.0 - dist.params.p) * mu;
  detail::Accumulator req_rate;
  detail::Accumulator req_delay;
  detail::Accumulator req_wait;
  auto add_request = [&](double rate, int others) {
    req_rate += rate;
    if (others >= s) {
      req_delay += rate;
      req_wait += rate * (others - s + 1) / (s * mu);
    }
  };
  for (int i = 0; i <= n; ++i) {
    const RowVectorXd& v = dist.boundary[i];
    for (int j = 0; j < v.size(); ++j) {
      if (i < n) add_request(lambda * v(j), j);
      add_request((i - j) * delta * v(j), j);
    }
  }
  const RowVectorXd above = upper - dist.boundary[n];
  for (int j = 0; j < above.size(); ++j) {
    add_request((n - j) * delta * above(j), j);
    add_request(exit_rate * std::min(j, s) * above(j), j - 1);
  }
  rep.p_delay_request = req_delay.value() / req_rate.value();
  rep.e_wait_request = req_wait.value() / req_rate.value();
  return rep;
}

void write_matrix_csv(std::ostream& os, const MatrixXd& m) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf << std::scientific << std::setprecision(16);
  buf << "row,col,value\n";
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (m(i, j) != 0.0) buf << i << ',' << j << ',' << m(i, j) << '\n';
    }
  }
  os << buf.str();
}

void write_csv(std::ostream& os, const HoldingDistribution& dist, int extra_levels) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf << std::scientific << std::setprecision(16);
  buf << "level,j,prob\n";
  RowVectorXd v;
  for (int i = 0; i <= dist.cap.n + extra_levels; ++i) {
    v = i <= dist.cap.n ? dist.boundary[i] : RowVectorXd(v * dist.g.g);
    for (int j = 0; j < v.size(); ++j) buf << i << ',' << j << ',' << v(j) << '\n';
  }
  os << buf.str();
}

}  // namespace erlangr
