// Reference computations used by the tests. Nothing here calls into the
// library except for parameter structs; each oracle is a deliberately naive,
// independent route to the quantity under test.
#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "erlangr/model.hpp"

namespace oracle {

/// Solves pi Q = 0, sum pi = 1 for a dense generator.
inline Eigen::VectorXd stationary(const Eigen::MatrixXd& q) {
  const Eigen::Index m = q.rows();
  Eigen::MatrixXd a = q.transpose();
  a.row(m - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  b(m - 1) = 1.0;
  return a.fullPivLu().solve(b);
}

/// Sparse variant of `stationary` for generators given as triplets (from, to, rate).
inline Eigen::VectorXd stationary_sparse(Eigen::Index m,
                                         const std::vector<Eigen::Triplet<double>>& q) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(q.size() + m);
  for (const auto& e : q) {
    if (e.col() != m - 1) t.emplace_back(e.col(), e.row(), e.value());
  }
  for (Eigen::Index i = 0; i < m; ++i) t.emplace_back(m - 1, i, 1.0);
  Eigen::SparseMatrix<double> a(m, m);
  a.setFromTriplets(t.begin(), t.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  b(m - 1) = 1.0;
  return lu.solve(b);
}

/// Blocking model generator over (j, k), j + k <= n, solved directly.
inline std::map<std::pair<int, int>, double> blocking_ctmc(const erlangr::ModelParams& p,
                                                           erlangr::CapacityPair cap) {
  std::map<std::pair<int, int>, int> index;
  for (int j = 0; j <= cap.n; ++j) {
    for (int k = 0; j + k <= cap.n; ++k) {
      const int id = static_cast<int>(index.size());
      index[{j, k}] = id;
    }
  }
  const auto m = static_cast<Eigen::Index>(index.size());
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(m, m);
  auto add = [&](int from, std::pair<int, int> to, double rate) {
    if (rate <= 0.0) return;
    q(from, index.at(to)) += rate;
    q(from, from) -= rate;
  };
  for (const auto& [state, id] : index) {
    const auto [j, k] = state;
    if (j + k < cap.n) add(id, {j + 1, k}, p.lambda);
    const double served = std::min(j, cap.s) * p.mu;
    if (j > 0) {
      add(id, {j - 1, k + 1}, p.p * served);
      add(id, {j - 1, k}, (1.0 - p.p) * served);
    }
    if (k > 0) add(id, {j + 1, k - 1}, k * p.delta);
  }
  const Eigen::VectorXd pi = stationary(q);
  std::map<std::pair<int, int>, double> out;
  for (const auto& [state, id] : index) out[state] = pi(id);
  return out;
}

/// Holding model with at most `hold_cap` patients outside, keyed by (level, needy).
inline std::map<std::pair<int, int>, double> holding_ctmc(const erlangr::ModelParams& p,
                                                          erlangr::CapacityPair cap, int hold_cap) {
  const int top = cap.n + hold_cap;
  std::map<std::pair<int, int>, int> index;
  for (int i = 0; i <= top; ++i) {
    for (int j = 0; j <= std::min(i, cap.n); ++j) {
      const int id = static_cast<int>(index.size());
      index[{i, j}] = id;
    }
  }
  const auto m = static_cast<Eigen::Index>(index.size());
  std::vector<Eigen::Triplet<double>> q;
  auto add = [&](int from, std::pair<int, int> to, double rate) {
    if (rate <= 0.0) return;
    q.emplace_back(from, index.at(to), rate);
    q.emplace_back(from, from, -rate);
  };
  for (const auto& [state, id] : index) {
    const auto [i, j] = state;
    const int inside = std::min(i, cap.n);
    if (i < top) add(id, {i + 1, i < cap.n ? j + 1 : j}, p.lambda);
    const double served = std::min(j, cap.s) * p.mu;
    if (j > 0) {
      add(id, {i, j - 1}, p.p * served);
      add(id, {i - 1, i > cap.n ? j : j - 1}, (1.0 - p.p) * served);
    }
    if (inside - j > 0) add(id, {i, j + 1}, (inside - j) * p.delta);
  }
  const Eigen::VectorXd pi = stationary_sparse(m, q);
  std::map<std::pair<int, int>, double> out;
  for (const auto& [state, id] : index) out[state] = pi(id);
  return out;
}

/// Birth-death chain on 0..n with birth rate `lambda` and death rate min(k, s) mu.
inline std::vector<double> mmsn(double lambda, double mu, int s, int n) {
  std::vector<double> w(n + 1, 1.0);
  for (int k = 1; k <= n; ++k) w[k] = w[k - 1] * lambda / (std::min(k, s) * mu);
  double z = 0.0;
  for (double x : w) z += x;
  for (double& x : w) x /= z;
  return w;
}

/// Erlang-C waiting probability for offered load a on s servers (a < s).
inline double erlang_c(double a, int s) {
  double b = 1.0;
  for (int k = 1; k <= s; ++k) b = a * b / (k + a * b);
  return s * b / (s - a * (1.0 - b));
}

/// Closed ward with n patients: birth-death in the needy count j. A patient
/// who leaves is replaced at once by a new needy one, so j only moves through
/// content returns ((n - j) delta) and service-to-content moves (p min(j, s) mu).
inline double closed_ward_rho_max(const erlangr::ModelParams& p, erlangr::CapacityPair cap) {
  std::vector<double> w(cap.n + 1, 1.0);
  for (int j = 1; j <= cap.n; ++j) {
    w[j] = w[j - 1] * (cap.n - j + 1) * p.delta / (p.p * std::min(j, cap.s) * p.mu);
  }
  double z = 0.0;
  double busy = 0.0;
  for (int j = 0; j <= cap.n; ++j) {
    z += w[j];
    busy += std::min(j, cap.s) * w[j];
  }
  return busy / z / cap.s;
}

/// Composite trapezoid rule with `panels` equal panels.
template <class F>
double trapezoid(F f, double a, double b, long panels) {
  const double h = (b - a) / static_cast<double>(panels);
  double acc = 0.5 * (f(a) + f(b));
  double comp = 0.0;
  for (long i = 1; i < panels; ++i) {
    const double y = f(a + h * static_cast<double>(i)) - comp;
    const double t = acc + y;
    comp = (t - acc) - y;
    acc = t;
  }
  return acc * h;
}

inline double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }
inline double big_phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Spectral radius of a nonnegative matrix by power iteration.
inline double power_iteration(const Eigen::MatrixXd& m, int iters = 20000) {
  Eigen::VectorXd v = Eigen::VectorXd::Ones(m.rows());
  double lambda = 0.0;
  for (int k = 0; k < iters; ++k) {
    Eigen::VectorXd w = m * v;
    const double norm = w.lpNorm<Eigen::Infinity>();
    if (norm == 0.0) return 0.0;
    lambda = norm / v.lpNorm<Eigen::Infinity>();
    v = w / norm;
  }
  return lambda;
}

/// Upper tail of the chi-square distribution.
inline double chi_square_sf(double x, int dof) {
  return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

}  // namespace oracle
