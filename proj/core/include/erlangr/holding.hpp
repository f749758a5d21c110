#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <iosfwd>
#include <vector>

#include "erlangr/model.hpp"

namespace erlangr {

/// Stability bound of the holding model.
struct StabilityBound {
  double rho_max = 0.0;  ///< supremum of R1/s for which the holding model is stable
  double r_max = 0.0;    ///< s * rho_max, the largest admissible needy load
};

/// Bound from the closed ward with n patients: rho_max = E[min(Q1, s)]/s.
StabilityBound rho_max(const ModelParams& params, CapacityPair cap);

/// Generator blocks of the level process, level = patients in the system
/// (needy + content + holding), phase = needy count, ascending.
struct QbdBlocks {
  using Sparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  std::vector<Sparse> boundary_diag;  ///< B_ii, i = 0..n, size (i+1) x (i+1)
  std::vector<Sparse> boundary_up;    ///< [i] = B_{i-1,i}, i = 1..n; [0] unused
  std::vector<Sparse> boundary_down;  ///< [i] = B_{i,i-1}, i = 1..n; [0] unused
  Eigen::MatrixXd a0;                 ///< up one level above n
  Eigen::MatrixXd a1;                 ///< within a level >= n
  Eigen::MatrixXd a2;                 ///< down one level above n
  CapacityPair cap;
  ModelParams params;
};

QbdBlocks build_qbd_blocks(const ModelParams& params, CapacityPair cap);

enum class GMethod {
  Functional,            ///< G <- -(A0 + G^2 A2) A1^-1 from G = 0
  LogarithmicReduction,  ///< quadratically convergent; same fixed point
};

struct RateMatrixOptions {
  GMethod method = GMethod::Functional;
  double tol = 1e-12;        ///< max-norm of successive iterates
  long max_iter = 1'000'000;
  bool check_stability = true;  ///< throw NotStable from the rho_max bound before iterating
};

/// Minimal nonnegative solution of A0 + G A1 + G^2 A2 = 0.
struct RateMatrixG {
  Eigen::MatrixXd g;
  long iterations = 0;
  double residual = 0.0;  ///< max-norm of A0 + G A1 + G^2 A2
  GMethod method = GMethod::Functional;
};

RateMatrixG solve_rate_matrix(const QbdBlocks& blocks, const RateMatrixOptions& opts = {});

double spectral_radius(const Eigen::MatrixXd& m);

enum class BoundarySolver {
  Auto,            ///< DenseLU up to kDenseBoundaryLimit unknowns, LevelReduction beyond
  DenseLU,         ///< stacked boundary system, partial-pivoting LU
  LevelReduction,  ///< block elimination from level n down to level 0
};

inline constexpr int kDenseBoundaryLimit = 3000;

/// Stationary law: boundary levels pi_0..pi_n and the geometric tail pi_{n+i} = pi_n G^i.
struct HoldingDistribution {
  std::vector<Eigen::RowVectorXd> boundary;
  RateMatrixG g;
  CapacityPair cap;
  ModelParams params;

  /// pi_i for any level i >= 0.
  Eigen::RowVectorXd level(int i) const;

  /// pi_n (I - G)^-1, the phase mass of all levels >= n.
  Eigen::RowVectorXd upper_mass() const;

  /// Total mass; 1 up to solver accuracy.
  double total_mass() const;
};

HoldingDistribution stationary_holding(const QbdBlocks& blocks, const RateMatrixG& g,
                                       BoundarySolver solver = BoundarySolver::Auto);

/// Blocks, G and stationary law in one call.
HoldingDistribution solve_holding(const ModelParams& params, CapacityPair cap,
                                  const RateMatrixOptions& opts = {},
                                  BoundarySolver solver = BoundarySolver::Auto);

/// State-based measures; p_boundary is the probability an arrival is held.
PerformanceReport perf_holding(const HoldingDistribution& dist);

/// CSV `row,col,value` of the nonzero entries.
void write_matrix_csv(std::ostream& os, const Eigen::MatrixXd& m);

/// CSV `level,j,prob` for levels 0..n + extra_levels.
void write_csv(std::ostream& os, const HoldingDistribution& dist, int extra_levels = 0);

}  // namespace erlangr
