#pragma once

#include <span>
#include <string_view>

#include <Eigen/Core>

#include "driftgp/parallel.hpp"
#include "driftgp/vec2.hpp"

namespace driftgp {

/// Streamfunction-kernel hyperparameters. The streamfunction amplitude is
/// derived as current_variance * lengthscale^2 so that the current kernel has
/// zero-lag variance exactly current_variance.
struct HyperParams {
  double lengthscale = 35'000.0;  // m
  double current_variance = 0.5;  // m^2/s^2
  double gps_noise_std = 3.0;     // m

  HyperParams() = default;
  HyperParams(double lengthscale, double current_variance, double gps_noise_std);

  /// Throws std::invalid_argument when an invariant is broken.
  void validate() const;

  double streamfunction_variance() const { return current_variance * lengthscale * lengthscale; }

  friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

enum class KernelKind { Incompressible, StandardDiagonal };

std::string_view to_string(KernelKind kind);
/// Accepts "incompressible" or "standard".
KernelKind parse_kernel_kind(std::string_view name);

using Mat2 = Eigen::Matrix2d;

/// Squared-exponential streamfunction kernel k(d) = sigma_phi^2 exp(-|d|^2 / 2 l^2).
double eval_scalar_kernel(const HyperParams& hp, const Vec2& lag);

/// 2x2 covariance between currents at x and x'. Incompressible is D k D' of the
/// streamfunction kernel; StandardDiagonal is diag(k_SE, k_SE) with amplitude
/// current_variance.
Mat2 eval_kernel(const HyperParams& hp, KernelKind kind, const Vec2& x, const Vec2& xp);

/// Block Gram matrix (2|rows| x 2|cols|); block (i, j) = K(rows[i], cols[j]),
/// component order (u, v) inside each block.
Eigen::MatrixXd build_block_matrix(const HyperParams& hp, KernelKind kind,
                                   std::span<const Vec2> rows, std::span<const Vec2> cols,
                                   Execution exec = Execution::Parallel);

/// Symmetric Gram K(points, points); only the upper block triangle is evaluated.
Eigen::MatrixXd build_gram_matrix(const HyperParams& hp, KernelKind kind,
                                  std::span<const Vec2> points,
                                  Execution exec = Execution::Parallel);

/// Sum over j of K(rows[i], cols[j]) stacked as a 2|rows| x 2 matrix; this is
/// K(rows, cols) times the stacked-identity column [I I ... I]^T.
Eigen::MatrixXd block_row_sums(const HyperParams& hp, KernelKind kind,
                               std::span<const Vec2> rows, std::span<const Vec2> cols,
                               Execution exec = Execution::Parallel);

}  // namespace driftgp
