#include "driftgp/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace driftgp {

HyperParams::HyperParams(double lengthscale_, double current_variance_, double gps_noise_std_)
    : lengthscale(lengthscale_), current_variance(current_variance_), gps_noise_std(gps_noise_std_) {
  validate();
}

void HyperParams::validate() const {
  if (!(lengthscale > 0.0) || !std::isfinite(lengthscale)) {
    throw std::invalid_argument("HyperParams: lengthscale must be positive");
  }
  if (!(current_variance > 0.0) || !std::isfinite(current_variance)) {
    throw std::invalid_argument("HyperParams: current variance must be positive");
  }
  if (!(gps_noise_std >= 0.0) || !std::isfinite(gps_noise_std)) {
    throw std::invalid_argument("HyperParams: GPS noise std must be non-negative");
  }
}

std::string_view to_string(KernelKind kind) {
  return kind == KernelKind::Incompressible ? "incompressible" : "standard";
}

KernelKind parse_kernel_kind(std::string_view name) {
  if (name == "incompressible") return KernelKind::Incompressible;
  if (name == "standard") return KernelKind::StandardDiagonal;
  throw std::invalid_argument("unknown kernel kind '" + std::string(name) +
                              "' (expected incompressible|standard)");
}

double eval_scalar_kernel(const HyperParams& hp, const Vec2& lag) {
  const double l2 = hp.lengthscale * hp.lengthscale;
  return hp.streamfunction_variance() * std::exp(-lag.squared_norm() / (2.0 * l2));
}

Mat2 eval_kernel(const HyperParams& hp, KernelKind kind, const Vec2& x, const Vec2& xp) {
  const double dx = x.x() - xp.x();
  const double dy = x.y() - xp.y();
  const double l2 = hp.lengthscale * hp.lengthscale;
  // sigma_phi^2 / l^2 == current_variance
  const double envelope = hp.current_variance * std::exp(-(dx * dx + dy * dy) / (2.0 * l2));
  Mat2 k;
  if (kind == KernelKind::Incompressible) {
    const double cross = envelope * dx * dy / l2;
    k << envelope * (1.0 - dy * dy / l2), cross,
         cross, envelope * (1.0 - dx * dx / l2);
  } else {
    k << envelope, 0.0,
         0.0, envelope;
  }
  return k;
}

Eigen::MatrixXd build_block_matrix(const HyperParams& hp, KernelKind kind,
                                   std::span<const Vec2> rows, std::span<const Vec2> cols,
                                   Execution exec) {
  Eigen::MatrixXd out(2 * rows.size(), 2 * cols.size());
  // Column-major storage: one task per column block keeps writes contiguous.
  parallel_for(cols.size(), exec, [&](std::size_t j) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out.block<2, 2>(2 * i, 2 * j) = eval_kernel(hp, kind, rows[i], cols[j]);
    }
  });
  return out;
}

Eigen::MatrixXd build_gram_matrix(const HyperParams& hp, KernelKind kind,
                                  std::span<const Vec2> points, Execution exec) {
  const std::size_t n = points.size();
  Eigen::MatrixXd out(2 * n, 2 * n);
  parallel_for(n, exec, [&](std::size_t j) {
    for (std::size_t i = 0; i <= j; ++i) {
      const Mat2 k = eval_kernel(hp, kind, points[i], points[j]);
      out.block<2, 2>(2 * i, 2 * j) = k;
      // K(x', x) = K(x, x')^T, so the mirror is exact.
      out.block<2, 2>(2 * j, 2 * i) = k.transpose();
    }
  });
  return out;
}

Eigen::MatrixXd block_row_sums(const HyperParams& hp, KernelKind kind,
                               std::span<const Vec2> rows, std::span<const Vec2> cols,
                               Execution exec) {
  Eigen::MatrixXd out(2 * rows.size(), 2);
  parallel_for(rows.size(), exec, [&](std::size_t i) {
    Mat2 acc = Mat2::Zero();
    for (const Vec2& c : cols) acc += eval_kernel(hp, kind, rows[i], c);
    out.block<2, 2>(2 * i, 0) = acc;
  });
  return out;
}

}  // namespace driftgp
