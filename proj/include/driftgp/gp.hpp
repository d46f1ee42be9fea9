#pragma once

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "driftgp/flowfield.hpp"
#include "driftgp/kernels.hpp"
#include "driftgp/vec2.hpp"

namespace driftgp {

/// Noise variance attached to each pseudo-target (m^2/s^2).
inline constexpr double kDefaultTargetNoiseVar = 1e-4;

/// Jitter ladder, as multiples of current_variance.
inline constexpr double kJitterStart = 1e-10;
inline constexpr double kJitterMax = 1e-4;

/// Multi-output GP over current vectors with an immutable training set.
///
/// The Gram matrix K_DD + (target_noise_var + jitter) I is Cholesky-factorised
/// on construction. Copies share the factor; adding data builds a new model.
class GpModel {
 public:
  GpModel(HyperParams hp, KernelKind kind, double target_noise_var = kDefaultTargetNoiseVar);
  GpModel(HyperParams hp, KernelKind kind, double target_noise_var, std::vector<Vec2> positions,
          std::vector<Vec2> currents);

  const HyperParams& hyper() const { return hp_; }
  KernelKind kind() const { return kind_; }
  double target_noise_var() const { return noise_var_; }
  const std::vector<Vec2>& positions() const { return positions_; }
  const std::vector<Vec2>& currents() const { return currents_; }
  std::size_t size() const { return positions_.size(); }
  bool empty() const { return positions_.empty(); }

  /// Jitter that made the Gram matrix factorisable (0 for an empty model).
  double jitter() const;
  /// Total diagonal regulariser target_noise_var + jitter.
  double regularization() const { return noise_var_ + jitter(); }

  /// (K_DD + regularization I)^{-1} W_D, stacked (u, v) per datum.
  const Eigen::VectorXd& weights() const;
  /// (K_DD + regularization I)^{-1} rhs.
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;
  /// L^{-1} rhs where L L^T = K_DD + regularization I.
  Eigen::MatrixXd whiten(const Eigen::MatrixXd& rhs) const;

 private:
  struct Factor;

  HyperParams hp_;
  KernelKind kind_;
  double noise_var_;
  std::vector<Vec2> positions_;
  std::vector<Vec2> currents_;
  std::shared_ptr<const Factor> factor_;
};

struct Prediction {
  std::vector<Vec2> mean;
  /// 2N x 2N posterior covariance, (u, v) per query; empty when not requested.
  Eigen::MatrixXd covariance;
};

enum class CovarianceMode { Full, None };

/// Posterior mean and covariance at the query positions.
Prediction predict(const GpModel& model, std::span<const Vec2> queries,
                   CovarianceMode mode = CovarianceMode::Full,
                   Execution exec = Execution::Parallel);

/// Posterior mean plus Sigma S, where S = [I I ... I]^T sums the query blocks.
/// Needs O(N M) memory instead of the O(M^2) of the full covariance.
struct BlockSumPrediction {
  std::vector<Vec2> mean;
  Eigen::MatrixXd covariance_times_sum;  // 2M x 2
};
BlockSumPrediction predict_block_sum(const GpModel& model, std::span<const Vec2> queries,
                                     Execution exec = Execution::Parallel);

/// Posterior mean on every point of a grid.
std::vector<Vec2> predict_mean_on_grid(const GpModel& model, const Grid& grid,
                                       Execution exec = Execution::Parallel);

/// Returns a new model whose data is the old data followed by the new targets.
GpModel add_pseudo_targets(const GpModel& model, std::span<const Vec2> positions,
                           std::span<const Vec2> currents);

/// Greedy thinning in input order: a point is kept when it lies at least
/// min_spacing from every point kept so far.
std::pair<std::vector<Vec2>, std::vector<Vec2>> downsample_targets(
    std::span<const Vec2> positions, std::span<const Vec2> currents, double min_spacing);

/// JSON snapshot of hyperparameters, kernel and data; never the factor.
std::string model_to_json(const GpModel& model);
GpModel model_from_json(const std::string& text);

}  // namespace driftgp
