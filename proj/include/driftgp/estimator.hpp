#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "driftgp/gp.hpp"
#include "driftgp/simulator.hpp"

namespace driftgp {

/// Innovation covariance eigenvalue floor, relative to (n dt)^2 sigma_W^2.
inline constexpr double kSingularInnovation = 1e-9;

/// Noise variance on EM pseudo-targets (m^2/s^2). An EM estimate only pins the
/// leg-averaged current, so its pointwise error is of the order of the flow
/// itself (~0.1 m/s); much stiffer targets from adjacent legs conflict and the
/// posterior mean grows without bound over a mission.
inline constexpr double kPseudoTargetNoiseVar = 1e-2;

struct EmConfig {
  std::size_t max_iters = 10;
  double convergence_tol = 1.0;             // m, max point change between iterates
  double pseudo_target_spacing = 1'750.0;   // m, lengthscale / 20 at the default lengthscale
  double target_noise_var = kPseudoTargetNoiseVar;  // m^2/s^2

  void validate() const;
};

/// Final EM iterate for one cycle.
struct EmState {
  std::size_t iteration = 0;
  std::vector<Vec2> trajectory;  // n + 1 points
  std::vector<Vec2> currents;    // n, at trajectory[0 .. n-1]
  bool converged = false;
  double delta = 0.0;  // m, max trajectory change in the last iteration
  /// |dt * sum(W) - drift| after each M-step, in metres.
  std::vector<double> residuals;
};

/// X[0] = X_hat[0]; X[m] = X_hat[m] + dt * sum_{j<m} W[j].
std::vector<Vec2> e_step(std::span<const Vec2> dead_reckoned, std::span<const Vec2> currents,
                         double dt);

struct MStepResult {
  std::vector<Vec2> currents;
  /// Conditional covariance Sigma - Sigma C^T (C Sigma C^T + sigma_y^2 I)^{-1} C Sigma;
  /// empty unless requested.
  Eigen::MatrixXd covariance;
};

/// Conditional mean of the currents at trajectory[0 .. n-1] given the drift,
/// with C = dt [I I ... I] and the GP prediction as prior.
MStepResult m_step(const GpModel& model, std::span<const Vec2> trajectory, const Vec2& drift,
                   double dt, CovarianceMode mode = CovarianceMode::Full);

/// Alternates M- and E-steps from the dead-reckoned track until the trajectory
/// moves less than the tolerance or max_iters is reached.
EmState run_em_cycle(const GpModel& model, const Cycle& cycle, const EmConfig& cfg);

struct CycleResult {
  std::optional<EmState> state;
  std::optional<std::string> error;
  std::size_t targets_added = 0;
};

struct MissionEstimate {
  GpModel model;
  std::vector<CycleResult> cycles;
};

/// Called after each cycle with its index and the updated model.
using CycleObserver = std::function<void(std::size_t, const GpModel&)>;

/// Runs EM cycle by cycle, inserting thinned pseudo-targets after each one.
/// A failing cycle is recorded and skipped.
MissionEstimate process_mission(const MissionLog& log, const HyperParams& hp, KernelKind kind,
                                const EmConfig& cfg, const CycleObserver& observer = {});

/// Per-cycle diagnostics as a JSON document.
std::string diagnostics_to_json(const MissionEstimate& estimate, const MissionLog& log);

}  // namespace driftgp
