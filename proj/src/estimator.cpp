#include "driftgp/estimator.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "driftgp/errors.hpp"
#include "json.hpp"

namespace driftgp {

void EmConfig::validate() const {
  if (max_iters < 1) throw std::invalid_argument("EmConfig: max_iters must be >= 1");
  if (!(convergence_tol > 0.0)) throw std::invalid_argument("EmConfig: tolerance must be positive");
  if (!(pseudo_target_spacing >= 0.0)) {
    throw std::invalid_argument("EmConfig: pseudo-target spacing must be non-negative");
  }
  if (!(target_noise_var >= 0.0)) throw std::invalid_argument("EmConfig: negative target noise");
}

std::vector<Vec2> e_step(std::span<const Vec2> dead_reckoned, std::span<const Vec2> currents,
                         double dt) {
  if (dead_reckoned.size() != currents.size() + 1) {
    throw DimensionMismatch("e_step: expected " + std::to_string(currents.size() + 1) +
                            " dead-reckoned points, got " + std::to_string(dead_reckoned.size()));
  }
  std::vector<Vec2> out;
  out.reserve(dead_reckoned.size());
  Vec2 offset;
  out.push_back(dead_reckoned[0]);
  for (std::size_t m = 1; m < dead_reckoned.size(); ++m) {
    offset += dt * currents[m - 1];
    out.push_back(dead_reckoned[m] + offset);
  }
  return out;
}

MStepResult m_step(const GpModel& model, std::span<const Vec2> trajectory, const Vec2& drift,
                   double dt, CovarianceMode mode) {
  if (trajectory.size() < 2) throw DimensionMismatch("m_step: trajectory needs at least two points");
  if (!(dt > 0.0)) throw std::invalid_argument("m_step: dt must be positive");
  const std::span<const Vec2> queries = trajectory.first(trajectory.size() - 1);
  const std::size_t n = queries.size();

  std::vector<Vec2> mean;
  Eigen::MatrixXd sigma;
  Eigen::MatrixXd sigma_ct;  // Sigma C^T, 2n x 2
  if (mode == CovarianceMode::Full) {
    Prediction pred = predict(model, queries, CovarianceMode::Full);
    mean = std::move(pred.mean);
    sigma = std::move(pred.covariance);
    sigma_ct = Eigen::MatrixXd::Zero(2 * static_cast<Eigen::Index>(n), 2);
    for (std::size_t j = 0; j < n; ++j) sigma_ct += sigma.middleCols<2>(2 * j);
    sigma_ct *= dt;
  } else {
    BlockSumPrediction pred = predict_block_sum(model, queries);
    mean = std::move(pred.mean);
    sigma_ct = dt * pred.covariance_times_sum;
  }

  Eigen::Matrix2d innovation_cov = Eigen::Matrix2d::Zero();
  Eigen::Vector2d predicted_drift = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    innovation_cov += sigma_ct.middleRows<2>(2 * i);
    predicted_drift += Eigen::Vector2d(mean[i].x(), mean[i].y());
  }
  innovation_cov *= dt;
  predicted_drift *= dt;
  innovation_cov = 0.5 * (innovation_cov + innovation_cov.transpose()).eval();
  const double sy2 = model.hyper().gps_noise_std * model.hyper().gps_noise_std;
  innovation_cov.diagonal().array() += sy2;

  // Singular relative to the prior drift variance (n dt)^2 sigma_W^2.
  const double prior_scale = std::pow(static_cast<double>(n) * dt, 2) * model.hyper().current_variance;
  Eigen::LLT<Eigen::Matrix2d> llt(innovation_cov);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(innovation_cov, Eigen::EigenvaluesOnly);
  if (llt.info() != Eigen::Success || eig.eigenvalues()(0) <= kSingularInnovation * prior_scale) {
    throw SingularInnovation("m_step: C Sigma C^T + sigma_y^2 I is singular");
  }
  // gain = Sigma C^T S^{-1}; S is symmetric so S^{-1} (C Sigma) = gain^T.
  const Eigen::MatrixXd gain = llt.solve(sigma_ct.transpose()).transpose();
  const Eigen::Vector2d innovation = Eigen::Vector2d(drift.x(), drift.y()) - predicted_drift;
  const Eigen::VectorXd correction = gain * innovation;

  MStepResult out;
  out.currents.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.currents.emplace_back(mean[i].x() + correction(2 * i), mean[i].y() + correction(2 * i + 1));
  }
  if (mode == CovarianceMode::Full) {
    sigma.noalias() -= gain * sigma_ct.transpose();
    out.covariance = 0.5 * (sigma + sigma.transpose());
  }
  return out;
}

namespace {

double drift_residual(std::span<const Vec2> currents, const Vec2& drift, double dt) {
  Vec2 sum;
  for (const Vec2& w : currents) sum += w;
  return distance(dt * sum, drift);
}

}  // namespace

EmState run_em_cycle(const GpModel& model, const Cycle& cycle, const EmConfig& cfg) {
  cycle.validate();
  cfg.validate();
  const Vec2 drift = cycle.drift();
  EmState state;
  state.trajectory = cycle.dead_reckoned;
  for (std::size_t i = 1; i <= cfg.max_iters; ++i) {
    MStepResult m = m_step(model, state.trajectory, drift, cycle.dt, CovarianceMode::None);
    std::vector<Vec2> next = e_step(cycle.dead_reckoned, m.currents, cycle.dt);
    double delta = 0.0;
    for (std::size_t k = 0; k < next.size(); ++k) {
      delta = std::max(delta, distance(next[k], state.trajectory[k]));
    }
    state.residuals.push_back(drift_residual(m.currents, drift, cycle.dt));
    state.iteration = i;
    state.currents = std::move(m.currents);
    state.trajectory = std::move(next);
    state.delta = delta;
    if (delta < cfg.convergence_tol) {
      state.converged = true;
      break;
    }
  }
  return state;
}

MissionEstimate process_mission(const MissionLog& log, const HyperParams& hp, KernelKind kind,
                                const EmConfig& cfg, const CycleObserver& observer) {
  cfg.validate();
  MissionEstimate est{GpModel(hp, kind, cfg.target_noise_var), {}};
  for (std::size_t k = 0; k < log.cycles.size(); ++k) {
    CycleResult result;
    try {
      EmState state = run_em_cycle(est.model, log.cycles[k], cfg);
      const std::span<const Vec2> positions(state.trajectory.data(), state.currents.size());
      auto [xs, ws] = downsample_targets(positions, state.currents, cfg.pseudo_target_spacing);
      est.model = add_pseudo_targets(est.model, xs, ws);
      result.targets_added = xs.size();
      result.state = std::move(state);
    } catch (const Error& e) {
      result.error = e.what();
    }
    est.cycles.push_back(std::move(result));
    if (observer) observer(k, est.model);
  }
  return est;
}

std::string diagnostics_to_json(const MissionEstimate& estimate, const MissionLog& log) {
  nlohmann::json cycles = nlohmann::json::array();
  for (std::size_t k = 0; k < estimate.cycles.size(); ++k) {
    const CycleResult& r = estimate.cycles[k];
    nlohmann::json j;
    j["cycle"] = k;
    if (k < log.cycles.size()) {
      j["steps"] = log.cycles[k].steps();
      j["drift_m"] = {log.cycles[k].drift().x(), log.cycles[k].drift().y()};
    }
    if (r.error) {
      j["error"] = *r.error;
    } else if (r.state) {
      const EmState& s = *r.state;
      j["iterations"] = s.iteration;
      j["converged"] = s.converged;
      j["delta_m"] = s.delta;
      j["drift_residual_m"] = s.residuals.empty() ? 0.0 : s.residuals.back();
      j["targets_added"] = r.targets_added;
      const Vec2 end = s.trajectory.back();
      j["reconstructed_end_m"] = {end.x(), end.y()};
    }
    cycles.push_back(std::move(j));
  }
  nlohmann::json doc;
  doc["cycles"] = std::move(cycles);
  doc["model_targets"] = estimate.model.size();
  return doc.dump(2);
}

}  // namespace driftgp
