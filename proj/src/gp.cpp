#include "driftgp/gp.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <sstream>

#include "driftgp/errors.hpp"
#include "json.hpp"

namespace driftgp {

struct GpModel::Factor {
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::VectorXd weights;
  double jitter = 0.0;
};

namespace {

Eigen::VectorXd stack(std::span<const Vec2> values) {
  Eigen::VectorXd out(2 * values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    out(2 * i) = values[i].x();
    out(2 * i + 1) = values[i].y();
  }
  return out;
}

std::vector<Vec2> unstack(const Eigen::VectorXd& v) {
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(v.size() / 2));
  for (Eigen::Index i = 0; i + 1 < v.size(); i += 2) out.emplace_back(v(i), v(i + 1));
  return out;
}

}  // namespace

GpModel::GpModel(HyperParams hp, KernelKind kind, double target_noise_var)
    : GpModel(hp, kind, target_noise_var, {}, {}) {}

GpModel::GpModel(HyperParams hp, KernelKind kind, double target_noise_var,
                 std::vector<Vec2> positions, std::vector<Vec2> currents)
    : hp_(hp),
      kind_(kind),
      noise_var_(target_noise_var),
      positions_(std::move(positions)),
      currents_(std::move(currents)) {
  hp_.validate();
  if (!(noise_var_ >= 0.0) || !std::isfinite(noise_var_)) {
    throw std::invalid_argument("GpModel: target noise variance must be non-negative");
  }
  if (positions_.size() != currents_.size()) {
    throw DimensionMismatch("GpModel: " + std::to_string(positions_.size()) + " positions but " +
                            std::to_string(currents_.size()) + " currents");
  }
  if (positions_.empty()) return;

  const Eigen::MatrixXd gram = build_gram_matrix(hp_, kind_, positions_);
  const auto dim = gram.rows();
  auto factor = std::make_shared<Factor>();
  double jitter = kJitterStart * hp_.current_variance;
  const double max_jitter = kJitterMax * hp_.current_variance;
  for (;;) {
    Eigen::MatrixXd regularised = gram;
    regularised.diagonal().array() += noise_var_ + jitter;
    factor->llt.compute(regularised);
    if (factor->llt.info() == Eigen::Success) break;
    jitter *= 10.0;
    if (jitter > max_jitter * (1.0 + 1e-12)) {
      throw FactorizationFailure("GpModel: Gram matrix of " + std::to_string(dim / 2) +
                                 " targets is not positive definite up to jitter " +
                                 std::to_string(max_jitter));
    }
  }
  factor->jitter = jitter;
  factor->weights = factor->llt.solve(stack(currents_));
  factor_ = std::move(factor);
}

double GpModel::jitter() const { return factor_ ? factor_->jitter : 0.0; }

const Eigen::VectorXd& GpModel::weights() const {
  static const Eigen::VectorXd kEmpty;
  return factor_ ? factor_->weights : kEmpty;
}

Eigen::MatrixXd GpModel::solve(const Eigen::MatrixXd& rhs) const {
  if (rhs.rows() != static_cast<Eigen::Index>(2 * size())) {
    throw DimensionMismatch("GpModel::solve: right-hand side has wrong row count");
  }
  if (!factor_) return rhs;
  return factor_->llt.solve(rhs);
}

Eigen::MatrixXd GpModel::whiten(const Eigen::MatrixXd& rhs) const {
  if (rhs.rows() != static_cast<Eigen::Index>(2 * size())) {
    throw DimensionMismatch("GpModel::whiten: right-hand side has wrong row count");
  }
  if (!factor_) return rhs;
  return factor_->llt.matrixL().solve(rhs);
}

Prediction predict(const GpModel& model, std::span<const Vec2> queries, CovarianceMode mode,
                   Execution exec) {
  if (queries.empty()) throw std::invalid_argument("predict: no query positions");
  const HyperParams& hp = model.hyper();
  Prediction out;
  if (model.empty()) {
    out.mean.assign(queries.size(), Vec2{});
    if (mode == CovarianceMode::Full) out.covariance = build_gram_matrix(hp, model.kind(), queries, exec);
    return out;
  }
  const Eigen::MatrixXd k_dq = build_block_matrix(hp, model.kind(), model.positions(), queries, exec);
  out.mean = unstack(k_dq.transpose() * model.weights());
  if (mode == CovarianceMode::Full) {
    const Eigen::MatrixXd v = model.whiten(k_dq);
    out.covariance = build_gram_matrix(hp, model.kind(), queries, exec);
    out.covariance.noalias() -= v.transpose() * v;
    // Round-off in the product can break exact symmetry.
    out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  }
  return out;
}

BlockSumPrediction predict_block_sum(const GpModel& model, std::span<const Vec2> queries,
                                     Execution exec) {
  if (queries.empty()) throw std::invalid_argument("predict_block_sum: no query positions");
  const HyperParams& hp = model.hyper();
  BlockSumPrediction out;
  out.covariance_times_sum = block_row_sums(hp, model.kind(), queries, queries, exec);
  if (model.empty()) {
    out.mean.assign(queries.size(), Vec2{});
    return out;
  }
  const Eigen::MatrixXd k_dq = build_block_matrix(hp, model.kind(), model.positions(), queries, exec);
  out.mean = unstack(k_dq.transpose() * model.weights());
  const Eigen::MatrixXd k_dq_sum = block_row_sums(hp, model.kind(), model.positions(), queries, exec);
  out.covariance_times_sum.noalias() -= k_dq.transpose() * model.solve(k_dq_sum);
  return out;
}

std::vector<Vec2> predict_mean_on_grid(const GpModel& model, const Grid& grid, Execution exec) {
  std::vector<Vec2> out(grid.size());
  if (model.empty()) return out;
  const Eigen::VectorXd& alpha = model.weights();
  const auto& data = model.positions();
  parallel_for(grid.size(), exec, [&](std::size_t k) {
    const Vec2 p = grid.point(k);
    Eigen::Vector2d acc = Eigen::Vector2d::Zero();
    for (std::size_t i = 0; i < data.size(); ++i) {
      acc += eval_kernel(model.hyper(), model.kind(), p, data[i]) * alpha.segment<2>(2 * i);
    }
    out[k] = Vec2(acc(0), acc(1));
  });
  return out;
}

GpModel add_pseudo_targets(const GpModel& model, std::span<const Vec2> positions,
                           std::span<const Vec2> currents) {
  if (positions.size() != currents.size()) {
    throw DimensionMismatch("add_pseudo_targets: " + std::to_string(positions.size()) +
                            " positions but " + std::to_string(currents.size()) + " currents");
  }
  std::vector<Vec2> xs = model.positions();
  std::vector<Vec2> ws = model.currents();
  xs.insert(xs.end(), positions.begin(), positions.end());
  ws.insert(ws.end(), currents.begin(), currents.end());
  return GpModel(model.hyper(), model.kind(), model.target_noise_var(), std::move(xs), std::move(ws));
}

std::pair<std::vector<Vec2>, std::vector<Vec2>> downsample_targets(
    std::span<const Vec2> positions, std::span<const Vec2> currents, double min_spacing) {
  if (positions.size() != currents.size()) {
    throw DimensionMismatch("downsample_targets: positions and currents differ in length");
  }
  if (!(min_spacing >= 0.0)) throw std::invalid_argument("downsample_targets: negative spacing");
  std::pair<std::vector<Vec2>, std::vector<Vec2>> kept;
  const double min_sq = min_spacing * min_spacing;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    bool far = true;
    for (const Vec2& q : kept.first) {
      if ((positions[i] - q).squared_norm() < min_sq) {
        far = false;
        break;
      }
    }
    if (far) {
      kept.first.push_back(positions[i]);
      kept.second.push_back(currents[i]);
    }
  }
  return kept;
}

namespace {

nlohmann::json points_to_json(const std::vector<Vec2>& pts) {
  auto arr = nlohmann::json::array();
  for (const Vec2& p : pts) arr.push_back({p.x(), p.y()});
  return arr;
}

std::vector<Vec2> points_from_json(const nlohmann::json& arr) {
  std::vector<Vec2> out;
  for (const auto& p : arr) {
    if (!p.is_array() || p.size() != 2) throw ParseError("model JSON: expected [x, y] pair");
    out.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return out;
}

}  // namespace

std::string model_to_json(const GpModel& model) {
  nlohmann::json j;
  j["hyperparameters"] = {{"lengthscale_m", model.hyper().lengthscale},
                          {"current_variance_m2ps2", model.hyper().current_variance},
                          {"gps_noise_std_m", model.hyper().gps_noise_std}};
  j["kernel"] = std::string(to_string(model.kind()));
  j["target_noise_var_m2ps2"] = model.target_noise_var();
  j["positions_m"] = points_to_json(model.positions());
  j["currents_mps"] = points_to_json(model.currents());
  return j.dump(2);
}

GpModel model_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    const auto& h = j.at("hyperparameters");
    HyperParams hp(h.at("lengthscale_m").get<double>(), h.at("current_variance_m2ps2").get<double>(),
                   h.at("gps_noise_std_m").get<double>());
    return GpModel(hp, parse_kernel_kind(j.at("kernel").get<std::string>()),
                   j.at("target_noise_var_m2ps2").get<double>(),
                   points_from_json(j.at("positions_m")), points_from_json(j.at("currents_mps")));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("model JSON: ") + e.what());
  }
}

}  // namespace driftgp
