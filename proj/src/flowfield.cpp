#include "driftgp/flowfield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

namespace driftgp {

namespace {
constexpr double kPi = std::numbers::pi;
}

AnalyticField AnalyticField::zero() { return AnalyticField(); }

AnalyticField AnalyticField::uniform(double speed, Vec2 direction) {
  if (speed < 0.0) throw std::invalid_argument("uniform field: negative speed");
  if (std::abs(direction.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("uniform field: direction must have unit norm");
  }
  AnalyticField f;
  f.kind_ = FieldKind::Uniform;
  f.amplitude_ = speed;
  f.direction_ = direction;
  return f;
}

AnalyticField AnalyticField::double_gyre(double amplitude, double extent_x, double extent_y,
                                         double phase_x, double phase_y) {
  if (amplitude < 0.0) throw std::invalid_argument("double gyre: negative amplitude");
  if (!(extent_x > 0.0) || !(extent_y > 0.0)) {
    throw std::invalid_argument("double gyre: extents must be positive");
  }
  if (!std::isfinite(phase_x) || !std::isfinite(phase_y)) {
    throw std::invalid_argument("double gyre: non-finite phase");
  }
  AnalyticField f;
  f.kind_ = FieldKind::DoubleGyre;
  f.amplitude_ = amplitude;
  f.extent_x_ = extent_x;
  f.extent_y_ = extent_y;
  f.phase_x_ = phase_x;
  f.phase_y_ = phase_y;
  return f;
}

double AnalyticField::peak_speed() const {
  switch (kind_) {
    case FieldKind::Zero:
      return 0.0;
    case FieldKind::Uniform:
      return amplitude_;
    case FieldKind::DoubleGyre:
      // |w|^2 = (A pi)^2 (sin^2 a cos^2 b / Ly^2 + cos^2 a sin^2 b / Lx^2)
      return amplitude_ * kPi / std::min(extent_x_, extent_y_);
  }
  return 0.0;
}

double eval_streamfunction(const AnalyticField& field, const Vec2& p) {
  switch (field.kind()) {
    case FieldKind::Zero:
      return 0.0;
    case FieldKind::Uniform: {
      const Vec2 c = field.amplitude() * field.direction();
      return c.x() * p.y() - c.y() * p.x();
    }
    case FieldKind::DoubleGyre: {
      const double a = kPi * p.x() / field.extent_x() - field.phase_x();
      const double b = kPi * p.y() / field.extent_y() - field.phase_y();
      return field.amplitude() * std::sin(a) * std::sin(b);
    }
  }
  return 0.0;
}

Vec2 eval_field(const AnalyticField& field, const Vec2& p) {
  switch (field.kind()) {
    case FieldKind::Zero:
      return {};
    case FieldKind::Uniform:
      return field.amplitude() * field.direction();
    case FieldKind::DoubleGyre: {
      const double kx = kPi / field.extent_x();
      const double ky = kPi / field.extent_y();
      const double a = kx * p.x() - field.phase_x();
      const double b = ky * p.y() - field.phase_y();
      const double amp = field.amplitude();
      return {amp * ky * std::sin(a) * std::cos(b), -amp * kx * std::cos(a) * std::sin(b)};
    }
  }
  return {};
}

double divergence_fd(const VectorField& f, const Vec2& p, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("divergence_fd: step must be positive");
  const Vec2 ex(h, 0.0);
  const Vec2 ey(0.0, h);
  const double dudx = f(p + ex).x() - f(p - ex).x();
  const double dvdy = f(p + ey).y() - f(p - ey).y();
  return (dudx + dvdy) / (2.0 * h);
}

AnalyticField random_gyre(std::uint64_t seed, const GyreSampling& ranges) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double lx = ranges.min_extent + (ranges.max_extent - ranges.min_extent) * unit(rng);
  const double ly = ranges.min_extent + (ranges.max_extent - ranges.min_extent) * unit(rng);
  const double log_lo = std::log(ranges.min_peak_speed);
  const double log_hi = std::log(ranges.max_peak_speed);
  const double peak = std::exp(log_lo + (log_hi - log_lo) * unit(rng));
  const double px = 2.0 * kPi * unit(rng);
  const double py = 2.0 * kPi * unit(rng);
  const double amplitude = peak * std::min(lx, ly) / kPi;
  return AnalyticField::double_gyre(amplitude, lx, ly, px, py);
}

Grid::Grid(Vec2 origin_, double spacing_, std::size_t nx_, std::size_t ny_)
    : origin(origin_), spacing(spacing_), nx(nx_), ny(ny_) {
  if (!(spacing > 0.0)) throw std::invalid_argument("Grid: spacing must be positive");
  if (nx == 0 || ny == 0) throw std::invalid_argument("Grid: nx and ny must be positive");
}

Vec2 Grid::point(std::size_t index) const {
  const std::size_t i = index % nx;
  const std::size_t j = index / nx;
  return {origin.x() + spacing * static_cast<double>(i),
          origin.y() + spacing * static_cast<double>(j)};
}

std::vector<Vec2> Grid::points() const {
  std::vector<Vec2> out;
  out.reserve(size());
  for (std::size_t k = 0; k < size(); ++k) out.push_back(point(k));
  return out;
}

Grid Grid::covering(const Vec2& lo, const Vec2& hi, double pad, std::size_t n) {
  if (n < 2) throw std::invalid_argument("Grid::covering: need at least 2 points per side");
  const double width = std::max(hi.x() - lo.x(), hi.y() - lo.y()) + 2.0 * pad;
  const double spacing = width > 0.0 ? width / static_cast<double>(n - 1) : 1.0;
  const Vec2 centre = 0.5 * (lo + hi);
  const double half = 0.5 * spacing * static_cast<double>(n - 1);
  return Grid(centre - Vec2(half, half), spacing, n, n);
}

std::vector<Vec2> sample_grid(const VectorField& f, const Grid& grid, Execution exec) {
  std::vector<Vec2> out(grid.size());
  parallel_for(grid.size(), exec, [&](std::size_t k) { out[k] = f(grid.point(k)); });
  return out;
}

std::vector<Vec2> sample_grid(const AnalyticField& field, const Grid& grid, Execution exec) {
  return sample_grid([&field](const Vec2& p) { return eval_field(field, p); }, grid, exec);
}

void write_field_csv(std::ostream& out, const Grid& grid, const std::vector<Vec2>& values) {
  if (values.size() != grid.size()) {
    throw std::invalid_argument("write_field_csv: value count does not match grid");
  }
  const auto old_precision = out.precision(17);
  out << "x_m,y_m,u_mps,v_mps\n";
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Vec2 p = grid.point(k);
    out << p.x() << ',' << p.y() << ',' << values[k].x() << ',' << values[k].y() << '\n';
  }
  out.precision(old_precision);
}

}  // namespace driftgp
