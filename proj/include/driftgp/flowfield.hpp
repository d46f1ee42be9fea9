#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "driftgp/parallel.hpp"
#include "driftgp/vec2.hpp"

namespace driftgp {

enum class FieldKind { DoubleGyre, Uniform, Zero };

/// Analytic, exactly incompressible current field defined by a streamfunction.
///
/// DoubleGyre: phi = A sin(pi x / Lx - px) sin(pi y / Ly - py), counter-rotating
/// cells of size Lx by Ly. Uniform: phi = c_x y - c_y x with c = A * direction,
/// so phi(0,0) = 0. Zero: phi = 0.
class AnalyticField {
 public:
  static AnalyticField zero();
  static AnalyticField uniform(double speed, Vec2 direction);
  static AnalyticField double_gyre(double amplitude, double extent_x, double extent_y,
                                   double phase_x = 0.0, double phase_y = 0.0);

  FieldKind kind() const { return kind_; }
  double amplitude() const { return amplitude_; }
  double extent_x() const { return extent_x_; }
  double extent_y() const { return extent_y_; }
  double phase_x() const { return phase_x_; }
  double phase_y() const { return phase_y_; }
  Vec2 direction() const { return direction_; }

  /// Largest current speed over the plane.
  double peak_speed() const;

  friend bool operator==(const AnalyticField&, const AnalyticField&) = default;

 private:
  AnalyticField() = default;

  FieldKind kind_ = FieldKind::Zero;
  double amplitude_ = 0.0;
  double extent_x_ = 1.0;
  double extent_y_ = 1.0;
  double phase_x_ = 0.0;
  double phase_y_ = 0.0;
  Vec2 direction_{1.0, 0.0};
};

double eval_streamfunction(const AnalyticField& field, const Vec2& p);

/// w(p) = (d phi / dy, -d phi / dx), analytic.
Vec2 eval_field(const AnalyticField& field, const Vec2& p);

using VectorField = std::function<Vec2(const Vec2&)>;

/// Central-difference divergence estimate (1/s) with step h (m).
double divergence_fd(const VectorField& f, const Vec2& p, double h);

/// Ranges used by random_gyre; peak speed is drawn log-uniformly.
struct GyreSampling {
  double min_peak_speed = 0.1;  // m/s
  double max_peak_speed = 0.5;  // m/s
  double min_extent = 4.0e4;    // m
  double max_extent = 6.0e4;    // m
};

/// Deterministic random double gyre; same seed gives the same field.
AnalyticField random_gyre(std::uint64_t seed, const GyreSampling& ranges = {});

/// Regular raster: point (i, j) sits at origin + spacing * (i, j).
struct Grid {
  Vec2 origin;
  double spacing = 1.0;
  std::size_t nx = 1;
  std::size_t ny = 1;

  Grid() = default;
  Grid(Vec2 origin, double spacing, std::size_t nx, std::size_t ny);

  std::size_t size() const { return nx * ny; }
  /// Row-major: index = j * nx + i (x varies fastest).
  Vec2 point(std::size_t index) const;
  std::vector<Vec2> points() const;

  /// Grid of n x n points covering [lo, hi] expanded by pad on every side.
  static Grid covering(const Vec2& lo, const Vec2& hi, double pad, std::size_t n);
};

/// Evaluates f at every grid point; the parallel and serial paths agree bitwise.
std::vector<Vec2> sample_grid(const VectorField& f, const Grid& grid,
                              Execution exec = Execution::Parallel);
std::vector<Vec2> sample_grid(const AnalyticField& field, const Grid& grid,
                              Execution exec = Execution::Parallel);

/// CSV with header `x_m,y_m,u_mps,v_mps`, one row per grid point in row-major order.
void write_field_csv(std::ostream& out, const Grid& grid, const std::vector<Vec2>& values);

}  // namespace driftgp
