#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace driftgp {

/// Planar vector in a local metric frame. Holds positions (m) or
/// velocities/currents (m/s) depending on context.
class Vec2 {
 public:
  constexpr Vec2() = default;
  Vec2(double x, double y) : x_(x), y_(y) {
    if (!std::isfinite(x) || !std::isfinite(y)) {
      throw std::domain_error("Vec2: non-finite component (" + std::to_string(x) + ", " +
                              std::to_string(y) + ")");
    }
  }

  double x() const { return x_; }
  double y() const { return y_; }

  double norm() const { return std::hypot(x_, y_); }
  double squared_norm() const { return x_ * x_ + y_ * y_; }
  double dot(const Vec2& o) const { return x_ * o.x_ + y_ * o.y_; }

  Vec2& operator+=(const Vec2& o) { return *this = Vec2(x_ + o.x_, y_ + o.y_); }
  Vec2& operator-=(const Vec2& o) { return *this = Vec2(x_ - o.x_, y_ - o.y_); }
  Vec2& operator*=(double s) { return *this = Vec2(x_ * s, y_ * s); }

  friend Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
  friend Vec2 operator-(const Vec2& a) { return Vec2(-a.x_, -a.y_); }
  friend Vec2 operator*(Vec2 a, double s) { return a *= s; }
  friend Vec2 operator*(double s, Vec2 a) { return a *= s; }
  friend Vec2 operator/(const Vec2& a, double s) { return Vec2(a.x_ / s, a.y_ / s); }
  friend bool operator==(const Vec2& a, const Vec2& b) = default;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

}  // namespace driftgp
