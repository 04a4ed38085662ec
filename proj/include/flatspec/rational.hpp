#pragma once

#include <numbers>

#include <gmpxx.h>

#include <cmath>
#include <string>

namespace flatspec {

inline constexpr double kPi = std::numbers::pi;

using Q = mpq_class;

struct Vec2 {
  double x = 0, y = 0;
  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double norm() const { return std::hypot(x, y); }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
// ccw angle from a to b in [0, 2pi)
double ccw_angle(const Vec2& a, const Vec2& b);

struct Vec2q {
  Q x, y;
  Vec2q() : x(0), y(0) {}
  Vec2q(Q a, Q b) : x(std::move(a)), y(std::move(b)) {}
  Vec2q operator+(const Vec2q& o) const { return {x + o.x, y + o.y}; }
  Vec2q operator-(const Vec2q& o) const { return {x - o.x, y - o.y}; }
  Vec2q operator-() const { return {-x, -y}; }
  Vec2q operator*(const Q& s) const { return {x * s, y * s}; }
  Vec2q& operator+=(const Vec2q& o) { x += o.x; y += o.y; return *this; }
  bool operator==(const Vec2q& o) const { return x == o.x && y == o.y; }
  bool operator!=(const Vec2q& o) const { return !(*this == o); }
  bool is_zero() const { return sgn(x) == 0 && sgn(y) == 0; }
  Vec2 approx() const { return {x.get_d(), y.get_d()}; }
  double norm() const { return approx().norm(); }
};

inline Q dot(const Vec2q& a, const Vec2q& b) { return a.x * b.x + a.y * b.y; }
inline Q cross(const Vec2q& a, const Vec2q& b) { return a.x * b.y - a.y * b.x; }
inline Q norm2(const Vec2q& a) { return dot(a, a); }
inline int sgn(const Q& q) { return ::sgn(q); }

// Vector scaled by +1 or -1.
inline Vec2q signed_vec(int s, const Vec2q& v) { return s > 0 ? v : -v; }
inline Vec2 signed_vec(int s, const Vec2& v) { return s > 0 ? v : -v; }

std::string to_string(const Q& q);
Q parse_rational(const std::string& s);
// Nearest dyadic rational with denominator 2^bits.
Q rationalize(double x, int bits = 48);
Vec2q rationalize(const Vec2& v, int bits = 48);
// Shortest decimal that round-trips a double, with 17 significant digits.
std::string fmt17(double x);

}  // namespace flatspec
