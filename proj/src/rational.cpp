#include "flatspec/rational.hpp"

#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace flatspec {

double ccw_angle(const Vec2& a, const Vec2& b) {
  double t = std::atan2(cross(a, b), dot(a, b));
  if (t < 0) t += 2 * std::numbers::pi;
  return t;
}

std::string to_string(const Q& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Q parse_rational(const std::string& s) {
  Q q;
  if (q.set_str(s, 10) != 0 || q.get_den() == 0)
    throw std::invalid_argument("bad rational '" + s + "'");
  q.canonicalize();
  return q;
}

Q rationalize(double x, int bits) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite value");
  double scaled = std::ldexp(x, bits);
  mpz_class num(std::nearbyint(scaled));
  mpz_class den = 1;
  den <<= bits;
  Q q(num, den);
  q.canonicalize();
  return q;
}

Vec2q rationalize(const Vec2& v, int bits) { return {rationalize(v.x, bits), rationalize(v.y, bits)}; }

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace flatspec
