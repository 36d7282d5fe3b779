#include "gmfkit/ext_real.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace gmfkit {

ExtReal ExtReal::finite(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("ExtReal::finite: payload must be finite");
  return ExtReal(Kind::Finite, v);
}

ExtReal ExtReal::from_double(double v) {
  if (std::isnan(v)) throw std::invalid_argument("ExtReal::from_double: NaN");
  if (v == std::numeric_limits<double>::infinity()) return plus_inf();
  if (v == -std::numeric_limits<double>::infinity()) return minus_inf();
  return ExtReal(Kind::Finite, v);
}

double ExtReal::value() const {
  if (kind_ != Kind::Finite) throw std::logic_error("ExtReal::value on infinite value");
  return v_;
}

double ExtReal::to_double() const {
  switch (kind_) {
    case Kind::PlusInf:
      return std::numeric_limits<double>::infinity();
    case Kind::MinusInf:
      return -std::numeric_limits<double>::infinity();
    default:
      return v_;
  }
}

ExtReal ExtReal::operator+(const ExtReal& o) const {
  if (is_plus_inf() || o.is_plus_inf()) return plus_inf();
  if (is_minus_inf() || o.is_minus_inf()) return minus_inf();
  return from_double(v_ + o.v_);
}

ExtReal ExtReal::operator-() const {
  if (is_plus_inf()) return minus_inf();
  if (is_minus_inf()) return plus_inf();
  return ExtReal(Kind::Finite, -v_);
}

ExtReal ExtReal::scaled(double t) const {
  if (!(t > 0)) throw std::invalid_argument("ExtReal::scaled: factor must be positive");
  if (!is_finite()) return *this;
  return from_double(v_ * t);
}

bool ExtReal::operator==(const ExtReal& o) const {
  return kind_ == o.kind_ && (kind_ != Kind::Finite || v_ == o.v_);
}

std::string ExtReal::str() const {
  if (is_plus_inf()) return "+inf";
  if (is_minus_inf()) return "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v_);
  return buf;
}

std::ostream& operator<<(std::ostream& os, const ExtReal& x) { return os << x.str(); }

}  // namespace gmfkit
