#pragma once

#include <iosfwd>
#include <string>

namespace gmfkit {

// Extended real: finite, +inf or -inf.
class ExtReal {
 public:
  enum class Kind { Finite, PlusInf, MinusInf };

  ExtReal() = default;
  static ExtReal finite(double v);
  static ExtReal plus_inf() { return ExtReal(Kind::PlusInf, 0.0); }
  static ExtReal minus_inf() { return ExtReal(Kind::MinusInf, 0.0); }
  // Maps IEEE infinities to the matching kind; NaN throws.
  static ExtReal from_double(double v);

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::Finite; }
  bool is_plus_inf() const { return kind_ == Kind::PlusInf; }
  bool is_minus_inf() const { return kind_ == Kind::MinusInf; }
  // throws std::logic_error unless finite
  double value() const;
  // IEEE double with +-infinity
  double to_double() const;

  // Sum with the inf-addition convention (+inf absorbs -inf), as used for phi + h.
  ExtReal operator+(const ExtReal& o) const;
  ExtReal operator+(double v) const { return *this + finite(v); }
  ExtReal operator-() const;
  // t > 0 only
  ExtReal scaled(double t) const;

  bool operator==(const ExtReal& o) const;
  bool operator<(const ExtReal& o) const { return to_double() < o.to_double(); }
  bool operator<=(const ExtReal& o) const { return to_double() <= o.to_double(); }

  std::string str() const;

 private:
  ExtReal(Kind k, double v) : kind_(k), v_(v) {}
  Kind kind_ = Kind::Finite;
  double v_ = 0.0;
};

std::ostream& operator<<(std::ostream& os, const ExtReal& x);

}  // namespace gmfkit
