#include <limits>
#include <sstream>

#include "helpers.hpp"

using namespace gmfkit;

TEST_CASE("kinds and values") {
  ExtReal a = ExtReal::finite(2.5);
  CHECK(a.is_finite());
  CHECK(a.value() == 2.5);
  CHECK(ExtReal::plus_inf().is_plus_inf());
  CHECK(ExtReal::minus_inf().is_minus_inf());
  CHECK_THROWS_AS(ExtReal::plus_inf().value(), std::logic_error);
  CHECK(ExtReal::minus_inf().to_double() == -std::numeric_limits<double>::infinity());
}

TEST_CASE("conversion from IEEE doubles") {
  CHECK(ExtReal::from_double(std::numeric_limits<double>::infinity()).is_plus_inf());
  CHECK(ExtReal::from_double(-std::numeric_limits<double>::infinity()).is_minus_inf());
  CHECK(ExtReal::from_double(-3.0) == ExtReal::finite(-3.0));
  CHECK_THROWS(ExtReal::from_double(std::nan("")));
}

TEST_CASE("inf-addition: +inf absorbs -inf") {
  CHECK((ExtReal::plus_inf() + ExtReal::minus_inf()).is_plus_inf());
  CHECK((ExtReal::minus_inf() + ExtReal::plus_inf()).is_plus_inf());
  CHECK((ExtReal::minus_inf() + 5.0).is_minus_inf());
  CHECK((ExtReal::finite(1.0) + 2.0) == ExtReal::finite(3.0));
}

TEST_CASE("negation, scaling and order") {
  CHECK((-ExtReal::plus_inf()).is_minus_inf());
  CHECK((-ExtReal::finite(2.0)) == ExtReal::finite(-2.0));
  CHECK(ExtReal::finite(2.0).scaled(3.0) == ExtReal::finite(6.0));
  CHECK(ExtReal::plus_inf().scaled(0.5).is_plus_inf());
  CHECK(ExtReal::minus_inf() < ExtReal::finite(-1e300));
  CHECK(ExtReal::finite(1e300) < ExtReal::plus_inf());
  CHECK(ExtReal::plus_inf() <= ExtReal::plus_inf());
  CHECK_FALSE(ExtReal::plus_inf() == ExtReal::minus_inf());
}

TEST_CASE("text form") {
  CHECK(ExtReal::plus_inf().str() == "+inf");
  CHECK(ExtReal::minus_inf().str() == "-inf");
  std::ostringstream os;
  os << ExtReal::finite(0.25);
  CHECK(os.str() == ExtReal::finite(0.25).str());
}
