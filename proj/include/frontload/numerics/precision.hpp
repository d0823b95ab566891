#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <iomanip>
#include <sstream>
#include <string>
#include <type_traits>

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include "frontload/error.hpp"

namespace frontload {

/// Variable-precision binary float; precision is taken from the active
/// ScopedPrecision at construction time.
using HighReal = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                               boost::multiprecision::et_off>;

template <class Real>
using Complex = std::complex<Real>;

template <class Real>
inline constexpr bool is_high_precision_v = !std::is_floating_point_v<Real>;

/// Working decimal precision shared by every numeric routine.
struct PrecisionContext {
  int digits = 15;
  int guard_digits = 10;

  [[nodiscard]] int working_digits() const { return digits + guard_digits; }
};

inline PrecisionContext make_context(int digits, int guard_digits = 10) {
  if (digits < 15) {
    throw DomainError("precision must be at least 15 decimal digits, got " + std::to_string(digits));
  }
  if (guard_digits < 1) {
    throw DomainError("guard digits must be positive");
  }
  return PrecisionContext{digits, guard_digits};
}

/// Sets the default mpfr precision for the lifetime of the object.
///
/// Boost 1.74 keeps this default in a process-wide static, so scopes with
/// different precisions must not be active on two threads at once.
class ScopedPrecision {
public:
  explicit ScopedPrecision(const PrecisionContext& ctx)
      : previous_(HighReal::default_precision()) {
    HighReal::default_precision(static_cast<unsigned>(ctx.working_digits()));
  }
  ScopedPrecision(const ScopedPrecision&) = delete;
  ScopedPrecision& operator=(const ScopedPrecision&) = delete;
  ~ScopedPrecision() { HighReal::default_precision(previous_); }

private:
  unsigned previous_;
};

template <class Real>
Real pi() {
  return boost::math::constants::pi<Real>();
}

/// Parses a decimal string ("1.5", "3.30e+461") into Real at the active precision.
template <class Real>
Real parse_real(const std::string& text) {
  if constexpr (is_high_precision_v<Real>) {
    try {
      return Real(text);
    } catch (const std::exception&) {
      throw DomainError("not a decimal number: '" + text + "'");
    }
  } else {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      throw DomainError("not a decimal number: '" + text + "'");
    }
    if (used != text.size()) throw DomainError("trailing characters in number: '" + text + "'");
    return static_cast<Real>(v);
  }
}

/// Decimal string with explicit exponent, e.g. "3.30e+461".
template <class Real>
std::string to_decimal(const Real& value, int significant_digits) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(std::max(significant_digits - 1, 0)) << value;
  return os.str();
}

template <class Real>
double to_double(const Real& value) {
  if constexpr (is_high_precision_v<Real>) {
    return value.template convert_to<double>();
  } else {
    return static_cast<double>(value);
  }
}

/// log10 of |value| that stays finite when value under- or overflows double.
template <class Real>
double log10_abs(const Real& value) {
  using std::abs;
  using std::log10;
  if constexpr (is_high_precision_v<Real>) {
    if (value == 0) return -std::numeric_limits<double>::infinity();
    return boost::multiprecision::log10(abs(value)).template convert_to<double>();
  } else {
    return std::log10(std::abs(value));
  }
}

template <class Real>
bool is_finite(const Real& v) {
  using boost::multiprecision::isfinite;
  using std::isfinite;
  return isfinite(v);
}

template <class Real>
bool is_finite(const Complex<Real>& z) {
  return is_finite(z.real()) && is_finite(z.imag());
}

/// Largest relative componentwise difference; 0/0 counts as agreement.
template <class Real, class Range>
Real max_relative_difference(const Range& a, const Range& b) {
  using std::abs;
  Real worst = 0;
  auto ia = std::begin(a);
  auto ib = std::begin(b);
  for (; ia != std::end(a) && ib != std::end(b); ++ia, ++ib) {
    Real scale = std::max<Real>(abs(*ia), abs(*ib));
    if (scale == 0) continue;
    Real rel = abs(*ia - *ib) / scale;
    if (rel > worst) worst = rel;
  }
  return worst;
}

/// Sum in a fixed pairwise order so the result does not depend on how the
/// terms were produced.
template <class T>
T pairwise_sum(const T* terms, std::size_t count) {
  if (count == 0) return T{};
  if (count <= 8) {
    T acc = terms[0];
    for (std::size_t i = 1; i < count; ++i) acc += terms[i];
    return acc;
  }
  std::size_t half = count / 2;
  return pairwise_sum(terms, half) + pairwise_sum(terms + half, count - half);
}

}  // namespace frontload
