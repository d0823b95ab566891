#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "frontload/error.hpp"
#include "frontload/numerics/precision.hpp"

namespace frontload {

template <class Real>
struct RectangularBarrier {
  Real V = 0;
  Real d = 1;

  void validate() const {
    if (V < 0) throw DomainError("barrier height must be non-negative");
    if (!(d > 0)) throw DomainError("barrier width must be positive");
  }
};

template <class Real>
struct ScatteringAmplitudes {
  Complex<Real> T;
  Complex<Real> R;
};

namespace detail {

/// c = cos(kd), s = sin(kd)/k for real z = (kd)^2 of either sign, with the
/// series used near z = 0.
template <class Real>
std::pair<Real, Real> matching_functions(const Real& z, const Real& d) {
  using std::abs;
  using std::cos;
  using std::cosh;
  using std::sin;
  using std::sinh;
  using std::sqrt;
  if (abs(z) < Real(1e-8)) {
    Real c = 1 - z / 2 + z * z / 24 - z * z * z / 720;
    Real s = d * (1 - z / 6 + z * z / 120 - z * z * z / 5040);
    return {c, s};
  }
  if (z > 0) {
    Real kd = sqrt(z);
    return {cos(kd), d * sin(kd) / kd};
  }
  Real kd = sqrt(-z);
  return {cosh(kd), d * sinh(kd) / kd};
}

}  // namespace detail

/// Transmission and reflection amplitudes for any real p, with T multiplying
/// e^{ipx} beyond the barrier for unit incident amplitude. T(-p) = conj T(p).
template <class Real>
ScatteringAmplitudes<Real> scattering_amplitudes(const Real& p, const RectangularBarrier<Real>& b) {
  using std::abs;
  using std::cos;
  using std::sin;
  b.validate();
  if (b.V == 0) return {Complex<Real>(1), Complex<Real>(0)};
  const Real z = (p * p - 2 * b.V) * b.d * b.d;
  if constexpr (!is_high_precision_v<Real>) {
    if (-z > Real(700) * Real(700)) {
      throw PrecisionError("kappa d exceeds the double range; use a high-precision context");
    }
  }
  auto [c, s] = detail::matching_functions(z, b.d);
  const Complex<Real> denom((p * p - b.V) * s, p * c);
  if (denom == Complex<Real>(0)) return {Complex<Real>(0), Complex<Real>(-1)};
  const Complex<Real> numer = Complex<Real>(0, p) * Complex<Real>(cos(p * b.d), -sin(p * b.d));
  return {numer / denom, Complex<Real>(b.V * s) / denom};
}

/// Barrier transmission amplitude for p > 0.
template <class Real>
Complex<Real> t_exact(const Real& p, const RectangularBarrier<Real>& b, const PrecisionContext& ctx) {
  if (!(p > 0)) throw DomainError("transmission amplitude needs p > 0");
  ScopedPrecision scope(ctx);
  return scattering_amplitudes(p, b).T;
}

/// Quadratic-exponent expansion of T about p0 in the tunnelling regime.
template <class Real>
struct ApproxParams {
  Real p0;
  Complex<Real> T0;
  Complex<Real> alpha;
  Real beta;
};

template <class Real>
ApproxParams<Real> approx_params(const Real& p0, const RectangularBarrier<Real>& b, const PrecisionContext& ctx) {
  using std::sqrt;
  b.validate();
  if (!(p0 > 0)) throw DomainError("p0 must be positive");
  if (!(p0 * p0 < 2 * b.V)) throw DomainError("not a tunnelling configuration: p0^2 >= 2V");
  ScopedPrecision scope(ctx);
  const Real kappa = sqrt(2 * b.V - p0 * p0);
  ApproxParams<Real> ap;
  ap.p0 = p0;
  ap.T0 = t_exact(p0, b, ctx);
  ap.alpha = Complex<Real>(b.d, p0 * b.d / kappa);
  ap.beta = b.V * b.d / (kappa * kappa * kappa);
  return ap;
}

template <class Real>
Complex<Real> t_approx(const Real& p, const ApproxParams<Real>& ap) {
  using std::exp;
  const Real q = p - ap.p0;
  return ap.T0 * exp(Complex<Real>(0, -1) * ap.alpha * q + Complex<Real>(ap.beta * q * q));
}

/// |T| of an opaque barrier, [4 p kappa / (p^2 + kappa^2)] e^{-kappa d}.
template <class Real>
Real opaque_limit(const Real& p, const RectangularBarrier<Real>& b) {
  using std::exp;
  using std::sqrt;
  const Real kappa = sqrt(2 * b.V - p * p);
  return 4 * p * kappa / (p * p + kappa * kappa) * exp(-kappa * b.d);
}

}  // namespace frontload
