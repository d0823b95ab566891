#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "frontload/error.hpp"
#include "frontload/numerics/precision.hpp"
#include "frontload/pulses/wave.hpp"

namespace frontload {

template <class Real>
struct GaussianComponent {
  Real sigma = 1;
  Real x0 = 0;
  Complex<Real> weight = Complex<Real>(1);
};

/// Sum of Gaussian envelopes on a common carrier e^{i p0 x}, optionally with
/// everything at x < cut removed.
template <class Real>
struct PulseSpec {
  Real p0 = 1;
  std::vector<GaussianComponent<Real>> components;
  std::optional<Real> cut;

  void validate() const {
    if (!(p0 > 0)) throw DomainError("p0 must be positive");
    if (components.empty()) throw DomainError("a pulse needs at least one component");
    for (const auto& c : components) {
      if (!(c.sigma > 0)) throw DomainError("component sigma must be positive");
      if (!is_finite(c.weight) || !is_finite(c.x0)) throw DomainError("component weight and center must be finite");
    }
  }

  [[nodiscard]] Real sigma_min() const {
    Real s = components.front().sigma;
    for (const auto& c : components) s = std::min<Real>(s, c.sigma);
    return s;
  }
  [[nodiscard]] Real sigma_max() const {
    Real s = components.front().sigma;
    for (const auto& c : components) s = std::max<Real>(s, c.sigma);
    return s;
  }
  [[nodiscard]] Real x0_min() const {
    Real s = components.front().x0;
    for (const auto& c : components) s = std::min<Real>(s, c.x0);
    return s;
  }
  [[nodiscard]] Real x0_max() const {
    Real s = components.front().x0;
    for (const auto& c : components) s = std::max<Real>(s, c.x0);
    return s;
  }
  [[nodiscard]] bool shares_sigma() const {
    for (const auto& c : components)
      if (c.sigma != components.front().sigma) return false;
    return true;
  }
  [[nodiscard]] PulseSpec uncut() const {
    PulseSpec s = *this;
    s.cut.reset();
    return s;
  }
  [[nodiscard]] PulseSpec translated(const Real& y) const {
    PulseSpec s = *this;
    for (auto& c : s.components) c.x0 += y;
    if (s.cut) *s.cut += y;
    return s;
  }
};

template <class Real>
PulseSpec<Real> single_gaussian(const Real& p0, const Real& sigma, const Real& x0 = Real(0)) {
  PulseSpec<Real> s;
  s.p0 = p0;
  s.components.push_back({sigma, x0, Complex<Real>(1)});
  s.validate();
  return s;
}

/// Unnormalized sum of two equal Gaussians centered at 0 and `offset`.
template <class Real>
PulseSpec<Real> two_hump(const Real& p0, const Real& sigma, const Real& offset) {
  PulseSpec<Real> s;
  s.p0 = p0;
  s.components.push_back({sigma, Real(0), Complex<Real>(1)});
  s.components.push_back({sigma, offset, Complex<Real>(1)});
  s.validate();
  return s;
}

/// G_0(x) = (2 / pi sigma^2)^{1/4} exp(-x^2 / sigma^2).
template <class Real>
Real g0_eval(const Real& x, const Real& sigma) {
  using std::exp;
  using std::sqrt;
  if (!(sigma > 0)) throw DomainError("sigma must be positive");
  return sqrt(sqrt(Real(2) / (pi<Real>() * sigma * sigma))) * exp(-(x * x) / (sigma * sigma));
}

template <class Real>
Complex<Real> carrier(const Real& p0, const Real& x, const Real& t) {
  using std::cos;
  using std::sin;
  Real phase = p0 * x - p0 * p0 * t / 2;
  return {cos(phase), sin(phase)};
}

/// Freely spreading Gaussian without its carrier:
/// (2/pi sigma^2)^{1/4} (sigma / sigma_t) exp(-(y - x0)^2 / sigma_t^2),
/// sigma_t = sqrt(sigma^2 + 2 i t) (principal root). y may be complex.
template <class Real>
Complex<Real> spreading_envelope(const Complex<Real>& y, const Real& t, const Real& sigma, const Real& x0) {
  using std::exp;
  using std::sqrt;
  Complex<Real> st2(sigma * sigma, 2 * t);
  Complex<Real> st = sqrt(st2);
  Complex<Real> u = y - Complex<Real>(x0);
  Real norm = sqrt(sqrt(Real(2) / (pi<Real>() * sigma * sigma)));
  return norm * (Complex<Real>(sigma) / st) * exp(-(u * u) / st2);
}

/// Non-spreading envelope sum_c w_c G_0(y - x0_c), zero below the cut.
template <class Real>
Complex<Real> envelope_value(const PulseSpec<Real>& spec, const Real& y) {
  if (spec.cut && y < *spec.cut) return Complex<Real>(0);
  Complex<Real> v(0);
  for (const auto& c : spec.components) v += c.weight * g0_eval(Real(y - c.x0), c.sigma);
  return v;
}

/// Psi(x, t) of a freely evolving uncut spec, envelope optionally shifted by
/// a complex displacement while the carrier stays at x.
template <class Real>
Complex<Real> evolved_value(const PulseSpec<Real>& spec, const Real& x, const Real& t,
                            const Complex<Real>& shift = Complex<Real>(0)) {
  Complex<Real> y = Complex<Real>(x - spec.p0 * t) - shift;
  Complex<Real> v(0);
  for (const auto& c : spec.components) v += c.weight * spreading_envelope(y, t, c.sigma, c.x0);
  return carrier(spec.p0, x, t) * v;
}

/// Closed-form L2 norm squared of an uncut spec (conserved in time).
template <class Real>
Real analytic_squared_norm(const PulseSpec<Real>& spec) {
  using std::exp;
  using std::sqrt;
  Real total = 0;
  for (const auto& a : spec.components) {
    for (const auto& b : spec.components) {
      Real sa2 = a.sigma * a.sigma;
      Real sb2 = b.sigma * b.sigma;
      Real overlap = sqrt(Real(2) / pi<Real>()) / sqrt(a.sigma * b.sigma) *
                     sqrt(pi<Real>() / (1 / sa2 + 1 / sb2)) * exp(-(a.x0 - b.x0) * (a.x0 - b.x0) / (sa2 + sb2));
      total += (std::conj(a.weight) * b.weight).real() * overlap;
    }
  }
  return total;
}

/// Tolerance used for norm and round-trip checks at the precision of ctx.
template <class Real>
Real check_tolerance(const PrecisionContext& ctx, double double_tol) {
  using std::pow;
  if constexpr (is_high_precision_v<Real>) {
    return pow(Real(10), -Real(ctx.digits) / 2);
  } else {
    return Real(double_tol);
  }
}

/// Grid covering every component out to a number of widths that keeps the
/// truncated norm below 10^(-digits) and the evolved spread.
template <class Real>
Grid<Real> default_grid(const PulseSpec<Real>& spec, const Real& t, const PrecisionContext& ctx,
                        std::size_t count = 4096) {
  using std::sqrt;
  spec.validate();
  double widths = std::max(12.0, std::sqrt(ctx.digits * std::log(10.0) / 2.0) + 2.0);
  Real smax = spec.sigma_max();
  Real spread = sqrt(smax * smax + 4 * t * t / (spec.sigma_min() * spec.sigma_min()));
  Real lo = spec.x0_min() - Real(widths) * spread;
  Real hi = spec.x0_max() + Real(widths) * spread + spec.p0 * t;
  return Grid<Real>::spanning(lo, hi, count);
}

/// Samples of the freely evolved pulse (Gaussian spreading, carrier phase).
/// A cut spec is only defined at t = 0.
template <class Real>
SampledWave<Real> free_evolve(const PulseSpec<Real>& spec, const Real& t, const Grid<Real>& grid,
                              const PrecisionContext& ctx) {
  using std::abs;
  spec.validate();
  if (t < 0) throw DomainError("free evolution needs t >= 0");
  if (spec.cut && t != 0) throw DomainError("a cut pulse has no closed-form evolution; use the sampled routes");
  ScopedPrecision scope(ctx);
  SampledWave<Real> w;
  w.t = t;
  w.grid = grid;
  w.meta = {"free_evolve", spec.p0};
  w.values.resize(grid.count);
  for (std::size_t i = 0; i < grid.count; ++i) {
    Real x = grid.at(i);
    w.values[i] = (spec.cut && x < *spec.cut) ? Complex<Real>(0) : evolved_value(spec, x, t);
  }
  if (!spec.cut) {
    Real expect = analytic_squared_norm(spec);
    Real got = squared_norm(w);
    if (expect > 0 && abs(got - expect) > check_tolerance<Real>(ctx, 1e-8) * expect) {
      throw GridError("grid norm " + to_decimal(got, 10) + " differs from the pulse norm " + to_decimal(expect, 10) +
                      "; widen or refine the grid");
    }
  }
  return w;
}

/// Rigid translation of the envelope at group velocity p0 (no spreading).
template <class Real>
SampledWave<Real> translate_free(const PulseSpec<Real>& spec, const Real& t, const Grid<Real>& grid,
                                 const PrecisionContext& ctx) {
  spec.validate();
  ScopedPrecision scope(ctx);
  SampledWave<Real> w;
  w.t = t;
  w.grid = grid;
  w.meta = {"translate_free", spec.p0};
  w.values.resize(grid.count);
  for (std::size_t i = 0; i < grid.count; ++i) {
    Real x = grid.at(i);
    w.values[i] = carrier(spec.p0, x, t) * envelope_value(spec, Real(x - spec.p0 * t));
  }
  return w;
}

/// t = 0 samples with everything at x < x_cut set to zero. Samples at
/// x >= x_cut are copied unchanged from the uncut pulse.
template <class Real>
SampledWave<Real> cut_rear(const PulseSpec<Real>& spec, const Real& x_cut, const Grid<Real>& grid,
                           const PrecisionContext& ctx) {
  if (!grid.contains(x_cut)) throw DomainError("cut position lies outside the grid");
  SampledWave<Real> w = free_evolve(spec.uncut(), Real(0), grid, ctx);
  for (std::size_t i = 0; i < grid.count; ++i)
    if (grid.at(i) < x_cut) w.values[i] = Complex<Real>(0);
  w.meta.producer = "cut_rear";
  return w;
}

}  // namespace frontload
