#pragma once

#include <cmath>
#include <vector>

#include "frontload/error.hpp"
#include "frontload/numerics/precision.hpp"
#include "frontload/pulses/gaussian.hpp"
#include "frontload/pulses/wave.hpp"

namespace frontload {

/// Phi(p) on a uniform momentum grid, with psi(x) = int Phi(p) e^{ipx} dp.
template <class Real>
struct MomentumSpectrum {
  Grid<Real> ps;
  std::vector<Complex<Real>> amps;
};

/// Envelope amplitude A(q) of an uncut spec, Phi(p0 + q) = A(q).
template <class Real>
Complex<Real> envelope_amplitude(const PulseSpec<Real>& spec, const Real& q) {
  using std::cos;
  using std::exp;
  using std::sin;
  using std::sqrt;
  Complex<Real> v(0);
  for (const auto& c : spec.components) {
    Real mag = sqrt(sqrt(Real(2) / (pi<Real>() * c.sigma * c.sigma))) * c.sigma / (2 * sqrt(pi<Real>())) *
               exp(-q * q * c.sigma * c.sigma / 4);
    Real phase = -q * c.x0;
    v += c.weight * Complex<Real>(mag * cos(phase), mag * sin(phase));
  }
  return v;
}

template <class Real>
Complex<Real> spectrum_amplitude(const PulseSpec<Real>& spec, const Real& p) {
  return envelope_amplitude(spec, Real(p - spec.p0));
}

/// Half-width in q beyond which every component's |A| is below 10^(-digits)
/// of its peak.
template <class Real>
Real spectral_half_width(const PulseSpec<Real>& spec, const PrecisionContext& ctx) {
  using std::sqrt;
  return 2 / spec.sigma_min() * sqrt(Real(ctx.digits) * Real(std::log(10.0)));
}

/// Closed-form spectrum of an uncut spec.
template <class Real>
MomentumSpectrum<Real> momentum_spectrum(const PulseSpec<Real>& spec, const PrecisionContext& ctx,
                                         std::size_t count = 1024) {
  spec.validate();
  if (spec.cut) throw DomainError("a cut pulse has no closed-form spectrum; transform its samples instead");
  ScopedPrecision scope(ctx);
  Real half = spectral_half_width(spec, ctx);
  MomentumSpectrum<Real> out;
  out.ps = Grid<Real>::spanning(Real(spec.p0 - half), Real(spec.p0 + half), count);
  out.amps.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.amps.push_back(spectrum_amplitude(spec, out.ps.at(i)));
  return out;
}

/// Discrete transform Phi(p) = (1/2pi) sum_j psi_j e^{-i p x_j} dx.
template <class Real>
MomentumSpectrum<Real> momentum_spectrum(const SampledWave<Real>& w, const Grid<Real>& ps, const PrecisionContext& ctx,
                                         double edge_tolerance = 1e-6) {
  using std::abs;
  using std::cos;
  using std::sin;
  ScopedPrecision scope(ctx);
  Real peak = 0;
  for (const auto& v : w.values) peak = std::max<Real>(peak, abs(v));
  if (peak == 0) throw DomainError("spectrum of a zero wave");
  Real edge = std::max<Real>(abs(w.values.front()), abs(w.values.back()));
  if (edge > Real(edge_tolerance) * peak) throw GridError("wave does not vanish at the grid edges (spectral leakage)");
  const Real nyquist = pi<Real>() / w.grid.step;
  if (abs(ps.front()) > nyquist || abs(ps.back()) > nyquist) throw GridError("momentum grid exceeds the sampling limit");
  MomentumSpectrum<Real> out;
  out.ps = ps;
  out.amps.resize(ps.count);
  std::vector<Complex<Real>> terms(w.size());
  const Real scale = w.grid.step / (2 * pi<Real>());
  for (std::size_t k = 0; k < ps.count; ++k) {
    Real p = ps.at(k);
    for (std::size_t j = 0; j < w.size(); ++j) {
      Real phase = -p * w.x(j);
      terms[j] = w.values[j] * Complex<Real>(cos(phase), sin(phase));
    }
    out.amps[k] = pairwise_sum(terms.data(), terms.size()) * scale;
  }
  return out;
}

/// Inverse synthesis psi(x) = int Phi(p) e^{ipx} dp by the trapezoid rule.
template <class Real>
SampledWave<Real> synthesize(const MomentumSpectrum<Real>& s, const Grid<Real>& grid, const Real& p0,
                             const PrecisionContext& ctx) {
  using std::cos;
  using std::sin;
  ScopedPrecision scope(ctx);
  SampledWave<Real> w;
  w.grid = grid;
  w.meta = {"synthesize", p0};
  w.values.resize(grid.count);
  std::vector<Complex<Real>> terms(s.ps.count);
  for (std::size_t i = 0; i < grid.count; ++i) {
    Real x = grid.at(i);
    for (std::size_t k = 0; k < s.ps.count; ++k) {
      Real phase = s.ps.at(k) * x;
      Real weight = (k == 0 || k + 1 == s.ps.count) ? Real(0.5) : Real(1);
      terms[k] = weight * s.amps[k] * Complex<Real>(cos(phase), sin(phase));
    }
    w.values[i] = pairwise_sum(terms.data(), terms.size()) * s.ps.step;
  }
  return w;
}

/// Second central moment of |Phi|^2.
template <class Real>
Real spectral_variance(const MomentumSpectrum<Real>& s) {
  using std::norm;
  Real m0 = 0;
  Real m1 = 0;
  for (std::size_t k = 0; k < s.ps.count; ++k) {
    Real d = norm(s.amps[k]);
    m0 += d;
    m1 += d * s.ps.at(k);
  }
  if (m0 == 0) throw DomainError("variance of an empty spectrum");
  Real mean = m1 / m0;
  Real m2 = 0;
  for (std::size_t k = 0; k < s.ps.count; ++k) {
    Real dp = s.ps.at(k) - mean;
    m2 += norm(s.amps[k]) * dp * dp;
  }
  return m2 / m0;
}

template <class Real>
void write_csv(std::ostream& os, const MomentumSpectrum<Real>& s, int digits) {
  write_csv(os, s.ps, s.amps, digits, "p");
}

}  // namespace frontload
