#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include "frontload/error.hpp"
#include "frontload/numerics/lagrange.hpp"
#include "frontload/numerics/precision.hpp"
#include "frontload/numerics/quadrature.hpp"
#include "frontload/pulses/gaussian.hpp"
#include "frontload/pulses/spectrum.hpp"
#include "frontload/pulses/wave.hpp"

namespace frontload {

/// Spin of 2K+1 components in a field region of width d; component m is
/// delayed by m * delta_x.
template <class Real>
struct SpinAdvanceConfig {
  int K = 0;
  Real omega_L = 1;
  Real d = 1;
  Real p0 = 1;
  int n = 0;
  std::optional<Real> delta_x_override;

  /// omega_L chosen so that K * delta_x equals `span`.
  static SpinAdvanceConfig with_span(int K, const Real& span, const Real& d, const Real& p0, int n) {
    SpinAdvanceConfig c;
    c.K = K;
    c.d = d;
    c.p0 = p0;
    c.n = n;
    c.omega_L = span * p0 * p0 / (Real(std::max(K, 1)) * d);
    c.validate();
    return c;
  }

  [[nodiscard]] Real delta_x() const { return delta_x_override ? *delta_x_override : omega_L * d / (p0 * p0); }
  /// Phase omega_L d / p0 picked up per unit of m.
  [[nodiscard]] Real theta() const { return omega_L * d / p0; }
  [[nodiscard]] Real advance() const { return Real(n) * d; }

  void validate() const {
    if (K < 0) throw DomainError("K must be non-negative");
    if (n < 0) throw DomainError("n must be non-negative");
    if (!(d > 0)) throw DomainError("d must be positive");
    if (!(p0 > 0)) throw DomainError("p0 must be positive");
    if (!(delta_x() > 0)) throw DomainError("delta_x must be positive");
  }
};

template <class Real>
struct EtaWeights {
  std::vector<Complex<Real>> etas;
  SpinAdvanceConfig<Real> config;
};

template <class Real>
struct EtaFactorization {
  std::vector<Complex<Real>> a;
  std::vector<Complex<Real>> b;
  Real N = 1;
  Complex<Real> C = Complex<Real>(1);
};

template <class Real>
NodeSet<Real> spin_nodes(const SpinAdvanceConfig<Real>& cfg) {
  return NodeSet<Real>::equispaced(cfg.K, cfg.delta_x(), Real(-cfg.advance()));
}

/// Weights with sum (m dx)^j eta_m = (-n d)^j for j = 0..K and sum eta_m = 1.
template <class Real>
EtaWeights<Real> synthesize_eta(const SpinAdvanceConfig<Real>& cfg, const PrecisionContext& ctx) {
  cfg.validate();
  ScopedPrecision scope(ctx);
  auto w = lagrange_weights(spin_nodes(cfg), ctx);
  return {std::move(w.weights), cfg};
}

template <class Real>
Real abs_sum(const EtaWeights<Real>& w) {
  using std::abs;
  std::vector<Real> mags;
  for (const auto& e : w.etas) mags.push_back(abs(e));
  return pairwise_sum(mags.data(), mags.size());
}

/// a_m = |eta_m|^{1/2}, b_m = |eta_m|^{1/2} e^{-i(arg eta_m + m theta)}, so
/// e^{-i m theta} a_m conj(b_m) = eta_m.
template <class Real>
EtaFactorization<Real> factorize_eta(const EtaWeights<Real>& w) {
  using std::abs;
  using std::arg;
  using std::polar;
  using std::sqrt;
  EtaFactorization<Real> f;
  const Real theta = w.config.theta();
  for (std::size_t m = 0; m < w.etas.size(); ++m) {
    Real mag = sqrt(abs(w.etas[m]));
    Real phase = w.etas[m] == Complex<Real>(0) ? Real(0) : Real(arg(w.etas[m]));
    f.a.emplace_back(mag, Real(0));
    f.b.push_back(polar(mag, Real(-(phase + Real(m) * theta))));
  }
  Real s = abs_sum(w);
  f.N = s * s;
  Complex<Real> total = pairwise_sum(w.etas.data(), w.etas.size());
  f.C = total / sqrt(f.N);
  return f;
}

/// T(p) = sum_m eta_m e^{i m p dx}, p measured from the carrier.
template <class Real>
Complex<Real> spin_T(const Real& p, const EtaWeights<Real>& w) {
  using std::cos;
  using std::sin;
  const Real dx = w.config.delta_x();
  std::vector<Complex<Real>> terms(w.etas.size());
  for (std::size_t m = 0; m < w.etas.size(); ++m) {
    Real phase = Real(m) * p * dx;
    terms[m] = w.etas[m] * Complex<Real>(cos(phase), sin(phase));
  }
  return pairwise_sum(terms.data(), terms.size());
}

/// Central difference of arg T; the phase step is taken from
/// T(p+h) conj(T(p-h)), which unwraps automatically.
template <class Real>
Real local_frequency(const EtaWeights<Real>& w, const Real& p, const Real& h) {
  using std::abs;
  using std::arg;
  if (!(h > 0)) throw DomainError("difference step must be positive");
  Complex<Real> hi = spin_T(Real(p + h), w);
  Complex<Real> lo = spin_T(Real(p - h), w);
  Complex<Real> mid = spin_T(p, w);
  const Real floor = 64 * std::numeric_limits<Real>::epsilon() * abs_sum(w);
  if (abs(hi) <= floor || abs(lo) <= floor || abs(mid) <= floor) {
    throw DomainError("T vanishes in the difference stencil at p = " + to_decimal(p, 8));
  }
  return Real(arg(hi * std::conj(lo))) / (2 * h);
}

template <class Real>
struct WindowRow {
  Real p;
  Real abs_T;
  Real frequency;
};

template <class Real>
struct WindowReport {
  bool empty = true;
  Real p_lo = 0;
  Real p_hi = 0;
  Real max_deviation = 0;
  std::vector<WindowRow<Real>> rows;

  [[nodiscard]] Real width() const { return empty ? Real(0) : Real(p_hi - p_lo); }
};

/// Largest contiguous interval around p = 0 on which the local frequency
/// stays within 5% of -n d.
template <class Real>
WindowReport<Real> window_scan(const EtaWeights<Real>& w, const Real& p_lo, const Real& p_hi, int samples,
                               const PrecisionContext& ctx) {
  using std::abs;
  if (samples < 16) throw DomainError("window scan needs at least 16 samples");
  if (!(p_hi > p_lo)) throw DomainError("empty momentum range");
  ScopedPrecision scope(ctx);
  auto grid = Grid<Real>::spanning(p_lo, p_hi, static_cast<std::size_t>(samples));
  const Real h = grid.step / 8;
  const Real target = -w.config.advance();
  const Real band = Real(0.05) * abs(target);
  WindowReport<Real> rep;
  std::vector<bool> inside(grid.count, false);
  std::vector<Real> deviation(grid.count, Real(0));
  for (std::size_t i = 0; i < grid.count; ++i) {
    Real p = grid.at(i);
    Real f = 0;
    bool ok = true;
    try {
      f = local_frequency(w, p, h);
    } catch (const DomainError&) {
      ok = false;
    }
    rep.rows.push_back({p, abs(spin_T(p, w)), f});
    deviation[i] = abs(f - target);
    inside[i] = ok && deviation[i] <= band;
  }
  std::size_t centre = 0;
  for (std::size_t i = 1; i < grid.count; ++i)
    if (abs(grid.at(i)) < abs(grid.at(centre))) centre = i;
  if (!inside[centre]) return rep;
  std::size_t lo = centre;
  std::size_t hi = centre;
  while (lo > 0 && inside[lo - 1]) --lo;
  while (hi + 1 < grid.count && inside[hi + 1]) ++hi;
  rep.empty = false;
  rep.p_lo = grid.at(lo);
  rep.p_hi = grid.at(hi);
  for (std::size_t i = lo; i <= hi; ++i) rep.max_deviation = std::max<Real>(rep.max_deviation, deviation[i]);
  return rep;
}

namespace detail {

/// sum_m eta_m G_0(u + m dx) for one component, u = y - x0, honouring a cut
/// at y >= cut. Returns the per-m terms.
template <class Real>
void accumulate_delayed(std::vector<Complex<Real>>& terms, const EtaWeights<Real>& w,
                        const GaussianComponent<Real>& c, const Real& y, const std::optional<Real>& cut) {
  using std::exp;
  using std::sqrt;
  const Real dx = w.config.delta_x();
  const Real s2 = c.sigma * c.sigma;
  const Real norm = sqrt(sqrt(Real(2) / (pi<Real>() * s2)));
  const Real u = y - c.x0;
  if constexpr (is_high_precision_v<Real>) {
    Real value = norm * exp(-(u * u) / s2);
    Real ratio = exp(-(2 * u * dx + dx * dx) / s2);
    const Real step = exp(-2 * dx * dx / s2);
    for (std::size_t m = 0; m < terms.size(); ++m) {
      if (!cut || y + Real(m) * dx >= *cut) terms[m] += w.etas[m] * (c.weight * value);
      value *= ratio;
      ratio *= step;
    }
  } else {
    for (std::size_t m = 0; m < terms.size(); ++m) {
      Real arg = u + Real(m) * dx;
      if (!cut || y + Real(m) * dx >= *cut) terms[m] += w.etas[m] * (c.weight * (norm * exp(-(arg * arg) / s2)));
    }
  }
}

}  // namespace detail

/// Support the delayed copies need: from KΔx + 6 sigma behind the rearmost
/// centre to nd + 6 sigma ahead of the foremost one.
template <class Real>
std::pair<Real, Real> spin_support(const PulseSpec<Real>& spec, const EtaWeights<Real>& w, const Real& t) {
  const Real shift = spec.p0 * t;
  const Real six = 6 * spec.sigma_max();
  Real lo = shift + spec.x0_min() - Real(w.config.K) * w.config.delta_x() - six;
  Real hi = shift + spec.x0_max() + w.config.advance() + six;
  return {lo, hi};
}

/// N^{-1/2} sum_m eta_m G_in(x - p0 t + m dx) times the carrier; envelopes do
/// not spread.
template <class Real>
SampledWave<Real> spin_transmit(const PulseSpec<Real>& spec, const EtaWeights<Real>& w, const Real& t,
                                const Grid<Real>& grid, const PrecisionContext& ctx) {
  using std::sqrt;
  spec.validate();
  if (!spec.shares_sigma()) throw DomainError("spin transmission needs components of one width");
  if (spec.p0 != w.config.p0) throw DomainError("pulse and spin configuration disagree on p0");
  ScopedPrecision scope(ctx);
  auto [lo, hi] = spin_support(spec, w, t);
  if (grid.front() > lo || grid.back() < hi) {
    throw GridError("grid [" + to_decimal(grid.front(), 6) + ", " + to_decimal(grid.back(), 6) +
                    "] does not cover the delayed copies [" + to_decimal(lo, 6) + ", " + to_decimal(hi, 6) + "]");
  }
  const Real scale = 1 / abs_sum(w);
  SampledWave<Real> out;
  out.t = t;
  out.grid = grid;
  out.meta = {"spin_transmit", spec.p0};
  out.values.resize(grid.count);
  std::vector<Complex<Real>> terms(w.etas.size());
  for (std::size_t i = 0; i < grid.count; ++i) {
    Real x = grid.at(i);
    Real y = x - spec.p0 * t;
    std::fill(terms.begin(), terms.end(), Complex<Real>(0));
    for (const auto& c : spec.components) detail::accumulate_delayed(terms, w, c, y, spec.cut);
    out.values[i] = carrier(spec.p0, x, t) * (scale * pairwise_sum(terms.data(), terms.size()));
  }
  return out;
}

/// Same pulse through the momentum route N^{-1/2} int T(q) A(q) e^{iqX} dq,
/// with panels doubled until the largest change falls below `tolerance`
/// relative to the peak. Uncut specs only.
template <class Real>
SampledWave<Real> spin_transmit_momentum(const PulseSpec<Real>& spec, const EtaWeights<Real>& w, const Real& t,
                                         const Grid<Real>& grid, const PrecisionContext& ctx,
                                         double tolerance = 1e-10) {
  using std::abs;
  using std::cos;
  using std::sin;
  spec.validate();
  if (spec.cut) throw DomainError("momentum route needs an uncut pulse");
  ScopedPrecision scope(ctx);
  using std::sqrt;
  const Real scale = 1 / abs_sum(w);
  // |T| reaches sum|eta| = 1/C away from q = 0, so the spectrum is cut where
  // sum|eta|^2 |A| drops below 10^-16 of the peak.
  const Real decades = 2 * Real(log10_abs(abs_sum(w))) + 16;
  const Real half = 2 / spec.sigma_min() * sqrt(decades * Real(std::log(10.0)));
  auto evaluate = [&](int panels) {
    auto rule = composite_rule<Real>(Real(-half), half, panels, 16, ctx);
    std::vector<Complex<Real>> f(rule.nodes.size());
    std::vector<Complex<Real>> phase(rule.nodes.size());
    std::vector<Complex<Real>> step(rule.nodes.size());
    const Real X0 = grid.front() - spec.p0 * t;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const Real& q = rule.nodes[j];
      f[j] = spin_T(q, w) * envelope_amplitude(spec, q) * rule.weights[j];
      phase[j] = Complex<Real>(cos(q * X0), sin(q * X0));
      step[j] = Complex<Real>(cos(q * grid.step), sin(q * grid.step));
    }
    SampledWave<Real> out;
    out.t = t;
    out.grid = grid;
    out.meta = {"spin_transmit_momentum", spec.p0};
    out.values.resize(grid.count);
    std::vector<Complex<Real>> terms(f.size());
    for (std::size_t i = 0; i < grid.count; ++i) {
      for (std::size_t j = 0; j < f.size(); ++j) {
        terms[j] = f[j] * phase[j];
        phase[j] *= step[j];
      }
      out.values[i] = carrier(spec.p0, grid.at(i), t) * (scale * pairwise_sum(terms.data(), terms.size()));
    }
    return out;
  };
  const Real extent = std::max<Real>(abs(grid.front() - spec.p0 * t), abs(grid.back() - spec.p0 * t)) +
                      Real(w.config.K) * w.config.delta_x();
  int panels = std::max(4, static_cast<int>(to_double(half * extent / 8)));
  auto prev = evaluate(panels);
  for (int round = 0; round < 8; ++round) {
    panels *= 2;
    auto next = evaluate(panels);
    Real peak = 0;
    Real change = 0;
    for (std::size_t i = 0; i < grid.count; ++i) {
      peak = std::max<Real>(peak, abs(next.values[i]));
      change = std::max<Real>(change, abs(next.values[i] - prev.values[i]));
    }
    if (change <= Real(tolerance) * peak) return next;
    prev = std::move(next);
  }
  throw ConvergenceError("momentum-route quadrature did not converge under panel doubling");
}

template <class Real>
void write_csv(std::ostream& os, const EtaWeights<Real>& w, int digits) {
  using std::abs;
  using std::arg;
  os << "m,re,im,abs,arg\n";
  for (std::size_t m = 0; m < w.etas.size(); ++m) {
    const auto& e = w.etas[m];
    os << m << ',' << to_decimal(e.real(), digits) << ',' << to_decimal(e.imag(), digits) << ','
       << to_decimal(Real(abs(e)), digits) << ',' << to_decimal(Real(arg(e)), digits) << '\n';
  }
}

template <class Real>
void write_csv(std::ostream& os, const WindowReport<Real>& rep, int digits) {
  os << "p,absT,local_frequency\n";
  for (const auto& r : rep.rows) {
    os << to_decimal(r.p, digits) << ',' << to_decimal(r.abs_T, digits) << ',' << to_decimal(r.frequency, digits)
       << '\n';
  }
}

}  // namespace frontload
