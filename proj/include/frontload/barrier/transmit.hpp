#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "frontload/barrier/kernel.hpp"
#include "frontload/barrier/transmission.hpp"
#include "frontload/error.hpp"
#include "frontload/numerics/precision.hpp"
#include "frontload/numerics/quadrature.hpp"
#include "frontload/pulses/gaussian.hpp"
#include "frontload/pulses/spectrum.hpp"
#include "frontload/pulses/wave.hpp"

namespace frontload {

template <class Real>
struct MomentumBand {
  Real lo;
  Real hi;
};

/// Interval of p where |T(p) Phi(p)| exceeds 10^(-digits-3) of its largest
/// value, found on a log-magnitude scan.
template <class Real>
MomentumBand<Real> transmission_band(const PulseSpec<Real>& spec, const RectangularBarrier<Real>& b,
                                     const PrecisionContext& ctx) {
  using std::abs;
  using std::log;
  using std::sqrt;
  spec.validate();
  ScopedPrecision scope(ctx);
  const Real reach = 8 * spectral_half_width(spec, ctx);
  const int samples = 8001;
  auto qs = Grid<Real>::spanning(Real(-reach), reach, samples);
  std::vector<Real> level(samples);
  std::vector<bool> valid(samples, false);
  Real best = 0;
  bool have = false;
  for (int i = 0; i < samples; ++i) {
    Real q = qs.at(static_cast<std::size_t>(i));
    Real p = spec.p0 + q;
    if (!(p > 0)) continue;
    Real lg = Real(-std::numeric_limits<double>::infinity());
    for (const auto& c : spec.components) {
      Real v = log(abs(c.weight) * sqrt(sqrt(Real(2) / (pi<Real>() * c.sigma * c.sigma))) * c.sigma /
                   (2 * sqrt(pi<Real>()))) -
               q * q * c.sigma * c.sigma / 4;
      lg = std::max<Real>(lg, v);
    }
    Real t = abs(scattering_amplitudes(p, b).T);
    if (t == 0) continue;
    level[static_cast<std::size_t>(i)] = lg + log(t);
    valid[static_cast<std::size_t>(i)] = true;
    if (!have || level[static_cast<std::size_t>(i)] > best) best = level[static_cast<std::size_t>(i)];
    have = true;
  }
  if (!have) throw DomainError("pulse spectrum and transmission do not overlap");
  const Real floor = best - Real(ctx.digits + 3) * Real(std::log(10.0));
  int first = -1;
  int last = -1;
  for (int i = 0; i < samples; ++i) {
    if (valid[static_cast<std::size_t>(i)] && level[static_cast<std::size_t>(i)] >= floor) {
      if (first < 0) first = i;
      last = i;
    }
  }
  if (first == 0 || last == samples - 1) throw DomainError("transmitted spectrum reaches the scan edge");
  if (!(spec.p0 + qs.at(static_cast<std::size_t>(first - 1)) > 0)) {
    throw DomainError("pulse spectrum reaches p <= 0; the barrier model needs a right-moving pulse");
  }
  return {Real(spec.p0 + qs.at(static_cast<std::size_t>(first - 1))),
          Real(spec.p0 + qs.at(static_cast<std::size_t>(last + 1)))};
}

/// Grid for transmitted pulses: the free-evolution grid extended by the
/// barrier width ahead of the pulse.
template <class Real>
Grid<Real> transmit_grid(const PulseSpec<Real>& spec, const RectangularBarrier<Real>& b, const Real& t,
                         const PrecisionContext& ctx, std::size_t count = 4096) {
  auto g = default_grid(spec, t, ctx, count);
  return Grid<Real>::spanning(g.front(), Real(g.back() + b.d), count);
}

/// Momentum route: Psi^T(x, t) = int T(p) Phi(p) e^{ipx - ip^2 t/2} dp, with
/// panels doubled until the largest change is below `tolerance` of the peak.
template <class Real>
SampledWave<Real> transmit_momentum(const PulseSpec<Real>& spec, const RectangularBarrier<Real>& b, const Real& t,
                                    const Grid<Real>& grid, const PrecisionContext& ctx, double tolerance = 1e-8) {
  using std::abs;
  using std::cos;
  using std::sin;
  spec.validate();
  b.validate();
  if (spec.cut) throw DomainError("momentum route needs an uncut pulse");
  if (t < 0) throw DomainError("transmission needs t >= 0");
  auto band = transmission_band(spec, b, ctx);
  ScopedPrecision scope(ctx);
  const Real reach = std::max<Real>(abs(grid.front()), abs(grid.back())) + 1;
  const Real width = band.hi - band.lo;
  auto evaluate = [&](int panels) {
    auto rule = composite_rule<Real>(band.lo, band.hi, panels, 16, ctx);
    std::vector<Complex<Real>> F(rule.nodes.size());
    std::vector<Real> minus_p(rule.nodes.size());
    for (std::size_t j = 0; j < F.size(); ++j) {
      const Real& p = rule.nodes[j];
      Real a = -p * p * t / 2;
      F[j] = scattering_amplitudes(p, b).T * spectrum_amplitude(spec, p) * Complex<Real>(cos(a), sin(a)) *
             rule.weights[j];
      minus_p[j] = -p;
    }
    SampledWave<Real> out;
    out.t = t;
    out.grid = grid;
    out.meta = {"transmit", spec.p0};
    out.values = detail::fourier_sum(minus_p, F, grid);
    return out;
  };
  int panels = std::max(8, static_cast<int>(std::ceil(to_double(width * reach / 8))));
  auto prev = evaluate(panels);
  for (int round = 0; round < 6; ++round) {
    panels *= 2;
    auto next = evaluate(panels);
    Real peak = 0;
    Real change = 0;
    for (std::size_t i = 0; i < grid.count; ++i) {
      peak = std::max<Real>(peak, abs(next.values[i]));
      change = std::max<Real>(change, abs(next.values[i] - prev.values[i]));
    }
    if (peak == 0 || change <= Real(tolerance) * peak) return next;
    prev = std::move(next);
  }
  throw ConvergenceError("transmission quadrature did not converge under panel doubling");
}

/// Convolution route: band kernel applied to the freely evolved input,
/// Psi^T(x) = int xi(x') Psi_0(x + x', t) dx'.
template <class Real>
SampledWave<Real> transmit_convolution(const PulseSpec<Real>& spec, const RectangularBarrier<Real>& b, const Real& t,
                                       const Grid<Real>& grid, const PrecisionContext& ctx) {
  spec.validate();
  if (spec.cut) throw DomainError("convolution route with the band kernel needs an uncut pulse");
  auto band = transmission_band(spec, b, ctx);
  ScopedPrecision scope(ctx);
  auto support = default_grid(spec, t, ctx, 2);
  const Real h = grid.step;
  // kernel offsets reaching from every output point to the whole input support
  const long long lo = static_cast<long long>(std::floor(to_double((support.front() - grid.back()) / h))) - 1;
  const long long hi = static_cast<long long>(std::ceil(to_double((support.back() - grid.front()) / h))) + 1;
  Grid<Real> kx{Real(h * Real(lo)), h, static_cast<std::size_t>(hi - lo + 1)};
  auto kernel = band_kernel(b, band.lo, band.hi, kx, ctx);
  Grid<Real> in_grid{Real(grid.front() + kx.front()), h, grid.count + kx.count};
  SampledWave<Real> input;
  input.t = t;
  input.grid = in_grid;
  input.meta = {"free_evolve", spec.p0};
  input.values.resize(in_grid.count);
  for (std::size_t i = 0; i < in_grid.count; ++i) input.values[i] = evolved_value(spec, in_grid.at(i), t);
  // output index i reads input index i + j, matching x_i + x'_j
  SampledWave<Real> out;
  out.t = t;
  out.grid = grid;
  out.meta = {"transmit_convolution", spec.p0};
  out.values.resize(grid.count);
  std::vector<Complex<Real>> terms(kx.count);
  for (std::size_t i = 0; i < grid.count; ++i) {
    for (std::size_t j = 0; j < kx.count; ++j) terms[j] = kernel.xi[j] * input.values[i + j];
    out.values[i] = pairwise_sum(terms.data(), terms.size()) * h;
  }
  return out;
}

/// Causal-kernel transmission of t = 0 samples; the kernel spans the whole
/// input so every output point sees the input from x onwards (and the
/// measured leak behind x).
template <class Real>
SampledWave<Real> transmit_sampled(const SampledWave<Real>& input, const RectangularBarrier<Real>& b,
                                   const KernelOptions<Real>& options, const PrecisionContext& ctx,
                                   const std::optional<Real>& kernel_behind = std::nullopt) {
  if (input.t != 0) throw DomainError("sampled transmission is defined for t = 0 inputs");
  ScopedPrecision scope(ctx);
  const Real h = input.grid.step;
  const Real behind = kernel_behind ? *kernel_behind : Real(2 * b.d);
  const long long lo = -static_cast<long long>(std::ceil(to_double(behind / h)));
  const long long hi = static_cast<long long>(input.grid.count);
  Grid<Real> kx{Real(h * Real(lo)), h, static_cast<std::size_t>(hi - lo)};
  auto kernel = xi_kernel(b, kx, options, ctx);
  auto out = convolve(kernel, input);
  out.meta.producer = "transmit_sampled";
  return out;
}

/// Transmitted pulse through the barrier. Cut pulses are sampled at t = 0 and
/// convolved with the causal kernel; uncut pulses take the momentum route.
template <class Real>
SampledWave<Real> transmit(const PulseSpec<Real>& spec, const RectangularBarrier<Real>& b, const Real& t,
                           const Grid<Real>& grid, const PrecisionContext& ctx) {
  if (spec.cut) {
    if (t != 0) throw DomainError("a cut pulse is transmitted at t = 0 only");
    return transmit_sampled(cut_rear(spec, *spec.cut, grid, ctx), b, KernelOptions<Real>{}, ctx);
  }
  return transmit_momentum(spec, b, t, grid, ctx);
}

/// T0 times the free pulse of width sqrt(sigma^2 - 4 beta), envelope shifted
/// by the complex alpha, carrier at x.
template <class Real>
SampledWave<Real> transmit_analytic(const PulseSpec<Real>& spec, const ApproxParams<Real>& ap, const Real& t,
                                    const Grid<Real>& grid, const PrecisionContext& ctx) {
  using std::sqrt;
  spec.validate();
  if (spec.cut) throw DomainError("the analytic form needs an uncut pulse");
  ScopedPrecision scope(ctx);
  PulseSpec<Real> narrowed = spec;
  for (auto& c : narrowed.components) {
    Real s2 = c.sigma * c.sigma - 4 * ap.beta;
    if (!(s2 > 0)) throw DomainError("sigma^2 <= 4 beta: the transmitted width is not real");
    c.sigma = sqrt(s2);
  }
  SampledWave<Real> out;
  out.t = t;
  out.grid = grid;
  out.meta = {"transmit_analytic", spec.p0};
  out.values.resize(grid.count);
  for (std::size_t i = 0; i < grid.count; ++i) out.values[i] = ap.T0 * evolved_value(narrowed, grid.at(i), t, ap.alpha);
  return out;
}

/// max |t_approx / t_exact - 1| over |p - p0| <= 2 / sigma_min.
template <class Real>
Real approximation_error(const PulseSpec<Real>& spec, const RectangularBarrier<Real>& b, const PrecisionContext& ctx,
                         int samples = 201) {
  using std::abs;
  auto ap = approx_params(spec.p0, b, ctx);
  ScopedPrecision scope(ctx);
  const Real reach = 2 / spec.sigma_min();
  Real worst = 0;
  for (int i = 0; i < samples; ++i) {
    Real p = spec.p0 - reach + 2 * reach * Real(i) / Real(samples - 1);
    if (!(p > 0)) continue;
    worst = std::max<Real>(worst, abs(t_approx(p, ap) / scattering_amplitudes(p, b).T - Complex<Real>(1)));
  }
  return worst;
}

/// Mean shift of matched peaks of `moved` relative to `reference`; both must
/// have the same number of peaks.
template <class Real>
std::optional<Real> peak_shift(const SampledWave<Real>& moved, const SampledWave<Real>& reference, double threshold,
                               std::size_t expected) {
  auto a = find_peaks(moved, threshold);
  auto r = find_peaks(reference, threshold);
  if (a.size() != expected || r.size() != expected || expected == 0) return std::nullopt;
  Real total = 0;
  for (std::size_t k = 0; k < expected; ++k) total += a[k].position - r[k].position;
  return total / Real(expected);
}

template <class Real>
struct HartmanRow {
  Real d;
  Real sigma;
  Real advancement;
  Real abs_T0;
  double log10_abs_T0 = 0;
  Real approx_error;
  bool included = false;
  std::string note;
};

template <class Real>
struct HartmanOptions {
  Real p0 = 1;
  Real sigma_per_d = 2;      // sigma = sigma_per_d * d before widening
  Real time_per_d = Real(1.5);  // t = time_per_d * d / p0
  double validity = 0.1;
  double widen = 1.25;
  int max_widenings = 6;
  std::size_t grid_points = 4096;
};

/// Advancement of a single Gaussian through barriers of growing width; rows
/// that fail the approximation precheck are kept but marked excluded.
template <class Real>
std::vector<HartmanRow<Real>> hartman_scan(const std::vector<RectangularBarrier<Real>>& barriers,
                                           const HartmanOptions<Real>& opt, const PrecisionContext& ctx) {
  using std::abs;
  std::vector<HartmanRow<Real>> rows;
  for (const auto& b : barriers) {
    ScopedPrecision scope(ctx);
    HartmanRow<Real> row;
    row.d = b.d;
    row.sigma = opt.sigma_per_d * b.d;
    auto ap = approx_params(opt.p0, b, ctx);
    row.abs_T0 = abs(ap.T0);
    row.log10_abs_T0 = log10_abs(row.abs_T0);
    auto spec = single_gaussian(opt.p0, row.sigma);
    row.approx_error = approximation_error(spec, b, ctx);
    for (int k = 0; k < opt.max_widenings && !(row.approx_error < Real(opt.validity)); ++k) {
      row.sigma *= Real(opt.widen);
      spec = single_gaussian(opt.p0, row.sigma);
      row.approx_error = approximation_error(spec, b, ctx);
    }
    if (!(row.approx_error < Real(opt.validity))) {
      row.note = "excluded: quadratic expansion error " + to_decimal(row.approx_error, 3);
      rows.push_back(row);
      continue;
    }
    const Real t = opt.time_per_d * b.d / opt.p0;
    auto grid = transmit_grid(spec, b, t, ctx, opt.grid_points);
    auto through = transmit_momentum(spec, b, t, grid, ctx);
    auto free = free_evolve(spec, t, grid, ctx);
    auto shift = peak_shift(through, free, 0.05, 1);
    if (!shift) {
      row.note = "excluded: peak not found";
    } else {
      row.advancement = *shift;
      row.included = true;
    }
    rows.push_back(row);
  }
  return rows;
}

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("slope fit needs two or more points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace frontload
