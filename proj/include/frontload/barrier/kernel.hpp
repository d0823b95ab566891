#pragma once

#include <cmath>
#include <optional>
#include <ostream>
#include <vector>

#include "frontload/barrier/transmission.hpp"
#include "frontload/error.hpp"
#include "frontload/numerics/precision.hpp"
#include "frontload/numerics/quadrature.hpp"
#include "frontload/pulses/wave.hpp"

namespace frontload {

/// Regulated inverse transform of T(p) R(p), R = (1 - ip/Lambda)^{-M}. R has
/// its only pole in the lower half plane, so the kernel stays causal.
template <class Real>
struct KernelOptions {
  int M = 12;
  std::optional<Real> Lambda;
  std::optional<Real> P;
  int order = 16;
  std::optional<Real> fine_width;
  std::optional<Real> coarse_width;
  double leak_tolerance = 1e-10;
};

template <class Real>
struct KernelTable {
  Grid<Real> xs;
  std::vector<Complex<Real>> xi;
  Real leak_ratio = 0;
  Real Lambda = 0;
  Real P = 0;
  int M = 0;
  std::size_t nodes = 0;

  /// Largest |xi| at x < 0 over the largest |xi|.
  [[nodiscard]] bool causal(double tolerance) const { return leak_ratio < Real(tolerance); }
};

namespace detail {

/// sum_j F_j e^{-i p_j x_i} for every x on a grid, by phase recurrence
/// refreshed every 64 steps.
template <class Real>
std::vector<Complex<Real>> fourier_sum(const std::vector<Real>& ps, const std::vector<Complex<Real>>& F,
                                       const Grid<Real>& xs) {
  using std::cos;
  using std::sin;
  std::vector<Complex<Real>> out(xs.count, Complex<Real>(0));
  std::vector<Complex<Real>> carry(xs.count, Complex<Real>(0));
  for (std::size_t j = 0; j < ps.size(); ++j) {
    const Real& p = ps[j];
    const Complex<Real> step(cos(p * xs.step), -sin(p * xs.step));
    Complex<Real> phase;
    for (std::size_t i = 0; i < xs.count; ++i) {
      if (i % 64 == 0) {
        Real a = -p * xs.at(i);
        phase = Complex<Real>(cos(a), sin(a));
      }
      Complex<Real> term = F[j] * phase;
      if constexpr (is_high_precision_v<Real>) {
        out[i] += term;
      } else {
        // Neumaier summation keeps the long node loop at double accuracy.
        Complex<Real> s = out[i] + term;
        Real cr = std::abs(out[i].real()) >= std::abs(term.real()) ? (out[i].real() - s.real()) + term.real()
                                                                    : (term.real() - s.real()) + out[i].real();
        Real ci = std::abs(out[i].imag()) >= std::abs(term.imag()) ? (out[i].imag() - s.imag()) + term.imag()
                                                                    : (term.imag() - s.imag()) + out[i].imag();
        carry[i] += Complex<Real>(cr, ci);
        out[i] = s;
      }
      phase *= step;
    }
  }
  for (std::size_t i = 0; i < xs.count; ++i) out[i] += carry[i];
  return out;
}

}  // namespace detail

template <class Real>
KernelOptions<Real> resolve(const KernelOptions<Real>& in, const RectangularBarrier<Real>& b) {
  using std::sqrt;
  KernelOptions<Real> o = in;
  const Real top = sqrt(2 * b.V);
  if (!o.Lambda) o.Lambda = 3 * std::max<Real>(top, Real(10) / b.d);
  if (!o.P) o.P = 20 * *o.Lambda;
  if (!o.fine_width) o.fine_width = Real(0.05) / b.d;
  if (!o.coarse_width) o.coarse_width = Real(0.1) / b.d;
  if (o.M < 2) throw DomainError("regulator order must be at least 2");
  return o;
}

/// Causal kernel xi(x) = (1/2pi) int T(p) R(p) e^{-ipx} dp on `xs`; the
/// leak ratio is measured on the table and on probes down to x = -2d.
template <class Real>
KernelTable<Real> xi_kernel(const RectangularBarrier<Real>& b, const Grid<Real>& xs, const KernelOptions<Real>& options,
                            const PrecisionContext& ctx) {
  using std::abs;
  using std::pow;
  using std::sqrt;
  b.validate();
  const auto o = resolve(options, b);
  ScopedPrecision scope(ctx);
  const Real top = sqrt(2 * b.V);
  std::vector<Real> breaks{Real(0), std::min<Real>(Real(Real(1.5) * top), *o.P), *o.P};
  auto rule = graded_rule<Real>(breaks, {*o.fine_width, *o.coarse_width}, o.order, ctx);
  std::vector<Complex<Real>> F(rule.nodes.size());
  for (std::size_t j = 0; j < F.size(); ++j) {
    const Real& p = rule.nodes[j];
    Complex<Real> reg = pow(Complex<Real>(1, -p / *o.Lambda), -o.M);
    F[j] = scattering_amplitudes(p, b).T * reg * rule.weights[j];
  }
  // T(-p) R(-p) = conj(T(p) R(p)), so xi = Re(sum) / pi.
  auto realify = [](std::vector<Complex<Real>> v) {
    for (auto& z : v) z = Complex<Real>(z.real() / pi<Real>(), Real(0));
    return v;
  };
  KernelTable<Real> table;
  table.xs = xs;
  table.xi = realify(detail::fourier_sum(rule.nodes, F, xs));
  table.Lambda = *o.Lambda;
  table.P = *o.P;
  table.M = o.M;
  table.nodes = rule.nodes.size();

  auto probes = Grid<Real>::spanning(Real(-2 * b.d), Real(-b.d / 40), 80);
  auto probe_values = realify(detail::fourier_sum(rule.nodes, F, probes));
  Real peak = 0;
  Real leak = 0;
  for (std::size_t i = 0; i < xs.count; ++i) {
    peak = std::max<Real>(peak, abs(table.xi[i]));
    if (xs.at(i) < 0) leak = std::max<Real>(leak, abs(table.xi[i]));
  }
  for (const auto& v : probe_values) leak = std::max<Real>(leak, abs(v));
  if (peak == 0) throw CausalityError("kernel vanishes on the table; extend the x grid");
  table.leak_ratio = leak / peak;
  if (!table.causal(o.leak_tolerance)) {
    throw CausalityError("kernel leaks to x < 0 at relative " + to_decimal(table.leak_ratio, 3) +
                         "; widen the momentum window or refine the panels");
  }
  return table;
}

/// Band-limited kernel (1/2pi) int_{p_lo}^{p_hi} T(p) e^{-ipx} dp. Not causal;
/// convolving it with a pulse whose spectrum lies inside the band reproduces
/// the momentum-space result exactly.
template <class Real>
KernelTable<Real> band_kernel(const RectangularBarrier<Real>& b, const Real& p_lo, const Real& p_hi,
                              const Grid<Real>& xs, const PrecisionContext& ctx, int order = 16) {
  using std::abs;
  b.validate();
  if (!(p_hi > p_lo)) throw DomainError("empty momentum band");
  ScopedPrecision scope(ctx);
  const Real reach = std::max<Real>(abs(xs.front()), abs(xs.back())) + 1;
  const int panels = std::max(8, static_cast<int>(std::ceil(to_double((p_hi - p_lo) * reach / 4))));
  auto rule = composite_rule<Real>(p_lo, p_hi, panels, order, ctx);
  std::vector<Complex<Real>> F(rule.nodes.size());
  for (std::size_t j = 0; j < F.size(); ++j) {
    F[j] = scattering_amplitudes(rule.nodes[j], b).T * (rule.weights[j] / (2 * pi<Real>()));
  }
  KernelTable<Real> table;
  table.xs = xs;
  table.xi = detail::fourier_sum(rule.nodes, F, xs);
  table.P = p_hi;
  table.nodes = rule.nodes.size();
  return table;
}

/// Psi^T(x) = int xi(x') Psi_0(x + x') dx' on the input grid. The kernel
/// spacing must equal the input spacing; the input is zero off its grid.
template <class Real>
SampledWave<Real> convolve(const KernelTable<Real>& kernel, const SampledWave<Real>& input) {
  using std::abs;
  using std::round;
  const Real h = input.grid.step;
  if (abs(kernel.xs.step - h) > h * Real(1e-9)) throw GridError("kernel and input spacings differ");
  const Real offset_steps = kernel.xs.start / h;
  const long long k0 = static_cast<long long>(std::llround(to_double(offset_steps)));
  if (abs(offset_steps - Real(k0)) > Real(1e-6)) throw GridError("kernel start is not on the input lattice");
  SampledWave<Real> out;
  out.t = input.t;
  out.grid = input.grid;
  out.meta = {"convolve", input.meta.p0};
  out.values.assign(input.size(), Complex<Real>(0));
  const long long n = static_cast<long long>(input.size());
  std::vector<Complex<Real>> terms;
  terms.reserve(kernel.xi.size());
  for (long long i = 0; i < n; ++i) {
    terms.clear();
    for (std::size_t j = 0; j < kernel.xi.size(); ++j) {
      long long idx = i + k0 + static_cast<long long>(j);
      if (idx < 0 || idx >= n) continue;
      terms.push_back(kernel.xi[j] * input.values[static_cast<std::size_t>(idx)]);
    }
    out.values[static_cast<std::size_t>(i)] = pairwise_sum(terms.data(), terms.size()) * h;
  }
  return out;
}

template <class Real>
void write_csv(std::ostream& os, const KernelTable<Real>& k, int digits) {
  using std::abs;
  os << "x,re,im,abs\n";
  for (std::size_t i = 0; i < k.xi.size(); ++i) {
    os << to_decimal(k.xs.at(i), digits) << ',' << to_decimal(k.xi[i].real(), digits) << ','
       << to_decimal(k.xi[i].imag(), digits) << ',' << to_decimal(Real(abs(k.xi[i])), digits) << '\n';
  }
}

}  // namespace frontload
