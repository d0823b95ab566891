#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "frontload/barrier/kernel.hpp"
#include "frontload/barrier/transmission.hpp"
#include "frontload/barrier/transmit.hpp"
#include "frontload/error.hpp"
#include "frontload/experiments/config.hpp"
#include "frontload/experiments/decoder.hpp"
#include "frontload/experiments/manifest.hpp"
#include "frontload/experiments/plot.hpp"
#include "frontload/numerics/lagrange.hpp"
#include "frontload/numerics/precision.hpp"
#include "frontload/pulses/gaussian.hpp"
#include "frontload/pulses/spectrum.hpp"
#include "frontload/pulses/wave.hpp"
#include "frontload/spin/advance.hpp"

namespace frontload {

namespace detail {

template <class Real>
int csv_digits(const PrecisionContext& ctx) {
  if constexpr (is_high_precision_v<Real>) return ctx.digits;
  return 17;
}

template <class Real>
std::string wave_csv(const SampledWave<Real>& w, const PrecisionContext& ctx) {
  std::ostringstream os;
  write_csv(os, w, csv_digits<Real>(ctx));
  return os.str();
}

inline std::string fixed(double v, int digits = 6) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

/// Plot-ready double, clipped to +-1e300.
template <class Real>
double plot_value(const Real& v) {
  if (log10_abs(v) > 300) return v > 0 ? 1e300 : -1e300;
  return to_double(v);
}

/// Largest |a - b| over the samples with X >= lo, relative to the largest |a|
/// there.
template <class Real>
Real window_difference(const SampledWave<Real>& a, const SampledWave<Real>& b, const Real& lo) {
  using std::abs;
  Real peak = 0;
  Real diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.X(i) < lo) continue;
    peak = std::max<Real>(peak, abs(a.values[i]));
    diff = std::max<Real>(diff, abs(a.values[i] - b.values[i]));
  }
  if (peak == 0) throw DomainError("advanced window holds no signal");
  return diff / peak;
}

/// Share of the squared norm at X < lo.
template <class Real>
Real delayed_fraction(const SampledWave<Real>& w, const Real& lo) {
  using std::norm;
  Real behind = 0;
  Real total = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    Real v = norm(w.values[i]);
    total += v;
    if (w.X(i) < lo) behind += v;
  }
  if (total == 0) throw DomainError("empty output");
  return behind / total;
}

struct SpinSetup {
  PrecisionContext ctx;
  SpinAdvanceConfig<HighReal> cfg;
  EtaWeights<HighReal> w;
};

/// Weights for K delays spanning `span`, advance n d (d = 1). Explicit digits
/// below the requirement are a precondition violation.
inline PrecisionContext spin_context(const ExperimentConfig& c, int K, double span, int n) {
  int need = required_digits(K, span, -double(n));
  if (c.digits) {
    if (*c.digits < need) {
      throw DomainError("precision shortfall: " + std::to_string(*c.digits) + " digits requested, " +
                        std::to_string(need) + " required for K=" + std::to_string(K) + ", n=" + std::to_string(n));
    }
    return make_context(*c.digits, 40);
  }
  return make_context(need, 40);
}

inline SpinSetup spin_setup(const ExperimentConfig& c, int n_for_precision = -1) {
  int K = static_cast<int>(c.integer("K"));
  int n = static_cast<int>(c.integer("n"));
  double span = c.real("span");
  SpinSetup s{spin_context(c, K, span, std::max(n, n_for_precision)), {}, {}};
  ScopedPrecision scope(s.ctx);
  s.cfg = SpinAdvanceConfig<HighReal>::with_span(K, parse_real<HighReal>(c.get("span")), HighReal(1),
                                                 parse_real<HighReal>(c.get("p0")), n);
  s.w = synthesize_eta(s.cfg, s.ctx);
  return s;
}

template <class Real>
PulseSpec<Real> pulse_from(const ExperimentConfig& c) {
  Real sigma = parse_real<Real>(c.get("sigma"));
  return two_hump(parse_real<Real>(c.get("p0")), sigma, Real(parse_real<Real>(c.get("hump_offset")) * sigma));
}

/// Momentum extent where the two-hump envelope amplitude stays above 1e-3 of
/// its peak, |q| <= (2 / sigma) sqrt(3 ln 10).
inline double support_half_width(double sigma) { return 2.0 / sigma * std::sqrt(3.0 * std::log(10.0)); }

/// Share of the power of one sampled period of spin_T at negative Fourier
/// indices, from N = 4(K+1) samples.
inline HighReal negative_index_power(const EtaWeights<HighReal>& w) {
  using std::norm;
  const std::size_t N = 4 * w.etas.size();
  const HighReal period = 2 * pi<HighReal>() / w.config.delta_x();
  std::vector<Complex<HighReal>> samples(N);
  for (std::size_t j = 0; j < N; ++j) samples[j] = spin_T(HighReal(period * HighReal(j) / HighReal(N)), w);
  HighReal negative = 0;
  HighReal total = 0;
  for (std::size_t k = 0; k < N; ++k) {
    Complex<HighReal> acc(0);
    for (std::size_t j = 0; j < N; ++j) {
      HighReal a = -2 * pi<HighReal>() * HighReal((j * k) % N) / HighReal(N);
      acc += samples[j] * Complex<HighReal>(cos(a), sin(a));
    }
    HighReal p = norm(acc);
    total += p;
    if (k >= N / 2) negative += p;
  }
  return negative / total;
}

inline std::string window_csv(const WindowReport<HighReal>& r, const PrecisionContext& ctx) {
  std::ostringstream os;
  write_csv(os, r, ctx.digits);
  return os.str();
}

inline std::string window_plot_csv(const WindowReport<HighReal>& r) {
  std::ostringstream os;
  os << "p,log10_absT,local_frequency\n" << std::setprecision(10);
  for (const auto& row : r.rows)
    os << to_double(row.p) << "," << log10_abs(row.abs_T) << "," << plot_value(row.frequency) << "\n";
  return os.str();
}

inline void record_window(RunManifest& m, const WindowReport<HighReal>& r, double support) {
  m.note("window_empty", r.empty ? "yes" : "no");
  if (!r.empty) {
    m.note("window_p_lo", to_decimal(r.p_lo, 8));
    m.note("window_p_hi", to_decimal(r.p_hi, 8));
    m.note("window_width", to_decimal(r.width(), 8));
  }
  m.note("pulse_support_half_width", fixed(support, 8));
}

}  // namespace detail

/// Spin-device run: uncut and rear-cut two-hump pulses, free references and
/// the superoscillatory window.
inline RunManifest run_fig3(const ExperimentConfig& c) {
  using detail::fixed;
  RunManifest m;
  m.scenario = "fig3";
  auto s = detail::spin_setup(c);
  ScopedPrecision scope(s.ctx);
  m.digits = s.ctx.digits;
  const auto& dir = c.output_dir;
  auto spec = detail::pulse_from<HighReal>(c);
  const HighReal sigma = spec.sigma_min();
  const HighReal t = parse_real<HighReal>(c.get("t")) / spec.p0;
  const HighReal x_cut = parse_real<HighReal>(c.get("cut")) * sigma;
  auto cut_spec = spec;
  cut_spec.cut = x_cut;
  auto [lo, hi] = spin_support(spec, s.w, t);
  auto grid = Grid<HighReal>::spanning(lo, hi, static_cast<std::size_t>(c.integer("grid_points")));

  auto through = spin_transmit(spec, s.w, t, grid, s.ctx);
  auto free = translate_free(spec, t, grid, s.ctx);
  auto cut_through = spin_transmit(cut_spec, s.w, t, grid, s.ctx);
  auto cut_free = translate_free(cut_spec, t, grid, s.ctx);
  const HighReal support = detail::support_half_width(to_double(sigma));
  auto report = window_scan(s.w, HighReal(-3 * support), HighReal(3 * support),
                            static_cast<int>(c.integer("window_samples")), s.ctx);

  emit_file(m, dir, "fig3_transmitted.csv", detail::wave_csv(through, s.ctx));
  emit_file(m, dir, "fig3_free.csv", detail::wave_csv(free, s.ctx));
  emit_file(m, dir, "fig3_cut_free.csv", detail::wave_csv(cut_free, s.ctx));
  emit_file(m, dir, "fig3_cut_transmitted.csv", detail::wave_csv(cut_through, s.ctx));
  emit_file(m, dir, "fig3_window.csv", detail::window_csv(report, s.ctx));
  {
    std::ostringstream os;
    write_csv(os, s.w, s.ctx.digits);
    emit_file(m, dir, "fig3_eta.csv", os.str());
  }

  auto f = factorize_eta(s.w);
  const HighReal z = 1 / norm(f.C);
  {
    std::ostringstream os;
    os << "x,transmitted,free,cut_free,cut_transmitted\n" << std::setprecision(10);
    for (std::size_t i = 0; i < grid.count; ++i) {
      os << to_double(grid.at(i)) << "," << detail::plot_value(HighReal(norm(through.values[i]) * z)) << ","
         << detail::plot_value(HighReal(norm(free.values[i]))) << ","
         << detail::plot_value(HighReal(norm(cut_free.values[i]))) << ","
         << detail::plot_value(HighReal(norm(cut_through.values[i]) * z)) << "\n";
    }
    emit_file(m, dir, "fig3_plot.csv", os.str());
  }
  emit_file(m, dir, "fig3_window_plot.csv", detail::window_plot_csv(report));

  const double n_adv = to_double(s.cfg.advance());
  auto peaks = find_peaks(through, 0.05);
  auto free_peaks = find_peaks(free, 0.05);
  bool two = peaks.size() == 2 && free_peaks.size() == 2;
  std::string shifts;
  if (two) {
    for (int k = 0; k < 2; ++k) {
      double shift = to_double(peaks[k].position - free_peaks[k].position);
      shifts += (k ? ";" : "") + fixed(shift, 8);
      if (std::abs(shift - n_adv) > 0.05 * to_double(sigma)) two = false;
    }
  }
  m.check("two_advanced_humps", two,
          "peaks=" + std::to_string(peaks.size()) + " shifts=" + (shifts.empty() ? "n/a" : shifts));
  HighReal window_lo = x_cut;
  HighReal front = detail::window_difference(through, cut_through, window_lo);
  m.check("cut_front_matches", front <= HighReal(1e-3), "relative_linf=" + to_decimal(front, 4));
  HighReal delayed = detail::delayed_fraction(cut_through, window_lo);
  m.check("cut_delayed_dominates", delayed >= HighReal(0.9), "delayed_fraction=" + to_decimal(delayed, 6));

  m.note("x_unit", "d");
  m.note("plot_quantity", "abs2");
  m.note("plot_scale_transmitted", to_decimal(z, 6) + " (1/|C|^2)");
  m.note("log10_abs_C", fixed(log10_abs(HighReal(abs(f.C))), 8));
  m.note("advance", fixed(n_adv, 8));
  m.note("delta_x", to_decimal(s.cfg.delta_x(), 10));
  m.note("required_digits", std::to_string(required_digits(s.cfg.K, to_double(s.cfg.delta_x()) * s.cfg.K, -n_adv)));
  detail::record_window(m, report, to_double(support));
  return m;
}

namespace detail {

template <class Real>
RunManifest run_fig4_impl(const ExperimentConfig& c, const PrecisionContext& ctx) {
  using detail::fixed;
  using std::abs;
  using std::norm;
  RunManifest m;
  m.scenario = "fig4";
  m.digits = ctx.digits;
  ScopedPrecision scope(ctx);
  const auto& dir = c.output_dir;
  const Real p0 = parse_real<Real>(c.get("p0"));
  const Real d = parse_real<Real>(c.get("d"));
  RectangularBarrier<Real> b{Real(parse_real<Real>(c.get("V_ratio")) * p0 * p0), d};
  b.validate();
  auto ap = approx_params(p0, b, ctx);
  auto spec = detail::pulse_from<Real>(c);
  // lengths scale with d
  for (auto& comp : spec.components) {
    comp.sigma *= d;
    comp.x0 *= d;
  }
  const Real t = parse_real<Real>(c.get("t")) * d / p0;
  auto grid = transmit_grid(spec, b, t, ctx, static_cast<std::size_t>(c.integer("grid_points")));
  auto through = transmit_momentum(spec, b, t, grid, ctx);
  auto free = free_evolve(spec, t, grid, ctx);
  auto analytic = transmit_analytic(spec, ap, t, grid, ctx);
  auto initial = free_evolve(spec, Real(0), grid, ctx);

  emit_file(m, dir, "fig4_transmitted.csv", wave_csv(through, ctx));
  emit_file(m, dir, "fig4_free.csv", wave_csv(free, ctx));
  emit_file(m, dir, "fig4_analytic.csv", wave_csv(analytic, ctx));
  emit_file(m, dir, "fig4_initial.csv", wave_csv(initial, ctx));

  const std::size_t scan_points = static_cast<std::size_t>(c.integer("scan_points"));
  const Real reach = 4 * 2 / spec.sigma_min();
  Real p_lo = std::max<Real>(Real(p0 - reach), Real(p0 / 1000));
  auto ps = Grid<Real>::spanning(p_lo, Real(p0 + reach), scan_points);
  {
    std::ostringstream os;
    os << "p,re,im,abs\n";
    const int digits = csv_digits<Real>(ctx);
    for (std::size_t i = 0; i < ps.count; ++i) {
      auto T = t_exact(ps.at(i), b, ctx);
      os << to_decimal(ps.at(i), digits) << "," << to_decimal(T.real(), digits) << ","
         << to_decimal(T.imag(), digits) << "," << to_decimal(Real(abs(T)), digits) << "\n";
    }
    emit_file(m, dir, "fig4_transmission.csv", os.str());
  }
  MomentumSpectrum<Real> spectrum;
  spectrum.ps = ps;
  for (std::size_t i = 0; i < ps.count; ++i) spectrum.amps.push_back(spectrum_amplitude(spec, ps.at(i)));
  {
    std::ostringstream os;
    write_csv(os, spectrum, csv_digits<Real>(ctx));
    emit_file(m, dir, "fig4_spectrum.csv", os.str());
  }

  const Real T0 = abs(ap.T0);
  const Real z = 1 / (T0 * T0);
  {
    std::ostringstream os;
    os << "x,transmitted,free,analytic,initial\n" << std::setprecision(10);
    for (std::size_t i = 0; i < grid.count; ++i) {
      os << to_double(Real(grid.at(i) / d)) << "," << plot_value(Real(norm(through.values[i]) * z)) << ","
         << plot_value(Real(norm(free.values[i]))) << "," << plot_value(Real(norm(analytic.values[i]) * z)) << ","
         << plot_value(Real(norm(initial.values[i]))) << "\n";
    }
    emit_file(m, dir, "fig4_plot.csv", os.str());
  }
  {
    Real amax = 0;
    for (const auto& a : spectrum.amps) amax = std::max<Real>(amax, abs(a));
    std::ostringstream os;
    os << "p,absT_over_absT0,absA_scaled\n" << std::setprecision(10);
    for (std::size_t i = 0; i < ps.count; ++i) {
      Real tr = abs(scattering_amplitudes(ps.at(i), b).T) / T0;
      os << to_double(Real(ps.at(i) * d)) << "," << plot_value(tr) << ","
         << plot_value(Real(abs(spectrum.amps[i]) / amax)) << "\n";
    }
    emit_file(m, dir, "fig4_momentum_plot.csv", os.str());
  }

  auto peaks = find_peaks(through, 0.05);
  m.check("two_humps", peaks.size() == 2, "peaks=" + std::to_string(peaks.size()));
  auto shift = peak_shift(through, free, 0.05, 2);
  bool advanced = shift && *shift / d >= Real(0.95) && *shift / d <= Real(1.05);
  m.check("advancement_per_d", advanced, "advancement_per_d=" + (shift ? to_decimal(Real(*shift / d), 6) : "n/a"));
  Real peak = 0;
  Real diff = 0;
  for (std::size_t i = 0; i < grid.count; ++i) {
    peak = std::max<Real>(peak, abs(through.values[i]));
    diff = std::max<Real>(diff, abs(through.values[i] - analytic.values[i]));
  }
  Real rel = diff / peak;
  m.check("analytic_matches", rel <= Real(1e-3), "relative_linf=" + to_decimal(rel, 4));
  Real mod_diff = 0;
  for (std::size_t i = 0; i < grid.count; ++i)
    mod_diff = std::max<Real>(mod_diff, abs(Real(abs(through.values[i]) - abs(analytic.values[i]))));
  m.note("analytic_modulus_relative_linf", to_decimal(Real(mod_diff / peak), 4));

  m.note("x_unit", "d");
  m.note("plot_quantity", "abs2");
  m.note("plot_scale_transmitted", to_decimal(z, 6) + " (1/|T(p0)|^2)");
  m.note("momentum_plot_scale", "|T(p)|/|T(p0)| and |A(p)|/max|A|");
  m.note("log10_abs_T0", fixed(log10_abs(T0), 10));
  m.note("alpha", to_decimal(ap.alpha.real(), 10) + "," + to_decimal(ap.alpha.imag(), 10));
  m.note("beta", to_decimal(ap.beta, 10));
  m.note("approximation_error", to_decimal(approximation_error(spec, b, ctx), 4));
  return m;
}

/// Double unless more digits are requested or the barrier is too opaque for
/// double exponents.
inline std::optional<PrecisionContext> barrier_context(const ExperimentConfig& c, double kappa_d) {
  if (c.digits) {
    if (*c.digits <= 15) return std::nullopt;
    return make_context(*c.digits, 10);
  }
  if (kappa_d > 600) return make_context(30, 10);
  return std::nullopt;
}

}  // namespace detail

inline RunManifest run_fig4(const ExperimentConfig& c) {
  const double p0 = c.real("p0");
  const double ratio = c.real("V_ratio");
  if (!(2 * ratio > 1)) {
    throw DomainError("V/p0^2 = " + c.get("V_ratio") + " puts the carrier above the barrier; not a tunnelling case");
  }
  const double kappa_d = std::sqrt(2 * ratio - 1) * p0 * c.real("d");
  if (auto ctx = detail::barrier_context(c, kappa_d)) return detail::run_fig4_impl<HighReal>(c, *ctx);
  return detail::run_fig4_impl<double>(c, make_context(15));
}

/// Rear-cut two-hump pulse through the spin device or, at t = 0, through the
/// causal barrier kernel.
inline RunManifest run_cut(const ExperimentConfig& c) {
  using detail::fixed;
  RunManifest m;
  m.scenario = "cut";
  const auto& dir = c.output_dir;
  const std::string channel = c.get("channel");
  if (channel == "spin") {
    auto s = detail::spin_setup(c);
    ScopedPrecision scope(s.ctx);
    m.digits = s.ctx.digits;
    auto spec = detail::pulse_from<HighReal>(c);
    const HighReal x_cut = parse_real<HighReal>(c.get("cut")) * spec.sigma_min();
    auto cut_spec = spec;
    cut_spec.cut = x_cut;
    auto [lo, hi] = spin_support(spec, s.w, HighReal(0));
    auto grid = Grid<HighReal>::spanning(lo, hi, static_cast<std::size_t>(c.integer("grid_points")));
    auto input = translate_free(cut_spec, HighReal(0), grid, s.ctx);
    auto through = spin_transmit(spec, s.w, HighReal(0), grid, s.ctx);
    auto cut_through = spin_transmit(cut_spec, s.w, HighReal(0), grid, s.ctx);
    emit_file(m, dir, "cut_input.csv", detail::wave_csv(input, s.ctx));
    emit_file(m, dir, "cut_uncut_transmitted.csv", detail::wave_csv(through, s.ctx));
    emit_file(m, dir, "cut_transmitted.csv", detail::wave_csv(cut_through, s.ctx));
    auto f = factorize_eta(s.w);
    const HighReal z = 1 / norm(f.C);
    std::ostringstream os;
    os << "x,input,uncut_transmitted,cut_transmitted\n" << std::setprecision(10);
    for (std::size_t i = 0; i < grid.count; ++i) {
      os << to_double(grid.at(i)) << "," << detail::plot_value(HighReal(norm(input.values[i]))) << ","
         << detail::plot_value(HighReal(norm(through.values[i]) * z)) << ","
         << detail::plot_value(HighReal(norm(cut_through.values[i]) * z)) << "\n";
    }
    emit_file(m, dir, "cut_plot.csv", os.str());
    HighReal front = detail::window_difference(through, cut_through, x_cut);
    m.check("front_matches", front <= HighReal(1e-3), "relative_linf=" + to_decimal(front, 4));
    HighReal delayed = detail::delayed_fraction(cut_through, x_cut);
    m.check("delayed_dominates", delayed >= HighReal(0.9), "delayed_fraction=" + to_decimal(delayed, 6));
    auto advanced = restrict_to(cut_through, x_cut, grid.back());
    m.note("advanced_window_peaks", std::to_string(find_peaks(advanced, 0.05).size()));
    m.note("plot_scale_transmitted", to_decimal(z, 6) + " (1/|C|^2)");
  } else if (channel == "barrier") {
    const PrecisionContext ctx = make_context(15);
    m.digits = ctx.digits;
    const double p0 = c.real("p0");
    RectangularBarrier<double> b{c.real("V_ratio") * p0 * p0, 1.0};
    b.validate();
    auto spec = detail::pulse_from<double>(c);
    const double sigma = spec.sigma_min();
    const double x_cut = c.real("cut") * sigma;
    auto grid = default_grid(spec, 0.0, ctx, static_cast<std::size_t>(c.integer("grid_points")));
    auto input = free_evolve(spec, 0.0, grid, ctx);
    auto cut_input = cut_rear(spec, x_cut, grid, ctx);
    auto through = transmit_sampled(input, b, KernelOptions<double>{}, ctx);
    auto cut_through = transmit_sampled(cut_input, b, KernelOptions<double>{}, ctx);
    auto kernel = xi_kernel(b, Grid<double>::spanning(-2.0, 10.0, 1201), KernelOptions<double>{}, ctx);
    emit_file(m, dir, "cut_input.csv", detail::wave_csv(cut_input, ctx));
    emit_file(m, dir, "cut_uncut_transmitted.csv", detail::wave_csv(through, ctx));
    emit_file(m, dir, "cut_transmitted.csv", detail::wave_csv(cut_through, ctx));
    {
      std::ostringstream os;
      write_csv(os, kernel, 17);
      emit_file(m, dir, "cut_kernel.csv", os.str());
    }
    std::ostringstream os;
    os << "x,input,uncut_transmitted,cut_transmitted\n" << std::setprecision(10);
    for (std::size_t i = 0; i < grid.count; ++i) {
      os << grid.at(i) << "," << std::norm(cut_input.values[i]) << "," << std::norm(through.values[i]) << ","
         << std::norm(cut_through.values[i]) << "\n";
    }
    emit_file(m, dir, "cut_plot.csv", os.str());
    m.check("kernel_causal", kernel.causal(1e-10), "leak_ratio=" + to_decimal(kernel.leak_ratio, 4));
    double front = detail::window_difference(through, cut_through, x_cut);
    m.check("front_matches", front <= 1e-6, "relative_linf=" + to_decimal(front, 4));
    m.note("delayed_fraction", to_decimal(detail::delayed_fraction(cut_through, x_cut), 6));
    m.note("regulator", "M=" + std::to_string(kernel.M) + " Lambda=" + to_decimal(kernel.Lambda, 8));
  } else {
    throw DomainError("channel must be 'spin' or 'barrier', got '" + channel + "'");
  }
  m.note("x_unit", "d");
  m.note("cut_position", c.get("cut") + " sigma");
  return m;
}

namespace detail {

template <class Real>
std::string decoder_csv(const std::vector<Real>& times, const std::vector<TailScore<Real>>& device,
                        const std::vector<TailScore<Real>>& free, const std::vector<TailScore<Real>>& cut,
                        double threshold) {
  std::ostringstream os;
  os << "t,device_separation,free_separation,cut_log_ratio,cut_decision\n";
  for (std::size_t k = 0; k < times.size(); ++k) {
    os << to_decimal(times[k], 12) << "," << to_decimal(device[k].separation, 8) << ","
       << to_decimal(free[k].separation, 8) << ",";
    if (k < cut.size()) {
      os << to_decimal(cut[k].log_ratio(), 8) << "," << decision_name(decide(cut[k], threshold));
    } else {
      os << ",";
    }
    os << "\n";
  }
  return os.str();
}

template <class Real>
std::optional<Real> first_separable(const std::vector<Real>& times, const std::vector<TailScore<Real>>& s,
                                    double threshold) {
  for (std::size_t k = 0; k < times.size(); ++k)
    if (separable(s[k], threshold)) return times[k];
  return std::nullopt;
}

template <class Real>
void divide(SampledWave<Real>& w, const Complex<Real>& by) {
  for (auto& v : w.values) v /= by;
}

}  // namespace detail

/// "0" = single Gaussian, "1" = two humps. A receiver at x >= detector sees
/// each signal up to time t; the decoder is a matched filter.
inline RunManifest run_encode(const ExperimentConfig& c) {
  using detail::fixed;
  RunManifest m;
  m.scenario = "encode";
  const auto& dir = c.output_dir;
  const std::string channel = c.get("channel");
  const double threshold = c.real("threshold");
  const double noise = c.real("noise");
  if (!(threshold > 1)) throw DomainError("threshold must exceed 1");
  if (!(noise > 0)) throw DomainError("noise must be positive");

  // The rear-cut variant always runs through the spin device: its output at
  // any t follows from the t = 0 profile by rigid translation.
  auto s = detail::spin_setup(c);
  ScopedPrecision scope(s.ctx);
  m.digits = s.ctx.digits;
  auto one = detail::pulse_from<HighReal>(c);
  auto zero = single_gaussian(one.p0, one.sigma_min());
  const HighReal sigma = one.sigma_min();
  const HighReal x_cut = parse_real<HighReal>(c.get("cut")) * sigma;
  const HighReal x_det = parse_real<HighReal>(c.get("detector"));
  auto cut_one = one;
  cut_one.cut = x_cut;
  auto [lo, hi] = spin_support(one, s.w, HighReal(0));
  if (x_det < hi) throw DomainError("detector must lie ahead of the advanced pulse at t = 0");
  auto grid = Grid<HighReal>::spanning(lo, x_det, static_cast<std::size_t>(c.integer("grid_points")));
  const Complex<HighReal> C = factorize_eta(s.w).C;
  auto s0 = spin_transmit(zero, s.w, HighReal(0), grid, s.ctx);
  auto s1 = spin_transmit(one, s.w, HighReal(0), grid, s.ctx);
  auto y = spin_transmit(cut_one, s.w, HighReal(0), grid, s.ctx);
  detail::divide(s0, C);
  detail::divide(s1, C);
  detail::divide(y, C);
  auto f0 = translate_free(zero, HighReal(0), grid, s.ctx);
  auto f1 = translate_free(one, HighReal(0), grid, s.ctx);
  // The receiver at time t has seen X >= x_det - p0 t: tail i <-> t_i.
  auto cut_scores = tail_scores(y.values, s0.values, s1.values, grid.step, noise);
  auto free_scores = tail_scores(f1.values, f0.values, f1.values, grid.step, noise);
  std::vector<HighReal> times(grid.count);
  for (std::size_t i = 0; i < grid.count; ++i) times[i] = (x_det - grid.at(i)) / one.p0;
  std::reverse(times.begin(), times.end());
  std::reverse(cut_scores.begin(), cut_scores.end());
  std::reverse(free_scores.begin(), free_scores.end());

  std::vector<TailScore<HighReal>> device_scores;
  std::vector<HighReal> device_times = times;
  if (channel == "spin") {
    device_scores = tail_scores(s1.values, s0.values, s1.values, grid.step, noise);
    std::reverse(device_scores.begin(), device_scores.end());
  } else if (channel == "barrier") {
    const PrecisionContext dctx = make_context(15);
    const double p0 = to_double(one.p0);
    RectangularBarrier<double> b{c.real("V_ratio") * p0 * p0, 1.0};
    auto one_d = detail::pulse_from<double>(c);
    auto zero_d = single_gaussian(one_d.p0, one_d.sigma_min());
    const double det = to_double(x_det);
    const double sig = one_d.sigma_min();
    const double t_end = (det - one_d.x0_min() + 6 * sig) / p0;
    const int steps = static_cast<int>(c.integer("time_steps"));
    auto ap = approx_params(p0, b, dctx);
    auto obs = Grid<double>::spanning(det, det + 8 * sig + 2, static_cast<std::size_t>(c.integer("grid_points")));
    free_scores.clear();
    device_times.clear();
    times.clear();
    for (int k = 0; k <= steps; ++k) {
      double tk = t_end * k / steps;
      auto d0 = transmit_momentum(zero_d, b, tk, obs, dctx);
      auto d1 = transmit_momentum(one_d, b, tk, obs, dctx);
      std::vector<Complex<HighReal>> a0(obs.count), a1(obs.count), g0(obs.count), g1(obs.count);
      for (std::size_t i = 0; i < obs.count; ++i) {
        a0[i] = Complex<HighReal>(d0.values[i] / ap.T0);
        a1[i] = Complex<HighReal>(d1.values[i] / ap.T0);
        auto e0 = evolved_value(zero_d, obs.at(i), tk);
        auto e1 = evolved_value(one_d, obs.at(i), tk);
        g0[i] = Complex<HighReal>(e0);
        g1[i] = Complex<HighReal>(e1);
      }
      device_scores.push_back(tail_scores(a1, a0, a1, HighReal(obs.step), noise).front());
      free_scores.push_back(tail_scores(g1, g0, g1, HighReal(obs.step), noise).front());
      device_times.push_back(HighReal(tk));
    }
    times = device_times;
  } else {
    throw DomainError("channel must be 'spin' or 'barrier', got '" + channel + "'");
  }

  emit_file(m, dir, "encode_scores.csv", detail::decoder_csv(device_times, device_scores, free_scores,
                                                              channel == "spin" ? cut_scores
                                                                                : std::vector<TailScore<HighReal>>{},
                                                              threshold));
  if (channel == "barrier") {
    std::vector<HighReal> spin_times(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i) spin_times[i] = (x_det - grid.at(grid.count - 1 - i)) / one.p0;
    std::vector<TailScore<HighReal>> empty(grid.count);
    emit_file(m, dir, "encode_cut_scores.csv", detail::decoder_csv(spin_times, empty, empty, cut_scores, threshold));
  }

  auto t_device = detail::first_separable(device_times, device_scores, threshold);
  auto t_free = detail::first_separable(times, free_scores, threshold);
  m.check("device_separates_sooner", t_device && t_free && *t_device < *t_free,
          "t_device=" + (t_device ? to_decimal(*t_device, 8) : "never") +
              " t_free=" + (t_free ? to_decimal(*t_free, 8) : "never"));

  // cut "1": first decision and the first change away from it
  std::vector<HighReal> cut_times(grid.count);
  for (std::size_t i = 0; i < grid.count; ++i) cut_times[i] = (x_det - grid.at(grid.count - 1 - i)) / one.p0;
  std::optional<std::size_t> first;
  std::optional<std::size_t> flip;
  for (std::size_t k = 0; k < cut_scores.size(); ++k) {
    Decision dk = decide(cut_scores[k], threshold);
    if (!first) {
      if (dk != Decision::undecided) first = k;
      continue;
    }
    if (dk != decide(cut_scores[*first], threshold)) {
      flip = k;
      break;
    }
  }
  const HighReal arrival = (x_det - x_cut) / one.p0;
  bool first_one = first && decide(cut_scores[*first], threshold) == Decision::one;
  m.check("cut_decodes_one_first", first_one,
          "first=" + std::string(first ? decision_name(decide(cut_scores[*first], threshold)) : "none") +
              " at t=" + (first ? to_decimal(cut_times[*first], 8) : "n/a"));
  bool late_flip = flip && cut_times[*flip] >= arrival;
  m.check("cut_flips_after_delayed_arrival", late_flip,
          "flip=" + (flip ? std::string(decision_name(decide(cut_scores[*flip], threshold))) + " at t=" +
                                to_decimal(cut_times[*flip], 8)
                          : std::string("none")) +
              " delayed_arrival=" + to_decimal(arrival, 8));
  m.note("decoder", "matched filter, white noise density " + c.get("noise"));
  m.note("likelihood_threshold", c.get("threshold"));
  m.note("device_normalization", channel == "spin" ? "1/C" : "1/T(p0)");
  m.note("cut_channel", "spin");
  return m;
}

inline RunManifest run_hartman(const ExperimentConfig& c) {
  using detail::fixed;
  RunManifest m;
  m.scenario = "hartman";
  const PrecisionContext ctx = make_context(15);
  m.digits = ctx.digits;
  HartmanOptions<double> opt;
  opt.p0 = c.real("p0");
  opt.sigma_per_d = c.real("sigma_per_d");
  opt.time_per_d = c.real("time_per_d");
  opt.validity = c.real("validity");
  opt.grid_points = static_cast<std::size_t>(c.integer("grid_points"));
  const double V = c.real("V");
  if (!(2 * V > opt.p0 * opt.p0)) throw DomainError("p0^2 >= 2V: not a tunnelling scan");
  std::vector<RectangularBarrier<double>> barriers;
  for (double d : c.list("widths")) barriers.push_back({V, d});
  auto rows = hartman_scan(barriers, opt, ctx);
  std::ostringstream os;
  os << "d,sigma,advancement,abs_T0,log10_abs_T0,approx_error,included,note\n" << std::setprecision(17);
  std::vector<double> ds, logs;
  bool all_in = true;
  bool all_adv = true;
  std::string adv;
  for (const auto& r : rows) {
    os << r.d << "," << r.sigma << "," << (r.included ? to_decimal(r.advancement, 17) : "") << ","
       << to_decimal(r.abs_T0, 17) << "," << r.log10_abs_T0 << "," << to_decimal(r.approx_error, 6) << ","
       << (r.included ? 1 : 0) << "," << r.note << "\n";
    if (!r.included) {
      all_in = false;
      continue;
    }
    ds.push_back(r.d);
    logs.push_back(r.log10_abs_T0 * std::log(10.0));
    double a = r.advancement / r.d;
    adv += (adv.empty() ? "" : ";") + fixed(a, 6);
    if (!(a >= 0.95 && a <= 1.05)) all_adv = false;
  }
  emit_file(m, c.output_dir, "hartman.csv", os.str());
  m.check("rows_included", all_in && !rows.empty(), "included=" + std::to_string(ds.size()) + "/" +
                                                         std::to_string(rows.size()));
  m.check("advancement_per_d", all_adv && !ds.empty(), "values=" + (adv.empty() ? "n/a" : adv));
  const double kappa0 = std::sqrt(2 * V - opt.p0 * opt.p0);
  if (ds.size() >= 2) {
    double slope = fit_slope(ds, logs);
    m.check("log_T0_slope", std::abs(slope / -kappa0 - 1) <= 0.02,
            "slope=" + fixed(slope, 8) + " expected=" + fixed(-kappa0, 8));
  } else {
    m.check("log_T0_slope", false, "fewer than two included rows");
  }
  return m;
}

/// Superoscillatory window, local frequency and Fourier support of one
/// weight set, plus the amplitude cost over n = 0..n_max.
inline RunManifest run_window(const ExperimentConfig& c) {
  using detail::fixed;
  RunManifest m;
  m.scenario = "window";
  const int n_max = static_cast<int>(c.integer("n_max"));
  const int n = static_cast<int>(c.integer("n"));
  if (n_max < n) throw DomainError("n_max must be at least n");
  auto s = detail::spin_setup(c, n_max);
  ScopedPrecision scope(s.ctx);
  m.digits = s.ctx.digits;
  const auto& dir = c.output_dir;
  const double sigma = c.real("sigma");
  const HighReal support = detail::support_half_width(sigma);
  auto report = window_scan(s.w, HighReal(-3 * support), HighReal(3 * support),
                            static_cast<int>(c.integer("samples")), s.ctx);
  emit_file(m, dir, "window.csv", detail::window_csv(report, s.ctx));
  emit_file(m, dir, "window_plot.csv", detail::window_plot_csv(report));
  {
    std::ostringstream os;
    write_csv(os, s.w, s.ctx.digits);
    emit_file(m, dir, "window_eta.csv", os.str());
  }
  std::vector<double> cost;
  {
    std::ostringstream os;
    os << "n,log10_absC\n" << std::setprecision(17);
    for (int k = 0; k <= n_max; ++k) {
      auto cfg = s.cfg;
      cfg.n = k;
      auto w = synthesize_eta(cfg, s.ctx);
      cost.push_back(log10_abs(HighReal(abs(factorize_eta(w).C))));
      os << k << "," << cost.back() << "\n";
    }
    emit_file(m, dir, "window_cost.csv", os.str());
  }
  bool monotone = true;
  for (std::size_t k = 1; k < cost.size(); ++k)
    if (cost[k] > cost[k - 1]) monotone = false;
  m.check("cost_non_increasing", monotone);
  const HighReal h = report.rows.size() > 1 ? HighReal((report.rows[1].p - report.rows[0].p) / 8) : HighReal(1e-4);
  HighReal lf = local_frequency(s.w, HighReal(0), h);
  HighReal target = -s.cfg.advance();
  bool lf_ok = s.cfg.n == 0 ? abs(lf) <= HighReal(1e-6) : abs(lf - target) <= HighReal(0.01) * abs(target);
  m.check("local_frequency_at_zero", lf_ok, "value=" + to_decimal(lf, 10));
  HighReal neg = detail::negative_index_power(s.w);
  m.check("non_negative_frequencies", neg < HighReal(1e-20), "negative_power=" + to_decimal(neg, 4));
  m.check("window_nonempty", !report.empty);
  m.check("window_covers_pulse", !report.empty && report.p_lo <= -support && report.p_hi >= support,
          "support=" + fixed(to_double(support), 6));
  detail::record_window(m, report, to_double(support));
  m.note("log10_abs_C", fixed(cost[static_cast<std::size_t>(n)], 10));
  return m;
}

inline RunManifest run_scenario_body(const ExperimentConfig& c) {
  switch (c.scenario) {
    case Scenario::fig3: return run_fig3(c);
    case Scenario::fig4: return run_fig4(c);
    case Scenario::cut_pulse: return run_cut(c);
    case Scenario::encode_demo: return run_encode(c);
    case Scenario::hartman: return run_hartman(c);
    case Scenario::window_scan: return run_window(c);
  }
  throw DomainError("unknown scenario");
}

/// Runs one scenario into c.output_dir: CSVs, the plot script and
/// manifest.txt.
inline RunManifest run_scenario(const ExperimentConfig& c) {
  auto start = std::chrono::steady_clock::now();
  RunManifest m = run_scenario_body(c);
  m.parameters = c.parameters;
  m.parameters["paper_scale"] = c.paper_scale ? "1" : "0";
  std::string script = emit_plot_script(m, c.output_dir);
  emit_file(m, c.output_dir, m.scenario + ".gp", script);
  m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ofstream out(c.output_dir / "manifest.txt");
  write_manifest(out, m);
  if (!out) throw DomainError("cannot write manifest in " + c.output_dir.string());
  return m;
}

}  // namespace frontload
