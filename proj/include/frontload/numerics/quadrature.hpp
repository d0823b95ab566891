#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "frontload/error.hpp"
#include "frontload/numerics/precision.hpp"

namespace frontload {

/// Gauss-Legendre nodes and weights on [-1, 1].
template <class Real>
struct GaussRule {
  std::vector<Real> nodes;
  std::vector<Real> weights;
};

namespace detail {

// Legendre P_n and P_n' by the three-term recurrence.
template <class Real>
std::pair<Real, Real> legendre_with_derivative(int n, const Real& x) {
  Real p0 = 1;
  Real p1 = x;
  for (int k = 2; k <= n; ++k) {
    Real p2 = (Real(2 * k - 1) * x * p1 - Real(k - 1) * p0) / Real(k);
    p0 = std::move(p1);
    p1 = std::move(p2);
  }
  Real dp = Real(n) * (x * p1 - p0) / (x * x - 1);
  return {p1, dp};
}

template <class Real>
GaussRule<Real> compute_gauss_rule(int order, int digits) {
  using std::abs;
  using std::pow;
  GaussRule<Real> rule;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  const Real tolerance = pow(Real(10), Real(-digits));
  const double pi_d = 3.14159265358979323846;
  for (int i = 0; i < (order + 1) / 2; ++i) {
    Real x = std::cos(pi_d * (i + 0.75) / (order + 0.5));
    for (int iter = 0; iter < 200; ++iter) {
      auto [p, dp] = legendre_with_derivative(order, x);
      Real step = p / dp;
      x -= step;
      if (abs(step) <= tolerance) break;
    }
    auto [p, dp] = legendre_with_derivative(order, x);
    (void)p;
    Real w = Real(2) / ((1 - x * x) * dp * dp);
    auto lo = static_cast<std::size_t>(i);
    auto hi = static_cast<std::size_t>(order - 1 - i);
    rule.nodes[lo] = -x;
    rule.nodes[hi] = x;
    rule.weights[lo] = w;
    rule.weights[hi] = w;
  }
  if (order % 2 == 1) rule.nodes[static_cast<std::size_t>(order / 2)] = 0;
  return rule;
}

}  // namespace detail

/// Cached Gauss-Legendre rule at the precision of `ctx`.
template <class Real>
const GaussRule<Real>& gauss_rule(int order, const PrecisionContext& ctx) {
  using std::pow;
  if (order < 1) throw DomainError("quadrature order must be positive");
  static std::mutex mutex;
  static std::map<std::pair<int, int>, GaussRule<Real>> cache;
  const int digits = is_high_precision_v<Real> ? ctx.working_digits() : 16;
  std::lock_guard lock(mutex);
  auto key = std::make_pair(order, digits);
  auto it = cache.find(key);
  if (it == cache.end()) {
    ScopedPrecision scope(ctx);
    it = cache.emplace(key, detail::compute_gauss_rule<Real>(order, digits)).first;
  }
  return it->second;
}

/// Flattened composite rule: panel nodes and weights over [a, b].
template <class Real>
struct CompositeRule {
  std::vector<Real> nodes;
  std::vector<Real> weights;
  int order = 0;
  int panels = 0;
};

template <class Real>
CompositeRule<Real> composite_rule(const Real& a, const Real& b, int panels, int order,
                                   const PrecisionContext& ctx) {
  if (panels < 1) throw DomainError("panel count must be positive");
  const auto& rule = gauss_rule<Real>(order, ctx);
  ScopedPrecision scope(ctx);
  CompositeRule<Real> out;
  out.order = order;
  out.panels = panels;
  out.nodes.reserve(static_cast<std::size_t>(panels * order));
  out.weights.reserve(static_cast<std::size_t>(panels * order));
  const Real width = (b - a) / panels;
  for (int k = 0; k < panels; ++k) {
    Real mid = a + width * (Real(k) + Real(0.5));
    Real half = width / 2;
    for (int i = 0; i < order; ++i) {
      out.nodes.push_back(mid + half * rule.nodes[static_cast<std::size_t>(i)]);
      out.weights.push_back(half * rule.weights[static_cast<std::size_t>(i)]);
    }
  }
  return out;
}

/// Composite rule over consecutive intervals, each with its own panel width.
/// `breaks` holds the interval ends; `widths[i]` is the target panel width on
/// [breaks[i], breaks[i+1]].
template <class Real>
CompositeRule<Real> graded_rule(const std::vector<Real>& breaks, const std::vector<Real>& widths, int order,
                                const PrecisionContext& ctx) {
  using std::ceil;
  if (breaks.size() < 2 || widths.size() + 1 != breaks.size()) {
    throw DomainError("graded rule needs n+1 breaks and n widths");
  }
  CompositeRule<Real> out;
  out.order = order;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const Real span = breaks[i + 1] - breaks[i];
    if (!(span > 0)) continue;
    int panels = std::max(1, static_cast<int>(std::ceil(to_double(span / widths[i]))));
    auto part = composite_rule<Real>(breaks[i], breaks[i + 1], panels, order, ctx);
    out.nodes.insert(out.nodes.end(), part.nodes.begin(), part.nodes.end());
    out.weights.insert(out.weights.end(), part.weights.begin(), part.weights.end());
    out.panels += panels;
  }
  return out;
}

template <class Real>
struct QuadratureResult {
  Complex<Real> value;
  int order = 0;
  int panels = 0;
};

/// Composite Gauss-Legendre estimate of the integral of f over [a, b].
/// Panel sums are reduced pairwise in panel order.
template <class Real, class F>
QuadratureResult<Real> integrate(F&& f, const Real& a, const Real& b, int panels, const PrecisionContext& ctx,
                                 int order = 16) {
  auto rule = composite_rule<Real>(a, b, panels, order, ctx);
  ScopedPrecision scope(ctx);
  std::vector<Complex<Real>> panel_sums(static_cast<std::size_t>(panels));
  std::vector<Complex<Real>> terms(static_cast<std::size_t>(order));
  for (int k = 0; k < panels; ++k) {
    for (int i = 0; i < order; ++i) {
      auto idx = static_cast<std::size_t>(k * order + i);
      Complex<Real> v = f(rule.nodes[idx]);
      if (!is_finite(v)) throw DomainError("non-finite integrand sample at x = " + to_decimal(rule.nodes[idx], 8));
      terms[static_cast<std::size_t>(i)] = v * rule.weights[idx];
    }
    panel_sums[static_cast<std::size_t>(k)] = pairwise_sum(terms.data(), terms.size());
  }
  return {pairwise_sum(panel_sums.data(), panel_sums.size()), order, panels};
}

}  // namespace frontload
