#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "frontload/error.hpp"
#include "frontload/numerics/precision.hpp"

namespace frontload {

/// Distinct real abscissae plus the point the weights extrapolate to.
template <class Real>
class NodeSet {
public:
  NodeSet(std::vector<Real> nodes, Real target) : nodes_(std::move(nodes)), target_(std::move(target)) {
    if (nodes_.empty()) throw DomainError("node set must contain at least one node");
    std::vector<Real> sorted = nodes_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw DomainError("node set contains duplicate nodes");
    }
  }

  /// Nodes {0, step, 2 step, ..., K step}.
  static NodeSet equispaced(int K, const Real& step, const Real& target) {
    if (K < 0) throw DomainError("node count K must be non-negative");
    if (K > 0 && !(step > 0)) throw DomainError("node spacing must be positive");
    std::vector<Real> nodes;
    nodes.reserve(static_cast<std::size_t>(K) + 1);
    for (int m = 0; m <= K; ++m) nodes.push_back(Real(m) * step);
    return NodeSet(std::move(nodes), target);
  }

  [[nodiscard]] const std::vector<Real>& nodes() const { return nodes_; }
  [[nodiscard]] const Real& target() const { return target_; }
  [[nodiscard]] std::size_t size() const { return nodes_.size(); }
  [[nodiscard]] int degree() const { return static_cast<int>(nodes_.size()) - 1; }

private:
  std::vector<Real> nodes_;
  Real target_;
};

template <class Real>
struct WeightVector {
  std::vector<Complex<Real>> weights;

  [[nodiscard]] std::size_t size() const { return weights.size(); }
  const Complex<Real>& operator[](std::size_t i) const { return weights[i]; }
};

namespace detail {

// log10 max_m |l_m(target)|, accumulated as sums of logs so no intermediate overflows.
inline double log10_max_lagrange(const std::vector<double>& nodes, double target) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < nodes.size(); ++m) {
    double acc = 0.0;
    bool zero = false;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (k == m) continue;
      double num = std::abs(target - nodes[k]);
      if (num == 0.0) {
        zero = true;
        break;
      }
      acc += std::log10(num) - std::log10(std::abs(nodes[m] - nodes[k]));
    }
    if (!zero) best = std::max(best, acc);
  }
  return best;
}

inline int digits_from_log10(double log10_max) {
  constexpr int kGuard = 40;
  constexpr int kFloor = 55;
  if (!std::isfinite(log10_max) || log10_max < 0) return kFloor;
  int d = static_cast<int>(std::ceil(1.2 * log10_max)) + kGuard;
  return std::max(d, kFloor);
}

}  // namespace detail

/// Decimal digits needed to synthesize extrapolation weights on the
/// equispaced nodes {m * node_span / K} for target `target_offset`.
/// Never less than 55 (15 significant digits plus the 40-digit guard).
inline int required_digits(int K, double node_span, double target_offset) {
  if (K < 0) throw DomainError("K must be non-negative");
  if (K == 0) return detail::digits_from_log10(0.0);
  std::vector<double> nodes(static_cast<std::size_t>(K) + 1);
  for (int m = 0; m <= K; ++m) nodes[static_cast<std::size_t>(m)] = node_span * m / K;
  return detail::digits_from_log10(detail::log10_max_lagrange(nodes, target_offset));
}

template <class Real>
int required_digits(const NodeSet<Real>& ns) {
  std::vector<double> nodes;
  nodes.reserve(ns.size());
  for (const auto& x : ns.nodes()) nodes.push_back(to_double(x));
  return detail::digits_from_log10(detail::log10_max_lagrange(nodes, to_double(ns.target())));
}

/// Context for synthesizing weights on `ns`: required_digits plus a 40-digit
/// working guard, which keeps the residuals below 10^(-digits/3) while
/// log10 max|l_m| stays under about 330.
template <class Real>
PrecisionContext auto_context(const NodeSet<Real>& ns) {
  return make_context(required_digits(ns), 40);
}

inline PrecisionContext auto_context(int K, double node_span, double target_offset) {
  return make_context(required_digits(K, node_span, target_offset), 40);
}

/// |sum_m x_m^j w_m - target^j| / max(1, |target|^j) for j = 0..jmax.
template <class Real>
std::vector<Real> moment_residuals(const WeightVector<Real>& w, const NodeSet<Real>& ns, int jmax,
                                   const PrecisionContext& ctx) {
  using std::abs;
  if (w.size() != ns.size()) throw DomainError("weight vector and node set differ in length");
  if (jmax < 0 || jmax > ns.degree()) throw DomainError("jmax must lie in [0, node count - 1]");
  ScopedPrecision scope(ctx);

  const std::size_t count = ns.size();
  std::vector<Real> power(count, Real(1));
  Real target_power = 1;
  std::vector<Real> out;
  out.reserve(static_cast<std::size_t>(jmax) + 1);
  std::vector<Complex<Real>> terms(count);
  for (int j = 0; j <= jmax; ++j) {
    for (std::size_t m = 0; m < count; ++m) terms[m] = w[m] * power[m];
    Complex<Real> moment = pairwise_sum(terms.data(), count);
    Real scale = std::max<Real>(Real(1), abs(target_power));
    out.push_back(Real(abs(moment - Complex<Real>(target_power)) / scale));
    for (std::size_t m = 0; m < count; ++m) power[m] *= ns.nodes()[m];
    target_power *= ns.target();
  }
  return out;
}

namespace detail {

template <class Real>
void check_residuals(const WeightVector<Real>& w, const NodeSet<Real>& ns, const PrecisionContext& ctx) {
  auto residuals = moment_residuals(w, ns, ns.degree(), ctx);
  using std::pow;
  ScopedPrecision scope(ctx);
  const Real tolerance = pow(Real(10), -Real(ctx.digits) / 3);
  for (std::size_t j = 0; j < residuals.size(); ++j) {
    if (!(residuals[j] <= tolerance)) {
      throw PrecisionError("moment residual j=" + std::to_string(j) + " is " + to_decimal(residuals[j], 3) +
                           "; raise the working precision (required_digits = " +
                           std::to_string(required_digits(ns)) + ")");
    }
  }
}

}  // namespace detail

/// Extrapolation weights w_m = prod_{k != m} (target - x_k) / (x_m - x_k):
/// the coordinates of p |-> p(target) on polynomials of degree K.
template <class Real>
WeightVector<Real> lagrange_weights(const NodeSet<Real>& ns, const PrecisionContext& ctx) {
  WeightVector<Real> out;
  {
    ScopedPrecision scope(ctx);
    const auto& x = ns.nodes();
    const std::size_t count = x.size();
    out.weights.reserve(count);
    for (std::size_t m = 0; m < count; ++m) {
      Real num = 1;
      Real den = 1;
      for (std::size_t k = 0; k < count; ++k) {
        if (k == m) continue;
        num *= ns.target() - x[k];
        den *= x[m] - x[k];
      }
      out.weights.emplace_back(num / den, Real(0));
    }
  }
  detail::check_residuals(out, ns, ctx);
  return out;
}

/// Dense pivoted elimination of the moment system sum_m x_m^j w_m = target^j.
/// The abscissae are mapped affinely onto [-1, 1] first; the solution of the
/// moment system is invariant under that map. Intended for K <= 30.
template <class Real>
WeightVector<Real> vandermonde_solve(const NodeSet<Real>& ns, const PrecisionContext& ctx) {
  using std::abs;
  ScopedPrecision scope(ctx);
  const auto& x = ns.nodes();
  const std::size_t n = x.size();
  auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  Real center = (*lo_it + *hi_it) / 2;
  Real half = (*hi_it - *lo_it) / 2;
  if (half == 0) half = 1;

  std::vector<Real> u(n);
  for (std::size_t m = 0; m < n; ++m) u[m] = (x[m] - center) / half;
  Real s = (ns.target() - center) / half;

  // Row j holds u_m^j; augmented column holds s^j.
  std::vector<std::vector<Real>> a(n, std::vector<Real>(n + 1));
  for (std::size_t m = 0; m < n; ++m) a[0][m] = 1;
  a[0][n] = 1;
  for (std::size_t j = 1; j < n; ++j) {
    for (std::size_t m = 0; m < n; ++m) a[j][m] = a[j - 1][m] * u[m];
    a[j][n] = a[j - 1][n] * s;
  }

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (abs(a[r][col]) > abs(a[pivot][col])) pivot = r;
    }
    if (a[pivot][col] == 0) throw DomainError("singular moment matrix (duplicate nodes)");
    std::swap(a[col], a[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      Real factor = a[r][col] / a[col][col];
      if (factor == 0) continue;
      for (std::size_t c = col; c <= n; ++c) a[r][c] -= factor * a[col][c];
    }
  }

  std::vector<Real> sol(n);
  for (std::size_t i = n; i-- > 0;) {
    Real acc = a[i][n];
    for (std::size_t c = i + 1; c < n; ++c) acc -= a[i][c] * sol[c];
    sol[i] = acc / a[i][i];
  }

  WeightVector<Real> out;
  out.weights.reserve(n);
  for (auto& v : sol) out.weights.emplace_back(v, Real(0));
  return out;
}

}  // namespace frontload
