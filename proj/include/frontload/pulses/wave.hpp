#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "frontload/error.hpp"
#include "frontload/numerics/precision.hpp"

namespace frontload {

/// Uniform grid start + i * step, i = 0..count-1.
template <class Real>
struct Grid {
  Real start = 0;
  Real step = 1;
  std::size_t count = 0;

  static Grid spanning(const Real& lo, const Real& hi, std::size_t count) {
    if (count < 2) throw DomainError("a grid needs at least two points");
    if (!(hi > lo)) throw DomainError("grid upper end must exceed lower end");
    return Grid{lo, (hi - lo) / Real(count - 1), count};
  }

  [[nodiscard]] Real at(std::size_t i) const { return start + step * Real(i); }
  [[nodiscard]] Real front() const { return start; }
  [[nodiscard]] Real back() const { return at(count - 1); }
  [[nodiscard]] bool contains(const Real& x) const { return x >= front() && x <= back(); }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.count == b.count && a.start == b.start && a.step == b.step;
  }
};

/// Which operation produced a sampled wave, plus the carrier momentum needed
/// to recover X = x - p0 t.
template <class Real>
struct WaveMeta {
  std::string producer;
  Real p0 = 0;
};

template <class Real>
struct SampledWave {
  Real t = 0;
  Grid<Real> grid;
  std::vector<Complex<Real>> values;
  WaveMeta<Real> meta;

  [[nodiscard]] Real x(std::size_t i) const { return grid.at(i); }
  /// Co-moving abscissa X = x - p0 t.
  [[nodiscard]] Real X(std::size_t i) const { return grid.at(i) - meta.p0 * t; }
  [[nodiscard]] std::size_t size() const { return values.size(); }
};

template <class Real>
struct Peak {
  Real position;
  Real height;
};

template <class Real>
Real squared_norm(const SampledWave<Real>& w) {
  using std::norm;
  std::vector<Real> terms(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) terms[i] = norm(w.values[i]);
  return pairwise_sum(terms.data(), terms.size()) * w.grid.step;
}

/// Squared norm restricted to lo <= x <= hi.
template <class Real>
Real squared_norm_between(const SampledWave<Real>& w, const Real& lo, const Real& hi) {
  using std::norm;
  std::vector<Real> terms;
  for (std::size_t i = 0; i < w.size(); ++i) {
    Real x = w.x(i);
    if (x >= lo && x <= hi) terms.push_back(norm(w.values[i]));
  }
  return pairwise_sum(terms.data(), terms.size()) * w.grid.step;
}

/// Copy of the samples with lo <= x <= hi.
template <class Real>
SampledWave<Real> restrict_to(const SampledWave<Real>& w, const Real& lo, const Real& hi) {
  std::size_t first = w.size();
  std::size_t last = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    Real x = w.x(i);
    if (x >= lo && x <= hi) {
      first = std::min(first, i);
      last = std::max(last, i);
    }
  }
  if (first > last || last - first < 1) throw GridError("restriction keeps fewer than two samples");
  SampledWave<Real> out;
  out.t = w.t;
  out.meta = w.meta;
  out.grid = Grid<Real>{w.grid.at(first), w.grid.step, last - first + 1};
  out.values.assign(w.values.begin() + static_cast<std::ptrdiff_t>(first),
                    w.values.begin() + static_cast<std::ptrdiff_t>(last) + 1);
  return out;
}

/// Discrete inner product sum conj(a) b dx.
template <class Real>
Complex<Real> inner_product(const SampledWave<Real>& a, const SampledWave<Real>& b) {
  if (!(a.grid == b.grid) || a.size() != b.size()) throw DomainError("inner product needs identical grids");
  std::vector<Complex<Real>> terms(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) terms[i] = std::conj(a.values[i]) * b.values[i];
  return pairwise_sum(terms.data(), terms.size()) * a.grid.step;
}

/// |<a,b>|^2 / (<a,a><b,b>), in [0, 1].
template <class Real>
Real fidelity(const SampledWave<Real>& a, const SampledWave<Real>& b) {
  using std::norm;
  if (!(a.grid == b.grid) || a.t != b.t) throw DomainError("fidelity needs identical grids and times");
  Real aa = squared_norm(a);
  Real bb = squared_norm(b);
  if (aa == 0 || bb == 0) throw DomainError("fidelity of a zero-norm wave is undefined");
  Real f = norm(inner_product(a, b)) / (aa * bb);
  return std::min<Real>(f, Real(1));
}

/// Local maxima of |value|^2 exceeding `threshold` times the global maximum,
/// refined by a parabola through the three neighbouring samples.
template <class Real>
std::vector<Peak<Real>> find_peaks(const SampledWave<Real>& w, double threshold = 0.05) {
  using std::norm;
  std::vector<Peak<Real>> peaks;
  if (w.size() < 3) throw DomainError("peak search needs at least three samples");
  std::vector<Real> density(w.size());
  Real top = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    density[i] = norm(w.values[i]);
    if (density[i] > top) top = density[i];
  }
  if (top == 0) return peaks;
  const Real floor = top * Real(threshold);
  for (std::size_t i = 1; i + 1 < w.size(); ++i) {
    const Real& left = density[i - 1];
    const Real& mid = density[i];
    const Real& right = density[i + 1];
    if (!(mid > left && mid >= right && mid > floor)) continue;
    Real curvature = left - 2 * mid + right;
    Real offset = curvature == 0 ? Real(0) : Real((left - right) / (2 * curvature));
    Real height = mid - (left - right) * offset / 4;
    peaks.push_back({w.x(i) + offset * w.grid.step, height});
  }
  return peaks;
}

/// CSV with columns x, re, im, abs2 (or `axis` instead of x).
template <class Real>
void write_csv(std::ostream& os, const Grid<Real>& grid, const std::vector<Complex<Real>>& values, int digits,
               const std::string& axis = "x") {
  using std::norm;
  os << axis << ",re,im,abs2\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    os << to_decimal(grid.at(i), digits) << ',' << to_decimal(values[i].real(), digits) << ','
       << to_decimal(values[i].imag(), digits) << ',' << to_decimal(Real(norm(values[i])), digits) << '\n';
  }
}

template <class Real>
void write_csv(std::ostream& os, const SampledWave<Real>& w, int digits) {
  write_csv(os, w.grid, w.values, digits, "x");
}

/// Reads the x, re, im, abs2 schema back. abs2 is redundant and only checked
/// for presence.
template <class Real>
SampledWave<Real> read_wave_csv(std::istream& is, const Real& t, const std::string& axis = "x") {
  std::string line;
  if (!std::getline(is, line) || line != axis + ",re,im,abs2") throw DomainError("unexpected CSV header: " + line);
  std::vector<Real> xs;
  SampledWave<Real> w;
  w.t = t;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != 4) throw DomainError("CSV row must have 4 columns: " + line);
    xs.push_back(parse_real<Real>(cells[0]));
    w.values.emplace_back(parse_real<Real>(cells[1]), parse_real<Real>(cells[2]));
  }
  if (xs.size() < 2) throw DomainError("CSV holds fewer than two samples");
  w.grid = Grid<Real>{xs.front(), (xs.back() - xs.front()) / Real(xs.size() - 1), xs.size()};
  return w;
}

}  // namespace frontload
