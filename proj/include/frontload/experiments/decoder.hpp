#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "frontload/error.hpp"
#include "frontload/numerics/precision.hpp"

namespace frontload {

enum class Decision { undecided, zero, one, reject };

inline const char* decision_name(Decision d) {
  switch (d) {
    case Decision::undecided: return "?";
    case Decision::zero: return "0";
    case Decision::one: return "1";
    case Decision::reject: return "reject";
  }
  return "?";
}

/// Log-likelihoods of the matched-filter decoder for white noise of density
/// `noise`, over the samples a receiver has seen so far. All three are
/// squared distances divided by 2 * noise.
template <class Real>
struct TailScore {
  Real separation = 0;   // |s1 - s0|^2
  Real misfit_zero = 0;  // |y - s0|^2
  Real misfit_one = 0;   // |y - s1|^2

  [[nodiscard]] Real log_ratio() const { return misfit_zero - misfit_one; }
};

/// Scores of every tail [i, n) of the sampled templates s0, s1 and the
/// observation y, all on one grid of spacing dx.
template <class Real>
std::vector<TailScore<Real>> tail_scores(const std::vector<Complex<Real>>& y, const std::vector<Complex<Real>>& s0,
                                         const std::vector<Complex<Real>>& s1, const Real& dx, double noise) {
  using std::norm;
  if (y.size() != s0.size() || y.size() != s1.size()) throw DomainError("decoder inputs differ in length");
  if (!(noise > 0)) throw DomainError("noise density must be positive");
  const Real scale = dx / (2 * Real(noise));
  std::vector<TailScore<Real>> out(y.size() + 1);
  for (std::size_t k = y.size(); k-- > 0;) {
    out[k].separation = out[k + 1].separation + norm(s1[k] - s0[k]) * scale;
    out[k].misfit_zero = out[k + 1].misfit_zero + norm(y[k] - s0[k]) * scale;
    out[k].misfit_one = out[k + 1].misfit_one + norm(y[k] - s1[k]) * scale;
  }
  out.pop_back();
  return out;
}

/// "1" or "0" once the log-likelihood ratio clears log(threshold) and the
/// winning template fits; "reject" when neither template fits.
template <class Real>
Decision decide(const TailScore<Real>& s, double threshold) {
  using std::log;
  if (!(threshold > 1)) throw DomainError("likelihood threshold must exceed 1");
  const Real level = Real(std::log(threshold));
  if (s.misfit_zero > level && s.misfit_one > level) return Decision::reject;
  Real r = s.log_ratio();
  if (r >= level) return Decision::one;
  if (r <= -level) return Decision::zero;
  return Decision::undecided;
}

/// True once the expected log-likelihood ratio between the templates clears
/// log(threshold).
template <class Real>
bool separable(const TailScore<Real>& s, double threshold) {
  return s.separation >= Real(std::log(threshold));
}

}  // namespace frontload
