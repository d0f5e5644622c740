// SPDX-License-Identifier: Apache-2.0
//
// Brute-force reference computations for the test suites. Written against
// plain vectors only, so that no library code sits on both sides of a
// comparison.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;

inline double sqdist(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

/// E||X - EX||^2 by two passes.
inline double variance(const std::vector<Vec>& x, const Vec& w) {
  Vec mean(x[0].size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += w[i] * x[i][j];
  double v = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) v += w[i] * sqdist(x[i], mean);
  return v;
}

/// Sum_m p_m Var[X | m] as the pairwise form 1/(2 p_m) Sum w_i w_j ||x_i - x_j||^2.
inline double unexplained(const std::vector<Vec>& x, const Vec& w, const std::vector<std::size_t>& s) {
  std::map<std::size_t, double> mass;
  for (std::size_t i = 0; i < x.size(); ++i) mass[s[i]] += w[i];
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j)
      if (s[i] == s[j]) total += w[i] * w[j] * sqdist(x[i], x[j]) / (2.0 * mass[s[i]]);
  return total;
}

/// Exact loss of the vanilla d-candidate game under the receiver that is
/// uniform over the positions sharing the target's message, by recursion
/// over every target position and distractor tuple.
inline double discrimination_loss(const Vec& w, const std::vector<std::size_t>& s, unsigned d) {
  const std::size_t n = w.size();
  double loss = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    // Distractors are exchangeable, so the target position does not matter;
    // each position still has probability 1/d and contributes equally.
    std::function<void(unsigned, double, unsigned)> rec = [&](unsigned left, double prob, unsigned sharing) {
      if (left == 0) {
        loss += w[t] * prob * std::log(static_cast<double>(sharing + 1));
        return;
      }
      for (std::size_t x = 0; x < n; ++x) rec(left - 1, prob * w[x], sharing + (s[x] == s[t] ? 1u : 0u));
    };
    rec(d - 1, 1.0, 0);
  }
  return loss;
}

inline double choose(unsigned n, unsigned k) {
  double c = 1.0;
  for (unsigned i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

/// p * E log(1 + Binomial(d - 1, p)).
inline double binomial_f(double p, unsigned d) {
  double e = 0.0;
  for (unsigned k = 0; k + 1 <= d; ++k)
    e += choose(d - 1, k) * std::pow(p, k) * std::pow(1.0 - p, d - 1 - k) * std::log(1.0 + k);
  return p * e;
}

inline double shannon(const Vec& p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0) h -= v * std::log(v);
  return h;
}

}  // namespace oracle
