//
// Copyright 2026 The dpfl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "dpfl/accountant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "dpfl/errors.hpp"

namespace dpfl::privacy {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kMaxSeriesTerms = 100000;

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// log(exp(a) - exp(b)) for a >= b.
double log_sub(double a, double b) {
  if (b == kNegInf) return a;
  if (a < b) throw NumericalError("rdp series: negative intermediate in log_sub");
  if (a == b) return kNegInf;
  return a + std::log(-std::expm1(b - a));
}

// log(erfc(x)) without underflow for large positive x.
double log_erfc(double x) {
  if (x < 25.0) return std::log(std::erfc(x));
  const double x2 = x * x;
  const double inv = 1.0 / x2;
  return -x2 - std::log(x) - 0.5 * std::log(std::numbers::pi) +
         std::log1p(-0.5 * inv + 0.75 * inv * inv - 1.875 * inv * inv * inv);
}

// log(exp(c) - 1) for c > 0.
double log_expm1(double c) { return c > 40.0 ? c + std::log1p(-std::exp(-c)) : std::log(std::expm1(c)); }

bool is_integer(double a) { return std::floor(a) == a; }

// log A for integer alpha, where A = E_{z~N(0,s^2)}[((1-q) + q exp((2z-1)/(2s^2)))^alpha]
// = sum_k C(a,k) q^k (1-q)^(a-k) exp((k^2-k)/(2s^2)). Since the binomial weights
// sum to one, A - 1 = sum_{k>=2} C(a,k) q^k (1-q)^(a-k) expm1((k^2-k)/(2s^2)),
// a sum of positive terms that keeps full relative precision for small q.
double log_a_integer(double q, double sigma, int alpha) {
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  const double two_s2 = 2.0 * sigma * sigma;
  double log_binom = 0.0;  // log C(alpha, k), built incrementally
  double log_a_minus_1 = kNegInf;
  for (int k = 1; k <= alpha; ++k) {
    log_binom += std::log(static_cast<double>(alpha - k + 1)) - std::log(static_cast<double>(k));
    if (k < 2) continue;
    const double kk = static_cast<double>(k);
    const double term = log_binom + kk * log_q + static_cast<double>(alpha - k) * log_1mq +
                        log_expm1((kk * kk - kk) / two_s2);
    log_a_minus_1 = log_add(log_a_minus_1, term);
  }
  if (log_a_minus_1 == kNegInf) return 0.0;
  return log_a_minus_1 > 0.0 ? log_a_minus_1 + std::log1p(std::exp(-log_a_minus_1))
                             : std::log1p(std::exp(log_a_minus_1));
}

// log A for fractional alpha via the two-sided series in the binomial
// coefficients of a real exponent, split at z0 where the two Gaussians' mixture
// ratio crosses one.
double log_a_fractional(double q, double sigma, double alpha) {
  double log_a0 = kNegInf;
  double log_a1 = kNegInf;
  const double s2 = sigma * sigma;
  const double z0 = s2 * std::log(1.0 / q - 1.0) + 0.5;
  const double log_q = std::log(q);
  const double log_1mq = std::log1p(-q);
  const double sqrt2_sigma = std::sqrt(2.0) * sigma;
  double log_abs_coef = 0.0;  // log |C(alpha, i)|
  bool coef_positive = true;
  for (int i = 0; i < kMaxSeriesTerms; ++i) {
    if (i > 0) {
      const double factor = (alpha - (i - 1)) / static_cast<double>(i);
      if (factor == 0.0) break;
      log_abs_coef += std::log(std::fabs(factor));
      if (factor < 0.0) coef_positive = !coef_positive;
    }
    const double di = static_cast<double>(i);
    const double j = alpha - di;
    const double log_t0 = log_abs_coef + di * log_q + j * log_1mq;
    const double log_t1 = log_abs_coef + j * log_q + di * log_1mq;
    const double log_e0 = std::log(0.5) + log_erfc((di - z0) / sqrt2_sigma);
    const double log_e1 = std::log(0.5) + log_erfc((z0 - j) / sqrt2_sigma);
    const double log_s0 = log_t0 + (di * di - di) / (2.0 * s2) + log_e0;
    const double log_s1 = log_t1 + (j * j - j) / (2.0 * s2) + log_e1;
    if (coef_positive) {
      log_a0 = log_add(log_a0, log_s0);
      log_a1 = log_add(log_a1, log_s1);
    } else {
      log_a0 = log_sub(log_a0, log_s0);
      log_a1 = log_sub(log_a1, log_s1);
    }
    if (std::max(log_s0, log_s1) < -30.0) return log_add(log_a0, log_a1);
  }
  throw NumericalError("rdp series did not converge for alpha=" + std::to_string(alpha));
}

void check_orders(std::span<const double> orders) {
  if (orders.empty()) throw std::invalid_argument("order grid is empty");
  for (double a : orders) {
    if (!(a > 1.0)) throw std::invalid_argument("RDP orders must be > 1");
  }
}

double conversion_term(double alpha, double delta, Conversion conversion) {
  switch (conversion) {
    case Conversion::kClassic:
      return std::log(1.0 / delta) / (alpha - 1.0);
    case Conversion::kTight:
      return std::log((alpha - 1.0) / alpha) - (std::log(delta) + std::log(alpha)) / (alpha - 1.0);
  }
  return 0.0;
}

}  // namespace

void MechanismParams::validate() const {
  if (!(sampling_rate > 0.0 && sampling_rate <= 1.0)) {
    throw std::invalid_argument("sampling rate q must lie in (0, 1]");
  }
  if (!(noise_multiplier > 0.0) || !std::isfinite(noise_multiplier)) {
    throw std::invalid_argument("noise multiplier sigma must be finite and > 0");
  }
}

void PrivacyBudget::validate() const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("privacy budget epsilon must be > 0");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
}

std::string_view to_string(Conversion c) { return c == Conversion::kClassic ? "classic" : "tight"; }

Conversion conversion_from_string(std::string_view s) {
  if (s == "classic") return Conversion::kClassic;
  if (s == "tight") return Conversion::kTight;
  throw std::invalid_argument("unknown conversion '" + std::string(s) + "'");
}

const std::vector<double>& default_orders() {
  static const std::vector<double> orders = [] {
    std::vector<double> o = {1.25, 1.5, 1.75, 2.0, 2.5};
    for (int a = 3; a <= 64; ++a) o.push_back(a);
    o.push_back(128.0);
    o.push_back(256.0);
    return o;
  }();
  return orders;
}

double rdp_single_step(const MechanismParams& params, double alpha) {
  params.validate();
  if (!(alpha > 1.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("RDP order alpha must be finite and > 1");
  }
  const double q = params.sampling_rate;
  const double sigma = params.noise_multiplier;
  double rdp;
  if (q == 1.0) {
    rdp = alpha / (2.0 * sigma * sigma);
  } else {
    const double log_a = is_integer(alpha)
                             ? log_a_integer(q, sigma, static_cast<int>(alpha))
                             : log_a_fractional(q, sigma, alpha);
    rdp = log_a / (alpha - 1.0);
  }
  if (!std::isfinite(rdp)) {
    throw NumericalError("RDP overflow at alpha=" + std::to_string(alpha) +
                         " q=" + std::to_string(q) + " sigma=" + std::to_string(sigma));
  }
  // log A >= 0 mathematically; a tiny negative value is rounding only.
  return std::max(rdp, 0.0);
}

RdpCurve rdp_curve(const MechanismParams& params, std::span<const double> orders) {
  check_orders(orders);
  RdpCurve curve;
  curve.orders.assign(orders.begin(), orders.end());
  curve.values.reserve(orders.size());
  for (double a : orders) curve.values.push_back(rdp_single_step(params, a));
  return curve;
}

AccountantState::AccountantState(MechanismParams params, std::vector<double> orders)
    : params_(params), single_(rdp_curve(params, orders)) {}

RdpCurve AccountantState::accumulated() const {
  RdpCurve out = single_;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = accumulated_value(i, steps_);
  return out;
}

AccountantState compose(const AccountantState& state, std::uint64_t additional_steps) {
  AccountantState out = state;
  out.steps_ += additional_steps;
  return out;
}

EpsilonResult epsilon_from_curve(const RdpCurve& curve, double delta, Conversion conversion) {
  if (curve.orders.empty()) throw std::invalid_argument("epsilon_from_curve: empty order grid");
  if (curve.orders.size() != curve.values.size()) {
    throw std::invalid_argument("epsilon_from_curve: orders/values length mismatch");
  }
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  EpsilonResult best{std::numeric_limits<double>::infinity(), curve.orders.front(), false};
  for (std::size_t i = 0; i < curve.orders.size(); ++i) {
    const double eps = curve.values[i] + conversion_term(curve.orders[i], delta, conversion);
    if (eps < best.epsilon) {
      best.epsilon = eps;
      best.best_order = curve.orders[i];
    }
  }
  const auto [lo, hi] = std::minmax_element(curve.orders.begin(), curve.orders.end());
  best.at_grid_boundary = best.best_order == *lo || best.best_order == *hi;
  best.epsilon = std::max(best.epsilon, 0.0);
  return best;
}

EpsilonResult to_epsilon(const AccountantState& state, double delta, Conversion conversion) {
  return epsilon_after(state, state.steps(), delta, conversion);
}

EpsilonResult epsilon_after(const AccountantState& state, std::uint64_t steps, double delta,
                            Conversion conversion) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  // Nothing released yet.
  if (steps == 0) return {0.0, state.single_step().orders.front(), false};
  RdpCurve curve = state.single_step();
  for (std::size_t i = 0; i < curve.values.size(); ++i) {
    curve.values[i] = state.accumulated_value(i, steps);
  }
  return epsilon_from_curve(curve, delta, conversion);
}

std::uint64_t max_steps(const MechanismParams& params, const PrivacyBudget& budget,
                        Conversion conversion, std::span<const double> orders) {
  budget.validate();
  const AccountantState state(params, std::vector<double>(orders.begin(), orders.end()));
  auto fits = [&](std::uint64_t t) {
    return epsilon_after(state, t, budget.delta, conversion).epsilon <= budget.epsilon;
  };
  if (!fits(1)) return 0;
  std::uint64_t lo = 1;  // fits
  std::uint64_t hi = 2;
  while (fits(hi)) {
    if (hi >= kMaxStepsLimit) return kMaxStepsLimit;
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    (fits(mid) ? lo : hi) = mid;
  }
  return lo;
}

double sigma_for_budget(double sampling_rate, std::uint64_t steps, const PrivacyBudget& budget,
                        const SigmaSearch& search, std::span<const double> orders) {
  budget.validate();
  if (!(search.sigma_min > 0.0 && search.sigma_max > search.sigma_min && search.step > 0.0)) {
    throw std::invalid_argument("sigma_for_budget: invalid search interval");
  }
  const std::vector<double> grid(orders.begin(), orders.end());
  auto fits = [&](double sigma) {
    const AccountantState state(MechanismParams{sampling_rate, sigma}, grid);
    return epsilon_after(state, steps, budget.delta, search.conversion).epsilon <= budget.epsilon;
  };
  if (!fits(search.sigma_max)) {
    throw BudgetError("no noise multiplier <= " + std::to_string(search.sigma_max) +
                      " reaches epsilon " + std::to_string(budget.epsilon) + " in " +
                      std::to_string(steps) + " steps");
  }
  if (fits(search.sigma_min)) return search.sigma_min;
  double lo = search.sigma_min;  // fails
  double hi = search.sigma_max;  // fits
  while (hi - lo > search.step) {
    const double mid = 0.5 * (lo + hi);
    (fits(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace dpfl::privacy
