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

#ifndef DPFL_ACCOUNTANT_HPP_
#define DPFL_ACCOUNTANT_HPP_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace dpfl::privacy {

// One invocation of the Poisson-subsampled Gaussian mechanism: each record is
// included with probability q and the released sum carries Gaussian noise with
// standard deviation sigma times the clipping bound.
struct MechanismParams {
  double sampling_rate = 1.0;
  double noise_multiplier = 1.0;

  void validate() const;
};

struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 1e-5;

  void validate() const;
};

// Renyi divergence bound per order alpha.
struct RdpCurve {
  std::vector<double> orders;
  std::vector<double> values;
};

// Rule for turning an RDP curve into an (epsilon, delta) statement.
//   kClassic: eps = rdp(a) + log(1/delta) / (a - 1)
//   kTight:   eps = rdp(a) + log((a - 1) / a) - (log(delta) + log(a)) / (a - 1)
enum class Conversion { kClassic, kTight };

std::string_view to_string(Conversion c);
Conversion conversion_from_string(std::string_view s);

// {1.25, 1.5, 1.75, 2, 2.5, 3, 4, ..., 64, 128, 256}.
const std::vector<double>& default_orders();

// Upper bound on the order-alpha Renyi divergence of a single subsampled
// Gaussian step. Integer orders use the exact binomial expansion; fractional
// orders use the two-sided erfc series. Throws NumericalError instead of
// returning a non-finite value.
double rdp_single_step(const MechanismParams& params, double alpha);

RdpCurve rdp_curve(const MechanismParams& params, std::span<const double> orders);

// Composition of `steps` identical mechanism invocations. The accumulated
// curve is always steps x the single-step curve.
class AccountantState {
 public:
  explicit AccountantState(MechanismParams params,
                           std::vector<double> orders = default_orders());

  const MechanismParams& params() const { return params_; }
  std::uint64_t steps() const { return steps_; }
  const RdpCurve& single_step() const { return single_; }
  RdpCurve accumulated() const;

  // Curve value for order index i after `steps` compositions.
  double accumulated_value(std::size_t i, std::uint64_t steps) const {
    return static_cast<double>(steps) * single_.values[i];
  }

 private:
  friend AccountantState compose(const AccountantState& state, std::uint64_t additional_steps);

  MechanismParams params_;
  std::uint64_t steps_ = 0;
  RdpCurve single_;
};

AccountantState compose(const AccountantState& state, std::uint64_t additional_steps);

struct EpsilonResult {
  double epsilon = 0.0;
  double best_order = 0.0;
  // True when the minimizing order is the smallest or largest grid order.
  bool at_grid_boundary = false;
};

EpsilonResult epsilon_from_curve(const RdpCurve& curve, double delta,
                                 Conversion conversion = Conversion::kClassic);

EpsilonResult to_epsilon(const AccountantState& state, double delta,
                         Conversion conversion = Conversion::kClassic);

// Epsilon of the state advanced by `steps` in total, without materializing it.
EpsilonResult epsilon_after(const AccountantState& state, std::uint64_t steps, double delta,
                            Conversion conversion = Conversion::kClassic);

// Largest T whose epsilon stays within budget (0 if even one step exceeds it).
// Searches up to kMaxStepsLimit.
inline constexpr std::uint64_t kMaxStepsLimit = std::uint64_t{1} << 50;
std::uint64_t max_steps(const MechanismParams& params, const PrivacyBudget& budget,
                        Conversion conversion = Conversion::kClassic,
                        std::span<const double> orders = default_orders());

struct SigmaSearch {
  double sigma_min = 0.01;
  double sigma_max = 1000.0;
  // Bisection stops once the bracket is narrower than this.
  double step = 1e-4;
  Conversion conversion = Conversion::kClassic;
};

// Smallest sigma on the bisection grid such that `steps` compositions at
// sampling rate q stay within budget. Throws BudgetError when sigma_max fails.
double sigma_for_budget(double sampling_rate, std::uint64_t steps, const PrivacyBudget& budget,
                        const SigmaSearch& search = {},
                        std::span<const double> orders = default_orders());

}  // namespace dpfl::privacy

#endif  // DPFL_ACCOUNTANT_HPP_
