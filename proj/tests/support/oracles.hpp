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

#ifndef DPFL_TESTS_ORACLES_HPP_
#define DPFL_TESTS_ORACLES_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dpfl/dataset.hpp"
#include "dpfl/matrix.hpp"
#include "dpfl/mlp.hpp"

namespace dpfl::testing {

// Single-step Renyi divergence of the Poisson-subsampled Gaussian mechanism,
// by trapezoid quadrature of E_{z~N(0,s^2)}[(1 - q + q exp((2z - 1) / 2s^2))^a].
// Independent of the library's series evaluation.
double rdp_by_quadrature(double q, double sigma, double alpha);

// Loss of sample i alone, as a function of the flat parameter vector.
double sample_loss(const nn::MlpModel& model, const Matrix& x, std::span<const nn::Label> y,
                   std::size_t i);

// Central differences of `f` at `params` with step h.
std::vector<double> central_difference(const std::function<double(std::span<const double>)>& f,
                                       std::vector<double> params, double h);

// Max over coordinates of |a - b| / max(|a|, |b|, floor).
double max_relative_error(std::span<const double> a, std::span<const double> b, double floor);

// Dataset of n rows with d standard normal features and labels in [0, classes).
data::Dataset random_dataset(std::size_t n, std::size_t d, std::size_t classes, std::uint64_t seed);

// Model of the given shape with every weight and bias drawn from N(0, 0.5^2).
// Nonzero biases keep ReLU pre-activations off the kink at exactly zero.
nn::MlpModel random_model(const nn::MlpConfig& config, std::uint64_t seed);

// Upper 1% point of the chi-square distribution with df degrees of freedom
// (table lookup for small df).
double chi_square_critical_1pct(std::size_t df);

double median(std::vector<double> v);

}  // namespace dpfl::testing

#endif  // DPFL_TESTS_ORACLES_HPP_
