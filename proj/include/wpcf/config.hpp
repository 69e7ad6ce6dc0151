// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "wpcf/types.hpp"

namespace wpcf
{

enum class ApPlacement
{
    Grid,
    Random
};

/// Long-term network parameters. All powers in W, distances in m, durations in samples.
struct NetworkConfig
{
    double area_side = 100.0;
    int num_aps = 9;
    int antennas_per_ap = 2;
    int num_ues = 4;
    double carrier_freq_hz = 3.4e9;
    double bandwidth_hz = 20e6;
    double noise_power_w = dbm_to_watt(-96.0);
    double pilot_power_w = dbm_to_watt(-40.0);
    double ap_power_w = 10.0 / 9.0;
    int tau_c = 200;
    int tau_p = 5;
    int tau_d = 25;
    int tau_u = 170;
    double height_diff_m = 4.0;
    std::uint64_t rng_seed = 1;
    ApPlacement ap_placement = ApPlacement::Grid;

    /// Throws ConfigError naming the first offending field.
    void validate() const;
};

/// Field-level configuration error.
class ConfigError : public std::invalid_argument
{
  public:
    ConfigError(const std::string &field, const std::string &what)
        : std::invalid_argument(field + ": " + what), field_(field)
    {
    }
    const std::string &field() const { return field_; }

  private:
    std::string field_;
};

enum class PowerControl
{
    MaxMinFair,
    Fractional
};

/// Everything one batch run needs: network, sweep size, scheme selection and optimizer knobs.
struct ExperimentConfig
{
    NetworkConfig network;
    int num_setups = 20;
    Estimator estimator = Estimator::Lmmse;
    WptScheme scheme = WptScheme::Coherent;
    std::string eh_model = "m1";
    PowerControl power = PowerControl::MaxMinFair;
    double bisection_lambda = 1.2;
    double bisection_epsilon = 1e-3;
    double solver_tol = 1e-9;
    int solver_max_iters = 200;

    void validate() const;
};

/// L=36, N=8, K=20, 500 setups.
ExperimentConfig full_scale_config();
/// L=9, N=2, K=4, 20 setups.
ExperimentConfig desk_scale_config();

using KeyValueMap = std::map<std::string, std::string>;

/// Parses `key = value` lines; `#` starts a comment. Throws ConfigError on malformed lines.
KeyValueMap parse_key_values(const std::string &text);

/// Applies recognized keys on top of `base`. Unknown keys are rejected.
ExperimentConfig apply_key_values(const KeyValueMap &kv, ExperimentConfig base);

ExperimentConfig load_experiment_config(const std::string &path, ExperimentConfig base = desk_scale_config());

std::string to_key_values(const ExperimentConfig &cfg);

std::string to_string(PowerControl p);
PowerControl parse_power_control(const std::string &s);

} // namespace wpcf
