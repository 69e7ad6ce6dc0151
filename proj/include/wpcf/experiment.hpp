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
#include <iosfwd>
#include <string>
#include <vector>

#include "wpcf/channel.hpp"
#include "wpcf/config.hpp"
#include "wpcf/energy.hpp"
#include "wpcf/estimation.hpp"
#include "wpcf/moments.hpp"
#include "wpcf/optimizer.hpp"
#include "wpcf/spectral_efficiency.hpp"

namespace wpcf
{

/// Long-term state of one setup: geometry, statistics and pilot assignment.
struct SetupData
{
    int index = 0;
    Geometry geometry;
    ChannelStatistics stats;
    PilotAssignment pilots;
    PilotParams pp;
};

/// AP positions shared by every setup of one experiment.
RMat experiment_ap_positions(const NetworkConfig &cfg);

/// UE drop, shadowing and pilots for setup `index`; depends only on (cfg.rng_seed, index).
SetupData make_setup(const NetworkConfig &cfg, const RMat &ap_positions, int index);

struct EstimatorModel
{
    MrMoments moments;
    SECoefficients coeffs;
};

EstimatorModel estimator_model(const SetupData &setup, Estimator estimator);

struct CellSpec
{
    Estimator estimator = Estimator::Lmmse;
    WptScheme scheme = WptScheme::Coherent;
    std::string eh_model = "m1";
    PowerControl power = PowerControl::MaxMinFair;

    std::string label() const;
};

struct CellResult
{
    int setup = 0;
    CellSpec spec;
    PowerAllocation alloc;
    RVec se;
    double min_se = 0.0;
    bool energy_infeasible = false;
    int num_solves = 0;
    double tmax_init = 0.0;
    RVec ap_power; // P_l^E per AP, W
    std::vector<IterationRecord> log;
};

BisectionSettings bisection_settings(const ExperimentConfig &cfg);

/// Runs one power-control method on one setup.
CellResult run_cell(const NetworkConfig &net, const SetupData &setup, const EstimatorModel &model,
                    const CellSpec &spec, const BisectionSettings &settings);

struct CdfPoint
{
    double quantile = 0.0;
    double value = 0.0;
};

/// Empirical quantiles: the smallest sample x with F(x) >= q.
std::vector<CdfPoint> emit_cdf(std::vector<double> samples, const std::vector<double> &quantiles);

/// 0.05, 0.10, 0.25, 0.50, 0.75, 0.90, 0.95.
std::vector<double> default_quantiles();

struct ExperimentResult
{
    ExperimentConfig config;
    std::vector<CellResult> cells; // one per setup, in setup order
};

/// Sweeps setups with `workers` threads (0 = hardware concurrency); results are in setup order.
ExperimentResult run_experiment(const ExperimentConfig &cfg, int workers = 0);

/// Writes per_ue_se.csv, min_se.csv, downlink_power.csv, uplink_power.csv, convergence.csv,
/// se_cdf.csv and config.txt into `dir` (created if missing).
void write_experiment(const ExperimentResult &res, const std::string &dir);

/// Every combination of estimator, scheme, EH model and power control.
std::vector<CellSpec> comparison_matrix();

struct ComparisonResult
{
    ExperimentConfig config;
    std::vector<CellSpec> specs;
    std::vector<std::vector<CellResult>> cells; // [setup][spec]
};

/// All cells of one setup share the same statistics and pilots.
ComparisonResult compare_schemes(const ExperimentConfig &cfg, const std::vector<CellSpec> &specs, int workers = 0);

/// Writes compare_min_se.csv, compare_per_ue.csv and compare_cdf.csv into `dir`.
void write_comparison(const ComparisonResult &res, const std::string &dir);

void write_per_ue_csv(std::ostream &out, const std::vector<CellResult> &cells);
void write_min_se_csv(std::ostream &out, const std::vector<CellResult> &cells);
void write_downlink_power_csv(std::ostream &out, const std::vector<CellResult> &cells);
void write_uplink_power_csv(std::ostream &out, const std::vector<CellResult> &cells);
void write_convergence_csv(std::ostream &out, const std::vector<CellResult> &cells);
void write_cdf_csv(std::ostream &out, const std::vector<CdfPoint> &cdf);

} // namespace wpcf
