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

#include <iosfwd>

#include "wpcf/config.hpp"
#include "wpcf/random.hpp"
#include "wpcf/types.hpp"

namespace wpcf
{

struct Geometry
{
    RMat ap_positions;  // L x 2
    RMat ue_positions;  // K x 2
    RMat distance;      // K x L, 3D distance including the height offset
    RMat planar_offset_x; // K x L, x-offset of UE seen from the AP
    RMat planar_offset_y; // K x L

    Eigen::Index num_aps() const { return ap_positions.rows(); }
    Eigen::Index num_ues() const { return ue_positions.rows(); }
};

/// AP coordinates: cell centres of a near-square grid, or uniform in the area.
RMat generate_ap_positions(const NetworkConfig &cfg, Rng &rng);

/// Drops UEs uniformly in the square around fixed APs.
Geometry drop_ues(const NetworkConfig &cfg, const RMat &ap_positions, Rng &rng);

/// AP placement followed by a UE drop.
Geometry generate_geometry(const NetworkConfig &cfg, Rng &rng);

/// One row of the 3GPP InH path-loss table: PL = log_coef*log10(d) + intercept + freq_coef*log10(fc_GHz).
struct PathLossRow
{
    double log_coef;
    double intercept;
    double freq_coef;
    double shadow_std_db;
};

/// Indoor-hotspot parameters (3GPP TR 36.814 B.1.2.1-1, B.1.2.1-2, B.1.2.2.1-4).
struct InhTable
{
    PathLossRow los{16.9, 32.8, 20.0, 3.0};
    PathLossRow nlos{43.3, 11.5, 20.0, 4.0};
    double los_certain_m = 18.0;
    double los_decay_m = 27.0;
    double los_floor_m = 37.0;
    double los_floor_probability = 0.5;
    double kfactor_mean_db = 7.0;
    double kfactor_std_db = 4.0;

    double los_probability(double distance_m) const;
    /// Median path loss in dB (no shadowing).
    double path_loss_db(double distance_m, double carrier_hz, bool los) const;
};

/// Long-term randomness of one link, kept for export/debugging.
struct LinkState
{
    bool los = false;
    double path_loss_db = 0.0;
    double shadowing_db = 0.0;
    double kfactor = 0.0; // linear; 0 for NLOS
    double gain = 0.0;    // total linear gain 10^(-(PL+SF)/10)
};

/// Per (k,l): LOS vector, NLOS variance and correlation R = g g^H + beta I.
struct ChannelStatistics
{
    int num_ues = 0;
    int num_aps = 0;
    int antennas = 0;
    LinkTable<CVec> los_vector;
    RMat beta; // K x L
    LinkTable<CMat> correlation;
    LinkTable<LinkState> link;

    const CVec &gbar(int k, int l) const { return los_vector[k][l]; }
    const CMat &R(int k, int l) const { return correlation[k][l]; }
};

/// Builds statistics from explicit LOS vectors and NLOS gains (fixtures, tests).
ChannelStatistics make_statistics(const LinkTable<CVec> &los_vector, const RMat &beta);

/// Unit-modulus half-wavelength ULA response for a UE at angle `broadside_angle` from broadside.
CVec ula_response(int antennas, double broadside_angle);

/// Draws LOS state, shadowing and Rician factor per link and splits the link power accordingly.
ChannelStatistics large_scale_stats(const Geometry &geometry, const NetworkConfig &cfg, Rng &rng,
                                    const InhTable &table = InhTable{});

struct ChannelRealization
{
    LinkTable<CVec> g;
    RMat theta; // K x L
};

/// g_kl = exp(j theta) gbar_kl + CN(0, beta_kl I).
ChannelRealization realize_channels(const ChannelStatistics &stats, Rng &rng);

void write_geometry_csv(std::ostream &out, const Geometry &geometry);
void write_statistics_csv(std::ostream &out, const ChannelStatistics &stats);

} // namespace wpcf
