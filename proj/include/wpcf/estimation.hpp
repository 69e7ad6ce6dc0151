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

#include <vector>

#include "wpcf/channel.hpp"
#include "wpcf/random.hpp"
#include "wpcf/types.hpp"

namespace wpcf
{

/// Orthogonal pilot reuse: UEs with the same index share a sequence, distinct indices are orthogonal.
struct PilotAssignment
{
    int tau_p = 1;
    std::vector<int> pilot_index;             // per UE, in [0, tau_p)
    std::vector<std::vector<int>> sharing_set; // P_k, sorted, contains k

    int num_ues() const { return static_cast<int>(pilot_index.size()); }
    bool shares(int k, int i) const { return pilot_index[k] == pilot_index[i]; }
};

/// Builds sharing sets from explicit indices.
PilotAssignment make_pilot_assignment(const std::vector<int> &pilot_index, int tau_p);

/// Random balanced assignment: pilot group sizes differ by at most one.
PilotAssignment assign_pilots(int num_ues, int tau_p, Rng &rng);

/// tau_p x tau_p matrix whose columns are the pilot sequences, each with squared norm tau_p.
CMat pilot_book(int tau_p);

/// z = Z phi^* / sqrt(tau_p).
CVec despread(const CMat &pilot_block, const CVec &pilot);

/// Identity: LS-based MR processing uses the de-spread statistic directly.
inline CVec ls_statistic(const CVec &z) { return z; }

struct PilotParams
{
    int tau_p = 1;
    double pilot_power = 1.0;
    double noise_power = 1.0;

    double snr_gain() const { return tau_p * pilot_power; }
};

PilotParams pilot_params(const NetworkConfig &cfg);

/// Psi_kl = tau_p rho_p sum_{i in P_k} R_il + sigma^2 I.
CMat psi_matrix(const ChannelStatistics &stats, const PilotAssignment &pilots, const PilotParams &pp, int k, int l);

/// Condition number above which Psi is treated as singular.
inline constexpr double kMaxPsiCondition = 1e12;

/// Per-link LMMSE statistics. Psi^{-1} R is stored because every closed form uses it.
struct EstimatorStatistics
{
    LinkTable<CMat> psi;
    LinkTable<CMat> rhat;
    LinkTable<CMat> error_cov;
    LinkTable<CMat> psi_inv_r; // Psi_kl^{-1} R_kl
};

/// Throws IllConditionedError when some Psi_kl exceeds kMaxPsiCondition.
EstimatorStatistics estimator_statistics(const ChannelStatistics &stats, const PilotAssignment &pilots,
                                         const PilotParams &pp);

/// ghat = sqrt(tau_p rho_p) R Psi^{-1} z.
CVec lmmse_estimate(const CVec &z, const ChannelStatistics &stats, const EstimatorStatistics &est,
                    const PilotParams &pp, int k, int l);

} // namespace wpcf
