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
#include "wpcf/estimation.hpp"
#include "wpcf/types.hpp"

namespace wpcf
{

/// Closed-form moments of the MR weight v_kl (ghat_kl for LMMSE, z_kl for LS) against a channel g_il.
///
/// first(k,i)(l)  = E{v_kl^H g_il}, zero when i is not in P_k
/// second(k,i)(l) = E{|v_kl^H g_il|^2}
/// norm(k,l)      = E{||v_kl||^2}
///
/// The uplink coefficients use these directly. The downlink terms use them with the
/// roles of k and i swapped, since the energy precoder of UE i at AP l is v_il.
class MrMoments
{
  public:
    MrMoments() = default;

    int num_ues() const { return K_; }
    int num_aps() const { return L_; }
    Estimator estimator() const { return estimator_; }

    const CVec &first(int k, int i) const { return first_[idx(k, i)]; }
    const RVec &second(int k, int i) const { return second_[idx(k, i)]; }
    double norm(int k, int l) const { return norm_(k, l); }
    const RMat &norms() const { return norm_; }
    bool shares(int k, int i) const { return pilots_.shares(k, i); }
    const PilotAssignment &pilots() const { return pilots_; }

    friend MrMoments mr_moments(const ChannelStatistics &, const PilotAssignment &, const PilotParams &,
                                Estimator, const EstimatorStatistics *);

  private:
    std::size_t idx(int k, int i) const { return static_cast<std::size_t>(k) * K_ + i; }

    int K_ = 0;
    int L_ = 0;
    Estimator estimator_ = Estimator::Lmmse;
    PilotAssignment pilots_;
    std::vector<CVec> first_;
    std::vector<RVec> second_;
    RMat norm_;
};

/// est may be null, in which case the estimator statistics are built internally.
MrMoments mr_moments(const ChannelStatistics &stats, const PilotAssignment &pilots, const PilotParams &pp,
                     Estimator estimator, const EstimatorStatistics *est = nullptr);

} // namespace wpcf
