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

#include "wpcf/moments.hpp"
#include "wpcf/types.hpp"

namespace wpcf
{

struct SECoefficients
{
    std::vector<CVec> b;              // b[k](l) = E{v_kl^H g_kl}
    std::vector<std::vector<CMat>> C; // C[k][i](l,l') = E{v_kl^H g_il g_il'^H v_kl'}
    std::vector<RVec> d;              // d[k](l), diagonal of D_k

    int num_ues() const { return static_cast<int>(b.size()); }
    int num_aps() const { return b.empty() ? 0 : static_cast<int>(b.front().size()); }
};

SECoefficients se_coefficients(const MrMoments &m, double noise_power);

/// a_k^H (sum_i eta_i C_ki + D_k) a_k, the total received power including the desired term.
double lsfd_total_power(const CVec &a, const RVec &eta, const SECoefficients &c, int k);

double sinr(const CVec &a, const RVec &eta, const SECoefficients &c, int k);

/// Unit-norm maximizer of the SINR quotient.
CVec optimal_lsfd(const RVec &eta, const SECoefficients &c, int k);

/// eta_k b^H (sum_i eta_i C_ki + D_k - eta_k b b^H)^{-1} b.
double optimal_sinr(const RVec &eta, const SECoefficients &c, int k);

double se_value(double sinr_value, int tau_u, int tau_c);

/// Per-UE SINR with the given LSFD vectors.
RVec sinr_all(const std::vector<CVec> &a, const RVec &eta, const SECoefficients &c);

std::vector<CVec> optimal_lsfd_all(const RVec &eta, const SECoefficients &c);

} // namespace wpcf
