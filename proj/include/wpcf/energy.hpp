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

#include <string>
#include <vector>

#include "wpcf/moments.hpp"
#include "wpcf/types.hpp"

namespace wpcf
{

/// Harvested power A I / (B I + C); B = 0 is the linear model.
struct EHModel
{
    std::string name;
    double A = 0.0;
    double B = 0.0;
    double C = 1.0;

    bool is_linear() const { return B == 0.0; }
};

/// Maps the curve-fit constants (a, b, c) to A = 1e3 (a c - b), B = 1e6 c, C = 1e3 c^2.
EHModel eh_from_curve_fit(const std::string &name, double a, double b, double c);

EHModel eh_m1();
EHModel eh_m2();
/// M1 with B forced to zero.
EHModel eh_linear();

/// M1, M2 and the linear model, in that order.
std::vector<EHModel> eh_model_presets();

/// Accepts "m1", "m2" or "l" (case-insensitive).
EHModel eh_model_by_name(const std::string &name);

double harvested_energy(double input_power, const EHModel &model, double tau_d);

/// Input power the harvester needs for a target energy. Returns +inf when the target is at or above saturation.
double required_input_power(double energy, const EHModel &model, double tau_d);

/// P_l^E = sum_k p_kl E{||w_kl||^2}. p is K x L.
double ap_tx_power(const RMat &p, const RMat &norms, int l);

/// Same, reading p_kl from the diagonals of the per-UE matrices.
double ap_tx_power(const std::vector<RMat> &P, const RMat &norms, int l);

/// Throws ContractViolation unless P is symmetric PSD with nonnegative entries (up to rounding).
void check_wpt_matrix(const RMat &P);

/// P = sqrt(p) sqrt(p)^T for one UE's row of p.
RMat coherent_matrix(const RVec &p_row);

std::vector<RMat> coherent_matrices(const RMat &p);

/// Symmetric L x L weight W with I_k = sum_i <W_ki, P_i> under coherent transmission.
RMat coherent_weight(const MrMoments &m, int k, int i);

double input_power_coherent(const std::vector<RMat> &P, const MrMoments &m, int k);

double input_power_noncoherent(const RMat &p, const MrMoments &m, int k);

} // namespace wpcf
