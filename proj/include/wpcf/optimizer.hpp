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
#include <stdexcept>
#include <string>
#include <vector>

#include "wpcf/conic_solver.hpp"
#include "wpcf/config.hpp"
#include "wpcf/energy.hpp"
#include "wpcf/moments.hpp"
#include "wpcf/spectral_efficiency.hpp"

namespace wpcf
{

/// Everything the power-control problem needs for one setup.
struct OptimizerContext
{
    const MrMoments *moments = nullptr;
    const SECoefficients *coeffs = nullptr;
    EHModel model;
    WptScheme scheme = WptScheme::Coherent;
    int tau_c = 200;
    int tau_p = 5;
    int tau_d = 25;
    int tau_u = 170;
    double pilot_power = 1.0;
    double ap_power = 1.0;

    int num_ues() const { return moments->num_ues(); }
    int num_aps() const { return moments->num_aps(); }
    double pilot_energy() const { return tau_p * pilot_power; }
};

OptimizerContext make_context(const NetworkConfig &cfg, const MrMoments &m, const SECoefficients &coeffs,
                              const EHModel &model, WptScheme scheme);

struct PowerAllocation
{
    std::vector<RMat> P;     // per UE, L x L; diagonal = p_kl
    RVec eta;                // uplink powers, W
    std::vector<CVec> a;     // LSFD vectors, unit norm
    RVec e;                  // harvester linearization variables (empty for the linear model)
    double t = 0.0;          // min SINR achieved with a
    RVec input_power;        // I_k
    RVec energy;             // E_k
    RVec sinr;               // SINR_k with a

    RMat p() const;          // K x L diagonal coefficients
};

/// Input power for every UE. Coherent uses the full matrices, non-coherent only their diagonals.
RVec input_powers(const OptimizerContext &ctx, const std::vector<RMat> &P);

RVec harvested_energies(const OptimizerContext &ctx, const RVec &input_power);

/// Fills input_power, energy, sinr and t from P, eta and a.
void evaluate_allocation(const OptimizerContext &ctx, PowerAllocation &alloc);

struct UpperBound
{
    double t_max = 0.0;
    bool energy_infeasible = false;
    RVec single_ue_sinr;
    RVec single_ue_energy;     // E_k with every AP beaming only to UE k
    RVec max_energy;           // largest E_k reachable under the AP power limits
};

/// Largest I_k over all allocations meeting the per-AP limits. Closed form for the
/// non-coherent scheme; an SDP (relaxation, so still an upper bound) for the coherent one.
double max_input_power(const OptimizerContext &ctx, int k);

/// min_k SINR_k with eta_k funded by max_energy(k) and all other UEs silent.
/// max_energy equals single_ue_energy whenever a UE's own MR beam is its best energy
/// carrier at every AP, which is the usual case.
UpperBound tmax_init(const OptimizerContext &ctx);

/// Variable layout of the scaled subproblem. Q_k = P_k .* sqrt(n_k n_k^T) / rho_d and eta = eta_ref * eta_tilde.
struct Subproblem
{
    ConicProblem problem;
    double t = 0.0;
    double eta_ref = 1.0;
    int eta_offset = 0;
    int e_offset = -1;
    int q_offset = 0;
    std::vector<int> psd_row; // first cone row of each UE's PSD block, or -1
};

Subproblem build_subproblem(const OptimizerContext &ctx, double t, const std::vector<CVec> &a, double eta_ref);

/// P, eta, e recovered from a solver point (PSD blocks read from the slack).
PowerAllocation read_subproblem_solution(const OptimizerContext &ctx, const Subproblem &sp,
                                         const ConicSolution &sol);

/// P** with P**_{ll'} = sqrt(P*_{ll} P*_{l'l'}); diagonal copied exactly.
std::vector<RMat> extract_rank_one(const std::vector<RMat> &P);

/// Largest relative violation of the per-AP power, harvested-energy, SINR, nonnegativity and PSD constraints.
double constraint_violation(const OptimizerContext &ctx, const PowerAllocation &alloc, double t);

struct ScaleReport
{
    double downlink_factor = 1.0;
    double uplink_factor = 1.0;
    bool reverted = false;
};

/// Algorithm 1 step 7: downlink first, then a common uplink factor; reverts if min-SINR drops.
/// The LSFD vectors are recomputed on return and t set to the resulting min SINR.
ScaleReport scale_powers(const OptimizerContext &ctx, PowerAllocation &alloc);

struct Lemma4Record
{
    bool diagonal_exact = true;
    double min_input_change = 0.0;  // min_k (I_k(P**) - I_k(P*)) / max(I_k(P*), tiny)
    double constraint_violation = 0.0;
};

struct IterationRecord
{
    int iteration = 0;
    double t = 0.0;
    ConicStatus status = ConicStatus::NumericalFailure;
    bool feasible = false;
    double t_star = 0.0;
    double t_min = 0.0;
    double t_max = 0.0;
    int solver_iterations = 0;
    bool scaling_reverted = false;
    Lemma4Record lemma4;
};

struct BisectionSettings
{
    double lambda = 1.2;
    double epsilon = 1e-3;
    /// Stop when t_max - t_min <= epsilon * clamp(t_max, 1e-3, 1): absolute above SINR 1, relative below.
    bool scaled_epsilon = true;
    ConicSettings solver{.tol = 1e-9};
    int max_solves = 500;
};

struct MaxMinResult
{
    PowerAllocation alloc;
    bool energy_infeasible = false;
    double tmax_init = 0.0;
    std::vector<IterationRecord> log;
    int num_solves = 0;
};

class OptimizerError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Throws OptimizerError when the solver fails irrecoverably.
MaxMinResult algorithm1(const OptimizerContext &ctx, const BisectionSettings &settings = {});

/// Fractional power control with tight AP power and tight uplink energy budgets.
PowerAllocation fpc_baseline(const OptimizerContext &ctx);

void write_iteration_log_csv(std::ostream &out, const std::vector<IterationRecord> &log);

} // namespace wpcf
