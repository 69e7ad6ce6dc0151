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

#include "wpcf/conic_problem.hpp"

namespace wpcf
{

enum class ConicStatus
{
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    MaxIters,
    NumericalFailure
};

std::string to_string(ConicStatus s);

struct ConicSettings
{
    double tol = 1e-8;
    int max_iters = 200;
    double step_fraction = 0.99;
    int refinement_steps = 3;
    bool verbose = false; // per-iteration trace on stderr
};

/// On Optimal, (x, s) is primal and (y, z) dual. On PrimalInfeasible, (y, z) is a Farkas
/// certificate normalized to b^T y + h^T z = -1. On DualInfeasible, (x, s) is a ray with c^T x = -1.
struct ConicSolution
{
    ConicStatus status = ConicStatus::NumericalFailure;
    RVec x, y, z, s;
    double primal_objective = 0.0;
    double dual_objective = 0.0;
    double gap = 0.0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    int iterations = 0;
};

ConicSolution solve(const ConicProblem &problem, const ConicSettings &settings = {});

struct CertificateReport
{
    bool valid = false;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double gap = 0.0;
    double cone_violation = 0.0;
};

/// Recomputes residuals from x, y, z alone (the slack is rebuilt as h - G x).
CertificateReport verify_certificate(const ConicProblem &problem, const ConicSolution &solution, double tol = 1e-6);

/// max(0, -lambda_min) of each block divided by (1 + block norm), maximized over blocks.
double cone_violation(const ConicProblem &problem, const RVec &v);

} // namespace wpcf
