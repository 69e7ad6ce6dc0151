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
#include "wpcf/random.hpp"
#include "wpcf/types.hpp"

// Brute-force sample estimators. Nothing here calls into the closed-form modules;
// pilot processing and the LMMSE filter are rebuilt from their definitions.

namespace wpcf
{

struct McEstimate
{
    double mean = 0.0;
    double std_error = 0.0;
};

struct McComplexEstimate
{
    cdouble mean{0.0, 0.0};
    double std_error = 0.0; // sqrt(E|x - mean|^2 / M)
};

/// |mc - reference| <= max(rel |reference|, nse * se), with a rounding floor.
bool mc_agrees(double mc, double se, double reference, double rel = 0.02, double nse = 3.0);
bool mc_agrees(cdouble mc, double se, cdouble reference, double rel = 0.02, double nse = 3.0);

class RunningMoments
{
  public:
    void add(double x);
    McEstimate estimate() const;
    std::size_t count() const { return n_; }

  private:
    std::size_t n_ = 0;
    double sum_ = 0.0;
    double sum_sq_ = 0.0;
};

class RunningComplexMoments
{
  public:
    void add(cdouble x);
    McComplexEstimate estimate() const;

  private:
    std::size_t n_ = 0;
    cdouble sum_{0.0, 0.0};
    double sum_abs_sq_ = 0.0;
};

struct McDownlink
{
    std::vector<McEstimate> input_power; // per UE
    std::vector<McEstimate> ap_power;    // per AP, E{||x_l||^2}
};

/// Energy transmission with per-UE PSD matrices P_i = F_i F_i^T. Each column of F_i carries an
/// independent unit-variance symbol, so rank-one P_i is coherent and diagonal P_i is non-coherent.
McDownlink mc_downlink(const ChannelStatistics &stats, const PilotAssignment &pilots, const PilotParams &pp,
                       Estimator estimator, const std::vector<RMat> &P, int num_samples, Rng &rng);

/// p is K x L. Coherent uses P_i = sqrt(p_i) sqrt(p_i)^T, non-coherent uses diag(p_i).
McEstimate mc_input_power(const ChannelStatistics &stats, const PilotAssignment &pilots, const PilotParams &pp,
                          Estimator estimator, WptScheme scheme, const RMat &p, int k, int num_samples, Rng &rng);

struct McSECoefficients
{
    CVec b;
    RVec b_se;
    std::vector<CMat> C; // C[i]
    std::vector<RMat> C_se;
    RVec d;
    RVec d_se;
};

McSECoefficients mc_se_coefficients(const ChannelStatistics &stats, const PilotAssignment &pilots,
                                    const PilotParams &pp, Estimator estimator, int k, int num_samples, Rng &rng);

struct McEstimationMoments
{
    CMat zz;            // E{z z^H}
    RMat zz_se;
    CMat gg;            // E{ghat ghat^H}
    RMat gg_se;
    McComplexEstimate cross; // E{ghat^H (g - ghat)}
    McEstimate z_norm;       // E{||z||^2}
};

McEstimationMoments mc_estimation_moments(const ChannelStatistics &stats, const PilotAssignment &pilots,
                                          const PilotParams &pp, int k, int l, int num_samples, Rng &rng);

/// Sample mean of g g^H and g for one link.
struct McChannelMoments
{
    CMat gg;
    CVec mean;
    McComplexEstimate phase; // E{e^{j theta}}
};

McChannelMoments mc_channel_moments(const ChannelStatistics &stats, int k, int l, int num_samples, Rng &rng);

struct IdentityCheck
{
    double formula = 0.0;
    McEstimate mc;
    bool passed = false;
};

struct ComplexIdentityCheck
{
    cdouble formula{0.0, 0.0};
    McComplexEstimate mc;
    bool passed = false;
};

/// E{|u^H B u|^2} = |tr(AB)|^2 + tr(A B A B^H) for u ~ CN(0, A).
IdentityCheck verify_lemma5(const CMat &A, const CMat &B, int num_samples, Rng &rng, double nse = 3.0);

struct Lemma6Check
{
    ComplexIdentityCheck first;  // E{y^H B x}
    IdentityCheck second;        // E{|y^H B x|^2}
};

/// x = e^{j theta} xbar + sigma_x w, y = alpha x + z with z ~ CN(0, C_y - alpha^2 (xbar xbar^H + sigma_x^2 I)).
/// Throws ContractViolation when that covariance is not PSD.
Lemma6Check verify_lemma6(const CVec &xbar, double sigma_x, double alpha, const CMat &B, const CMat &Cy,
                          int num_samples, Rng &rng, double nse = 3.0);

} // namespace wpcf
