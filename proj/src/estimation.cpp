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

#include "wpcf/estimation.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace wpcf
{

PilotAssignment make_pilot_assignment(const std::vector<int> &pilot_index, int tau_p)
{
    if (tau_p < 1)
        throw ContractViolation("make_pilot_assignment: tau_p must be >= 1");
    PilotAssignment pa;
    pa.tau_p = tau_p;
    pa.pilot_index = pilot_index;
    const int K = static_cast<int>(pilot_index.size());
    pa.sharing_set.assign(K, {});
    for (int k = 0; k < K; ++k)
    {
        if (pilot_index[k] < 0 || pilot_index[k] >= tau_p)
            throw ContractViolation("make_pilot_assignment: pilot index out of range");
        for (int i = 0; i < K; ++i)
            if (pilot_index[i] == pilot_index[k])
                pa.sharing_set[k].push_back(i);
    }
    return pa;
}

PilotAssignment assign_pilots(int num_ues, int tau_p, Rng &rng)
{
    if (tau_p < 1)
        throw ContractViolation("assign_pilots: tau_p must be >= 1");
    std::vector<int> order(num_ues);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> index(num_ues);
    for (int pos = 0; pos < num_ues; ++pos)
        index[order[pos]] = pos % tau_p;
    return make_pilot_assignment(index, tau_p);
}

CMat pilot_book(int tau_p)
{
    CMat book(tau_p, tau_p);
    for (int t = 0; t < tau_p; ++t)
        for (int j = 0; j < tau_p; ++j)
            book(t, j) = std::polar(1.0, -2.0 * std::numbers::pi * t * j / tau_p);
    return book;
}

CVec despread(const CMat &pilot_block, const CVec &pilot)
{
    return pilot_block * pilot.conjugate() / std::sqrt(static_cast<double>(pilot.size()));
}

PilotParams pilot_params(const NetworkConfig &cfg)
{
    return {cfg.tau_p, cfg.pilot_power_w, cfg.noise_power_w};
}

CMat psi_matrix(const ChannelStatistics &stats, const PilotAssignment &pilots, const PilotParams &pp, int k, int l)
{
    const int N = stats.antennas;
    CMat psi = pp.noise_power * CMat::Identity(N, N);
    for (int i : pilots.sharing_set[k])
        psi += pp.snr_gain() * stats.R(i, l);
    return psi;
}

EstimatorStatistics estimator_statistics(const ChannelStatistics &stats, const PilotAssignment &pilots,
                                         const PilotParams &pp)
{
    const int K = stats.num_ues;
    const int L = stats.num_aps;
    EstimatorStatistics est;
    est.psi = make_link_table<CMat>(K, L);
    est.rhat = make_link_table<CMat>(K, L);
    est.error_cov = make_link_table<CMat>(K, L);
    est.psi_inv_r = make_link_table<CMat>(K, L);
    for (int k = 0; k < K; ++k)
        for (int l = 0; l < L; ++l)
        {
            // Sharers of a pilot have identical Psi; reuse the first one computed.
            const int first = pilots.sharing_set[k].front();
            if (first < k)
                est.psi[k][l] = est.psi[first][l];
            else
                est.psi[k][l] = psi_matrix(stats, pilots, pp, k, l);
            const CMat &psi = est.psi[k][l];

            Eigen::SelfAdjointEigenSolver<CMat> eig(psi, Eigen::EigenvaluesOnly);
            const double lo = eig.eigenvalues().minCoeff();
            const double hi = eig.eigenvalues().maxCoeff();
            if (!(lo > 0.0) || hi / lo > kMaxPsiCondition)
                throw IllConditionedError("Psi(" + std::to_string(k) + "," + std::to_string(l) +
                                          ") is numerically singular");

            const Eigen::LLT<CMat> llt(psi);
            const CMat &R = stats.R(k, l);
            est.psi_inv_r[k][l] = llt.solve(R);
            CMat rhat = pp.snr_gain() * R * est.psi_inv_r[k][l];
            rhat = 0.5 * (rhat + rhat.adjoint()).eval();
            est.rhat[k][l] = rhat;
            est.error_cov[k][l] = R - rhat;
        }
    return est;
}

CVec lmmse_estimate(const CVec &z, const ChannelStatistics &stats, const EstimatorStatistics &est,
                    const PilotParams &pp, int k, int l)
{
    const Eigen::LLT<CMat> llt(est.psi[k][l]);
    return std::sqrt(pp.snr_gain()) * stats.R(k, l) * llt.solve(z);
}

} // namespace wpcf
