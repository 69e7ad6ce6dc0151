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

#include "wpcf/moments.hpp"

namespace wpcf
{

namespace
{

double real_trace_product(const CMat &a, const CMat &b)
{
    // tr(AB) for Hermitian A, B is real.
    return (a.array() * b.transpose().array()).sum().real();
}

} // namespace

MrMoments mr_moments(const ChannelStatistics &stats, const PilotAssignment &pilots, const PilotParams &pp,
                     Estimator estimator, const EstimatorStatistics *est)
{
    EstimatorStatistics local;
    if (!est)
    {
        local = estimator_statistics(stats, pilots, pp);
        est = &local;
    }

    const int K = stats.num_ues;
    const int L = stats.num_aps;
    const double N = stats.antennas;
    const double g = pp.snr_gain();

    MrMoments m;
    m.K_ = K;
    m.L_ = L;
    m.estimator_ = estimator;
    m.pilots_ = pilots;
    m.first_.assign(static_cast<std::size_t>(K) * K, CVec::Zero(L));
    m.second_.assign(static_cast<std::size_t>(K) * K, RVec::Zero(L));
    m.norm_ = RMat::Zero(K, L);

    for (int k = 0; k < K; ++k)
        for (int l = 0; l < L; ++l)
        {
            const CMat &psi = est->psi[k][l];
            if (estimator == Estimator::Lmmse)
            {
                const CMat &pir = est->psi_inv_r[k][l];
                const CMat &rhat = est->rhat[k][l];
                const double tr_pir = pir.trace().real();
                m.norm_(k, l) = rhat.trace().real();
                for (int i = 0; i < K; ++i)
                {
                    double s = real_trace_product(rhat, stats.R(i, l));
                    if (pilots.shares(k, i))
                    {
                        const CVec &gb = stats.gbar(i, l);
                        const double b = stats.beta(i, l);
                        const cdouble quad = gb.dot(pir * gb);
                        m.first_[m.idx(k, i)](l) = g * (quad + b * tr_pir);
                        s += g * g * (2.0 * b * (quad * tr_pir).real() + b * b * tr_pir * tr_pir);
                    }
                    m.second_[m.idx(k, i)](l) = s;
                }
            }
            else
            {
                m.norm_(k, l) = psi.trace().real();
                for (int i = 0; i < K; ++i)
                {
                    double s = real_trace_product(psi, stats.R(i, l));
                    if (pilots.shares(k, i))
                    {
                        const double gn = stats.gbar(i, l).squaredNorm();
                        const double b = stats.beta(i, l);
                        m.first_[m.idx(k, i)](l) = std::sqrt(g) * (gn + N * b);
                        s += g * (2.0 * N * b * gn + N * N * b * b);
                    }
                    m.second_[m.idx(k, i)](l) = s;
                }
            }
        }
    return m;
}

} // namespace wpcf
