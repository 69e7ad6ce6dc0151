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

#include "wpcf/spectral_efficiency.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace wpcf
{

SECoefficients se_coefficients(const MrMoments &m, double noise_power)
{
    const int K = m.num_ues();
    const int L = m.num_aps();
    SECoefficients c;
    c.b.resize(K);
    c.C.assign(K, std::vector<CMat>(K));
    c.d.resize(K);
    for (int k = 0; k < K; ++k)
    {
        c.b[k] = m.first(k, k);
        c.d[k] = noise_power * m.norms().row(k).transpose();
        for (int i = 0; i < K; ++i)
        {
            CMat Cki = CMat::Zero(L, L);
            if (m.shares(k, i))
            {
                const CVec &f = m.first(k, i);
                Cki = f * f.adjoint();
            }
            Cki.diagonal() = m.second(k, i).cast<cdouble>();
            c.C[k][i] = Cki;
        }
    }
    return c;
}

namespace
{

CMat weighted_sum(const RVec &eta, const SECoefficients &c, int k)
{
    const int L = c.num_aps();
    CMat S = CMat::Zero(L, L);
    for (int i = 0; i < c.num_ues(); ++i)
        if (eta(i) != 0.0)
            S += eta(i) * c.C[k][i];
    S.diagonal() += c.d[k].cast<cdouble>();
    return S;
}

} // namespace

double lsfd_total_power(const CVec &a, const RVec &eta, const SECoefficients &c, int k)
{
    return a.dot(weighted_sum(eta, c, k) * a).real();
}

double sinr(const CVec &a, const RVec &eta, const SECoefficients &c, int k)
{
    if (a.squaredNorm() == 0.0)
        throw ContractViolation("sinr: LSFD vector must be nonzero");
    const double num = eta(k) * std::norm(a.dot(c.b[k]));
    const double den = lsfd_total_power(a, eta, c, k) - num;
    return num / den;
}

namespace
{

CVec solve_lsfd_system(const RVec &eta, const SECoefficients &c, int k)
{
    CMat M = weighted_sum(eta, c, k) - eta(k) * c.b[k] * c.b[k].adjoint();
    M = 0.5 * (M + M.adjoint()).eval();
    const Eigen::LLT<CMat> llt(M);
    if (llt.info() == Eigen::Success)
        return llt.solve(c.b[k]);

    // Generalized-eigen form: maximize eta_k |a^H b|^2 / a^H M a via the pseudo-inverse of M.
    Eigen::SelfAdjointEigenSolver<CMat> eig(M);
    const RVec &ev = eig.eigenvalues();
    const double top = ev.cwiseAbs().maxCoeff();
    if (!(ev.minCoeff() > 1e-14 * top))
        throw IllConditionedError("optimal_lsfd: interference-plus-noise matrix is singular");
    return eig.eigenvectors() * (ev.cwiseInverse().cast<cdouble>().asDiagonal() *
                                 (eig.eigenvectors().adjoint() * c.b[k]));
}

} // namespace

CVec optimal_lsfd(const RVec &eta, const SECoefficients &c, int k)
{
    const CVec a = solve_lsfd_system(eta, c, k);
    const double n = a.norm();
    if (!(n > 0.0) || !std::isfinite(n))
        throw IllConditionedError("optimal_lsfd: degenerate solution");
    return a / n;
}

double optimal_sinr(const RVec &eta, const SECoefficients &c, int k)
{
    const CVec x = solve_lsfd_system(eta, c, k);
    return eta(k) * c.b[k].dot(x).real();
}

double se_value(double sinr_value, int tau_u, int tau_c)
{
    return static_cast<double>(tau_u) / tau_c * std::log2(1.0 + sinr_value);
}

RVec sinr_all(const std::vector<CVec> &a, const RVec &eta, const SECoefficients &c)
{
    RVec s(c.num_ues());
    for (int k = 0; k < c.num_ues(); ++k)
        s(k) = sinr(a[k], eta, c, k);
    return s;
}

std::vector<CVec> optimal_lsfd_all(const RVec &eta, const SECoefficients &c)
{
    std::vector<CVec> a(c.num_ues());
    for (int k = 0; k < c.num_ues(); ++k)
        a[k] = optimal_lsfd(eta, c, k);
    return a;
}

} // namespace wpcf
