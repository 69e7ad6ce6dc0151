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

#include "wpcf/energy.hpp"

#include <algorithm>
#include <cctype>
#include <limits>

#include <Eigen/Eigenvalues>

namespace wpcf
{

EHModel eh_from_curve_fit(const std::string &name, double a, double b, double c)
{
    return {name, 1e3 * (a * c - b), 1e6 * c, 1e3 * c * c};
}

EHModel eh_m1() { return eh_from_curve_fit("m1", 0.3929, 0.01675, 0.04401); }

EHModel eh_m2() { return eh_from_curve_fit("m2", 2.463, 1.635, 0.826); }

EHModel eh_linear()
{
    EHModel m = eh_m1();
    m.name = "l";
    m.B = 0.0;
    return m;
}

std::vector<EHModel> eh_model_presets() { return {eh_m1(), eh_m2(), eh_linear()}; }

EHModel eh_model_by_name(const std::string &name)
{
    std::string s = name;
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    if (s == "m1")
        return eh_m1();
    if (s == "m2")
        return eh_m2();
    if (s == "l" || s == "linear")
        return eh_linear();
    throw std::invalid_argument("unknown energy-harvesting model '" + name + "'");
}

double harvested_energy(double input_power, const EHModel &model, double tau_d)
{
    return tau_d * model.A * input_power / (model.B * input_power + model.C);
}

double required_input_power(double energy, const EHModel &model, double tau_d)
{
    // E = tau_d A I / (B I + C)  =>  I = C E / (tau_d A - B E)
    const double den = tau_d * model.A - model.B * energy;
    if (den <= 0.0)
        return std::numeric_limits<double>::infinity();
    return model.C * energy / den;
}

double ap_tx_power(const RMat &p, const RMat &norms, int l)
{
    double total = 0.0;
    for (Eigen::Index k = 0; k < p.rows(); ++k)
    {
        if (p(k, l) < 0.0)
            throw ContractViolation("ap_tx_power: negative power coefficient");
        total += p(k, l) * norms(k, l);
    }
    return total;
}

double ap_tx_power(const std::vector<RMat> &P, const RMat &norms, int l)
{
    RMat p(static_cast<Eigen::Index>(P.size()), norms.cols());
    for (std::size_t k = 0; k < P.size(); ++k)
        p.row(static_cast<Eigen::Index>(k)) = P[k].diagonal().transpose();
    return ap_tx_power(p, norms, l);
}

void check_wpt_matrix(const RMat &P)
{
    if (P.rows() != P.cols())
        throw ContractViolation("WPT matrix must be square");
    const double scale = std::max(P.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    const double tol = 1e-9 * scale;
    if ((P - P.transpose()).cwiseAbs().maxCoeff() > tol)
        throw ContractViolation("WPT matrix must be symmetric");
    if (P.minCoeff() < -tol)
        throw ContractViolation("WPT matrix must have nonnegative entries");
    if (P.rows() > 1)
    {
        Eigen::SelfAdjointEigenSolver<RMat> eig(0.5 * (P + P.transpose()), Eigen::EigenvaluesOnly);
        if (eig.eigenvalues().minCoeff() < -tol * P.rows())
            throw ContractViolation("WPT matrix must be positive semidefinite");
    }
}

RMat coherent_matrix(const RVec &p_row)
{
    if (p_row.minCoeff() < 0.0)
        throw ContractViolation("coherent_matrix: negative power coefficient");
    const RVec r = p_row.cwiseSqrt();
    return r * r.transpose();
}

std::vector<RMat> coherent_matrices(const RMat &p)
{
    std::vector<RMat> P;
    P.reserve(p.rows());
    for (Eigen::Index k = 0; k < p.rows(); ++k)
        P.push_back(coherent_matrix(p.row(k).transpose()));
    return P;
}

RMat coherent_weight(const MrMoments &m, int k, int i)
{
    const int L = m.num_aps();
    RMat W = RMat::Zero(L, L);
    // Precoder of UE i at AP l is v_il, received through g_kl.
    const RVec &s = m.second(i, k);
    for (int l = 0; l < L; ++l)
        W(l, l) = s(l);
    if (m.shares(i, k))
    {
        const CVec &f = m.first(i, k);
        for (int l = 0; l < L; ++l)
            for (int lp = 0; lp < L; ++lp)
                if (l != lp)
                    W(l, lp) = (f(l) * std::conj(f(lp))).real();
    }
    return W;
}

double input_power_coherent(const std::vector<RMat> &P, const MrMoments &m, int k)
{
    if (static_cast<int>(P.size()) != m.num_ues())
        throw ContractViolation("input_power_coherent: one matrix per UE required");
    double total = 0.0;
    for (int i = 0; i < m.num_ues(); ++i)
    {
        check_wpt_matrix(P[i]);
        total += (coherent_weight(m, k, i).array() * P[i].array()).sum();
    }
    return total;
}

double input_power_noncoherent(const RMat &p, const MrMoments &m, int k)
{
    if (p.minCoeff() < 0.0)
        throw ContractViolation("input_power_noncoherent: negative power coefficient");
    double total = 0.0;
    for (int i = 0; i < m.num_ues(); ++i)
        total += p.row(i).dot(m.second(i, k).transpose());
    return total;
}

} // namespace wpcf
