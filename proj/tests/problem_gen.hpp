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

#include <Eigen/QR>

#include "wpcf/conic_problem.hpp"
#include "wpcf/conic_solver.hpp"
#include "wpcf/random.hpp"

namespace wpcf::testing
{

// Random conic programs whose optimum is fixed in advance: pick x*, y* and a
// complementary pair (s*, z*) block by block, then choose h, b, c so that the
// KKT conditions hold at that point.
enum class Expect
{
    Optimal,
    PrimalInfeasible,
    DualInfeasible
};

struct GeneratedProblem
{
    std::string family;
    ConicProblem problem;
    Expect expect = Expect::Optimal;
    double optimum = 0.0;
};

inline RVec gaussian_vector(Rng &rng, int n)
{
    std::normal_distribution<double> nd;
    RVec v(n);
    for (int i = 0; i < n; ++i)
        v(i) = nd(rng);
    return v;
}

inline RMat gaussian_matrix(Rng &rng, int r, int c)
{
    std::normal_distribution<double> nd;
    RMat m(r, c);
    for (int j = 0; j < c; ++j)
        for (int i = 0; i < r; ++i)
            m(i, j) = nd(rng);
    return m;
}

inline std::vector<ConeBlock> random_cones(Rng &rng, const std::string &family)
{
    std::uniform_int_distribution<int> pick(2, 4);
    std::vector<ConeBlock> cones;
    const int nn = pick(rng) + 2;
    for (int i = 0; i < nn; ++i)
        cones.push_back({ConeKind::Nonnegative, 1});
    if (family == "soc" || family == "mixed")
        for (int i = 0, n = pick(rng) - 1; i < n; ++i)
            cones.push_back({ConeKind::SecondOrder, pick(rng) + 1});
    if (family == "sdp" || family == "mixed")
        for (int i = 0, n = pick(rng) - 2 + 1; i < n; ++i)
            cones.push_back({ConeKind::Psd, pick(rng)});
    return cones;
}

inline int total_size(const std::vector<ConeBlock> &cones)
{
    int m = 0;
    for (const auto &c : cones)
        m += c.size();
    return m;
}

// Complementary pair on one block; one side may be interior, the other zero.
inline void complementary_pair(Rng &rng, const ConeBlock &b, RVec &s, RVec &z)
{
    const double u01 = uniform(rng);
    switch (b.kind)
    {
    case ConeKind::Nonnegative:
        s.resize(1);
        z.resize(1);
        if (u01 < 0.5)
            s << uniform(rng, 0.5, 2.0), z << 0.0;
        else
            s << 0.0, z << uniform(rng, 0.5, 2.0);
        return;
    case ConeKind::SecondOrder:
    {
        const int d = b.dim;
        s = RVec::Zero(d);
        z = RVec::Zero(d);
        RVec u = gaussian_vector(rng, d - 1);
        u.normalize();
        const double a = uniform(rng, 0.5, 2.0);
        const double c = uniform(rng, 0.5, 2.0);
        if (u01 < 0.6)
        {
            s(0) = a;
            s.tail(d - 1) = a * u;
            z(0) = c;
            z.tail(d - 1) = -c * u;
        }
        else if (u01 < 0.8)
        {
            s(0) = a;
            s.tail(d - 1) = 0.5 * a * u;
        }
        else
        {
            z(0) = c;
            z.tail(d - 1) = 0.5 * c * u;
        }
        return;
    }
    case ConeKind::Psd:
    {
        const int n = b.dim;
        const RMat Q = Eigen::HouseholderQR<RMat>(gaussian_matrix(rng, n, n)).householderQ();
        std::uniform_int_distribution<int> rk(0, n);
        const int r = rk(rng);
        RVec ls = RVec::Zero(n), lz = RVec::Zero(n);
        for (int i = 0; i < n; ++i)
            (i < r ? ls(i) : lz(i)) = uniform(rng, 0.5, 2.0);
        s = svec(Q * ls.asDiagonal() * Q.transpose());
        z = svec(Q * lz.asDiagonal() * Q.transpose());
        return;
    }
    }
}

// An interior point of the cone K (used for certificates).
inline RVec interior_point(Rng &rng, const std::vector<ConeBlock> &cones)
{
    RVec v(total_size(cones));
    int off = 0;
    for (const auto &b : cones)
    {
        switch (b.kind)
        {
        case ConeKind::Nonnegative:
            v(off) = uniform(rng, 0.5, 2.0);
            break;
        case ConeKind::SecondOrder:
        {
            RVec u = gaussian_vector(rng, b.dim - 1);
            u *= uniform(rng, 0.1, 0.9) / u.norm();
            v(off) = 1.0;
            v.segment(off + 1, b.dim - 1) = u;
            v.segment(off, b.dim) *= uniform(rng, 0.5, 2.0);
            break;
        }
        case ConeKind::Psd:
        {
            const RMat M = gaussian_matrix(rng, b.dim, b.dim);
            v.segment(off, b.size()) = svec(M * M.transpose() + RMat::Identity(b.dim, b.dim));
            break;
        }
        }
        off += b.size();
    }
    return v;
}

inline ConicProblem assemble(const RMat &G, const RVec &h, const RMat &A, const RVec &b, const RVec &c,
                             const std::vector<ConeBlock> &cones)
{
    ConicProblem p;
    p.num_vars = static_cast<int>(c.size());
    p.c = c;
    p.G = G.sparseView();
    p.h = h;
    p.A = A.sparseView();
    p.b = b;
    p.cones = cones;
    p.validate();
    return p;
}

inline GeneratedProblem generate_optimal(Rng &rng, const std::string &family)
{
    const auto cones = random_cones(rng, family);
    const int m = total_size(cones);
    std::uniform_int_distribution<int> nv(2, std::max(2, m - 1));
    const int n = nv(rng);
    std::uniform_int_distribution<int> ne(0, std::min(2, n - 1));
    const int pe = ne(rng);

    RVec s(m), z(m);
    int off = 0;
    for (const auto &blk : cones)
    {
        RVec sb, zb;
        complementary_pair(rng, blk, sb, zb);
        s.segment(off, blk.size()) = sb;
        z.segment(off, blk.size()) = zb;
        off += blk.size();
    }
    const RMat G = gaussian_matrix(rng, m, n);
    const RMat A = gaussian_matrix(rng, pe, n);
    const RVec x = gaussian_vector(rng, n);
    const RVec y = gaussian_vector(rng, pe);
    const RVec h = G * x + s;
    const RVec b = A * x;
    const RVec c = -(G.transpose() * z + A.transpose() * y);

    GeneratedProblem g;
    g.family = family;
    g.problem = assemble(G, h, A, b, c, cones);
    g.expect = Expect::Optimal;
    g.optimum = c.dot(x);
    return g;
}

// Farkas system: z in int K with G^T z = 0 and h^T z = -1.
inline GeneratedProblem generate_primal_infeasible(Rng &rng, const std::string &family)
{
    const auto cones = random_cones(rng, family);
    const int m = total_size(cones);
    const int n = std::max(2, m / 2);
    const RVec z = interior_point(rng, cones);
    RMat G = gaussian_matrix(rng, m, n);
    G -= z * (z.transpose() * G) / z.squaredNorm();
    RVec h = gaussian_vector(rng, m);
    h -= ((h.dot(z) + 1.0) / z.squaredNorm()) * z;
    GeneratedProblem g;
    g.family = family;
    g.problem = assemble(G, h, RMat(0, n), RVec(0), gaussian_vector(rng, n), cones);
    g.expect = Expect::PrimalInfeasible;
    return g;
}

// Strictly feasible primal with a recession direction d: G d in -int K, c^T d = -1.
inline GeneratedProblem generate_dual_infeasible(Rng &rng, const std::string &family)
{
    const auto cones = random_cones(rng, family);
    const int m = total_size(cones);
    const int n = std::max(2, m / 2);
    const RVec d = gaussian_vector(rng, n);
    const RVec sd = interior_point(rng, cones);
    RMat G = gaussian_matrix(rng, m, n);
    G -= (G * d + sd) * d.transpose() / d.squaredNorm();
    const RVec x0 = gaussian_vector(rng, n);
    const RVec h = G * x0 + interior_point(rng, cones);
    RVec c = gaussian_vector(rng, n);
    c -= ((c.dot(d) + 1.0) / d.squaredNorm()) * d;
    GeneratedProblem g;
    g.family = family;
    g.problem = assemble(G, h, RMat(0, n), RVec(0), c, cones);
    g.expect = Expect::DualInfeasible;
    return g;
}

inline bool objective_matches(const GeneratedProblem &g, const ConicSolution &sol, double rel = 1e-6)
{
    return sol.status == ConicStatus::Optimal &&
           std::abs(sol.primal_objective - g.optimum) <= rel * std::max(1.0, std::abs(g.optimum));
}

inline ConicStatus expected_status(Expect e)
{
    switch (e)
    {
    case Expect::Optimal:
        return ConicStatus::Optimal;
    case Expect::PrimalInfeasible:
        return ConicStatus::PrimalInfeasible;
    case Expect::DualInfeasible:
        return ConicStatus::DualInfeasible;
    }
    return ConicStatus::NumericalFailure;
}

} // namespace wpcf::testing
