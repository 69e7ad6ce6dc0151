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

#include <cmath>

#include "doctest.h"

#include "fixture_io.hpp"
#include "wpcf/energy.hpp"
#include "wpcf/montecarlo.hpp"
#include "wpcf/spectral_efficiency.hpp"

using namespace wpcf;

namespace
{
const testing::OracleFixture &fixture(int i)
{
    static const auto f = testing::load_oracle_fixtures(testing::oracle_fixture_path());
    return f.at(i);
}

CMat random_psd(Rng &rng, int n)
{
    CMat M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            M(i, j) = complex_normal(rng);
    return M * M.adjoint() / n;
}

CMat random_matrix(Rng &rng, int n)
{
    CMat M(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            M(i, j) = complex_normal(rng);
    return M;
}
} // namespace

TEST_CASE("running moments")
{
    RunningMoments m;
    for (double x : {1.0, 2.0, 3.0, 4.0})
        m.add(x);
    const McEstimate e = m.estimate();
    CHECK(e.mean == doctest::Approx(2.5));
    CHECK(e.std_error == doctest::Approx(std::sqrt(1.25 / 4.0)));
    CHECK(mc_agrees(1.01, 0.0, 1.0));
    CHECK_FALSE(mc_agrees(1.05, 0.001, 1.0));
    CHECK(mc_agrees(1.05, 0.02, 1.0));
}

TEST_CASE("zero power gives exactly zero input power")
{
    const auto &f = fixture(0);
    Rng rng = make_rng(1);
    for (WptScheme s : {WptScheme::Coherent, WptScheme::NonCoherent})
    {
        const McEstimate e = mc_input_power(f.stats, f.pilots, f.pp, Estimator::Lmmse, s, RMat::Zero(f.K, f.L), 0,
                                            1000, rng);
        CHECK(e.mean == 0.0);
        CHECK(e.std_error == 0.0);
    }
}

TEST_CASE("input power closed form against sampling")
{
    for (int fi : {0, 2})
    {
        const auto &f = fixture(fi);
        for (Estimator est : {Estimator::Lmmse, Estimator::Ls})
        {
            const MrMoments m = mr_moments(f.stats, f.pilots, f.pp, est);
            Rng rng = make_rng(40, fi, static_cast<int>(est));
            for (int k = 0; k < f.K; ++k)
            {
                const McEstimate c =
                    mc_input_power(f.stats, f.pilots, f.pp, est, WptScheme::Coherent, f.p, k, 100000, rng);
                const McEstimate n =
                    mc_input_power(f.stats, f.pilots, f.pp, est, WptScheme::NonCoherent, f.p, k, 100000, rng);
                CHECK(mc_agrees(c.mean, c.std_error, input_power_coherent(coherent_matrices(f.p), m, k), 0.0, 3.0));
                CHECK(mc_agrees(n.mean, n.std_error, input_power_noncoherent(f.p, m, k), 0.0, 3.0));
                CHECK(c.mean >= n.mean - 3.0 * (c.std_error + n.std_error));
            }
        }
    }
}

TEST_CASE("SE coefficient sampling")
{
    SUBCASE("noise term")
    {
        const auto &f = fixture(1);
        const EstimatorStatistics es = estimator_statistics(f.stats, f.pilots, f.pp);
        Rng rng = make_rng(41);
        const McSECoefficients mc = mc_se_coefficients(f.stats, f.pilots, f.pp, Estimator::Lmmse, 0, 100000, rng);
        for (int l = 0; l < f.L; ++l)
            CHECK(mc_agrees(mc.d(l), mc.d_se(l), f.pp.noise_power * es.rhat[0][l].trace().real()));
    }
    SUBCASE("orthogonal pilots decouple APs")
    {
        const auto &f = fixture(2);
        REQUIRE_FALSE(f.pilots.shares(0, 1));
        Rng rng = make_rng(42);
        const McSECoefficients mc = mc_se_coefficients(f.stats, f.pilots, f.pp, Estimator::Ls, 0, 100000, rng);
        CHECK(std::abs(mc.C[1](0, 1)) < 3.0 * mc.C_se[1](0, 1));
        CHECK(std::abs(mc.C[1](1, 0)) < 3.0 * mc.C_se[1](1, 0));
    }
    SUBCASE("full match")
    {
        const auto &f = fixture(0);
        const SECoefficients c = se_coefficients(mr_moments(f.stats, f.pilots, f.pp, Estimator::Lmmse), f.pp.noise_power);
        Rng rng = make_rng(43);
        const McSECoefficients mc = mc_se_coefficients(f.stats, f.pilots, f.pp, Estimator::Lmmse, 1, 100000, rng);
        for (int l = 0; l < f.L; ++l)
        {
            CHECK(mc_agrees(mc.b(l), mc.b_se(l), c.b[1](l)));
            CHECK(mc_agrees(mc.d(l), mc.d_se(l), c.d[1](l)));
            for (int i = 0; i < f.K; ++i)
                for (int lp = 0; lp < f.L; ++lp)
                    CHECK(mc_agrees(mc.C[i](l, lp), mc.C_se[i](l, lp), c.C[1][i](l, lp)));
        }
    }
}

TEST_CASE("quadratic-form identity")
{
    Rng rng = make_rng(50);
    const CMat I2 = CMat::Identity(2, 2);
    const IdentityCheck id = verify_lemma5(I2, I2, 100000, rng);
    CHECK(id.formula == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(id.passed);

    const IdentityCheck zero = verify_lemma5(CMat::Zero(3, 3), random_matrix(rng, 3), 1000, rng);
    CHECK(zero.formula == 0.0);
    CHECK(zero.mc.mean == 0.0);

    const IdentityCheck r = verify_lemma5(random_psd(rng, 3), random_matrix(rng, 3), 100000, rng);
    CHECK(r.passed);
}

TEST_CASE("correlated bilinear-form identity")
{
    Rng rng = make_rng(51);
    CVec xbar(2);
    xbar << cdouble(0.6, -0.2), cdouble(0.1, 0.9);
    const CMat B = random_matrix(rng, 2);

    SUBCASE("independent vectors")
    {
        const CMat Cy = random_psd(rng, 2);
        const Lemma6Check c = verify_lemma6(xbar, 0.7, 0.0, B, Cy, 100000, rng);
        CHECK(std::abs(c.first.formula) == 0.0);
        const CMat Cx = xbar * xbar.adjoint() + 0.49 * CMat::Identity(2, 2);
        CHECK(c.second.formula == doctest::Approx((B * Cx * B.adjoint() * Cy).trace().real()).epsilon(1e-14));
        CHECK(c.first.passed);
        CHECK(c.second.passed);
    }
    SUBCASE("deterministic magnitude")
    {
        const double alpha = 1.3;
        const CMat Cy = alpha * alpha * xbar * xbar.adjoint();
        const Lemma6Check c = verify_lemma6(xbar, 0.0, alpha, CMat::Identity(2, 2), Cy, 1000, rng);
        const double n2 = xbar.squaredNorm();
        CHECK(c.first.formula.real() == doctest::Approx(alpha * n2).epsilon(1e-14));
        CHECK(c.second.formula == doctest::Approx(alpha * alpha * n2 * n2).epsilon(1e-14));
        CHECK(c.second.mc.mean == doctest::Approx(alpha * alpha * n2 * n2).epsilon(1e-6));
    }
    SUBCASE("random instance")
    {
        const double alpha = 0.8, sx = 0.5;
        const CMat Cx = xbar * xbar.adjoint() + sx * sx * CMat::Identity(2, 2);
        const CMat Cy = alpha * alpha * Cx + random_psd(rng, 2);
        const Lemma6Check c = verify_lemma6(xbar, sx, alpha, B, Cy, 100000, rng);
        CHECK(c.first.passed);
        CHECK(c.second.passed);
    }
}

TEST_CASE("standard error shrinks with sample count")
{
    const auto &f = fixture(0);
    Rng r1 = make_rng(60), r2 = make_rng(61);
    const McEstimate a = mc_input_power(f.stats, f.pilots, f.pp, Estimator::Lmmse, WptScheme::Coherent, f.p, 0, 20000, r1);
    const McEstimate b = mc_input_power(f.stats, f.pilots, f.pp, Estimator::Lmmse, WptScheme::Coherent, f.p, 0, 40000, r2);
    CHECK(a.std_error / b.std_error == doctest::Approx(std::sqrt(2.0)).epsilon(0.1));
}
