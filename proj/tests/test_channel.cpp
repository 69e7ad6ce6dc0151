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
#include <algorithm>
#include <sstream>

#include "doctest.h"

#include "wpcf/channel.hpp"
#include "wpcf/config.hpp"
#include "wpcf/estimation.hpp"
#include "wpcf/montecarlo.hpp"

using namespace wpcf;

TEST_CASE("config defaults and validation")
{
    const ExperimentConfig full = full_scale_config();
    CHECK(full.network.num_aps == 36);
    CHECK(full.network.antennas_per_ap == 8);
    CHECK(full.network.num_ues == 20);
    CHECK(full.network.tau_c == 200);
    CHECK(full.network.tau_p == 5);
    CHECK(full.network.tau_d == 25);
    CHECK(full.network.tau_u == 170);
    CHECK(full.network.ap_power_w == doctest::Approx(10.0 / 36.0));
    CHECK(full.network.noise_power_w == doctest::Approx(std::pow(10.0, -12.6)));
    CHECK(full.network.pilot_power_w == doctest::Approx(1e-7));
    CHECK_NOTHROW(full.validate());

    const ExperimentConfig desk = desk_scale_config();
    CHECK(desk.network.num_aps == 9);
    CHECK(desk.network.antennas_per_ap == 2);
    CHECK(desk.network.num_ues == 4);
    CHECK(desk.num_setups == 20);
    CHECK_NOTHROW(desk.validate());

    SUBCASE("tau split must add up")
    {
        ExperimentConfig c = desk;
        c.network.tau_u = 169;
        try
        {
            c.validate();
            FAIL("accepted tau_p + tau_d + tau_u != tau_c");
        }
        catch (const ConfigError &e)
        {
            CHECK(e.field() == "tau_c");
        }
        c.network.tau_u = 171;
        CHECK_THROWS_AS(c.validate(), ConfigError);
    }
    SUBCASE("field level errors")
    {
        ExperimentConfig c = desk;
        c.network.num_aps = 0;
        CHECK_THROWS_AS(c.validate(), ConfigError);
        c = desk;
        c.bisection_lambda = 1.0;
        CHECK_THROWS_AS(c.validate(), ConfigError);
        c = desk;
        c.eh_model = "m3";
        CHECK_THROWS_AS(c.validate(), ConfigError);
    }
}

TEST_CASE("key-value config round trip")
{
    ExperimentConfig c = desk_scale_config();
    c.network.rng_seed = 99;
    c.num_setups = 3;
    c.estimator = Estimator::Ls;
    c.scheme = WptScheme::NonCoherent;
    c.eh_model = "m2";
    c.power = PowerControl::Fractional;
    const std::string text = to_key_values(c);
    const ExperimentConfig back = apply_key_values(parse_key_values(text), desk_scale_config());
    CHECK(to_key_values(back) == text);
    CHECK(back.network.rng_seed == 99);
    CHECK(back.estimator == Estimator::Ls);

    CHECK_THROWS_AS(apply_key_values(parse_key_values("no_such_key = 1\n"), c), ConfigError);
    CHECK_THROWS_AS(apply_key_values(parse_key_values("num_ues = four\n"), c), ConfigError);
    CHECK_THROWS_AS(parse_key_values("just a line\n"), ConfigError);
}

TEST_CASE("grid geometry")
{
    NetworkConfig cfg = full_scale_config().network;
    Rng rng = make_rng(3);
    const RMat aps = generate_ap_positions(cfg, rng);
    REQUIRE(aps.rows() == 36);
    auto axis = [&](int col) {
        std::vector<double> v(aps.col(col).data(), aps.col(col).data() + 36);
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end(), [](double a, double b) { return std::abs(a - b) < 1e-9; }), v.end());
        return v;
    };
    for (int col = 0; col < 2; ++col)
    {
        const auto v = axis(col);
        REQUIRE(v.size() == 6);
        for (std::size_t i = 1; i < v.size(); ++i)
            CHECK(v[i] - v[i - 1] == doctest::Approx(100.0 / 6.0).epsilon(1e-12));
    }

    Rng r1 = make_rng(5), r2 = make_rng(5);
    const Geometry g1 = generate_geometry(cfg, r1);
    const Geometry g2 = generate_geometry(cfg, r2);
    CHECK(g1.ue_positions == g2.ue_positions);
    CHECK(g1.distance == g2.distance);
    CHECK(g1.distance.minCoeff() >= cfg.height_diff_m);
}

TEST_CASE("zero planar distance gives the height offset")
{
    NetworkConfig cfg = desk_scale_config().network;
    cfg.num_aps = 1;
    cfg.num_ues = 1;
    cfg.area_side = 1e-9;
    Rng rng = make_rng(1);
    const Geometry g = generate_geometry(cfg, rng);
    CHECK(g.distance(0, 0) == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("large-scale statistics split and ULA steering")
{
    NetworkConfig cfg = full_scale_config().network;
    Rng rng = make_rng(11);
    const Geometry geo = generate_geometry(cfg, rng);
    const ChannelStatistics st = large_scale_stats(geo, cfg, rng);
    int los = 0, nlos = 0;
    for (int k = 0; k < st.num_ues; ++k)
        for (int l = 0; l < st.num_aps; ++l)
        {
            const LinkState &s = st.link[k][l];
            const CVec &g = st.gbar(k, l);
            const double N = st.antennas;
            CHECK(st.R(k, l).trace().real() == doctest::Approx(g.squaredNorm() + N * st.beta(k, l)).epsilon(1e-12));
            if (s.los)
            {
                ++los;
                CHECK(g.squaredNorm() == doctest::Approx(N * s.gain * s.kfactor / (1 + s.kfactor)).epsilon(1e-12));
                CHECK(st.beta(k, l) == doctest::Approx(s.gain / (1 + s.kfactor)).epsilon(1e-12));
                for (int n = 1; n < g.size(); ++n)
                    CHECK(std::abs(g(n)) == doctest::Approx(std::abs(g(0))).epsilon(1e-12));
            }
            else
            {
                ++nlos;
                CHECK(g.norm() == 0.0);
                CHECK((st.R(k, l) - st.beta(k, l) * CMat::Identity(st.antennas, st.antennas)).norm() == 0.0);
            }
        }
    CHECK(los > 0);
    CHECK(nlos > 0);
}

TEST_CASE("ULA response has unit modulus entries")
{
    const CVec a = ula_response(8, 0.7);
    for (int n = 0; n < 8; ++n)
        CHECK(std::abs(a(n)) == doctest::Approx(1.0));
}

namespace
{
ChannelStatistics two_by_two(double los_amp)
{
    auto los = make_link_table<CVec>(2, 2, CVec::Zero(2));
    RMat beta(2, 2);
    beta << 0.8, 0.3, 0.5, 1.1;
    los[0][0] = los_amp * ula_response(2, 0.4);
    los[1][1] = los_amp * ula_response(2, -0.9);
    return make_statistics(los, beta);
}
} // namespace

TEST_CASE("channel realizations: common phase, covariance convergence")
{
    const ChannelStatistics st = two_by_two(1.2);
    Rng rng = make_rng(21);
    const McChannelMoments mc = mc_channel_moments(st, 0, 0, 100000, rng);
    CHECK((mc.gg - st.R(0, 0)).norm() / st.R(0, 0).norm() < 0.02);
    CHECK(std::abs(mc.phase.mean) < 3.0 / std::sqrt(100000.0));

    auto los = make_link_table<CVec>(1, 1, ula_response(3, 0.2));
    const ChannelStatistics pure = make_statistics(los, RMat::Constant(1, 1, 1e-300));
    Rng r2 = make_rng(22);
    const ChannelRealization real = realize_channels(pure, r2);
    const CVec expect = std::polar(1.0, real.theta(0, 0)) * pure.gbar(0, 0);
    CHECK((real.g[0][0] - expect).norm() < 1e-14 * expect.norm());
}

TEST_CASE("pilot assignment")
{
    Rng rng = make_rng(4);
    const PilotAssignment orth = assign_pilots(5, 5, rng);
    for (int k = 0; k < 5; ++k)
        CHECK(orth.sharing_set[k] == std::vector<int>{k});

    const PilotAssignment pa = assign_pilots(20, 5, rng);
    for (int k = 0; k < 20; ++k)
    {
        CHECK(pa.sharing_set[k].size() == 4);
        for (int i : pa.sharing_set[k])
            CHECK(pa.sharing_set[i] == pa.sharing_set[k]);
    }
    const PilotAssignment uneven = assign_pilots(7, 3, rng);
    for (int k = 0; k < 7; ++k)
        CHECK((uneven.sharing_set[k].size() == 2 || uneven.sharing_set[k].size() == 3));
}

TEST_CASE("despreading")
{
    const int tau_p = 4;
    const CMat phi = pilot_book(tau_p);
    for (int a = 0; a < tau_p; ++a)
        for (int b = 0; b < tau_p; ++b)
            CHECK(std::abs(phi.col(a).dot(phi.col(b)) - (a == b ? double(tau_p) : 0.0)) < 1e-12);

    Rng rng = make_rng(8);
    const CVec g0 = complex_normal_vector(rng, 2), g1 = complex_normal_vector(rng, 2);
    const double rho = 0.7;
    // noiseless pilot block with UE 0 on pilot 1 and UE 1 on pilot 1 as well
    CMat Z = std::sqrt(rho) * (g0 * phi.col(1).transpose() + g1 * phi.col(1).transpose());
    const CVec z = despread(Z, phi.col(1));
    CHECK((z - std::sqrt(tau_p * rho) * (g0 + g1)).norm() < 1e-12);
    CMat Z1 = std::sqrt(rho) * g0 * phi.col(2).transpose();
    CHECK((despread(Z1, phi.col(2)) - std::sqrt(tau_p * rho) * g0).norm() < 1e-12);
    CHECK(ls_statistic(z) == z);
}

TEST_CASE("psi and LMMSE statistics")
{
    const ChannelStatistics st = two_by_two(0.0);
    PilotParams pp{.tau_p = 2, .pilot_power = 1.5, .noise_power = 0.4};
    const PilotAssignment orth = make_pilot_assignment({0, 1}, 2);
    const CMat psi = psi_matrix(st, orth, pp, 0, 1);
    const CMat expect = (2 * 1.5 * st.beta(0, 1) + 0.4) * CMat::Identity(2, 2);
    CHECK((psi - expect).norm() < 1e-14);

    const ChannelStatistics stl = two_by_two(0.9);
    const PilotAssignment shared = make_pilot_assignment({0, 0}, 1);
    PilotParams p1{.tau_p = 1, .pilot_power = 1.0, .noise_power = 0.5};
    for (int l = 0; l < 2; ++l)
        CHECK((psi_matrix(stl, shared, p1, 0, l) - psi_matrix(stl, shared, p1, 1, l)).norm() == 0.0);

    const EstimatorStatistics es = estimator_statistics(stl, shared, p1);
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
        {
            const CMat sum = es.rhat[k][l] + es.error_cov[k][l];
            CHECK((sum - stl.R(k, l)).norm() <= 1e-14 * stl.R(k, l).norm());
        }

    Rng rng = make_rng(31);
    const McEstimationMoments mc = mc_estimation_moments(stl, shared, p1, 0, 0, 100000, rng);
    CHECK((mc.zz - es.psi[0][0]).norm() / es.psi[0][0].norm() < 0.02);
    CHECK((mc.gg - es.rhat[0][0]).norm() / es.rhat[0][0].norm() < 0.02);
    CHECK(std::abs(mc.cross.mean) < 3.0 * mc.cross.std_error);
}

TEST_CASE("LMMSE estimate approaches the channel without noise")
{
    const ChannelStatistics st = two_by_two(0.0);
    PilotParams pp{.tau_p = 2, .pilot_power = 1.0, .noise_power = 1e-12};
    const PilotAssignment orth = make_pilot_assignment({0, 1}, 2);
    const EstimatorStatistics es = estimator_statistics(st, orth, pp);
    Rng rng = make_rng(2);
    const CVec g = complex_normal_vector(rng, 2, st.beta(0, 0));
    const CVec z = std::sqrt(pp.snr_gain()) * g;
    CHECK((lmmse_estimate(z, st, es, pp, 0, 0) - g).norm() < 1e-9 * g.norm());
}

TEST_CASE("degenerate statistics are reported")
{
    // pure LOS with vanishing scattering and no noise: Psi is rank one
    auto los = make_link_table<CVec>(1, 1, ula_response(2, 0.3));
    const ChannelStatistics st = make_statistics(los, RMat::Constant(1, 1, 1e-20));
    PilotParams pp{.tau_p = 1, .pilot_power = 1.0, .noise_power = 0.0};
    const PilotAssignment pa = make_pilot_assignment({0}, 1);
    CHECK_THROWS_AS(estimator_statistics(st, pa, pp), IllConditionedError);
}
