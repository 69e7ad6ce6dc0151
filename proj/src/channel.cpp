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

#include "wpcf/channel.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

namespace wpcf
{

RMat generate_ap_positions(const NetworkConfig &cfg, Rng &rng)
{
    const int L = cfg.num_aps;
    RMat pos(L, 2);
    if (cfg.ap_placement == ApPlacement::Random)
    {
        for (int l = 0; l < L; ++l)
        {
            pos(l, 0) = uniform(rng, 0.0, cfg.area_side);
            pos(l, 1) = uniform(rng, 0.0, cfg.area_side);
        }
        return pos;
    }
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(L))));
    const int rows = (L + cols - 1) / cols;
    const double dx = cfg.area_side / cols;
    const double dy = cfg.area_side / rows;
    for (int l = 0; l < L; ++l)
    {
        pos(l, 0) = (l % cols + 0.5) * dx;
        pos(l, 1) = (l / cols + 0.5) * dy;
    }
    return pos;
}

Geometry drop_ues(const NetworkConfig &cfg, const RMat &ap_positions, Rng &rng)
{
    const Eigen::Index L = ap_positions.rows();
    const int K = cfg.num_ues;
    Geometry geo;
    geo.ap_positions = ap_positions;
    geo.ue_positions.resize(K, 2);
    for (int k = 0; k < K; ++k)
    {
        geo.ue_positions(k, 0) = uniform(rng, 0.0, cfg.area_side);
        geo.ue_positions(k, 1) = uniform(rng, 0.0, cfg.area_side);
    }
    geo.distance.resize(K, L);
    geo.planar_offset_x.resize(K, L);
    geo.planar_offset_y.resize(K, L);
    for (int k = 0; k < K; ++k)
        for (Eigen::Index l = 0; l < L; ++l)
        {
            const double ox = geo.ue_positions(k, 0) - ap_positions(l, 0);
            const double oy = geo.ue_positions(k, 1) - ap_positions(l, 1);
            geo.planar_offset_x(k, l) = ox;
            geo.planar_offset_y(k, l) = oy;
            geo.distance(k, l) = std::sqrt(ox * ox + oy * oy + cfg.height_diff_m * cfg.height_diff_m);
        }
    return geo;
}

Geometry generate_geometry(const NetworkConfig &cfg, Rng &rng)
{
    const RMat aps = generate_ap_positions(cfg, rng);
    return drop_ues(cfg, aps, rng);
}

double InhTable::los_probability(double d) const
{
    if (d <= los_certain_m)
        return 1.0;
    if (d < los_floor_m)
        return std::exp(-(d - los_certain_m) / los_decay_m);
    return los_floor_probability;
}

double InhTable::path_loss_db(double d, double carrier_hz, bool los) const
{
    const double fc_ghz = carrier_hz / 1e9;
    const auto eval = [&](const PathLossRow &r) {
        return r.log_coef * std::log10(d) + r.intercept + r.freq_coef * std::log10(fc_ghz);
    };
    const double pl_los = eval(this->los);
    if (los)
        return pl_los;
    // NLOS is never better than LOS at the same distance.
    return std::max(eval(nlos), pl_los);
}

CVec ula_response(int antennas, double broadside_angle)
{
    CVec a(antennas);
    const double s = std::sin(broadside_angle);
    for (int n = 0; n < antennas; ++n)
        a(n) = std::polar(1.0, std::numbers::pi * n * s);
    return a;
}

ChannelStatistics make_statistics(const LinkTable<CVec> &los_vector, const RMat &beta)
{
    ChannelStatistics st;
    st.num_ues = static_cast<int>(beta.rows());
    st.num_aps = static_cast<int>(beta.cols());
    st.antennas = static_cast<int>(los_vector.at(0).at(0).size());
    st.los_vector = los_vector;
    st.beta = beta;
    st.correlation = make_link_table<CMat>(st.num_ues, st.num_aps);
    st.link = make_link_table<LinkState>(st.num_ues, st.num_aps);
    const CMat I = CMat::Identity(st.antennas, st.antennas);
    for (int k = 0; k < st.num_ues; ++k)
        for (int l = 0; l < st.num_aps; ++l)
        {
            const CVec &g = los_vector[k][l];
            if (g.size() != st.antennas)
                throw ContractViolation("make_statistics: inconsistent antenna count");
            if (!(beta(k, l) > 0.0))
                throw ContractViolation("make_statistics: beta must be > 0");
            st.correlation[k][l] = g * g.adjoint() + beta(k, l) * I;
            const double los_power = g.squaredNorm();
            auto &ls = st.link[k][l];
            ls.los = los_power > 0.0;
            ls.gain = los_power / st.antennas + beta(k, l);
            ls.kfactor = los_power / (st.antennas * beta(k, l));
        }
    return st;
}

ChannelStatistics large_scale_stats(const Geometry &geo, const NetworkConfig &cfg, Rng &rng, const InhTable &table)
{
    const int K = static_cast<int>(geo.num_ues());
    const int L = static_cast<int>(geo.num_aps());
    const int N = cfg.antennas_per_ap;
    std::normal_distribution<double> nd(0.0, 1.0);

    LinkTable<CVec> los = make_link_table<CVec>(K, L, CVec::Zero(N));
    RMat beta(K, L);
    auto states = make_link_table<LinkState>(K, L);
    for (int k = 0; k < K; ++k)
        for (int l = 0; l < L; ++l)
        {
            const double d = geo.distance(k, l);
            LinkState s;
            s.los = uniform(rng) < table.los_probability(d);
            s.path_loss_db = table.path_loss_db(d, cfg.carrier_freq_hz, s.los);
            s.shadowing_db = nd(rng) * (s.los ? table.los.shadow_std_db : table.nlos.shadow_std_db);
            s.gain = std::pow(10.0, -(s.path_loss_db + s.shadowing_db) / 10.0);
            if (s.los)
            {
                s.kfactor = db_to_linear(table.kfactor_mean_db + table.kfactor_std_db * nd(rng));
                const double los_gain = s.gain * s.kfactor / (1.0 + s.kfactor);
                // Array along the x axis; broadside is the y direction.
                const double ox = geo.planar_offset_x(k, l);
                const double oy = geo.planar_offset_y(k, l);
                const double angle = (ox == 0.0 && oy == 0.0) ? 0.0 : std::atan2(ox, oy);
                los[k][l] = std::sqrt(los_gain) * ula_response(N, angle);
                beta(k, l) = s.gain / (1.0 + s.kfactor);
            }
            else
            {
                s.kfactor = 0.0;
                beta(k, l) = s.gain;
            }
            states[k][l] = s;
        }
    ChannelStatistics st = make_statistics(los, beta);
    st.link = std::move(states);
    return st;
}

ChannelRealization realize_channels(const ChannelStatistics &st, Rng &rng)
{
    ChannelRealization r;
    r.g = make_link_table<CVec>(st.num_ues, st.num_aps);
    r.theta.resize(st.num_ues, st.num_aps);
    for (int k = 0; k < st.num_ues; ++k)
        for (int l = 0; l < st.num_aps; ++l)
        {
            const double th = uniform(rng, 0.0, 2.0 * std::numbers::pi);
            r.theta(k, l) = th;
            r.g[k][l] = std::polar(1.0, th) * st.los_vector[k][l] +
                        complex_normal_vector(rng, st.antennas, st.beta(k, l));
        }
    return r;
}

void write_geometry_csv(std::ostream &out, const Geometry &geo)
{
    out << "kind,index,x,y\n";
    out.precision(10);
    for (Eigen::Index l = 0; l < geo.ap_positions.rows(); ++l)
        out << "ap," << l << ',' << geo.ap_positions(l, 0) << ',' << geo.ap_positions(l, 1) << '\n';
    for (Eigen::Index k = 0; k < geo.ue_positions.rows(); ++k)
        out << "ue," << k << ',' << geo.ue_positions(k, 0) << ',' << geo.ue_positions(k, 1) << '\n';
}

void write_statistics_csv(std::ostream &out, const ChannelStatistics &st)
{
    out << "ue,ap,los,path_loss_db,shadowing_db,kfactor,gain,beta,los_power\n";
    out.precision(10);
    for (int k = 0; k < st.num_ues; ++k)
        for (int l = 0; l < st.num_aps; ++l)
        {
            const auto &s = st.link[k][l];
            out << k << ',' << l << ',' << (s.los ? 1 : 0) << ',' << s.path_loss_db << ',' << s.shadowing_db << ','
                << s.kfactor << ',' << s.gain << ',' << st.beta(k, l) << ',' << st.los_vector[k][l].squaredNorm()
                << '\n';
        }
}

} // namespace wpcf
