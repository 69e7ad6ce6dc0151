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

#include <array>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wpcf/channel.hpp"
#include "wpcf/estimation.hpp"
#include "wpcf/types.hpp"

namespace wpcf::testing
{

using Index4 = std::array<int, 4>;

// One fixture from tests/data/closed_form_fixtures.csv: the channel inputs and
// the frozen reference values keyed by field name and index.
struct OracleFixture
{
    int L = 0, K = 0, N = 0;
    ChannelStatistics stats;
    PilotAssignment pilots;
    PilotParams pp;
    RMat p; // K x L
    std::map<std::string, std::map<Index4, cdouble>> ref;

    cdouble at(const std::string &field, int i0 = 0, int i1 = 0, int i2 = 0, int i3 = 0) const
    {
        auto f = ref.find(field);
        if (f == ref.end())
            throw std::out_of_range("fixture field " + field);
        auto v = f->second.find({i0, i1, i2, i3});
        if (v == f->second.end())
            throw std::out_of_range("fixture index in " + field);
        return v->second;
    }
};

inline std::vector<OracleFixture> load_oracle_fixtures(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path);
    std::string line;
    std::getline(in, line);
    std::map<int, std::map<std::string, std::map<Index4, cdouble>>> raw;
    while (std::getline(in, line))
    {
        std::istringstream ss(line);
        std::string tok;
        std::vector<std::string> cols;
        while (std::getline(ss, tok, ','))
            cols.push_back(tok);
        if (cols.size() != 8)
            continue;
        const Index4 idx{std::stoi(cols[2]), std::stoi(cols[3]), std::stoi(cols[4]), std::stoi(cols[5])};
        raw[std::stoi(cols[0])][cols[1]][idx] = {std::stod(cols[6]), std::stod(cols[7])};
    }

    std::vector<OracleFixture> out;
    for (auto &[id, fields] : raw)
    {
        OracleFixture f;
        f.ref = std::move(fields);
        f.L = static_cast<int>(f.at("L").real());
        f.K = static_cast<int>(f.at("K").real());
        f.N = static_cast<int>(f.at("N").real());
        const int tau_p = static_cast<int>(f.at("tau_p").real());
        auto los = make_link_table<CVec>(f.K, f.L, CVec::Zero(f.N));
        RMat beta(f.K, f.L);
        f.p.resize(f.K, f.L);
        for (int k = 0; k < f.K; ++k)
            for (int l = 0; l < f.L; ++l)
            {
                for (int n = 0; n < f.N; ++n)
                    los[k][l](n) = f.at("gbar", k, l, n);
                beta(k, l) = f.at("beta", k, l).real();
                f.p(k, l) = f.at("p", k, l).real();
            }
        f.stats = make_statistics(los, beta);
        std::vector<int> idx(f.K);
        for (int k = 0; k < f.K; ++k)
            idx[k] = static_cast<int>(f.at("pilot", k).real());
        f.pilots = make_pilot_assignment(idx, tau_p);
        f.pp.tau_p = tau_p;
        f.pp.pilot_power = f.at("rho_p").real();
        f.pp.noise_power = f.at("sigma2").real();
        out.push_back(std::move(f));
    }
    return out;
}

inline std::string oracle_fixture_path() { return std::string(WPCF_TEST_DATA_DIR) + "/closed_form_fixtures.csv"; }

} // namespace wpcf::testing
