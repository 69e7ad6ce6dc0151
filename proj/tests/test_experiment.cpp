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

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "doctest.h"

#include "wpcf/experiment.hpp"

using namespace wpcf;
namespace fs = std::filesystem;

namespace
{
ExperimentConfig tiny(PowerControl power = PowerControl::MaxMinFair)
{
    ExperimentConfig c = desk_scale_config();
    c.num_setups = 3;
    c.scheme = WptScheme::NonCoherent;
    c.power = power;
    c.network.rng_seed = 77;
    return c;
}

std::string slurp(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch_dir(const std::string &name)
{
    const fs::path d = fs::temp_directory_path() / ("wpcf_test_" + name);
    fs::remove_all(d);
    return d;
}

std::size_t line_count(const std::string &s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }
} // namespace

TEST_CASE("empirical CDF")
{
    const auto flat = emit_cdf(std::vector<double>(10, 2.5), default_quantiles());
    REQUIRE(flat.size() == default_quantiles().size());
    for (const auto &p : flat)
        CHECK(p.value == 2.5);

    const auto c = emit_cdf({5, 1, 4, 2, 3, 6, 8, 7, 10, 9, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20}, {0.05, 0.10, 0.5, 1.0});
    CHECK(c[0].value == 1);
    CHECK(c[1].value == 2);
    CHECK(c[2].value == 10);
    CHECK(c[3].value == 20);

    CHECK_THROWS_AS(emit_cdf({}, {0.5}), ContractViolation);
    CHECK_THROWS_AS(emit_cdf({1.0}, {0.0}), ContractViolation);
}

TEST_CASE("setups are reproducible and independent of worker count")
{
    const ExperimentConfig c = tiny();
    const RMat aps = experiment_ap_positions(c.network);
    const SetupData a = make_setup(c.network, aps, 2);
    const SetupData b = make_setup(c.network, aps, 2);
    CHECK(a.geometry.ue_positions == b.geometry.ue_positions);
    CHECK(a.stats.beta == b.stats.beta);
    CHECK(a.pilots.pilot_index == b.pilots.pilot_index);
    const SetupData other = make_setup(c.network, aps, 1);
    CHECK(other.geometry.ue_positions != a.geometry.ue_positions);

    const ExperimentResult r1 = run_experiment(c, 1);
    const ExperimentResult r2 = run_experiment(c, 3);
    std::ostringstream o1, o2;
    write_per_ue_csv(o1, r1.cells);
    write_per_ue_csv(o2, r2.cells);
    CHECK(o1.str() == o2.str());
}

TEST_CASE("experiment output is byte-identical on re-run and matches the schema")
{
    const ExperimentConfig c = tiny();
    const fs::path d1 = scratch_dir("run1"), d2 = scratch_dir("run2");
    write_experiment(run_experiment(c), d1.string());
    write_experiment(run_experiment(c), d2.string());
    for (const char *f : {"per_ue_se.csv", "min_se.csv", "downlink_power.csv", "uplink_power.csv", "convergence.csv",
                          "se_cdf.csv", "config.txt"})
    {
        INFO(f);
        REQUIRE(fs::exists(d1 / f));
        CHECK(slurp(d1 / f) == slurp(d2 / f));
    }

    const std::size_t K = c.network.num_ues, L = c.network.num_aps, S = c.num_setups;
    CHECK(line_count(slurp(d1 / "per_ue_se.csv")) == 1 + K * S);
    CHECK(line_count(slurp(d1 / "min_se.csv")) == 1 + S);
    CHECK(line_count(slurp(d1 / "downlink_power.csv")) == 1 + K * L * S);
    CHECK(line_count(slurp(d1 / "uplink_power.csv")) == 1 + K * S);
    CHECK(line_count(slurp(d1 / "se_cdf.csv")) == 1 + default_quantiles().size());

    const ExperimentConfig back = load_experiment_config((d1 / "config.txt").string());
    CHECK(to_key_values(back) == to_key_values(c));

    const ComparisonResult cmp = compare_schemes(c, {CellSpec{Estimator::Lmmse, WptScheme::NonCoherent, "l", PowerControl::Fractional},
                                                     CellSpec{Estimator::Ls, WptScheme::Coherent, "m1", PowerControl::Fractional}});
    write_comparison(cmp, d1.string());

    std::ifstream golden(std::string(WPCF_TEST_DATA_DIR) + "/csv_headers.golden");
    std::string name, header;
    int checked = 0;
    while (golden >> name >> header)
    {
        INFO(name);
        std::ifstream in(d1 / name);
        REQUIRE(in.good());
        std::string first;
        std::getline(in, first);
        CHECK(first == header);
        ++checked;
    }
    CHECK(checked == 9);
    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("comparison runs are paired")
{
    ExperimentConfig c = tiny(PowerControl::Fractional);
    c.num_setups = 2;
    const auto specs = comparison_matrix();
    CHECK(specs.size() == 24);
    std::vector<CellSpec> fpc;
    for (const auto &s : specs)
        if (s.power == PowerControl::Fractional)
            fpc.push_back(s);
    const ComparisonResult r = compare_schemes(c, fpc);
    REQUIRE(r.cells.size() == 2);
    for (std::size_t s = 0; s < r.cells.size(); ++s)
    {
        REQUIRE(r.cells[s].size() == fpc.size());
        for (std::size_t j = 0; j < fpc.size(); ++j)
        {
            CHECK(r.cells[s][j].setup == static_cast<int>(s));
            CHECK(r.cells[s][j].spec.label() == fpc[j].label());
        }
    }
    // same estimator and scheme: linear harvester energy dominates M1 pointwise
    for (const auto &row : r.cells)
        for (const auto &lin : row)
            for (const auto &m1 : row)
                if (lin.spec.eh_model == "l" && m1.spec.eh_model == "m1" && lin.spec.estimator == m1.spec.estimator &&
                    lin.spec.scheme == m1.spec.scheme)
                    CHECK((lin.alloc.energy.array() >= m1.alloc.energy.array()).all());
}
