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

// Batch runner: one power-control configuration, or the full comparison matrix with --compare.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "wpcf/experiment.hpp"

using namespace wpcf;

int main(int argc, char **argv)
{
    CLI::App app{"Wireless-powered cell-free massive MIMO simulator"};

    std::string config_path, out_dir = "results";
    std::optional<std::uint64_t> seed;
    std::optional<int> setups;
    std::optional<std::string> scheme, estimator, eh, power;
    bool desk = false, full = false, compare = false, export_setups = false;
    int workers = 0;

    app.add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "master RNG seed");
    app.add_option("--setups", setups, "number of random setups")->check(CLI::PositiveNumber);
    app.add_option("--scheme", scheme, "energy transmission")->check(CLI::IsMember({"c", "nc"}));
    app.add_option("--estimator", estimator, "channel estimator")->check(CLI::IsMember({"lmmse", "ls"}));
    app.add_option("--eh", eh, "harvester model")->check(CLI::IsMember({"m1", "m2", "l"}));
    app.add_option("--power", power, "power control")->check(CLI::IsMember({"mmf", "fpc"}));
    auto *d = app.add_flag("--desk", desk, "L=9, N=2, K=4, 20 setups (default)");
    app.add_flag("--full", full, "L=36, N=8, K=20, 500 setups")->excludes(d);
    app.add_flag("--compare", compare, "run every estimator/scheme/model/power combination on paired setups");
    app.add_flag("--export-setups", export_setups, "also write geometry and channel statistics per setup");
    app.add_option("--workers", workers, "worker threads (0 = all cores)");

    CLI11_PARSE(app, argc, argv);

    try
    {
        ExperimentConfig cfg = full ? full_scale_config() : desk_scale_config();
        if (!config_path.empty())
            cfg = load_experiment_config(config_path, cfg);
        if (seed)
            cfg.network.rng_seed = *seed;
        if (setups)
            cfg.num_setups = *setups;
        if (scheme)
            cfg.scheme = parse_scheme(*scheme);
        if (estimator)
            cfg.estimator = parse_estimator(*estimator);
        if (eh)
            cfg.eh_model = *eh;
        if (power)
            cfg.power = parse_power_control(*power);
        cfg.validate();

        const auto t0 = std::chrono::steady_clock::now();
        if (compare)
        {
            const ComparisonResult res = compare_schemes(cfg, comparison_matrix(), workers);
            write_comparison(res, out_dir);
        }
        else
        {
            const ExperimentResult res = run_experiment(cfg, workers);
            write_experiment(res, out_dir);
            int infeasible = 0;
            for (const auto &c : res.cells)
                infeasible += c.energy_infeasible;
            if (infeasible)
                std::cerr << infeasible << " setup(s) energy-infeasible\n";
        }
        if (export_setups)
        {
            const RMat aps = experiment_ap_positions(cfg.network);
            const std::filesystem::path dir(out_dir);
            for (int s = 0; s < cfg.num_setups; ++s)
            {
                const SetupData setup = make_setup(cfg.network, aps, s);
                std::ofstream g(dir / ("geometry_" + std::to_string(s) + ".csv"));
                write_geometry_csv(g, setup.geometry);
                std::ofstream st(dir / ("statistics_" + std::to_string(s) + ".csv"));
                write_statistics_csv(st, setup.stats);
            }
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cerr << "wrote " << out_dir << " in " << secs << " s\n";
    }
    catch (const ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
