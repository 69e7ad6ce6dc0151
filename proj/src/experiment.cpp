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

#include "wpcf/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <thread>

namespace wpcf
{

namespace
{

enum Substream : std::uint64_t
{
    kApStream = 0,
    kDropStream = 1,
    kFadingStream = 2,
    kPilotStream = 3
};

void parallel_for(int n, int workers, const std::function<void(int)> &body)
{
    if (workers <= 0)
        workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = std::min(workers, n);
    if (workers <= 1)
    {
        for (int i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++)
            {
                try
                {
                    body(i);
                }
                catch (...)
                {
                    errors[i] = std::current_exception();
                }
            }
        });
    for (auto &t : pool)
        t.join();
    for (auto &e : errors)
        if (e)
            std::rethrow_exception(e);
}

std::ofstream open_csv(const std::filesystem::path &path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path.string());
    out.precision(10);
    return out;
}

} // namespace

RMat experiment_ap_positions(const NetworkConfig &cfg)
{
    Rng rng = make_rng(cfg.rng_seed, 0, kApStream);
    return generate_ap_positions(cfg, rng);
}

SetupData make_setup(const NetworkConfig &cfg, const RMat &ap_positions, int index)
{
    const auto stream = static_cast<std::uint64_t>(index) + 1;
    SetupData s;
    s.index = index;
    Rng drop = make_rng(cfg.rng_seed, stream, kDropStream);
    s.geometry = drop_ues(cfg, ap_positions, drop);
    Rng fading = make_rng(cfg.rng_seed, stream, kFadingStream);
    s.stats = large_scale_stats(s.geometry, cfg, fading);
    Rng pilot = make_rng(cfg.rng_seed, stream, kPilotStream);
    s.pilots = assign_pilots(cfg.num_ues, cfg.tau_p, pilot);
    s.pp = pilot_params(cfg);
    return s;
}

EstimatorModel estimator_model(const SetupData &setup, Estimator estimator)
{
    EstimatorModel m;
    m.moments = mr_moments(setup.stats, setup.pilots, setup.pp, estimator);
    m.coeffs = se_coefficients(m.moments, setup.pp.noise_power);
    return m;
}

std::string CellSpec::label() const
{
    return to_string(estimator) + "/" + to_string(scheme) + "/" + eh_model + "/" + to_string(power);
}

BisectionSettings bisection_settings(const ExperimentConfig &cfg)
{
    BisectionSettings b;
    b.lambda = cfg.bisection_lambda;
    b.epsilon = cfg.bisection_epsilon;
    b.solver.tol = cfg.solver_tol;
    b.solver.max_iters = cfg.solver_max_iters;
    return b;
}

CellResult run_cell(const NetworkConfig &net, const SetupData &setup, const EstimatorModel &model,
                    const CellSpec &spec, const BisectionSettings &settings)
{
    const OptimizerContext ctx =
        make_context(net, model.moments, model.coeffs, eh_model_by_name(spec.eh_model), spec.scheme);
    CellResult r;
    r.setup = setup.index;
    r.spec = spec;
    if (spec.power == PowerControl::MaxMinFair)
    {
        MaxMinResult mm = algorithm1(ctx, settings);
        r.alloc = std::move(mm.alloc);
        r.energy_infeasible = mm.energy_infeasible;
        r.num_solves = mm.num_solves;
        r.tmax_init = mm.tmax_init;
        r.log = std::move(mm.log);
    }
    else
    {
        r.alloc = fpc_baseline(ctx);
        r.energy_infeasible = (r.alloc.eta.array() <= 0.0).any();
    }
    const int K = ctx.num_ues();
    const int L = ctx.num_aps();
    r.se.resize(K);
    for (int k = 0; k < K; ++k)
        r.se(k) = se_value(r.alloc.sinr(k), net.tau_u, net.tau_c);
    r.min_se = r.se.minCoeff();
    r.ap_power.resize(L);
    for (int l = 0; l < L; ++l)
        r.ap_power(l) = ap_tx_power(r.alloc.P, model.moments.norms(), l);
    return r;
}

std::vector<double> default_quantiles() { return {0.05, 0.10, 0.25, 0.50, 0.75, 0.90, 0.95}; }

std::vector<CdfPoint> emit_cdf(std::vector<double> samples, const std::vector<double> &quantiles)
{
    if (samples.empty())
        throw ContractViolation("emit_cdf: no samples");
    std::sort(samples.begin(), samples.end());
    const auto n = static_cast<double>(samples.size());
    std::vector<CdfPoint> out;
    for (const double q : quantiles)
    {
        if (!(q > 0.0 && q <= 1.0))
            throw ContractViolation("emit_cdf: quantiles must lie in (0, 1]");
        auto idx = static_cast<std::size_t>(std::ceil(q * n - 1e-9));
        idx = std::clamp<std::size_t>(idx, 1, samples.size());
        out.push_back({q, samples[idx - 1]});
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig &cfg, int workers)
{
    cfg.validate();
    ExperimentResult res;
    res.config = cfg;
    res.cells.resize(cfg.num_setups);
    const RMat aps = experiment_ap_positions(cfg.network);
    const CellSpec spec{cfg.estimator, cfg.scheme, cfg.eh_model, cfg.power};
    const BisectionSettings settings = bisection_settings(cfg);
    parallel_for(cfg.num_setups, workers, [&](int s) {
        const SetupData setup = make_setup(cfg.network, aps, s);
        const EstimatorModel model = estimator_model(setup, cfg.estimator);
        res.cells[s] = run_cell(cfg.network, setup, model, spec, settings);
    });
    return res;
}

void write_per_ue_csv(std::ostream &out, const std::vector<CellResult> &cells)
{
    out << "setup,ue,se,sinr,eta_w,input_power_w,energy_j\n";
    for (const auto &c : cells)
        for (Eigen::Index k = 0; k < c.se.size(); ++k)
            out << c.setup << ',' << k << ',' << c.se(k) << ',' << c.alloc.sinr(k) << ',' << c.alloc.eta(k) << ','
                << c.alloc.input_power(k) << ',' << c.alloc.energy(k) << '\n';
}

void write_min_se_csv(std::ostream &out, const std::vector<CellResult> &cells)
{
    out << "setup,min_se,t,energy_infeasible,num_solves,tmax_init\n";
    for (const auto &c : cells)
        out << c.setup << ',' << c.min_se << ',' << c.alloc.t << ',' << c.energy_infeasible << ',' << c.num_solves
            << ',' << c.tmax_init << '\n';
}

void write_downlink_power_csv(std::ostream &out, const std::vector<CellResult> &cells)
{
    out << "setup,ap,ue,p,ap_power_w\n";
    for (const auto &c : cells)
    {
        const RMat p = c.alloc.p();
        for (Eigen::Index l = 0; l < p.cols(); ++l)
            for (Eigen::Index k = 0; k < p.rows(); ++k)
                out << c.setup << ',' << l << ',' << k << ',' << p(k, l) << ',' << c.ap_power(l) << '\n';
    }
}

void write_uplink_power_csv(std::ostream &out, const std::vector<CellResult> &cells)
{
    out << "setup,ue,eta_w,eta_dbm\n";
    for (const auto &c : cells)
        for (Eigen::Index k = 0; k < c.alloc.eta.size(); ++k)
        {
            const double eta = c.alloc.eta(k);
            out << c.setup << ',' << k << ',' << eta << ',';
            if (eta > 0.0)
                out << watt_to_dbm(eta);
            out << '\n';
        }
}

void write_convergence_csv(std::ostream &out, const std::vector<CellResult> &cells)
{
    out << "setup,iteration,t,status,feasible,t_star,t_min,t_max,solver_iterations\n";
    for (const auto &c : cells)
        for (const auto &r : c.log)
            out << c.setup << ',' << r.iteration << ',' << r.t << ',' << to_string(r.status) << ',' << r.feasible
                << ',' << r.t_star << ',' << r.t_min << ',' << r.t_max << ',' << r.solver_iterations << '\n';
}

void write_cdf_csv(std::ostream &out, const std::vector<CdfPoint> &cdf)
{
    out << "quantile,se\n";
    for (const auto &p : cdf)
        out << p.quantile << ',' << p.value << '\n';
}

void write_experiment(const ExperimentResult &res, const std::string &dir)
{
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const fs::path d(dir);
    {
        auto o = open_csv(d / "per_ue_se.csv");
        write_per_ue_csv(o, res.cells);
    }
    {
        auto o = open_csv(d / "min_se.csv");
        write_min_se_csv(o, res.cells);
    }
    {
        auto o = open_csv(d / "downlink_power.csv");
        write_downlink_power_csv(o, res.cells);
    }
    {
        auto o = open_csv(d / "uplink_power.csv");
        write_uplink_power_csv(o, res.cells);
    }
    {
        auto o = open_csv(d / "convergence.csv");
        write_convergence_csv(o, res.cells);
    }
    std::vector<double> se;
    for (const auto &c : res.cells)
        for (Eigen::Index k = 0; k < c.se.size(); ++k)
            se.push_back(c.se(k));
    {
        auto o = open_csv(d / "se_cdf.csv");
        write_cdf_csv(o, emit_cdf(se, default_quantiles()));
    }
    std::ofstream cfg(d / "config.txt");
    cfg << to_key_values(res.config);
}

std::vector<CellSpec> comparison_matrix()
{
    std::vector<CellSpec> specs;
    for (const auto est : {Estimator::Lmmse, Estimator::Ls})
        for (const auto sch : {WptScheme::Coherent, WptScheme::NonCoherent})
            for (const char *eh : {"m1", "m2", "l"})
                for (const auto pc : {PowerControl::MaxMinFair, PowerControl::Fractional})
                    specs.push_back({est, sch, eh, pc});
    return specs;
}

ComparisonResult compare_schemes(const ExperimentConfig &cfg, const std::vector<CellSpec> &specs, int workers)
{
    cfg.validate();
    ComparisonResult res;
    res.config = cfg;
    res.specs = specs;
    res.cells.assign(cfg.num_setups, std::vector<CellResult>(specs.size()));
    const RMat aps = experiment_ap_positions(cfg.network);
    const BisectionSettings settings = bisection_settings(cfg);
    parallel_for(cfg.num_setups, workers, [&](int s) {
        const SetupData setup = make_setup(cfg.network, aps, s);
        const EstimatorModel lmmse = estimator_model(setup, Estimator::Lmmse);
        const EstimatorModel ls = estimator_model(setup, Estimator::Ls);
        for (std::size_t j = 0; j < specs.size(); ++j)
        {
            const EstimatorModel &m = specs[j].estimator == Estimator::Lmmse ? lmmse : ls;
            res.cells[s][j] = run_cell(cfg.network, setup, m, specs[j], settings);
        }
    });
    return res;
}

void write_comparison(const ComparisonResult &res, const std::string &dir)
{
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const fs::path d(dir);
    auto mo = open_csv(d / "compare_min_se.csv");
    mo << "setup,estimator,scheme,eh,power,min_se,energy_infeasible,num_solves\n";
    auto uo = open_csv(d / "compare_per_ue.csv");
    uo << "setup,estimator,scheme,eh,power,ue,se,eta_w,energy_j\n";
    auto key = [](const CellSpec &s) {
        return to_string(s.estimator) + ',' + to_string(s.scheme) + ',' + s.eh_model + ',' + to_string(s.power);
    };
    for (const auto &row : res.cells)
        for (const auto &c : row)
        {
            mo << c.setup << ',' << key(c.spec) << ',' << c.min_se << ',' << c.energy_infeasible << ','
               << c.num_solves << '\n';
            for (Eigen::Index k = 0; k < c.se.size(); ++k)
                uo << c.setup << ',' << key(c.spec) << ',' << k << ',' << c.se(k) << ',' << c.alloc.eta(k) << ','
                   << c.alloc.energy(k) << '\n';
        }
    auto co = open_csv(d / "compare_cdf.csv");
    co << "estimator,scheme,eh,power,quantile,se\n";
    for (std::size_t j = 0; j < res.specs.size(); ++j)
    {
        std::vector<double> se;
        for (const auto &row : res.cells)
            for (Eigen::Index k = 0; k < row[j].se.size(); ++k)
                se.push_back(row[j].se(k));
        for (const auto &p : emit_cdf(se, default_quantiles()))
            co << key(res.specs[j]) << ',' << p.quantile << ',' << p.value << '\n';
    }
}

} // namespace wpcf
