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

#include "wpcf/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace wpcf
{

std::string to_string(Estimator e) { return e == Estimator::Lmmse ? "lmmse" : "ls"; }
std::string to_string(WptScheme s) { return s == WptScheme::Coherent ? "c" : "nc"; }
std::string to_string(PowerControl p) { return p == PowerControl::MaxMinFair ? "mmf" : "fpc"; }

namespace
{

std::string lower(std::string s)
{
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::string trim(const std::string &s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string &field, const std::string &v)
{
    try
    {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size())
            throw ConfigError(field, "trailing characters in number '" + v + "'");
        return d;
    }
    catch (const std::invalid_argument &)
    {
        throw ConfigError(field, "not a number: '" + v + "'");
    }
    catch (const std::out_of_range &)
    {
        throw ConfigError(field, "out of range: '" + v + "'");
    }
}

long long to_int(const std::string &field, const std::string &v)
{
    try
    {
        std::size_t pos = 0;
        const long long d = std::stoll(v, &pos);
        if (pos != v.size())
            throw ConfigError(field, "not an integer: '" + v + "'");
        return d;
    }
    catch (const std::invalid_argument &)
    {
        throw ConfigError(field, "not an integer: '" + v + "'");
    }
    catch (const std::out_of_range &)
    {
        throw ConfigError(field, "out of range: '" + v + "'");
    }
}

} // namespace

Estimator parse_estimator(const std::string &s)
{
    const auto v = lower(s);
    if (v == "lmmse")
        return Estimator::Lmmse;
    if (v == "ls")
        return Estimator::Ls;
    throw ConfigError("estimator", "expected lmmse|ls, got '" + s + "'");
}

WptScheme parse_scheme(const std::string &s)
{
    const auto v = lower(s);
    if (v == "c" || v == "coherent")
        return WptScheme::Coherent;
    if (v == "nc" || v == "noncoherent" || v == "non-coherent")
        return WptScheme::NonCoherent;
    throw ConfigError("scheme", "expected c|nc, got '" + s + "'");
}

PowerControl parse_power_control(const std::string &s)
{
    const auto v = lower(s);
    if (v == "mmf")
        return PowerControl::MaxMinFair;
    if (v == "fpc")
        return PowerControl::Fractional;
    throw ConfigError("power", "expected mmf|fpc, got '" + s + "'");
}

void NetworkConfig::validate() const
{
    if (!(area_side > 0.0))
        throw ConfigError("area_side", "must be > 0");
    if (num_aps < 1)
        throw ConfigError("num_aps", "must be >= 1");
    if (antennas_per_ap < 1)
        throw ConfigError("antennas_per_ap", "must be >= 1");
    if (num_ues < 1)
        throw ConfigError("num_ues", "must be >= 1");
    if (!(carrier_freq_hz > 0.0))
        throw ConfigError("carrier_freq_hz", "must be > 0");
    if (!(bandwidth_hz > 0.0))
        throw ConfigError("bandwidth_hz", "must be > 0");
    if (!(noise_power_w > 0.0))
        throw ConfigError("noise_power", "must be > 0");
    if (!(pilot_power_w > 0.0))
        throw ConfigError("pilot_power", "must be > 0");
    if (!(ap_power_w > 0.0))
        throw ConfigError("ap_power_w", "must be > 0");
    if (tau_p < 1)
        throw ConfigError("tau_p", "must be >= 1");
    if (tau_d < 1)
        throw ConfigError("tau_d", "must be >= 1");
    if (tau_u < 1)
        throw ConfigError("tau_u", "must be >= 1");
    if (tau_c < 1)
        throw ConfigError("tau_c", "must be >= 1");
    if (tau_p > tau_c)
        throw ConfigError("tau_p", "must not exceed tau_c");
    if (tau_p + tau_d + tau_u != tau_c)
        throw ConfigError("tau_c", "tau_p + tau_d + tau_u = " + std::to_string(tau_p + tau_d + tau_u) +
                                       " differs from tau_c = " + std::to_string(tau_c));
    if (!(height_diff_m >= 0.0))
        throw ConfigError("height_diff_m", "must be >= 0");
}

void ExperimentConfig::validate() const
{
    network.validate();
    if (num_setups < 1)
        throw ConfigError("num_setups", "must be >= 1");
    if (eh_model != "m1" && eh_model != "m2" && eh_model != "l")
        throw ConfigError("eh_model", "expected m1|m2|l, got '" + eh_model + "'");
    if (!(bisection_lambda > 1.0))
        throw ConfigError("lambda", "must be > 1");
    if (!(bisection_epsilon > 0.0))
        throw ConfigError("epsilon", "must be > 0");
    if (!(solver_tol > 0.0))
        throw ConfigError("solver_tol", "must be > 0");
    if (solver_max_iters < 1)
        throw ConfigError("solver_max_iters", "must be >= 1");
}

ExperimentConfig full_scale_config()
{
    ExperimentConfig cfg;
    cfg.network.num_aps = 36;
    cfg.network.antennas_per_ap = 8;
    cfg.network.num_ues = 20;
    cfg.network.ap_power_w = 10.0 / 36.0;
    cfg.num_setups = 500;
    return cfg;
}

ExperimentConfig desk_scale_config()
{
    ExperimentConfig cfg;
    cfg.network.num_aps = 9;
    cfg.network.antennas_per_ap = 2;
    cfg.network.num_ues = 4;
    cfg.network.ap_power_w = 10.0 / 9.0;
    cfg.num_setups = 20;
    return cfg;
}

KeyValueMap parse_key_values(const std::string &text)
{
    KeyValueMap kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno), "expected key = value");
        const auto key = lower(trim(line.substr(0, eq)));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno), "empty key");
        if (value.empty())
            throw ConfigError(key, "empty value");
        kv[key] = value;
    }
    return kv;
}

ExperimentConfig apply_key_values(const KeyValueMap &kv, ExperimentConfig cfg)
{
    auto &net = cfg.network;
    bool ap_power_given = false;
    bool total_power_given = false;
    double total_power = 10.0;
    for (const auto &[key, value] : kv)
    {
        if (key == "area_side")
            net.area_side = to_double(key, value);
        else if (key == "num_aps")
            net.num_aps = static_cast<int>(to_int(key, value));
        else if (key == "antennas_per_ap")
            net.antennas_per_ap = static_cast<int>(to_int(key, value));
        else if (key == "num_ues")
            net.num_ues = static_cast<int>(to_int(key, value));
        else if (key == "carrier_freq_hz")
            net.carrier_freq_hz = to_double(key, value);
        else if (key == "bandwidth_hz")
            net.bandwidth_hz = to_double(key, value);
        else if (key == "noise_power_dbm")
            net.noise_power_w = dbm_to_watt(to_double(key, value));
        else if (key == "pilot_power_dbm")
            net.pilot_power_w = dbm_to_watt(to_double(key, value));
        else if (key == "ap_power_w")
        {
            net.ap_power_w = to_double(key, value);
            ap_power_given = true;
        }
        else if (key == "total_power_w")
        {
            total_power = to_double(key, value);
            total_power_given = true;
        }
        else if (key == "tau_c")
            net.tau_c = static_cast<int>(to_int(key, value));
        else if (key == "tau_p")
            net.tau_p = static_cast<int>(to_int(key, value));
        else if (key == "tau_d")
            net.tau_d = static_cast<int>(to_int(key, value));
        else if (key == "tau_u")
            net.tau_u = static_cast<int>(to_int(key, value));
        else if (key == "height_diff_m")
            net.height_diff_m = to_double(key, value);
        else if (key == "seed")
        {
            const auto s = to_int(key, value);
            if (s < 0)
                throw ConfigError(key, "must be >= 0");
            net.rng_seed = static_cast<std::uint64_t>(s);
        }
        else if (key == "ap_placement")
        {
            const auto v = lower(value);
            if (v == "grid")
                net.ap_placement = ApPlacement::Grid;
            else if (v == "random")
                net.ap_placement = ApPlacement::Random;
            else
                throw ConfigError(key, "expected grid|random, got '" + value + "'");
        }
        else if (key == "num_setups")
            cfg.num_setups = static_cast<int>(to_int(key, value));
        else if (key == "estimator")
            cfg.estimator = parse_estimator(value);
        else if (key == "scheme")
            cfg.scheme = parse_scheme(value);
        else if (key == "eh_model")
            cfg.eh_model = lower(value);
        else if (key == "power")
            cfg.power = parse_power_control(value);
        else if (key == "lambda")
            cfg.bisection_lambda = to_double(key, value);
        else if (key == "epsilon")
            cfg.bisection_epsilon = to_double(key, value);
        else if (key == "solver_tol")
            cfg.solver_tol = to_double(key, value);
        else if (key == "solver_max_iters")
            cfg.solver_max_iters = static_cast<int>(to_int(key, value));
        else
            throw ConfigError(key, "unknown key");
    }
    if (total_power_given && ap_power_given)
        throw ConfigError("ap_power_w", "give either ap_power_w or total_power_w, not both");
    if (total_power_given || (!ap_power_given && kv.count("num_aps")))
    {
        if (net.num_aps < 1)
            throw ConfigError("num_aps", "must be >= 1");
        net.ap_power_w = total_power / net.num_aps;
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string &path, ExperimentConfig base)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config", "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return apply_key_values(parse_key_values(ss.str()), std::move(base));
}

std::string to_key_values(const ExperimentConfig &cfg)
{
    const auto &n = cfg.network;
    std::ostringstream out;
    out.precision(17);
    out << "area_side = " << n.area_side << '\n'
        << "num_aps = " << n.num_aps << '\n'
        << "antennas_per_ap = " << n.antennas_per_ap << '\n'
        << "num_ues = " << n.num_ues << '\n'
        << "carrier_freq_hz = " << n.carrier_freq_hz << '\n'
        << "bandwidth_hz = " << n.bandwidth_hz << '\n'
        << "noise_power_dbm = " << watt_to_dbm(n.noise_power_w) << '\n'
        << "pilot_power_dbm = " << watt_to_dbm(n.pilot_power_w) << '\n'
        << "ap_power_w = " << n.ap_power_w << '\n'
        << "tau_c = " << n.tau_c << '\n'
        << "tau_p = " << n.tau_p << '\n'
        << "tau_d = " << n.tau_d << '\n'
        << "tau_u = " << n.tau_u << '\n'
        << "height_diff_m = " << n.height_diff_m << '\n'
        << "seed = " << n.rng_seed << '\n'
        << "ap_placement = " << (n.ap_placement == ApPlacement::Grid ? "grid" : "random") << '\n'
        << "num_setups = " << cfg.num_setups << '\n'
        << "estimator = " << to_string(cfg.estimator) << '\n'
        << "scheme = " << to_string(cfg.scheme) << '\n'
        << "eh_model = " << cfg.eh_model << '\n'
        << "power = " << to_string(cfg.power) << '\n'
        << "lambda = " << cfg.bisection_lambda << '\n'
        << "epsilon = " << cfg.bisection_epsilon << '\n'
        << "solver_tol = " << cfg.solver_tol << '\n'
        << "solver_max_iters = " << cfg.solver_max_iters << '\n';
    return out.str();
}

} // namespace wpcf
