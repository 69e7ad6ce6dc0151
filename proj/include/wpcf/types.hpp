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

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace wpcf
{

using cdouble = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

/// Dense K x L table of per-(UE, AP) matrices, indexed [k][l].
template <typename T>
using LinkTable = std::vector<std::vector<T>>;

template <typename T>
LinkTable<T> make_link_table(std::size_t num_ues, std::size_t num_aps, const T &init = T{})
{
    return LinkTable<T>(num_ues, std::vector<T>(num_aps, init));
}

enum class Estimator
{
    Lmmse,
    Ls
};

enum class WptScheme
{
    Coherent,
    NonCoherent
};

/// Raised when a Hermitian system the closed forms rely on is numerically singular.
class IllConditionedError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Raised on violated preconditions (negative powers, zero LSFD vector, ...).
class ContractViolation : public std::invalid_argument
{
  public:
    using std::invalid_argument::invalid_argument;
};

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

std::string to_string(Estimator e);
std::string to_string(WptScheme s);
Estimator parse_estimator(const std::string &s);
WptScheme parse_scheme(const std::string &s);

} // namespace wpcf
