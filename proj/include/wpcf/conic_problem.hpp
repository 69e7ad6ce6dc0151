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

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Sparse>

#include "wpcf/types.hpp"

namespace wpcf
{

using SparseMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class ConeKind
{
    Nonnegative,
    SecondOrder,
    Psd
};

/// One block of the cone product. For Psd, dim is the matrix side n and the block occupies
/// n(n+1)/2 entries; other kinds occupy dim entries.
struct ConeBlock
{
    ConeKind kind = ConeKind::Nonnegative;
    int dim = 0;

    int size() const { return kind == ConeKind::Psd ? dim * (dim + 1) / 2 : dim; }
    /// Contribution to the barrier degree.
    int degree() const { return kind == ConeKind::SecondOrder ? 1 : dim; }
};

/// minimize c^T x  subject to  A x = b,  h - G x in K,  x free.
/// Cone membership of a variable is expressed with rows of G = -I.
struct ConicProblem
{
    int num_vars = 0;
    RVec c;
    SparseMat A;
    RVec b;
    SparseMat G;
    RVec h;
    std::vector<ConeBlock> cones;

    int num_eq() const { return static_cast<int>(A.rows()); }
    int cone_dim() const;
    int degree() const;
    /// Throws ContractViolation on inconsistent dimensions.
    void validate() const;
};

// svec convention: lower triangle, column-major, off-diagonal entries scaled by sqrt(2),
// so <svec X, svec Y> = tr(X Y).
int svec_size(int n);
int svec_index(int n, int i, int j);
RVec svec(const RMat &X);
RMat smat(const RVec &v, int n);
inline double svec_scale(int i, int j) { return i == j ? 1.0 : 1.4142135623730951; }

/// Sparse affine expression const + sum coef * x_var.
struct LinExpr
{
    std::vector<std::pair<int, double>> terms;
    double constant = 0.0;

    LinExpr() = default;
    explicit LinExpr(double c) : constant(c) {}

    LinExpr &add(int var, double coef)
    {
        terms.emplace_back(var, coef);
        return *this;
    }
    LinExpr &add_constant(double c)
    {
        constant += c;
        return *this;
    }
    LinExpr &scale(double f);
    double evaluate(const RVec &x) const;
};

/// Incremental construction: s-rows are given as affine expressions that must lie in the cone.
class ConicBuilder
{
  public:
    int add_variable();
    int add_variables(int count);
    int num_vars() const { return num_vars_; }

    void set_objective(int var, double coef);

    void add_equality(const LinExpr &e); // e(x) = 0
    /// Each expression is one coordinate of the block; returns the first row index.
    int add_cone(ConeKind kind, int dim, const std::vector<LinExpr> &rows);
    int add_nonneg(const LinExpr &e) { return add_cone(ConeKind::Nonnegative, 1, {e}); }

    ConicProblem build() const;

  private:
    int num_vars_ = 0;
    std::vector<std::pair<int, double>> objective_;
    std::vector<LinExpr> eqs_;
    std::vector<LinExpr> rows_;
    std::vector<ConeBlock> cones_;
};

void write_problem(std::ostream &out, const ConicProblem &p);
/// Throws std::runtime_error on malformed input.
ConicProblem read_problem(std::istream &in);

std::string to_string(ConeKind k);

} // namespace wpcf
