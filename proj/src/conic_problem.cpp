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

#include "wpcf/conic_problem.hpp"

#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace wpcf
{

int ConicProblem::cone_dim() const
{
    int m = 0;
    for (const auto &c : cones)
        m += c.size();
    return m;
}

int ConicProblem::degree() const
{
    int d = 0;
    for (const auto &c : cones)
        d += c.degree();
    return d;
}

void ConicProblem::validate() const
{
    auto fail = [](const std::string &m) { throw ContractViolation("ConicProblem: " + m); };
    if (num_vars < 0 || c.size() != num_vars)
        fail("objective size does not match num_vars");
    if (A.rows() > 0 && A.cols() != num_vars)
        fail("equality matrix has wrong column count");
    if (b.size() != A.rows())
        fail("equality right-hand side size mismatch");
    if (G.rows() > 0 && G.cols() != num_vars)
        fail("cone matrix has wrong column count");
    if (h.size() != G.rows())
        fail("cone right-hand side size mismatch");
    if (cone_dim() != G.rows())
        fail("cone dimensions do not add up to the number of cone rows");
    for (const auto &k : cones)
    {
        if (k.dim < 1)
            fail("cone block of nonpositive dimension");
        if (k.kind == ConeKind::SecondOrder && k.dim < 2)
            fail("second-order cone needs dimension >= 2");
    }
}

int svec_size(int n) { return n * (n + 1) / 2; }

int svec_index(int n, int i, int j)
{
    if (i < j)
        std::swap(i, j);
    // columns 0..j-1 hold n + (n-1) + ... + (n-j+1) entries
    return j * n - j * (j - 1) / 2 + (i - j);
}

RVec svec(const RMat &X)
{
    const int n = static_cast<int>(X.rows());
    RVec v(svec_size(n));
    int t = 0;
    for (int j = 0; j < n; ++j)
        for (int i = j; i < n; ++i)
            v(t++) = svec_scale(i, j) * (i == j ? X(i, j) : 0.5 * (X(i, j) + X(j, i)));
    return v;
}

RMat smat(const RVec &v, int n)
{
    RMat X(n, n);
    int t = 0;
    for (int j = 0; j < n; ++j)
        for (int i = j; i < n; ++i)
        {
            const double x = v(t++) / svec_scale(i, j);
            X(i, j) = x;
            X(j, i) = x;
        }
    return X;
}

LinExpr &LinExpr::scale(double f)
{
    for (auto &t : terms)
        t.second *= f;
    constant *= f;
    return *this;
}

double LinExpr::evaluate(const RVec &x) const
{
    double v = constant;
    for (const auto &[i, a] : terms)
        v += a * x(i);
    return v;
}

int ConicBuilder::add_variable() { return num_vars_++; }

int ConicBuilder::add_variables(int count)
{
    const int first = num_vars_;
    num_vars_ += count;
    return first;
}

void ConicBuilder::set_objective(int var, double coef) { objective_.emplace_back(var, coef); }

void ConicBuilder::add_equality(const LinExpr &e) { eqs_.push_back(e); }

int ConicBuilder::add_cone(ConeKind kind, int dim, const std::vector<LinExpr> &rows)
{
    const ConeBlock blk{kind, dim};
    if (static_cast<int>(rows.size()) != blk.size())
        throw ContractViolation("ConicBuilder::add_cone: row count does not match cone size");
    const int first = static_cast<int>(rows_.size());
    rows_.insert(rows_.end(), rows.begin(), rows.end());
    // Adjacent scalar nonnegative rows are merged into one block.
    if (kind == ConeKind::Nonnegative && !cones_.empty() && cones_.back().kind == ConeKind::Nonnegative)
        cones_.back().dim += dim;
    else
        cones_.push_back(blk);
    return first;
}

namespace
{

SparseMat to_sparse(const std::vector<LinExpr> &rows, int n, double sign)
{
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (const auto &[j, a] : rows[r].terms)
            trip.emplace_back(static_cast<int>(r), j, sign * a);
    SparseMat M(static_cast<Eigen::Index>(rows.size()), n);
    M.setFromTriplets(trip.begin(), trip.end());
    M.makeCompressed();
    return M;
}

} // namespace

ConicProblem ConicBuilder::build() const
{
    ConicProblem p;
    p.num_vars = num_vars_;
    p.c = RVec::Zero(num_vars_);
    for (const auto &[j, a] : objective_)
        p.c(j) += a;
    // e(x) = const + a^T x = 0  ->  a^T x = -const
    p.A = to_sparse(eqs_, num_vars_, 1.0);
    p.b.resize(static_cast<Eigen::Index>(eqs_.size()));
    for (std::size_t r = 0; r < eqs_.size(); ++r)
        p.b(static_cast<Eigen::Index>(r)) = -eqs_[r].constant;
    // s = const + a^T x = h - G x  ->  G = -a, h = const
    p.G = to_sparse(rows_, num_vars_, -1.0);
    p.h.resize(static_cast<Eigen::Index>(rows_.size()));
    for (std::size_t r = 0; r < rows_.size(); ++r)
        p.h(static_cast<Eigen::Index>(r)) = rows_[r].constant;
    p.cones = cones_;
    p.validate();
    return p;
}

std::string to_string(ConeKind k)
{
    switch (k)
    {
    case ConeKind::Nonnegative:
        return "nonneg";
    case ConeKind::SecondOrder:
        return "soc";
    case ConeKind::Psd:
        return "psd";
    }
    return "?";
}

namespace
{

void write_vector(std::ostream &out, const char *tag, const RVec &v)
{
    int nnz = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        nnz += v(i) != 0.0;
    out << tag << ' ' << v.size() << ' ' << nnz << '\n';
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (v(i) != 0.0)
            out << i << ' ' << v(i) << '\n';
}

void write_matrix(std::ostream &out, const char *tag, const SparseMat &M)
{
    out << tag << ' ' << M.rows() << ' ' << M.cols() << ' ' << M.nonZeros() << '\n';
    for (Eigen::Index r = 0; r < M.outerSize(); ++r)
        for (SparseMat::InnerIterator it(M, r); it; ++it)
            out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

std::string expect_tag(std::istream &in, const std::string &tag)
{
    std::string t;
    if (!(in >> t) || t != tag)
        throw std::runtime_error("read_problem: expected '" + tag + "', got '" + t + "'");
    return t;
}

RVec read_vector(std::istream &in, const std::string &tag)
{
    expect_tag(in, tag);
    long n = 0, nnz = 0;
    if (!(in >> n >> nnz) || n < 0 || nnz < 0 || nnz > n)
        throw std::runtime_error("read_problem: bad header for " + tag);
    RVec v = RVec::Zero(n);
    for (long t = 0; t < nnz; ++t)
    {
        long i = 0;
        double x = 0.0;
        if (!(in >> i >> x) || i < 0 || i >= n)
            throw std::runtime_error("read_problem: bad entry in " + tag);
        v(i) = x;
    }
    return v;
}

SparseMat read_matrix(std::istream &in, const std::string &tag)
{
    expect_tag(in, tag);
    long rows = 0, cols = 0, nnz = 0;
    if (!(in >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0)
        throw std::runtime_error("read_problem: bad header for " + tag);
    std::vector<Eigen::Triplet<double>> trip;
    for (long t = 0; t < nnz; ++t)
    {
        long i = 0, j = 0;
        double x = 0.0;
        if (!(in >> i >> j >> x) || i < 0 || i >= rows || j < 0 || j >= cols)
            throw std::runtime_error("read_problem: bad entry in " + tag);
        trip.emplace_back(static_cast<int>(i), static_cast<int>(j), x);
    }
    SparseMat M(rows, cols);
    M.setFromTriplets(trip.begin(), trip.end());
    M.makeCompressed();
    return M;
}

} // namespace

void write_problem(std::ostream &out, const ConicProblem &p)
{
    const auto flags = out.flags();
    const auto prec = out.precision();
    out << std::setprecision(17);
    out << "conic-problem 1\n";
    out << "vars " << p.num_vars << '\n';
    out << "cones " << p.cones.size() << '\n';
    for (const auto &k : p.cones)
        out << to_string(k.kind) << ' ' << k.dim << '\n';
    write_vector(out, "c", p.c);
    write_matrix(out, "A", p.A);
    write_vector(out, "b", p.b);
    write_matrix(out, "G", p.G);
    write_vector(out, "h", p.h);
    out << "end\n";
    out.flags(flags);
    out.precision(prec);
}

ConicProblem read_problem(std::istream &in)
{
    ConicProblem p;
    expect_tag(in, "conic-problem");
    int version = 0;
    if (!(in >> version) || version != 1)
        throw std::runtime_error("read_problem: unsupported version");
    expect_tag(in, "vars");
    in >> p.num_vars;
    expect_tag(in, "cones");
    int nc = 0;
    in >> nc;
    for (int i = 0; i < nc; ++i)
    {
        std::string kind;
        int dim = 0;
        if (!(in >> kind >> dim))
            throw std::runtime_error("read_problem: truncated cone list");
        ConeKind k;
        if (kind == "nonneg")
            k = ConeKind::Nonnegative;
        else if (kind == "soc")
            k = ConeKind::SecondOrder;
        else if (kind == "psd")
            k = ConeKind::Psd;
        else
            throw std::runtime_error("read_problem: unknown cone '" + kind + "'");
        p.cones.push_back({k, dim});
    }
    p.c = read_vector(in, "c");
    p.A = read_matrix(in, "A");
    p.b = read_vector(in, "b");
    p.G = read_matrix(in, "G");
    p.h = read_vector(in, "h");
    expect_tag(in, "end");
    if (p.A.rows() == 0)
        p.A.resize(0, p.num_vars);
    try
    {
        p.validate();
    }
    catch (const ContractViolation &e)
    {
        throw std::runtime_error(std::string("read_problem: ") + e.what());
    }
    return p;
}

} // namespace wpcf
