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

#include "wpcf/conic_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace wpcf
{

std::string to_string(ConicStatus s)
{
    switch (s)
    {
    case ConicStatus::Optimal:
        return "optimal";
    case ConicStatus::PrimalInfeasible:
        return "primal_infeasible";
    case ConicStatus::DualInfeasible:
        return "dual_infeasible";
    case ConicStatus::MaxIters:
        return "max_iters";
    case ConicStatus::NumericalFailure:
        return "numerical_failure";
    }
    return "?";
}

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();

struct BlockInfo
{
    ConeKind kind;
    int offset;
    int size;
    int dim;
};

std::vector<BlockInfo> block_layout(const std::vector<ConeBlock> &cones)
{
    std::vector<BlockInfo> out;
    int off = 0;
    for (const auto &c : cones)
    {
        out.push_back({c.kind, off, c.size(), c.dim});
        off += c.size();
    }
    return out;
}

double soc_residual(const Eigen::Ref<const RVec> &x) { return x(0) - x.tail(x.size() - 1).norm(); }

double soc_jnorm2(const Eigen::Ref<const RVec> &x) { return x(0) * x(0) - x.tail(x.size() - 1).squaredNorm(); }

double psd_min_eig(const Eigen::Ref<const RVec> &x, int n)
{
    const RMat X = smat(x, n);
    Eigen::SelfAdjointEigenSolver<RMat> eig(X, Eigen::EigenvaluesOnly);
    return eig.eigenvalues()(0);
}

/// Smallest "eigenvalue" of v with respect to the cone (s - t e in K iff t <= value).
double cone_min_eig(const std::vector<BlockInfo> &blocks, const RVec &v)
{
    double m = kInf;
    for (const auto &b : blocks)
    {
        const auto seg = v.segment(b.offset, b.size);
        switch (b.kind)
        {
        case ConeKind::Nonnegative:
            m = std::min(m, seg.minCoeff());
            break;
        case ConeKind::SecondOrder:
            m = std::min(m, soc_residual(seg));
            break;
        case ConeKind::Psd:
            m = std::min(m, psd_min_eig(seg, b.dim));
            break;
        }
    }
    return m;
}

RVec cone_identity(const std::vector<BlockInfo> &blocks, int m)
{
    RVec e = RVec::Zero(m);
    for (const auto &b : blocks)
    {
        switch (b.kind)
        {
        case ConeKind::Nonnegative:
            e.segment(b.offset, b.size).setOnes();
            break;
        case ConeKind::SecondOrder:
            e(b.offset) = 1.0;
            break;
        case ConeKind::Psd:
            for (int i = 0; i < b.dim; ++i)
                e(b.offset + svec_index(b.dim, i, i)) = 1.0;
            break;
        }
    }
    return e;
}

/// Jordan product x o y.
RVec jordan_product(const std::vector<BlockInfo> &blocks, const RVec &x, const RVec &y)
{
    RVec r(x.size());
    for (const auto &b : blocks)
    {
        const auto xs = x.segment(b.offset, b.size);
        const auto ys = y.segment(b.offset, b.size);
        auto rs = r.segment(b.offset, b.size);
        switch (b.kind)
        {
        case ConeKind::Nonnegative:
            rs = xs.cwiseProduct(ys);
            break;
        case ConeKind::SecondOrder:
        {
            const int t = b.size - 1;
            rs(0) = xs.dot(ys);
            rs.tail(t) = xs(0) * ys.tail(t) + ys(0) * xs.tail(t);
            break;
        }
        case ConeKind::Psd:
        {
            const RMat X = smat(xs, b.dim);
            const RMat Y = smat(ys, b.dim);
            rs = svec(0.5 * (X * Y + Y * X));
            break;
        }
        }
    }
    return r;
}

/// u with lambda o u = w. For PSD blocks lambda must be diagonal (the scaled point).
RVec jordan_divide(const std::vector<BlockInfo> &blocks, const RVec &lambda, const RVec &w)
{
    RVec u(w.size());
    for (const auto &b : blocks)
    {
        const auto ls = lambda.segment(b.offset, b.size);
        const auto ws = w.segment(b.offset, b.size);
        auto us = u.segment(b.offset, b.size);
        switch (b.kind)
        {
        case ConeKind::Nonnegative:
            us = ws.cwiseQuotient(ls);
            break;
        case ConeKind::SecondOrder:
        {
            const int t = b.size - 1;
            const double den = soc_jnorm2(ls);
            const double u0 = (ls(0) * ws(0) - ls.tail(t).dot(ws.tail(t))) / den;
            us(0) = u0;
            us.tail(t) = (ws.tail(t) - u0 * ls.tail(t)) / ls(0);
            break;
        }
        case ConeKind::Psd:
        {
            int k = 0;
            for (int j = 0; j < b.dim; ++j)
                for (int i = j; i < b.dim; ++i, ++k)
                {
                    const double li = ls(svec_index(b.dim, i, i));
                    const double lj = ls(svec_index(b.dim, j, j));
                    us(k) = 2.0 * ws(k) / (li + lj);
                }
            break;
        }
        }
    }
    return u;
}

/// Largest alpha with lambda + alpha d in K (lambda interior, PSD part diagonal). Returns +inf if unbounded.
double max_step(const std::vector<BlockInfo> &blocks, const RVec &lambda, const RVec &d)
{
    double alpha = kInf;
    for (const auto &b : blocks)
    {
        const auto ls = lambda.segment(b.offset, b.size);
        const auto ds = d.segment(b.offset, b.size);
        switch (b.kind)
        {
        case ConeKind::Nonnegative:
            for (int i = 0; i < b.size; ++i)
                if (ds(i) < 0.0)
                    alpha = std::min(alpha, -ls(i) / ds(i));
            break;
        case ConeKind::SecondOrder:
        {
            const int t = b.size - 1;
            const double nrm = std::sqrt(std::max(soc_jnorm2(ls), 1e-300));
            const RVec lbar = ls / nrm;
            const double ld = lbar(0) * ds(0) - lbar.tail(t).dot(ds.tail(t));
            const double rho0 = ld / nrm;
            const double factor = (ld + ds(0)) / (lbar(0) + 1.0);
            const RVec rho1 = (ds.tail(t) - factor * lbar.tail(t)) / nrm;
            const double sig = rho1.norm() - rho0;
            if (sig > 0.0)
                alpha = std::min(alpha, 1.0 / sig);
            break;
        }
        case ConeKind::Psd:
        {
            RMat D = smat(ds, b.dim);
            RVec isq(b.dim);
            for (int i = 0; i < b.dim; ++i)
                isq(i) = 1.0 / std::sqrt(ls(svec_index(b.dim, i, i)));
            D = isq.asDiagonal() * D * isq.asDiagonal();
            Eigen::SelfAdjointEigenSolver<RMat> eig(D, Eigen::EigenvaluesOnly);
            const double lmin = eig.eigenvalues()(0);
            if (lmin < 0.0)
                alpha = std::min(alpha, -1.0 / lmin);
            break;
        }
        }
    }
    return alpha;
}

/// Nesterov-Todd scaling W with W z = W^{-T} s = lambda.
class NtScaling
{
  public:
    explicit NtScaling(const std::vector<BlockInfo> &blocks) : blocks_(blocks), data_(blocks.size()) {}

    void set_identity()
    {
        for (std::size_t i = 0; i < blocks_.size(); ++i)
        {
            const auto &b = blocks_[i];
            auto &d = data_[i];
            d.identity = true;
            if (b.kind == ConeKind::Nonnegative)
                d.d = RVec::Ones(b.size);
        }
    }

    /// Returns false when s or z is not strictly inside the cone.
    bool compute(const RVec &s, const RVec &z)
    {
        for (std::size_t bi = 0; bi < blocks_.size(); ++bi)
        {
            const auto &b = blocks_[bi];
            auto &d = data_[bi];
            d.identity = false;
            const auto ss = s.segment(b.offset, b.size);
            const auto zs = z.segment(b.offset, b.size);
            switch (b.kind)
            {
            case ConeKind::Nonnegative:
                if (ss.minCoeff() <= 0.0 || zs.minCoeff() <= 0.0)
                    return false;
                d.d = ss.cwiseQuotient(zs).cwiseSqrt();
                break;
            case ConeKind::SecondOrder:
            {
                const double sj = soc_jnorm2(ss);
                const double zj = soc_jnorm2(zs);
                if (!(sj > 0.0) || !(zj > 0.0) || ss(0) <= 0.0 || zs(0) <= 0.0)
                    return false;
                const double aa = std::sqrt(sj);
                const double bb = std::sqrt(zj);
                d.beta = std::sqrt(aa / bb);
                const RVec sb = ss / aa;
                const RVec zb = zs / bb;
                const double cc = std::sqrt(0.5 * (1.0 + sb.dot(zb)));
                RVec jz = zb;
                jz.tail(b.size - 1) *= -1.0;
                RVec wb = (sb + jz) / (2.0 * cc);
                RVec v = wb;
                v(0) += 1.0;
                v /= std::sqrt(2.0 * (wb(0) + 1.0));
                d.v = v;
                break;
            }
            case ConeKind::Psd:
            {
                const RMat S = smat(ss, b.dim);
                const RMat Z = smat(zs, b.dim);
                Eigen::LLT<RMat> ls(S), lz(Z);
                if (ls.info() != Eigen::Success || lz.info() != Eigen::Success)
                    return false;
                const RMat Ls = ls.matrixL();
                const RMat Lz = lz.matrixL();
                Eigen::JacobiSVD<RMat> svd(Lz.transpose() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
                const RVec sv = svd.singularValues();
                if (!(sv.minCoeff() > 0.0))
                    return false;
                d.R = Ls * svd.matrixV() * sv.cwiseSqrt().cwiseInverse().asDiagonal();
                d.Rinv = sv.cwiseSqrt().asDiagonal() * svd.matrixV().transpose() *
                         Ls.triangularView<Eigen::Lower>().solve(RMat::Identity(b.dim, b.dim));
                break;
            }
            }
        }
        return true;
    }

    RVec W(const RVec &x) const { return apply(x, Op::W); }
    RVec WT(const RVec &x) const { return apply(x, Op::WT); }
    RVec Winv(const RVec &x) const { return apply(x, Op::Winv); }
    RVec WinvT(const RVec &x) const { return apply(x, Op::WinvT); }

    /// W^{-T} applied to each column of a dense block (rows of block bi).
    RMat WinvT_block(std::size_t bi, const RMat &cols) const
    {
        RMat out(cols.rows(), cols.cols());
        for (Eigen::Index j = 0; j < cols.cols(); ++j)
            out.col(j) = apply_block(bi, cols.col(j), Op::WinvT);
        return out;
    }

    /// Nonnegative blocks only.
    const RVec &diag(std::size_t bi) const { return data_[bi].d; }

  private:
    enum class Op
    {
        W,
        WT,
        Winv,
        WinvT
    };

    struct Data
    {
        bool identity = true;
        RVec d;
        double beta = 1.0;
        RVec v;
        RMat R, Rinv;
    };

    RVec apply_block(std::size_t bi, const RVec &x, Op op) const
    {
        const auto &b = blocks_[bi];
        const auto &d = data_[bi];
        if (d.identity)
            return x;
        switch (b.kind)
        {
        case ConeKind::Nonnegative:
            return (op == Op::W || op == Op::WT) ? RVec(x.cwiseProduct(d.d)) : RVec(x.cwiseQuotient(d.d));
        case ConeKind::SecondOrder:
        {
            // W = beta (2 v v^T - J), W^{-1} = (2 J v v^T J - J) / beta; both symmetric.
            RVec jx = x;
            jx.tail(b.size - 1) *= -1.0;
            if (op == Op::W || op == Op::WT)
                return d.beta * (2.0 * d.v.dot(x) * d.v - jx);
            RVec jv = d.v;
            jv.tail(b.size - 1) *= -1.0;
            return (2.0 * jv.dot(x) * jv - jx) / d.beta;
        }
        case ConeKind::Psd:
        {
            const RMat X = smat(x, b.dim);
            switch (op)
            {
            case Op::W:
                return svec(d.R.transpose() * X * d.R);
            case Op::WT:
                return svec(d.R * X * d.R.transpose());
            case Op::Winv:
                return svec(d.Rinv.transpose() * X * d.Rinv);
            case Op::WinvT:
                return svec(d.Rinv * X * d.Rinv.transpose());
            }
        }
        }
        return x;
    }

    RVec apply(const RVec &x, Op op) const
    {
        RVec out(x.size());
        for (std::size_t bi = 0; bi < blocks_.size(); ++bi)
        {
            const auto &b = blocks_[bi];
            out.segment(b.offset, b.size) = apply_block(bi, x.segment(b.offset, b.size), op);
        }
        return out;
    }

    const std::vector<BlockInfo> &blocks_;
    std::vector<Data> data_;
};

/// Reduced KKT solver for [0 A^T G^T; A 0 0; G 0 -W^T W].
class KktSolver
{
  public:
    KktSolver(const ConicProblem &p, const std::vector<BlockInfo> &blocks) : p_(p), blocks_(blocks)
    {
        const int n = p.num_vars;
        At_ = p.A.transpose();
        Gt_ = p.G.transpose();
        dense_blocks_.resize(blocks.size());
        for (std::size_t bi = 0; bi < blocks.size(); ++bi)
        {
            const auto &b = blocks[bi];
            if (b.kind == ConeKind::Nonnegative)
                continue;
            std::vector<char> used(n, 0);
            for (int r = b.offset; r < b.offset + b.size; ++r)
                for (SparseMat::InnerIterator it(p.G, r); it; ++it)
                    used[it.col()] = 1;
            auto &db = dense_blocks_[bi];
            for (int j = 0; j < n; ++j)
                if (used[j])
                    db.cols.push_back(j);
            db.G = RMat::Zero(b.size, static_cast<Eigen::Index>(db.cols.size()));
            std::vector<int> pos(n, -1);
            for (std::size_t t = 0; t < db.cols.size(); ++t)
                pos[db.cols[t]] = static_cast<int>(t);
            for (int r = b.offset; r < b.offset + b.size; ++r)
                for (SparseMat::InnerIterator it(p.G, r); it; ++it)
                    db.G(r - b.offset, pos[it.col()]) += it.value();
        }
    }

    bool factor(const NtScaling &W)
    {
        W_ = &W;
        const int n = p_.num_vars;
        const int pe = p_.num_eq();
        RMat H = RMat::Zero(n, n);
        for (std::size_t bi = 0; bi < blocks_.size(); ++bi)
        {
            const auto &b = blocks_[bi];
            if (b.kind == ConeKind::Nonnegative)
            {
                const RVec &d = W.diag(bi);
                for (int r = 0; r < b.size; ++r)
                {
                    const double w = 1.0 / (d(r) * d(r));
                    const int row = b.offset + r;
                    for (SparseMat::InnerIterator a(p_.G, row); a; ++a)
                        for (SparseMat::InnerIterator c(p_.G, row); c; ++c)
                            H(a.col(), c.col()) += w * a.value() * c.value();
                }
                continue;
            }
            const auto &db = dense_blocks_[bi];
            const RMat Gs = W.WinvT_block(bi, db.G);
            const RMat Hb = Gs.transpose() * Gs;
            for (std::size_t i = 0; i < db.cols.size(); ++i)
                for (std::size_t j = 0; j < db.cols.size(); ++j)
                    H(db.cols[i], db.cols[j]) += Hb(i, j);
        }
        const double scale = std::max(H.diagonal().cwiseAbs().maxCoeff(), 1.0);
        const double reg = 1e-13 * scale;
        if (pe == 0)
        {
            llt_.compute(H);
            use_llt_ = llt_.info() == Eigen::Success;
            if (!use_llt_)
            {
                H.diagonal().array() += reg;
                llt_.compute(H);
                use_llt_ = llt_.info() == Eigen::Success;
            }
            if (!use_llt_)
                lu_.compute(H);
        }
        else
        {
            // unregularized first; a fixed shift swamps the small eigenvalues of H near
            // convergence and refinement then stops contracting
            RMat M = RMat::Zero(n + pe, n + pe);
            M.topLeftCorner(n, n) = H;
            const RMat Ad = RMat(p_.A);
            M.topRightCorner(n, pe) = Ad.transpose();
            M.bottomLeftCorner(pe, n) = Ad;
            use_llt_ = false;
            lu_.compute(M);
            const double piv = lu_.matrixLU().diagonal().cwiseAbs().minCoeff();
            if (!(piv > 1e-15 * scale) || !std::isfinite(piv))
            {
                M.topLeftCorner(n, n).diagonal().array() += reg;
                M.bottomRightCorner(pe, pe).diagonal().setConstant(-1e-14 * scale);
                lu_.compute(M);
            }
        }
        if (!use_llt_)
        {
            const double det_scale = lu_.matrixLU().diagonal().cwiseAbs().minCoeff();
            if (!(det_scale > 0.0) || !std::isfinite(det_scale))
                return false;
        }
        return true;
    }

    /// Solves K [x; y; z] = [r1; r2; r3] with iterative refinement.
    bool solve(const RVec &r1, const RVec &r2, const RVec &r3, RVec &x, RVec &y, RVec &z, int refine) const
    {
        solve_once(r1, r2, r3, x, y, z);
        for (int it = 0; it < refine; ++it)
        {
            const RVec e1 = r1 - (At_ * y + Gt_ * z);
            const RVec e2 = r2 - p_.A * x;
            const RVec e3 = r3 - (p_.G * x - W_->WT(W_->W(z)));
            RVec dx, dy, dz;
            solve_once(e1, e2, e3, dx, dy, dz);
            x += dx;
            y += dy;
            z += dz;
        }
        return x.allFinite() && y.allFinite() && z.allFinite();
    }

  private:
    void solve_once(const RVec &r1, const RVec &r2, const RVec &r3, RVec &x, RVec &y, RVec &z) const
    {
        const int n = p_.num_vars;
        const int pe = p_.num_eq();
        const RVec t3 = W_->WinvT(r3);
        const RVec rx = r1 + Gt_ * W_->Winv(t3);
        if (pe == 0)
        {
            x = use_llt_ ? RVec(llt_.solve(rx)) : RVec(lu_.solve(rx));
            y = RVec::Zero(0);
        }
        else
        {
            RVec rhs(n + pe);
            rhs << rx, r2;
            const RVec sol = lu_.solve(rhs);
            x = sol.head(n);
            y = sol.tail(pe);
        }
        z = W_->Winv(W_->WinvT(RVec(p_.G * x)) - t3);
    }

    struct DenseBlock
    {
        std::vector<int> cols;
        RMat G;
    };

    const ConicProblem &p_;
    const std::vector<BlockInfo> &blocks_;
    SparseMat At_, Gt_;
    std::vector<DenseBlock> dense_blocks_;
    const NtScaling *W_ = nullptr;
    Eigen::LLT<RMat> llt_;
    Eigen::PartialPivLU<RMat> lu_;
    bool use_llt_ = true;
};

double safe_norm(const RVec &v) { return v.size() ? v.norm() : 0.0; }

} // namespace

ConicSolution solve(const ConicProblem &problem, const ConicSettings &settings)
{
    problem.validate();
    const auto blocks = block_layout(problem.cones);
    const int n = problem.num_vars;
    const int pe = problem.num_eq();
    const int m = problem.cone_dim();
    const double nu = problem.degree();
    const RVec &c = problem.c;
    const RVec &b = problem.b;
    const RVec &h = problem.h;
    const SparseMat &A = problem.A;
    const SparseMat &G = problem.G;
    const SparseMat At = A.transpose();
    const SparseMat Gt = G.transpose();
    const RVec e = cone_identity(blocks, m);
    const double cn = std::max(1.0, safe_norm(c));
    const double bn = std::max(1.0, safe_norm(b));
    const double hn = std::max(1.0, safe_norm(h));

    ConicSolution sol;
    NtScaling W(blocks);
    KktSolver kkt(problem, blocks);

    auto fail = [&](int iters) {
        sol.status = ConicStatus::NumericalFailure;
        sol.iterations = iters;
        return sol;
    };

    // Starting point from the two least-squares problems with W = I.
    W.set_identity();
    if (!kkt.factor(W))
        return fail(0);
    RVec x, y, z, s;
    {
        RVec zt;
        if (!kkt.solve(RVec::Zero(n), b, h, x, y, zt, settings.refinement_steps))
            return fail(0);
        s = -zt;
        RVec xd, yd;
        if (!kkt.solve(-c, RVec::Zero(pe), RVec::Zero(m), xd, y, z, settings.refinement_steps))
            return fail(0);
    }
    if (m > 0)
    {
        // shift into the interior unless already there by a safe margin
        const double ap = -cone_min_eig(blocks, s);
        if (ap >= -1e-8 * std::max(1.0, s.norm()))
            s += (1.0 + ap) * e;
        const double ad = -cone_min_eig(blocks, z);
        if (ad >= -1e-8 * std::max(1.0, z.norm()))
            z += (1.0 + ad) * e;
    }
    double tau = 1.0;
    double kappa = 1.0;

    for (int iter = 0;; ++iter)
    {
        const RVec Gx = G * x;
        const RVec Ax = A * x;
        const RVec ATy = At * y;
        const RVec GTz = Gt * z;
        const double cx = c.dot(x);
        const double by = b.dot(y);
        const double hz = h.dot(z);
        const RVec rx = ATy + GTz + tau * c;
        const RVec ry = Ax - tau * b;
        const RVec rz = Gx + s - tau * h;
        const double rt = kappa + cx + by + hz;
        const double sz = s.dot(z);
        const double mu = (sz + tau * kappa) / (nu + 1.0);

        const double pcost = cx / tau;
        const double dcost = -(by + hz) / tau;
        const double pres = std::max(safe_norm(ry) / bn, safe_norm(rz) / hn) / tau;
        const double dres = safe_norm(rx) / cn / tau;
        const double gap = sz / (tau * tau);
        double relgap = kInf;
        if (pcost < 0.0)
            relgap = gap / -pcost;
        else if (dcost > 0.0)
            relgap = gap / dcost;
        const double pinfres = (by + hz) < 0.0 ? safe_norm(ATy + GTz) / cn / -(by + hz) : kInf;
        const double dinfres =
            cx < 0.0 ? std::max(safe_norm(Ax) / bn, safe_norm(RVec(Gx + s)) / hn) / -cx : kInf;

        sol.iterations = iter;
        sol.primal_residual = pres;
        sol.dual_residual = dres;
        if (settings.verbose)
            std::fprintf(stderr, "%3d % .8e % .8e %.2e %.2e %.2e %.2e %.2e | %.2e %.2e %.2e %.2e %.2e\n", iter, pcost,
                         dcost, gap, pres, dres, tau, kappa, pinfres, safe_norm(rx), safe_norm(z), by + hz, cx);
        if (!std::isfinite(pres) || !std::isfinite(dres) || !std::isfinite(mu))
            return fail(iter);

        if (pres <= settings.tol && dres <= settings.tol && (gap <= settings.tol || relgap <= settings.tol))
        {
            sol.status = ConicStatus::Optimal;
            sol.x = x / tau;
            sol.y = y / tau;
            sol.z = z / tau;
            sol.s = s / tau;
            sol.primal_objective = pcost;
            sol.dual_objective = dcost;
            sol.gap = gap;
            return sol;
        }
        if (pinfres <= settings.tol)
        {
            const double f = -1.0 / (by + hz);
            sol.status = ConicStatus::PrimalInfeasible;
            sol.y = y * f;
            sol.z = z * f;
            sol.x = RVec::Zero(n);
            sol.s = RVec::Zero(m);
            sol.primal_residual = pinfres;
            return sol;
        }
        if (dinfres <= settings.tol)
        {
            const double f = -1.0 / cx;
            sol.status = ConicStatus::DualInfeasible;
            sol.x = x * f;
            sol.s = s * f;
            sol.y = RVec::Zero(pe);
            sol.z = RVec::Zero(m);
            sol.dual_residual = dinfres;
            return sol;
        }
        // tau -> 0 with kappa bounded away and no certificate emerging: a problem on the
        // feasibility boundary. Report it like an iteration cap, tolerances unmet.
        const bool stalled =
            iter > 5 && tau < 1e-10 * kappa && std::min(pinfres, dinfres) > std::sqrt(settings.tol);
        if (iter >= settings.max_iters || stalled)
        {
            sol.status = ConicStatus::MaxIters;
            sol.x = x / tau;
            sol.y = y / tau;
            sol.z = z / tau;
            sol.s = s / tau;
            sol.primal_objective = pcost;
            sol.dual_objective = dcost;
            sol.gap = gap;
            return sol;
        }

        if (!W.compute(s, z) || !kkt.factor(W))
            return fail(iter);
        const RVec lambda = W.W(z);
        const RVec ll = jordan_product(blocks, lambda, lambda);

        RVec x1, y1, z1;
        if (!kkt.solve(-c, b, h, x1, y1, z1, settings.refinement_steps))
            return fail(iter);
        const double den_part = c.dot(x1) + b.dot(y1) + h.dot(z1);

        struct Direction
        {
            RVec dx, dy, dz, ds;
            double dtau, dkappa;
        };
        auto direction = [&](double eta, const RVec &ds_target, double dk_target) -> std::optional<Direction> {
            const RVec ldiv = jordan_divide(blocks, lambda, ds_target);
            RVec x0, y0, z0;
            if (!kkt.solve(-eta * rx, -eta * ry, RVec(-eta * rz - W.WT(ldiv)), x0, y0, z0,
                           settings.refinement_steps))
                return std::nullopt;
            const double num = -eta * rt - dk_target / tau - (c.dot(x0) + b.dot(y0) + h.dot(z0));
            const double den = den_part - kappa / tau;
            Direction d;
            d.dtau = num / den;
            d.dx = x0 + d.dtau * x1;
            d.dy = y0 + d.dtau * y1;
            d.dz = z0 + d.dtau * z1;
            // From the linearized primal equation G dx + ds = -eta rz + dtau h; recovering ds
            // through the scaling instead loses the primal residual once W is badly conditioned.
            d.ds = -eta * rz + d.dtau * h - G * d.dx;
            d.dkappa = (dk_target - kappa * d.dtau) / tau;
            if (!std::isfinite(d.dtau) || !d.dx.allFinite() || !d.dz.allFinite() || !d.ds.allFinite())
                return std::nullopt;
            return d;
        };
        auto step_length = [&](const Direction &d, RVec &dsw, RVec &dzw) {
            dsw = W.WinvT(d.ds);
            dzw = W.W(d.dz);
            double a = kInf;
            if (m > 0)
                a = std::min(max_step(blocks, lambda, dsw), max_step(blocks, lambda, dzw));
            if (d.dtau < 0.0)
                a = std::min(a, -tau / d.dtau);
            if (d.dkappa < 0.0)
                a = std::min(a, -kappa / d.dkappa);
            return a;
        };

        const auto aff = direction(1.0, -ll, -tau * kappa);
        if (!aff)
            return fail(iter);
        RVec dsw_a, dzw_a;
        const double alpha_aff = std::min(1.0, step_length(*aff, dsw_a, dzw_a));
        const double sigma = std::pow(1.0 - alpha_aff, 3);

        const RVec ds_target = -ll - jordan_product(blocks, dsw_a, dzw_a) + sigma * mu * e;
        const double dk_target = -tau * kappa - aff->dtau * aff->dkappa + sigma * mu;
        const auto cmb = direction(1.0 - sigma, ds_target, dk_target);
        if (!cmb)
            return fail(iter);
        RVec dsw, dzw;
        const double alpha = std::min(1.0, settings.step_fraction * step_length(*cmb, dsw, dzw));
        if (!(alpha > 1e-14))
            return fail(iter);

        x += alpha * cmb->dx;
        y += alpha * cmb->dy;
        z += alpha * cmb->dz;
        s += alpha * cmb->ds;
        tau += alpha * cmb->dtau;
        kappa += alpha * cmb->dkappa;
    }
}

double cone_violation(const ConicProblem &problem, const RVec &v)
{
    const auto blocks = block_layout(problem.cones);
    double worst = 0.0;
    for (const auto &b : blocks)
    {
        const auto seg = v.segment(b.offset, b.size);
        std::vector<BlockInfo> one{{b.kind, 0, b.size, b.dim}};
        const double me = cone_min_eig(one, RVec(seg));
        worst = std::max(worst, std::max(0.0, -me) / (1.0 + seg.norm()));
    }
    return worst;
}

CertificateReport verify_certificate(const ConicProblem &problem, const ConicSolution &sol, double tol)
{
    CertificateReport r;
    const double cn = std::max(1.0, safe_norm(problem.c));
    const double bn = std::max(1.0, safe_norm(problem.b));
    const double hn = std::max(1.0, safe_norm(problem.h));
    switch (sol.status)
    {
    case ConicStatus::Optimal:
    {
        const RVec s = problem.h - problem.G * sol.x;
        r.primal_residual = safe_norm(RVec(problem.A * sol.x - problem.b)) / bn;
        r.dual_residual =
            safe_norm(RVec(problem.c + problem.A.transpose() * sol.y + problem.G.transpose() * sol.z)) / cn;
        const double pobj = problem.c.dot(sol.x);
        const double dobj = -(problem.b.dot(sol.y) + problem.h.dot(sol.z));
        r.gap = std::abs(pobj - dobj) / std::max(1.0, std::abs(pobj));
        r.cone_violation = std::max(cone_violation(problem, s), cone_violation(problem, sol.z));
        break;
    }
    case ConicStatus::PrimalInfeasible:
    {
        const double f = problem.b.dot(sol.y) + problem.h.dot(sol.z);
        if (!(f < 0.0))
            return r;
        r.dual_residual =
            safe_norm(RVec(problem.A.transpose() * sol.y + problem.G.transpose() * sol.z)) / cn / -f;
        r.cone_violation = cone_violation(problem, RVec(sol.z / -f));
        break;
    }
    case ConicStatus::DualInfeasible:
    {
        const double f = problem.c.dot(sol.x);
        if (!(f < 0.0))
            return r;
        const RVec s = -(problem.G * sol.x);
        r.primal_residual = safe_norm(RVec(problem.A * sol.x)) / bn / -f;
        r.cone_violation = cone_violation(problem, RVec(s / -f));
        (void)hn;
        break;
    }
    default:
        return r;
    }
    r.valid = r.primal_residual <= tol && r.dual_residual <= tol && r.gap <= tol && r.cone_violation <= tol;
    return r;
}

} // namespace wpcf
