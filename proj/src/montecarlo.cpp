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

#include "wpcf/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace wpcf
{

bool mc_agrees(double mc, double se, double reference, double rel, double nse)
{
    const double slack = std::max(rel * std::abs(reference), nse * se);
    return std::abs(mc - reference) <= slack + 1e-12 * std::abs(reference) + 1e-300;
}

bool mc_agrees(cdouble mc, double se, cdouble reference, double rel, double nse)
{
    const double slack = std::max(rel * std::abs(reference), nse * se);
    return std::abs(mc - reference) <= slack + 1e-12 * std::abs(reference) + 1e-300;
}

void RunningMoments::add(double x)
{
    ++n_;
    sum_ += x;
    sum_sq_ += x * x;
}

McEstimate RunningMoments::estimate() const
{
    if (n_ == 0)
        return {};
    const double m = sum_ / n_;
    const double var = std::max(0.0, sum_sq_ / n_ - m * m);
    return {m, std::sqrt(var / n_)};
}

void RunningComplexMoments::add(cdouble x)
{
    ++n_;
    sum_ += x;
    sum_abs_sq_ += std::norm(x);
}

McComplexEstimate RunningComplexMoments::estimate() const
{
    if (n_ == 0)
        return {};
    const cdouble m = sum_ / static_cast<double>(n_);
    const double var = std::max(0.0, sum_abs_sq_ / n_ - std::norm(m));
    return {m, std::sqrt(var / n_)};
}

namespace
{

/// F with A = F F^H, from the eigendecomposition. Negative eigenvalues beyond rounding are rejected.
// reference: magnitude the tolerance is relative to (A may be a difference of larger matrices)
CMat psd_factor(const CMat &A, double reference = 0.0)
{
    Eigen::SelfAdjointEigenSolver<CMat> eig(0.5 * (A + A.adjoint()));
    RVec ev = eig.eigenvalues();
    const double scale = std::max({ev.cwiseAbs().maxCoeff(), reference, 1e-300});
    if (ev.minCoeff() < -1e-10 * scale)
        throw ContractViolation("covariance is not positive semidefinite");
    ev = ev.cwiseMax(0.0);
    return eig.eigenvectors() * ev.cwiseSqrt().cast<cdouble>().asDiagonal();
}

RMat real_psd_factor(const RMat &A)
{
    Eigen::SelfAdjointEigenSolver<RMat> eig(0.5 * (A + A.transpose()));
    RVec ev = eig.eigenvalues();
    const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    if (ev.minCoeff() < -1e-10 * scale)
        throw ContractViolation("WPT matrix is not positive semidefinite");
    ev = ev.cwiseMax(0.0);
    return eig.eigenvectors() * ev.cwiseSqrt().asDiagonal();
}

CVec gaussian(Rng &rng, Eigen::Index n, double variance)
{
    std::normal_distribution<double> nd(0.0, 1.0);
    const double s = std::sqrt(variance / 2.0);
    CVec v(n);
    for (Eigen::Index i = 0; i < n; ++i)
    {
        const double re = nd(rng);
        const double im = nd(rng);
        v(i) = cdouble(s * re, s * im);
    }
    return v;
}

/// All the per-sample state of one coherence block: channels and the MR weights built from
/// an explicit pilot transmission.
class BlockSampler
{
  public:
    BlockSampler(const ChannelStatistics &stats, const PilotAssignment &pilots, const PilotParams &pp,
                 Estimator estimator)
        : stats_(stats), pilots_(pilots), pp_(pp), estimator_(estimator)
    {
        const int K = stats.num_ues;
        const int L = stats.num_aps;
        const int N = stats.antennas;
        const int tp = pp.tau_p;
        phi_.resize(tp, tp);
        for (int t = 0; t < tp; ++t)
            for (int j = 0; j < tp; ++j)
                phi_(t, j) = std::polar(1.0, -2.0 * std::numbers::pi * t * j / tp);

        filter_ = make_link_table<CMat>(K, L);
        for (int k = 0; k < K; ++k)
            for (int l = 0; l < L; ++l)
            {
                CMat psi = pp.noise_power * CMat::Identity(N, N);
                for (int i = 0; i < K; ++i)
                    if (pilots.pilot_index[i] == pilots.pilot_index[k])
                        psi += tp * pp.pilot_power * stats.R(i, l);
                filter_[k][l] = std::sqrt(tp * pp.pilot_power) * stats.R(k, l) * psi.inverse();
            }
        g_ = make_link_table<CVec>(K, L);
        z_ = make_link_table<CVec>(K, L);
        v_ = make_link_table<CVec>(K, L);
    }

    void draw(Rng &rng)
    {
        const int K = stats_.num_ues;
        const int L = stats_.num_aps;
        const int N = stats_.antennas;
        const int tp = pp_.tau_p;
        std::uniform_real_distribution<double> ud(0.0, 2.0 * std::numbers::pi);
        for (int k = 0; k < K; ++k)
            for (int l = 0; l < L; ++l)
                g_[k][l] = std::polar(1.0, ud(rng)) * stats_.gbar(k, l) + gaussian(rng, N, stats_.beta(k, l));

        for (int l = 0; l < L; ++l)
        {
            CMat Y(N, tp);
            for (int t = 0; t < tp; ++t)
                Y.col(t) = gaussian(rng, N, pp_.noise_power);
            for (int k = 0; k < K; ++k)
                Y += std::sqrt(pp_.pilot_power) * g_[k][l] * phi_.col(pilots_.pilot_index[k]).transpose();
            for (int k = 0; k < K; ++k)
            {
                z_[k][l] = Y * phi_.col(pilots_.pilot_index[k]).conjugate() / std::sqrt(static_cast<double>(tp));
                v_[k][l] = estimator_ == Estimator::Lmmse ? CVec(filter_[k][l] * z_[k][l]) : z_[k][l];
            }
        }
    }

    const CVec &g(int k, int l) const { return g_[k][l]; }
    const CVec &z(int k, int l) const { return z_[k][l]; }
    const CVec &v(int k, int l) const { return v_[k][l]; }

  private:
    const ChannelStatistics &stats_;
    const PilotAssignment &pilots_;
    PilotParams pp_;
    Estimator estimator_;
    CMat phi_;
    LinkTable<CMat> filter_;
    LinkTable<CVec> g_, z_, v_;
};

} // namespace

McDownlink mc_downlink(const ChannelStatistics &stats, const PilotAssignment &pilots, const PilotParams &pp,
                       Estimator estimator, const std::vector<RMat> &P, int num_samples, Rng &rng)
{
    const int K = stats.num_ues;
    const int L = stats.num_aps;
    if (num_samples < 1)
        throw ContractViolation("mc_downlink: num_samples must be >= 1");
    std::vector<RMat> F(K);
    for (int i = 0; i < K; ++i)
        F[i] = real_psd_factor(P[i]);

    BlockSampler block(stats, pilots, pp, estimator);
    std::vector<RunningMoments> in(K), ap(L);
    for (int s = 0; s < num_samples; ++s)
    {
        block.draw(rng);
        std::vector<CVec> xl(L, CVec::Zero(stats.antennas));
        for (int i = 0; i < K; ++i)
        {
            const CVec sym = gaussian(rng, F[i].cols(), 1.0);
            for (int l = 0; l < L; ++l)
            {
                const cdouble a = F[i].row(l).cast<cdouble>() * sym;
                xl[l] += a * block.v(i, l);
            }
        }
        for (int l = 0; l < L; ++l)
            ap[l].add(xl[l].squaredNorm());
        for (int k = 0; k < K; ++k)
        {
            cdouble y = 0.0;
            for (int l = 0; l < L; ++l)
                y += block.g(k, l).dot(xl[l]);
            in[k].add(std::norm(y));
        }
    }
    McDownlink out;
    for (auto &r : in)
        out.input_power.push_back(r.estimate());
    for (auto &r : ap)
        out.ap_power.push_back(r.estimate());
    return out;
}

McEstimate mc_input_power(const ChannelStatistics &stats, const PilotAssignment &pilots, const PilotParams &pp,
                          Estimator estimator, WptScheme scheme, const RMat &p, int k, int num_samples, Rng &rng)
{
    std::vector<RMat> P(stats.num_ues);
    for (int i = 0; i < stats.num_ues; ++i)
    {
        const RVec row = p.row(i).transpose();
        if (row.minCoeff() < 0.0)
            throw ContractViolation("mc_input_power: negative power coefficient");
        if (scheme == WptScheme::Coherent)
            P[i] = row.cwiseSqrt() * row.cwiseSqrt().transpose();
        else
            P[i] = row.asDiagonal();
    }
    return mc_downlink(stats, pilots, pp, estimator, P, num_samples, rng).input_power[k];
}

McSECoefficients mc_se_coefficients(const ChannelStatistics &stats, const PilotAssignment &pilots,
                                    const PilotParams &pp, Estimator estimator, int k, int num_samples, Rng &rng)
{
    const int K = stats.num_ues;
    const int L = stats.num_aps;
    const int N = stats.antennas;
    BlockSampler block(stats, pilots, pp, estimator);
    std::vector<RunningComplexMoments> b(L), d(L);
    std::vector<std::vector<RunningComplexMoments>> C(K, std::vector<RunningComplexMoments>(L * L));
    CVec xi(L);
    for (int s = 0; s < num_samples; ++s)
    {
        block.draw(rng);
        for (int l = 0; l < L; ++l)
        {
            const CVec n = gaussian(rng, N, pp.noise_power);
            d[l].add(std::norm(block.v(k, l).dot(n)));
            b[l].add(block.v(k, l).dot(block.g(k, l)));
        }
        for (int i = 0; i < K; ++i)
        {
            for (int l = 0; l < L; ++l)
                xi(l) = block.v(k, l).dot(block.g(i, l));
            for (int l = 0; l < L; ++l)
                for (int lp = 0; lp < L; ++lp)
                    C[i][l * L + lp].add(xi(l) * std::conj(xi(lp)));
        }
    }
    McSECoefficients out;
    out.b.resize(L);
    out.b_se.resize(L);
    out.d.resize(L);
    out.d_se.resize(L);
    for (int l = 0; l < L; ++l)
    {
        const auto eb = b[l].estimate();
        out.b(l) = eb.mean;
        out.b_se(l) = eb.std_error;
        const auto ed = d[l].estimate();
        out.d(l) = ed.mean.real();
        out.d_se(l) = ed.std_error;
    }
    out.C.assign(K, CMat(L, L));
    out.C_se.assign(K, RMat(L, L));
    for (int i = 0; i < K; ++i)
        for (int l = 0; l < L; ++l)
            for (int lp = 0; lp < L; ++lp)
            {
                const auto e = C[i][l * L + lp].estimate();
                out.C[i](l, lp) = e.mean;
                out.C_se[i](l, lp) = e.std_error;
            }
    return out;
}

McEstimationMoments mc_estimation_moments(const ChannelStatistics &stats, const PilotAssignment &pilots,
                                          const PilotParams &pp, int k, int l, int num_samples, Rng &rng)
{
    const int N = stats.antennas;
    BlockSampler block(stats, pilots, pp, Estimator::Lmmse);
    std::vector<RunningComplexMoments> zz(N * N), gg(N * N);
    RunningComplexMoments cross;
    RunningMoments znorm;
    for (int s = 0; s < num_samples; ++s)
    {
        block.draw(rng);
        const CVec &z = block.z(k, l);
        const CVec &gh = block.v(k, l);
        for (int a = 0; a < N; ++a)
            for (int c = 0; c < N; ++c)
            {
                zz[a * N + c].add(z(a) * std::conj(z(c)));
                gg[a * N + c].add(gh(a) * std::conj(gh(c)));
            }
        cross.add(gh.dot(block.g(k, l) - gh));
        znorm.add(z.squaredNorm());
    }
    McEstimationMoments out;
    out.zz.resize(N, N);
    out.zz_se.resize(N, N);
    out.gg.resize(N, N);
    out.gg_se.resize(N, N);
    for (int a = 0; a < N; ++a)
        for (int c = 0; c < N; ++c)
        {
            const auto ez = zz[a * N + c].estimate();
            const auto eg = gg[a * N + c].estimate();
            out.zz(a, c) = ez.mean;
            out.zz_se(a, c) = ez.std_error;
            out.gg(a, c) = eg.mean;
            out.gg_se(a, c) = eg.std_error;
        }
    out.cross = cross.estimate();
    out.z_norm = znorm.estimate();
    return out;
}

McChannelMoments mc_channel_moments(const ChannelStatistics &stats, int k, int l, int num_samples, Rng &rng)
{
    const int N = stats.antennas;
    std::uniform_real_distribution<double> ud(0.0, 2.0 * std::numbers::pi);
    CMat gg = CMat::Zero(N, N);
    CVec mean = CVec::Zero(N);
    RunningComplexMoments phase;
    for (int s = 0; s < num_samples; ++s)
    {
        const cdouble e = std::polar(1.0, ud(rng));
        const CVec g = e * stats.gbar(k, l) + gaussian(rng, N, stats.beta(k, l));
        gg += g * g.adjoint();
        mean += g;
        phase.add(e);
    }
    return {gg / static_cast<double>(num_samples), mean / static_cast<double>(num_samples), phase.estimate()};
}

IdentityCheck verify_lemma5(const CMat &A, const CMat &B, int num_samples, Rng &rng, double nse)
{
    const Eigen::Index N = A.rows();
    const CMat F = psd_factor(A);
    RunningMoments acc;
    for (int s = 0; s < num_samples; ++s)
    {
        const CVec u = F * gaussian(rng, N, 1.0);
        acc.add(std::norm(u.dot(B * u)));
    }
    IdentityCheck out;
    out.formula = std::norm((A * B).trace()) + (A * B * A * B.adjoint()).trace().real();
    out.mc = acc.estimate();
    out.passed = mc_agrees(out.mc.mean, out.mc.std_error, out.formula, 0.0, nse);
    return out;
}

Lemma6Check verify_lemma6(const CVec &xbar, double sigma_x, double alpha, const CMat &B, const CMat &Cy,
                          int num_samples, Rng &rng, double nse)
{
    const Eigen::Index N = xbar.size();
    const CMat Cx = xbar * xbar.adjoint() + sigma_x * sigma_x * CMat::Identity(N, N);
    const CMat Fz = psd_factor(Cy - alpha * alpha * Cx, Cy.norm() + alpha * alpha * Cx.norm());
    std::uniform_real_distribution<double> ud(0.0, 2.0 * std::numbers::pi);
    RunningComplexMoments m1;
    RunningMoments m2;
    for (int s = 0; s < num_samples; ++s)
    {
        const CVec x = std::polar(1.0, ud(rng)) * xbar + sigma_x * gaussian(rng, N, 1.0);
        const CVec y = alpha * x + Fz * gaussian(rng, N, 1.0);
        const cdouble q = y.dot(B * x);
        m1.add(q);
        m2.add(std::norm(q));
    }
    const cdouble xbx = xbar.dot(B * xbar);
    const cdouble trB = B.trace();
    const double s2 = sigma_x * sigma_x;
    Lemma6Check out;
    out.first.formula = alpha * xbx + alpha * s2 * trB;
    out.first.mc = m1.estimate();
    out.first.passed = mc_agrees(out.first.mc.mean, out.first.mc.std_error, out.first.formula, 0.0, nse);
    out.second.formula = 2.0 * alpha * alpha * s2 * (xbx * std::conj(trB)).real() +
                         alpha * alpha * s2 * s2 * std::norm(trB) + (B * Cx * B.adjoint() * Cy).trace().real();
    out.second.mc = m2.estimate();
    out.second.passed = mc_agrees(out.second.mc.mean, out.second.mc.std_error, out.second.formula, 0.0, nse);
    return out;
}

} // namespace wpcf
