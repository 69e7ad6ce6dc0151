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

#include "wpcf/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <Eigen/Eigenvalues>

namespace wpcf
{

OptimizerContext make_context(const NetworkConfig &cfg, const MrMoments &m, const SECoefficients &coeffs,
                              const EHModel &model, WptScheme scheme)
{
    OptimizerContext ctx;
    ctx.moments = &m;
    ctx.coeffs = &coeffs;
    ctx.model = model;
    ctx.scheme = scheme;
    ctx.tau_c = cfg.tau_c;
    ctx.tau_p = cfg.tau_p;
    ctx.tau_d = cfg.tau_d;
    ctx.tau_u = cfg.tau_u;
    ctx.pilot_power = cfg.pilot_power_w;
    ctx.ap_power = cfg.ap_power_w;
    return ctx;
}

RMat PowerAllocation::p() const
{
    if (P.empty())
        return RMat();
    RMat out(static_cast<Eigen::Index>(P.size()), P.front().rows());
    for (std::size_t k = 0; k < P.size(); ++k)
        out.row(static_cast<Eigen::Index>(k)) = P[k].diagonal().transpose();
    return out;
}

RVec input_powers(const OptimizerContext &ctx, const std::vector<RMat> &P)
{
    const MrMoments &m = *ctx.moments;
    const int K = m.num_ues();
    RVec I = RVec::Zero(K);
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < K; ++i)
        {
            if (ctx.scheme == WptScheme::Coherent)
                I(k) += (coherent_weight(m, k, i).array() * P[i].array()).sum();
            else
                I(k) += P[i].diagonal().dot(m.second(i, k));
        }
    return I;
}

RVec harvested_energies(const OptimizerContext &ctx, const RVec &input_power)
{
    RVec E(input_power.size());
    for (Eigen::Index k = 0; k < input_power.size(); ++k)
        E(k) = harvested_energy(input_power(k), ctx.model, ctx.tau_d);
    return E;
}

void evaluate_allocation(const OptimizerContext &ctx, PowerAllocation &alloc)
{
    alloc.input_power = input_powers(ctx, alloc.P);
    alloc.energy = harvested_energies(ctx, alloc.input_power);
    alloc.sinr = sinr_all(alloc.a, alloc.eta, *ctx.coeffs);
    alloc.t = alloc.sinr.size() ? alloc.sinr.minCoeff() : 0.0;
}

namespace
{

std::vector<RMat> transmit_matrices(const OptimizerContext &ctx, const RMat &p)
{
    if (ctx.scheme == WptScheme::Coherent)
        return coherent_matrices(p);
    std::vector<RMat> P;
    for (Eigen::Index k = 0; k < p.rows(); ++k)
        P.push_back(RMat(p.row(k).transpose().asDiagonal()));
    return P;
}

RVec unit_basis(int n, int k)
{
    RVec v = RVec::Zero(n);
    v(k) = 1.0;
    return v;
}

std::vector<CVec> ones_lsfd(int K, int L)
{
    return std::vector<CVec>(K, CVec::Ones(L) / std::sqrt(static_cast<double>(L)));
}

} // namespace

double max_input_power(const OptimizerContext &ctx, int k)
{
    const MrMoments &m = *ctx.moments;
    const int K = m.num_ues();
    const int L = m.num_aps();
    if (ctx.scheme == WptScheme::NonCoherent)
    {
        double I = 0.0;
        for (int l = 0; l < L; ++l)
        {
            double best = 0.0;
            for (int i = 0; i < K; ++i)
                best = std::max(best, m.second(i, k)(l) / m.norm(i, l));
            I += ctx.ap_power * best;
        }
        return I;
    }

    // max sum_i <W_ki, P_i> over PSD P_i with sum_i n_il P_i(l,l) <= rho_d, in the scaled
    // variables Q_i = rho_d^-1 D_i P_i D_i, D_i = diag(sqrt(n_il)).
    ConicBuilder bld;
    const int nq = svec_size(L);
    const int q0 = bld.add_variables(K * nq);
    double wmax = 0.0;
    for (int i = 0; i < K; ++i)
    {
        const RMat W = coherent_weight(m, k, i);
        for (int l = 0; l < L; ++l)
            for (int lp = l; lp < L; ++lp)
                wmax = std::max(wmax, std::abs(ctx.ap_power * W(l, lp) / std::sqrt(m.norm(i, l) * m.norm(i, lp))));
    }
    if (!(wmax > 0.0))
        return 0.0;
    for (int i = 0; i < K; ++i)
    {
        const RMat W = coherent_weight(m, k, i);
        for (int l = 0; l < L; ++l)
            for (int lp = l; lp < L; ++lp)
            {
                const double w = ctx.ap_power * W(l, lp) / std::sqrt(m.norm(i, l) * m.norm(i, lp)) *
                                 (l == lp ? 1.0 : 2.0);
                bld.set_objective(q0 + i * nq + svec_index(L, lp, l), -w / wmax);
            }
    }
    for (int l = 0; l < L; ++l)
    {
        LinExpr row(1.0);
        for (int i = 0; i < K; ++i)
            row.add(q0 + i * nq + svec_index(L, l, l), -1.0);
        bld.add_nonneg(row);
    }
    for (int i = 0; i < K; ++i)
    {
        std::vector<LinExpr> rows;
        for (int j = 0; j < L; ++j)
            for (int r = j; r < L; ++r)
                rows.push_back(LinExpr().add(q0 + i * nq + svec_index(L, r, j), svec_scale(r, j)));
        bld.add_cone(ConeKind::Psd, L, rows);
    }
    ConicSettings cs;
    cs.tol = 1e-9;
    const ConicSolution sol = solve(bld.build(), cs);
    // The own-beam value is always achievable, so it bounds the answer from below.
    RMat p = RMat::Zero(K, L);
    for (int l = 0; l < L; ++l)
        p(k, l) = ctx.ap_power / m.norm(k, l);
    const double own = input_powers(ctx, coherent_matrices(p))(k);
    if (sol.status != ConicStatus::Optimal)
        throw OptimizerError("max_input_power: solver returned " + to_string(sol.status));
    const double sdp = std::max(-sol.primal_objective, -sol.dual_objective) * wmax * (1.0 + 1e-7);
    return std::max(own, sdp);
}

UpperBound tmax_init(const OptimizerContext &ctx)
{
    const MrMoments &m = *ctx.moments;
    const int K = m.num_ues();
    const int L = m.num_aps();
    UpperBound ub;
    ub.single_ue_sinr = RVec::Zero(K);
    ub.single_ue_energy = RVec::Zero(K);
    ub.max_energy = RVec::Zero(K);
    double t = std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k)
    {
        RMat p = RMat::Zero(K, L);
        for (int l = 0; l < L; ++l)
            p(k, l) = ctx.ap_power / m.norm(k, l);
        const RVec I = input_powers(ctx, transmit_matrices(ctx, p));
        ub.single_ue_energy(k) = harvested_energy(I(k), ctx.model, ctx.tau_d);
        const double Imax = K == 1 ? I(k) : std::max(I(k), max_input_power(ctx, k));
        const double E = harvested_energy(Imax, ctx.model, ctx.tau_d);
        ub.max_energy(k) = E;
        if (E <= ctx.pilot_energy())
        {
            ub.energy_infeasible = true;
            continue;
        }
        const RVec eta = unit_basis(K, k) * (E - ctx.pilot_energy()) / ctx.tau_u;
        ub.single_ue_sinr(k) = optimal_sinr(eta, *ctx.coeffs, k);
        t = std::min(t, ub.single_ue_sinr(k));
    }
    ub.t_max = ub.energy_infeasible ? 0.0 : t;
    return ub;
}

namespace
{

int q_count(const OptimizerContext &ctx)
{
    const int L = ctx.num_aps();
    return ctx.scheme == WptScheme::Coherent ? svec_size(L) : L;
}

/// Variable index of Q_k(l, l').
int q_var(const OptimizerContext &ctx, const Subproblem &sp, int k, int l, int lp)
{
    const int L = ctx.num_aps();
    if (ctx.scheme == WptScheme::Coherent)
        return sp.q_offset + k * q_count(ctx) + svec_index(L, l, lp);
    return sp.q_offset + k * L + l;
}

LinExpr normalized(LinExpr e)
{
    double s = std::abs(e.constant);
    for (const auto &t : e.terms)
        s = std::max(s, std::abs(t.second));
    if (s > 0.0)
        e.scale(1.0 / s);
    return e;
}

} // namespace

Subproblem build_subproblem(const OptimizerContext &ctx, double t, const std::vector<CVec> &a, double eta_ref)
{
    const MrMoments &m = *ctx.moments;
    const SECoefficients &c = *ctx.coeffs;
    const int K = m.num_ues();
    const int L = m.num_aps();
    const bool coherent = ctx.scheme == WptScheme::Coherent;
    const bool linear = ctx.model.is_linear();
    if (!(t >= 0.0))
        throw ContractViolation("build_subproblem: t must be nonnegative");
    if (static_cast<int>(a.size()) != K)
        throw ContractViolation("build_subproblem: one LSFD vector per UE required");

    Subproblem sp;
    sp.t = t;
    sp.eta_ref = eta_ref;
    ConicBuilder bld;
    sp.eta_offset = bld.add_variables(K);
    if (!linear)
        sp.e_offset = bld.add_variables(K);
    sp.q_offset = bld.add_variables(K * q_count(ctx));
    for (int k = 0; k < K; ++k)
        bld.set_objective(sp.eta_offset + k, 1.0);

    // I_k as a linear functional of the scaled Q variables.
    std::vector<LinExpr> input(K);
    for (int k = 0; k < K; ++k)
        for (int i = 0; i < K; ++i)
        {
            const RMat W = coherent_weight(m, k, i);
            for (int l = 0; l < L; ++l)
                for (int lp = l; lp < L; ++lp)
                {
                    if (!coherent && lp != l)
                        continue;
                    const double w =
                        ctx.ap_power * W(l, lp) / std::sqrt(m.norm(i, l) * m.norm(i, lp)) * (l == lp ? 1.0 : 2.0);
                    if (w != 0.0)
                        input[k].add(q_var(ctx, sp, i, l, lp), w);
                }
        }

    for (int k = 0; k < K; ++k)
        bld.add_nonneg(LinExpr().add(sp.eta_offset + k, 1.0));

    // SINR_k >= t with the LSFD vectors held fixed.
    for (int k = 0; k < K; ++k)
    {
        const double g = std::norm(a[k].dot(c.b[k]));
        LinExpr row;
        for (int i = 0; i < K; ++i)
        {
            const double ci = a[k].dot(c.C[k][i] * a[k]).real();
            double coef = -t * ci;
            if (i == k)
                coef += (1.0 + t) * g;
            row.add(sp.eta_offset + i, coef * eta_ref);
        }
        const double d = a[k].dot(c.d[k].cast<cdouble>().asDiagonal() * a[k]).real();
        row.add_constant(-t * d);
        bld.add_nonneg(normalized(row));
    }

    // Uplink energy budget tau_u eta + tau_p rho_p <= E_k.
    for (int k = 0; k < K; ++k)
    {
        LinExpr row;
        row.add(sp.eta_offset + k, -ctx.tau_u * eta_ref);
        row.add_constant(-ctx.pilot_energy());
        if (linear)
        {
            LinExpr e = input[k];
            e.scale(ctx.tau_d * ctx.model.A / ctx.model.C);
            row.terms.insert(row.terms.end(), e.terms.begin(), e.terms.end());
        }
        else
        {
            const double ab = ctx.tau_d * ctx.model.A / ctx.model.B;
            row.add(sp.e_offset + k, -ab);
            row.add_constant(ab);
        }
        bld.add_nonneg(normalized(row));
    }

    // Per-AP power: sum_k Q_k(l,l) <= 1.
    for (int l = 0; l < L; ++l)
    {
        LinExpr row(1.0);
        for (int k = 0; k < K; ++k)
            row.add(q_var(ctx, sp, k, l, l), -1.0);
        bld.add_nonneg(row);
    }

    for (int k = 0; k < K; ++k)
        for (int l = 0; l < L; ++l)
            for (int lp = coherent ? l + 1 : l; lp < (coherent ? L : l + 1); ++lp)
                bld.add_nonneg(LinExpr().add(q_var(ctx, sp, k, l, lp), 1.0));

    // e_k (B I_k + C) >= 1 as a rotated cone in e~ = C e, u~ = 1 + (B/C) I_k.
    if (!linear)
        for (int k = 0; k < K; ++k)
        {
            LinExpr u(1.0);
            for (const auto &[j, w] : input[k].terms)
                u.add(j, w * ctx.model.B / ctx.model.C);
            LinExpr plus = u, minus = u;
            plus.add(sp.e_offset + k, 1.0);
            minus.scale(-1.0).add(sp.e_offset + k, 1.0);
            bld.add_cone(ConeKind::SecondOrder, 3, {plus, LinExpr(2.0), minus});
        }

    sp.psd_row.assign(K, -1);
    if (coherent)
        for (int k = 0; k < K; ++k)
        {
            std::vector<LinExpr> rows;
            for (int j = 0; j < L; ++j)
                for (int i = j; i < L; ++i)
                    rows.push_back(LinExpr().add(q_var(ctx, sp, k, i, j), svec_scale(i, j)));
            sp.psd_row[k] = bld.add_cone(ConeKind::Psd, L, rows);
        }

    sp.problem = bld.build();
    return sp;
}

PowerAllocation read_subproblem_solution(const OptimizerContext &ctx, const Subproblem &sp,
                                         const ConicSolution &sol)
{
    const MrMoments &m = *ctx.moments;
    const int K = m.num_ues();
    const int L = m.num_aps();
    PowerAllocation alloc;
    alloc.eta = sp.eta_ref * sol.x.segment(sp.eta_offset, K).cwiseMax(0.0);
    if (sp.e_offset >= 0)
        alloc.e = sol.x.segment(sp.e_offset, K) / ctx.model.C;
    alloc.P.resize(K);
    for (int k = 0; k < K; ++k)
    {
        RMat Q(L, L);
        if (ctx.scheme == WptScheme::Coherent)
            Q = smat(sol.s.segment(sp.psd_row[k], svec_size(L)), L);
        else
        {
            Q.setZero();
            for (int l = 0; l < L; ++l)
                Q(l, l) = std::max(0.0, sol.x(q_var(ctx, sp, k, l, l)));
        }
        RMat P(L, L);
        for (int l = 0; l < L; ++l)
            for (int lp = 0; lp < L; ++lp)
                P(l, lp) = ctx.ap_power * Q(l, lp) / std::sqrt(m.norm(k, l) * m.norm(k, lp));
        alloc.P[k] = P;
    }
    return alloc;
}

std::vector<RMat> extract_rank_one(const std::vector<RMat> &P)
{
    std::vector<RMat> out;
    out.reserve(P.size());
    for (const auto &Pk : P)
    {
        const RVec d = Pk.diagonal();
        const RVec r = d.cwiseMax(0.0).cwiseSqrt();
        RMat R = r * r.transpose();
        R.diagonal() = d;
        out.push_back(R);
    }
    return out;
}

double constraint_violation(const OptimizerContext &ctx, const PowerAllocation &alloc, double t)
{
    const MrMoments &m = *ctx.moments;
    const int K = m.num_ues();
    const int L = m.num_aps();
    double worst = 0.0;
    const RMat p = alloc.p();
    for (int l = 0; l < L; ++l)
    {
        double pe = 0.0;
        for (int k = 0; k < K; ++k)
            pe += p(k, l) * m.norm(k, l);
        worst = std::max(worst, (pe - ctx.ap_power) / ctx.ap_power);
    }
    const RVec I = input_powers(ctx, alloc.P);
    const RVec E = harvested_energies(ctx, I);
    for (int k = 0; k < K; ++k)
    {
        const double need = ctx.tau_u * alloc.eta(k) + ctx.pilot_energy();
        worst = std::max(worst, (need - E(k)) / std::max(E(k), ctx.pilot_energy()));
    }
    if (t > 0.0)
    {
        const RVec s = sinr_all(alloc.a, alloc.eta, *ctx.coeffs);
        for (int k = 0; k < K; ++k)
            worst = std::max(worst, (t - s(k)) / t);
    }
    const double eta_scale = std::max(alloc.eta.cwiseAbs().maxCoeff(), 1e-300);
    worst = std::max(worst, -alloc.eta.minCoeff() / eta_scale);
    for (const auto &Pk : alloc.P)
    {
        const double scale = std::max(Pk.diagonal().cwiseAbs().maxCoeff(), 1e-300);
        worst = std::max(worst, -Pk.minCoeff() / scale);
        Eigen::SelfAdjointEigenSolver<RMat> eig(Pk, Eigen::EigenvaluesOnly);
        worst = std::max(worst, -eig.eigenvalues()(0) / std::max(Pk.trace(), 1e-300));
    }
    return std::max(worst, 0.0);
}

ScaleReport scale_powers(const OptimizerContext &ctx, PowerAllocation &alloc)
{
    const MrMoments &m = *ctx.moments;
    const int K = m.num_ues();
    const int L = m.num_aps();
    ScaleReport rep;

    PowerAllocation base = alloc;
    base.a = optimal_lsfd_all(base.eta, *ctx.coeffs);
    evaluate_allocation(ctx, base);

    PowerAllocation scaled = alloc;
    const RMat p = scaled.p();
    double peak = 0.0;
    for (int l = 0; l < L; ++l)
    {
        double pe = 0.0;
        for (int k = 0; k < K; ++k)
            pe += p(k, l) * m.norm(k, l);
        peak = std::max(peak, pe);
    }
    if (peak > 0.0)
    {
        rep.downlink_factor = ctx.ap_power / peak;
        for (auto &Pk : scaled.P)
            Pk *= rep.downlink_factor;
    }
    const RVec E = harvested_energies(ctx, input_powers(ctx, scaled.P));
    double gu = std::numeric_limits<double>::infinity();
    for (int k = 0; k < K; ++k)
        if (scaled.eta(k) > 0.0)
            gu = std::min(gu, (E(k) - ctx.pilot_energy()) / (ctx.tau_u * scaled.eta(k)));
    if (std::isfinite(gu) && gu > 0.0)
    {
        rep.uplink_factor = gu;
        scaled.eta *= gu;
    }
    scaled.a = optimal_lsfd_all(scaled.eta, *ctx.coeffs);
    evaluate_allocation(ctx, scaled);

    if (scaled.t < base.t)
    {
        rep.reverted = true;
        alloc = base;
    }
    else
        alloc = scaled;
    return rep;
}

namespace
{

RVec raw_input_powers(const OptimizerContext &ctx, const std::vector<RMat> &P) { return input_powers(ctx, P); }

PowerAllocation zero_allocation(const OptimizerContext &ctx)
{
    const int K = ctx.num_ues();
    const int L = ctx.num_aps();
    PowerAllocation alloc;
    alloc.P.assign(K, RMat::Zero(L, L));
    alloc.eta = RVec::Zero(K);
    alloc.a = ones_lsfd(K, L);
    alloc.input_power = RVec::Zero(K);
    alloc.energy = RVec::Zero(K);
    alloc.sinr = RVec::Zero(K);
    alloc.t = 0.0;
    return alloc;
}

ConicSolution solve_with_retry(const ConicProblem &p, const ConicSettings &s)
{
    // Near the feasibility boundary the primal residual can floor above a tight tolerance;
    // each retry accepts one more digit of slack.
    ConicSettings cur = s;
    ConicSolution sol;
    int total = 0;
    for (int attempt = 0; attempt < 3; ++attempt)
    {
        sol = solve(p, cur);
        total += sol.iterations;
        if (sol.status != ConicStatus::NumericalFailure)
            break;
        cur.tol *= 10.0;
    }
    sol.iterations = total;
    return sol;
}

} // namespace

MaxMinResult algorithm1(const OptimizerContext &ctx, const BisectionSettings &settings)
{
    const int K = ctx.num_ues();
    const int L = ctx.num_aps();
    if (!(settings.lambda > 1.0) || !(settings.epsilon > 0.0))
        throw ContractViolation("algorithm1: need lambda > 1 and epsilon > 0");

    MaxMinResult res;
    const UpperBound ub = tmax_init(ctx);
    res.tmax_init = ub.t_max;
    if (ub.energy_infeasible)
    {
        res.energy_infeasible = true;
        res.alloc = zero_allocation(ctx);
        return res;
    }
    const double eta_ref = ub.max_energy.maxCoeff() / ctx.tau_u;

    std::vector<CVec> a = ones_lsfd(K, L);
    double t_min = 0.0;
    double t_max = ub.t_max;
    bool have_alloc = false;

    auto attempt = [&](double t, IterationRecord &rec) -> bool {
        const Subproblem sp = build_subproblem(ctx, t, a, eta_ref);
        const ConicSolution sol = solve_with_retry(sp.problem, settings.solver);
        ++res.num_solves;
        rec.t = t;
        rec.status = sol.status;
        rec.solver_iterations = sol.iterations;
        if (sol.status == ConicStatus::NumericalFailure)
            throw OptimizerError("algorithm1: solver failure at iteration " + std::to_string(rec.iteration) +
                                 ", t = " + std::to_string(t));
        if (sol.status != ConicStatus::Optimal)
            return false;

        PowerAllocation star = read_subproblem_solution(ctx, sp, sol);
        star.a = a;
        PowerAllocation rank1 = star;
        rank1.P = extract_rank_one(star.P);

        const RVec I0 = raw_input_powers(ctx, star.P);
        const RVec I1 = raw_input_powers(ctx, rank1.P);
        rec.lemma4.diagonal_exact = true;
        for (int k = 0; k < K; ++k)
            if (!(rank1.P[k].diagonal().array() == star.P[k].diagonal().array()).all())
                rec.lemma4.diagonal_exact = false;
        double change = std::numeric_limits<double>::infinity();
        for (int k = 0; k < K; ++k)
            change = std::min(change, (I1(k) - I0(k)) / std::max(std::abs(I0(k)), 1e-300));
        rec.lemma4.min_input_change = change;
        rec.lemma4.constraint_violation = constraint_violation(ctx, rank1, t);

        const ScaleReport sr = scale_powers(ctx, rank1);
        rec.scaling_reverted = sr.reverted;
        a = rank1.a;
        rec.t_star = rank1.t;
        res.alloc = rank1;
        have_alloc = true;
        return true;
    };

    auto gap_tol = [&](double tm) {
        return settings.scaled_epsilon ? settings.epsilon * std::clamp(tm, 1e-3, 1.0) : settings.epsilon;
    };
    int iteration = 0;
    while (t_max - t_min > gap_tol(t_max) && res.num_solves < settings.max_solves)
    {
        IterationRecord rec;
        rec.iteration = ++iteration;
        const double t = 0.5 * (t_min + t_max);
        rec.feasible = attempt(t, rec);
        if (rec.feasible)
        {
            t_min = rec.t_star;
            t_max = settings.lambda * rec.t_star;
        }
        else
            t_max = t;
        rec.t_min = t_min;
        rec.t_max = t_max;
        res.log.push_back(rec);
    }

    if (!have_alloc)
    {
        // Nothing above t = 0 was feasible; the energy constraints alone decide.
        IterationRecord rec;
        rec.iteration = ++iteration;
        rec.feasible = attempt(0.0, rec);
        if (rec.feasible)
            t_min = rec.t_star;
        rec.t_min = t_min;
        rec.t_max = t_max;
        res.log.push_back(rec);
        if (!rec.feasible)
        {
            res.energy_infeasible = true;
            res.alloc = zero_allocation(ctx);
        }
    }
    return res;
}

PowerAllocation fpc_baseline(const OptimizerContext &ctx)
{
    const MrMoments &m = *ctx.moments;
    const int K = m.num_ues();
    const int L = m.num_aps();
    RMat p(K, L);
    for (int l = 0; l < L; ++l)
    {
        double den = 0.0;
        for (int i = 0; i < K; ++i)
            den += std::sqrt(m.norm(i, l));
        for (int k = 0; k < K; ++k)
            p(k, l) = ctx.ap_power / (std::sqrt(m.norm(k, l)) * den);
    }
    PowerAllocation alloc;
    alloc.P = transmit_matrices(ctx, p);
    const RVec E = harvested_energies(ctx, input_powers(ctx, alloc.P));
    alloc.eta = RVec::Zero(K);
    for (int k = 0; k < K; ++k)
        if (E(k) > ctx.pilot_energy())
            alloc.eta(k) = (E(k) - ctx.pilot_energy()) / ctx.tau_u;
    alloc.a = optimal_lsfd_all(alloc.eta, *ctx.coeffs);
    evaluate_allocation(ctx, alloc);
    return alloc;
}

void write_iteration_log_csv(std::ostream &out, const std::vector<IterationRecord> &log)
{
    out << "iteration,t,status,feasible,t_star,t_min,t_max,solver_iterations,scaling_reverted,"
           "lemma4_diag_exact,lemma4_min_input_change,lemma4_violation\n";
    const auto prec = out.precision(12);
    for (const auto &r : log)
        out << r.iteration << ',' << r.t << ',' << to_string(r.status) << ',' << r.feasible << ',' << r.t_star << ','
            << r.t_min << ',' << r.t_max << ',' << r.solver_iterations << ',' << r.scaling_reverted << ','
            << r.lemma4.diagonal_exact << ',' << r.lemma4.min_input_change << ',' << r.lemma4.constraint_violation
            << '\n';
    out.precision(prec);
}

} // namespace wpcf
