#include "fracstefan/stefan.hpp"

#include <cmath>
#include <stdexcept>

namespace fracstefan {

namespace {

// eta slab fields from one-sided differences of w, oriented with the type.
// Returns the largest clamped negative part. w is then rebuilt from the
// clamped slabs so the Duvaut identities hold exactly:
//   melting:  w_k = dt sum_{j<=k} eta_j
//   freezing: w_k = w_M + dt sum_{j>k} eta_j
Real difference_slabs(SpaceTimeField& w, StefanType type, Real dt, SpaceTimeField& eta) {
    Real defect = 0.0;
    for (Index k = 1; k < w.steps(); ++k) {
        ArrayXr d = type == StefanType::melting ? (w[k] - w[k - 1]) / dt
                                                : (w[k - 1] - w[k]) / dt;
        defect = std::max(defect, std::max<Real>(0.0, -d.minCoeff()));
        eta[k] = d.max(0.0);
    }
    const Index M = w.steps() - 1;
    if (type == StefanType::melting) {
        for (Index k = 1; k <= M; ++k) w[k] = w[k - 1] + dt * eta[k];
    } else {
        for (Index k = M - 1; k >= 0; --k) w[k] = w[k + 1] + dt * eta[k + 1];
    }
    return defect;
}

ArrayXr extend_f(const ProblemData& data, const GridSpec& ext) {
    ArrayXr f_ext = ArrayXr::Constant(ext.node_count(), data.f_background);
    ArrayXr inner = embed_in_extended(data.grid, ext, data.f.values);
    Mask inner_mask = embed_in_extended(data.grid, ext,
                                        ArrayXr::Ones(data.grid.node_count())) > 0.5;
    for (Index i = 0; i < ext.node_count(); ++i)
        if (inner_mask[i]) f_ext[i] = inner[i];
    return f_ext;
}

struct TailSeries {
    std::vector<Real> cumulative;  // stopped mass beyond the extended box per slice
};

TailSeries tail_mass_series(const FracOperator& op, const GridSpec& ext,
                            const SpaceTimeField& eta, Real dt) {
    ArrayXr rate = op.tail_rate_beyond(ext);
    Real vol = op.grid().cell_volume();
    TailSeries ts;
    ts.cumulative.assign(eta.slices.size(), 0.0);
    Real acc = 0.0;
    for (Index k = 1; k < eta.steps(); ++k) {
        acc += dt * (eta[k] * rate).sum() * vol;
        ts.cumulative[static_cast<size_t>(k)] = acc;
    }
    return ts;
}

ArrayXr embed_mask(const GridSpec& base, const GridSpec& ext, const Mask& m) {
    ArrayXr v(base.node_count());
    for (Index i = 0; i < base.node_count(); ++i) v[i] = m[i] ? 1.0 : 0.0;
    return embed_in_extended(base, ext, v);
}

}  // namespace

Real ProblemData::resolved_active_tol() const {
    if (active_tol > 0) return active_tol;
    Real m = mu.field.values.size() ? mu.field.values.maxCoeff() : 0.0;
    return 1e-8 * std::max(1.0, m);
}

void ProblemData::validate(StefanType type) const {
    if (!(dt > 0) || !(horizon > 0) || horizon < dt)
        throw std::invalid_argument("ProblemData: need 0 < dt <= horizon");
    if (!f.grid.same_nodes(grid) || !mu.field.grid.same_nodes(grid))
        throw std::invalid_argument("ProblemData: field grids do not match");
    if ((f.values < 0).any())
        throw std::invalid_argument("ProblemData: capacity f must be >= 0");
    if (type == StefanType::melting) {
        // No initial mushy region: mu > f wherever mu > 0.
        for (Index i = 0; i < grid.node_count(); ++i)
            if (mu.field.values[i] > 0 && mu.field.values[i] <= f.values[i])
                throw std::invalid_argument(
                    "melting data has a mushy region: 0 < mu <= f somewhere on supp mu");
        if (has_insulation())
            throw std::invalid_argument("insulated set G applies to freezing only");
    } else {
        if (has_insulation()) {
            if (insulated_G.size() != grid.node_count())
                throw std::invalid_argument("insulated_G size mismatch");
            // G must contain {0 < mu <= 1}.
            for (Index i = 0; i < grid.node_count(); ++i)
                if (mu.field.values[i] > 0 && mu.field.values[i] <= 1.0 && !insulated_G[i])
                    throw std::invalid_argument(
                        "insulated freezing requires G to contain {0 < mu <= 1}");
        } else {
            for (Index i = 0; i < grid.node_count(); ++i)
                if (mu.field.values[i] > 0 && mu.field.values[i] <= f.values[i])
                    throw std::invalid_argument(
                        "freezing with G empty requires mu > f on supp mu");
        }
    }
}

SpaceTimeField compute_enthalpy(const SpaceTimeField& eta_ext, const SpaceTimeField& rho_cum,
                                const SpaceField& nu, StefanType type) {
    if (eta_ext.steps() != rho_cum.steps())
        throw std::invalid_argument("compute_enthalpy: slice count mismatch");
    if (eta_ext.grid.node_count() != rho_cum.grid.node_count() ||
        nu.values.size() != rho_cum.grid.node_count())
        throw std::invalid_argument("compute_enthalpy: shape mismatch");
    SpaceTimeField h(rho_cum.grid, rho_cum.dt, rho_cum.steps());
    for (Index k = 0; k < h.steps(); ++k) {
        h[k] = eta_ext[k] + rho_cum[k];
        if (type == StefanType::freezing) h[k] -= nu.values;
    }
    return h;
}

StefanSolution solve_melting(const FracOperator& op, const ProblemData& data) {
    data.validate(StefanType::melting);
    if (!op.grid().same_nodes(data.grid))
        throw std::invalid_argument("solve_melting: operator grid mismatch");

    const GridSpec& g = data.grid;
    const GridSpec ext = g.extended();
    const Real dt = data.dt;
    const Index M = static_cast<Index>(std::lround(data.horizon / dt));
    const Real tol = data.resolved_active_tol();

    StefanSolution sol;
    sol.type = StefanType::melting;
    sol.data = data;
    sol.ext_grid = ext;

    // Duvaut transform: min{ d_t w + A w + f - mu, w } = 0, w(0) = 0.
    SpaceField forcing(g, data.f.values - data.mu.field.values);
    PsorOptions opt;
    opt.tol = 1e-9;
    auto [w, rep] = solve_parabolic_obstacle(op, SpaceField(g), forcing, dt, M, opt);
    sol.w = w;
    sol.report = rep;

    // Temperature: slice 0 is the initial data (mu - f on supp mu).
    Mask sigma = positive_set(data.mu.field.values, tol);
    sol.insulated = sigma;
    sol.initial_domain = sigma;
    sol.eta = SpaceTimeField(g, dt, M + 1);
    sol.eta[0] = (data.mu.field.values - data.f.values).max(0.0) * sigma.cast<Real>();
    sol.eta_clamp_defect = difference_slabs(sol.w, StefanType::melting, dt, sol.eta);
    if (sol.eta_clamp_defect > 1e-6 * std::max(1.0, data.mu.field.values.maxCoeff()))
        throw std::runtime_error("solve_melting: eta negative beyond solver tolerance");

    // Instant stopped layer at t = 0+.
    sol.instant_layer = SpaceField(g, data.f.values * sigma.cast<Real>());

    const ArrayXr f_ext = extend_f(data, ext);
    const ArrayXr sigma_ext = embed_mask(g, ext, sigma);

    // Monotone-closed active masks; kappa_2 accumulated on the inactive set.
    sol.active.assign(static_cast<size_t>(M) + 1, sigma);
    sol.rho_cum = SpaceTimeField(ext, dt, M + 1);
    sol.kappa = SpaceTimeField(ext, dt, M + 1);
    sol.aeta_cum = SpaceTimeField(ext, dt, M + 1);
    sol.eta_mass.assign(static_cast<size_t>(M) + 1, 0.0);
    sol.eta_mass[0] = integrate(g, sol.eta[0]);

    ArrayXr kappa_acc = ArrayXr::Zero(ext.node_count());
    ArrayXr aeta_acc = ArrayXr::Zero(ext.node_count());
    ArrayXr active_ext = sigma_ext;
    sol.rho_cum[0] = f_ext * sigma_ext;

    for (Index k = 1; k <= M; ++k) {
        ArrayXr a_eta = op.apply_extended(sol.eta[k], ext);
        aeta_acc += dt * a_eta;
        sol.aeta_cum[k] = aeta_acc;

        Mask slab_active = positive_set(sol.eta[k], tol);
        ArrayXr slab_active_ext = embed_mask(g, ext, slab_active);
        // kappa_2(t_k) = -sum_{j<=k} [A eta_j] chi_{eta_j = 0} dt, capped at f
        // (the target measure never exceeds the capacity).
        kappa_acc += dt * (-a_eta) * (1.0 - slab_active_ext);
        Real over = (kappa_acc - f_ext).maxCoeff();
        sol.kappa_clamp_defect = std::max(sol.kappa_clamp_defect, std::max<Real>(0.0, over));
        kappa_acc = kappa_acc.min(f_ext).max(0.0);
        sol.kappa[k] = kappa_acc;

        sol.active[static_cast<size_t>(k)] =
            sol.active[static_cast<size_t>(k - 1)] || slab_active;
        active_ext = active_ext.max(slab_active_ext);
        sol.rho_cum[k] = f_ext * active_ext + kappa_acc * (1.0 - active_ext);
        sol.eta_mass[static_cast<size_t>(k)] = integrate(g, sol.eta[k]);
    }

    sol.nu = SpaceField(ext, sol.rho_cum[M]);
    sol.nu_base = SpaceField(g, restrict_to_base(g, ext, sol.nu.values));
    sol.tail_mass = tail_mass_series(op, ext, sol.eta, dt).cumulative;

    // Enthalpy; t=0 slice is mu exactly (initial data + instant layer).
    SpaceTimeField eta_ext_field(ext, dt, M + 1);
    for (Index k = 0; k <= M; ++k) eta_ext_field[k] = embed_in_extended(g, ext, sol.eta[k]);
    sol.enthalpy = compute_enthalpy(eta_ext_field, sol.rho_cum, sol.nu, StefanType::melting);

    // Backward barrier: s(x) = sup{ t_k : w(t_k, x) <= w_tol }; nodes the melt
    // never reaches keep s = T (frozen through the horizon).
    Real w_tol = default_positive_tol(sol.w[M]);
    ArrayXr s_base = ArrayXr::Constant(g.node_count(), 0.0);
    for (Index i = 0; i < g.node_count(); ++i) {
        Index last = 0;
        for (Index k = 0; k <= M; ++k)
            if (sol.w[k][i] <= w_tol) last = k;
        s_base[i] = sol.w.time(last);
    }
    sol.barrier.grid = ext;
    sol.barrier.forward = false;
    sol.barrier.stop_time = ArrayXr::Constant(ext.node_count(), data.horizon);
    ArrayXr s_embedded = embed_in_extended(g, ext, s_base);
    Mask base_region = embed_in_extended(g, ext, ArrayXr::Ones(g.node_count())) > 0.5;
    for (Index i = 0; i < ext.node_count(); ++i)
        if (base_region[i]) sol.barrier.stop_time[i] = s_embedded[i];

    sol.extinction_time = INFINITY;
    return sol;
}

StefanSolution solve_freezing(const FracOperator& op, const ProblemData& data) {
    data.validate(StefanType::freezing);
    if (!op.grid().same_nodes(data.grid))
        throw std::invalid_argument("solve_freezing: operator grid mismatch");

    const GridSpec& g = data.grid;
    const GridSpec ext = g.extended();
    const Real dt = data.dt;
    const Index M_max = static_cast<Index>(std::lround(data.horizon / dt));
    const Real tol = data.resolved_active_tol();
    const bool insulated = data.has_insulation();

    StefanSolution sol;
    sol.type = StefanType::freezing;
    sol.data = data;
    sol.ext_grid = ext;

    // Initial expansion: min{ A u + f - mu, u } = 0; E = {u > 0}.
    SpaceField forcing(g, data.f.values - data.mu.field.values);
    PsorOptions eopt;
    eopt.tol = 1e-9;
    auto [u, erep] = solve_elliptic_obstacle(op, forcing, eopt);
    sol.u = u;
    sol.report = erep;
    Real u_tol = default_positive_tol(u.values);
    sol.initial_domain = positive_set(u.values, u_tol);

    // Target measure nu = mu - A u on the evaluation box, clamped at 0.
    ArrayXr mu_ext = embed_in_extended(g, ext, data.mu.field.values);
    ArrayXr nu_ext = mu_ext - op.apply_extended(u.values, ext);
    Real nu_min = nu_ext.minCoeff();
    if (nu_min < -1e-6 * std::max(1.0, data.mu.field.values.maxCoeff()))
        throw std::runtime_error("solve_freezing: nu has a significant negative part");
    nu_ext = nu_ext.max(0.0);
    sol.nu = SpaceField(ext, nu_ext);
    sol.nu_base = SpaceField(g, restrict_to_base(g, ext, nu_ext));
    sol.nu_tail_mass = (u.values * op.tail_rate_beyond(ext)).sum() * g.cell_volume();

    // Duvaut transform runs forward from w(0) = U_mu - U_nu. That potential
    // difference is exactly the obstacle solution u, and u is the consistent
    // discrete realization: box-truncated potentials lose the target
    // measure's far tail and would seed spurious initial data outside E.
    SpaceField w0(g, u.values);

    const Real eps_ext = data.extinction_threshold;
    ArrayXr prev = w0.values;
    Real ext_time = INFINITY;
    auto stop_early = [&](Index k, const ArrayXr& wk) {
        Real m = ((prev - wk) / dt).max(0.0).sum() * g.cell_volume();
        prev = wk;
        if (m < eps_ext && std::isinf(ext_time)) {
            ext_time = Real(k) * dt;
            return true;
        }
        return false;
    };
    PsorOptions popt;
    popt.tol = 1e-9;
    auto [w, prep] =
        solve_parabolic_obstacle(op, w0, sol.nu_base, dt, M_max, popt, stop_early);
    sol.w = w;
    sol.report.iterations.insert(sol.report.iterations.end(), prep.iterations.begin(),
                                 prep.iterations.end());
    sol.report.max_complementarity =
        std::max(sol.report.max_complementarity, prep.max_complementarity);
    sol.report.wall_seconds += prep.wall_seconds;
    sol.extinction_time = ext_time;
    if (data.mu.mass() < eps_ext) sol.extinction_time = 0.0;

    const Index M = w.steps() - 1;
    sol.eta = SpaceTimeField(g, dt, M + 1);
    sol.eta[0] = data.mu.field.values;
    sol.eta_clamp_defect = difference_slabs(sol.w, StefanType::freezing, dt, sol.eta);
    if (sol.eta_clamp_defect > 1e-6 * std::max(1.0, data.mu.field.values.maxCoeff()))
        throw std::runtime_error("solve_freezing: eta negative beyond solver tolerance");

    sol.eta_mass.assign(static_cast<size_t>(M) + 1, 0.0);
    for (Index k = 0; k <= M; ++k) sol.eta_mass[static_cast<size_t>(k)] = integrate(g, sol.eta[k]);

    // kappa_1(t_k) = -sum_{j>k} [A eta_j] chi_{eta_j = 0} dt (+ exponential
    // tail beyond the horizon when G insulates part of the domain), capped at nu.
    sol.aeta_cum = SpaceTimeField(ext, dt, M + 1);
    std::vector<ArrayXr> a_eta(static_cast<size_t>(M) + 1);
    ArrayXr aeta_acc = ArrayXr::Zero(ext.node_count());
    for (Index k = 1; k <= M; ++k) {
        a_eta[static_cast<size_t>(k)] = op.apply_extended(sol.eta[k], ext);
        aeta_acc += dt * a_eta[static_cast<size_t>(k)];
        sol.aeta_cum[k] = aeta_acc;
    }

    // Tail extrapolation rate from the last decade of the eta mass decay.
    Real tail_rate_fit = 0.0;
    if (insulated && M >= 4) {
        Real m_end = std::max(sol.eta_mass[static_cast<size_t>(M)], 1e-300);
        Index k0 = M;
        while (k0 > 1 && sol.eta_mass[static_cast<size_t>(k0 - 1)] <= 10.0 * m_end) --k0;
        if (M - k0 >= 3) {
            // least-squares slope of log mass on [k0, M]
            Real n = Real(M - k0 + 1), st = 0, sy = 0, stt = 0, sty = 0;
            for (Index k = k0; k <= M; ++k) {
                Real t = Real(k) * dt, y = std::log(std::max(sol.eta_mass[static_cast<size_t>(k)], 1e-300));
                st += t; sy += y; stt += t * t; sty += t * y;
            }
            Real slope = (n * sty - st * sy) / (n * stt - st * st);
            if (slope < 0) tail_rate_fit = -slope;
        }
    }

    // Phase masks come from the transform's support ({eta > 0} = {w > 0} in
    // the continuum): w is the endpoint-sharp indicator, while the slab
    // field eta lags it by one step at nodes that freeze within a slab.
    const Real w_tol = 1e-8 * std::max<Real>(1.0, sol.w[0].maxCoeff());
    Mask phase_last = positive_set(sol.w[M], w_tol);
    ArrayXr kappa_acc = ArrayXr::Zero(ext.node_count());
    if (insulated && tail_rate_fit > 0 && M >= 1) {
        // integral of -A eta over (T, infinity) with eta ~ eta(T) e^{-lambda (t-T)}
        kappa_acc = (-a_eta[static_cast<size_t>(M)] / tail_rate_fit)
                        .max(0.0) * (1.0 - embed_mask(g, ext, phase_last));
    }

    sol.kappa = SpaceTimeField(ext, dt, M + 1);
    sol.rho_cum = SpaceTimeField(ext, dt, M + 1);
    sol.active.assign(static_cast<size_t>(M) + 1, sol.initial_domain);
    std::vector<ArrayXr> rho_future(static_cast<size_t>(M) + 1);

    // Walk backward in time accumulating kappa over the frozen phase.
    for (Index k = M; k >= 1; --k) {
        Mask phase_k = positive_set(sol.w[k], w_tol);
        sol.kappa[k] = kappa_acc.min(nu_ext);
        ArrayXr active_ext_arr = embed_mask(g, ext, phase_k);
        rho_future[static_cast<size_t>(k)] =
            nu_ext * active_ext_arr + sol.kappa[k] * (1.0 - active_ext_arr);
        sol.active[static_cast<size_t>(k)] = phase_k;

        // Slab-k delivery booked into kappa(t_{k-1}): the kernel flux plus
        // the endpoint release eta_{k-1} - eta_k of a node freezing within
        // this slab (zero on int{eta = 0} in the continuum; discretely it
        // carries the in-flight mass that stops in place at extinction).
        ArrayXr eta_km1 = embed_in_extended(g, ext, sol.eta[k - 1]);
        ArrayXr eta_k = embed_in_extended(g, ext, sol.eta[k]);
        kappa_acc += (dt * (-a_eta[static_cast<size_t>(k)]) + (eta_km1 - eta_k)) *
                     (1.0 - active_ext_arr);
        Real over = (kappa_acc - nu_ext).maxCoeff();
        sol.kappa_clamp_defect = std::max(sol.kappa_clamp_defect, std::max<Real>(0.0, over));
        kappa_acc = kappa_acc.min(nu_ext).max(0.0);
    }
    sol.kappa[0] = kappa_acc.min(nu_ext);
    sol.active[0] = sol.initial_domain;
    rho_future[0] = nu_ext * embed_mask(g, ext, sol.initial_domain) +
                    sol.kappa[0] * (1.0 - embed_mask(g, ext, sol.initial_domain));
    for (Index k = 0; k <= M; ++k) sol.rho_cum[k] = (nu_ext - rho_future[static_cast<size_t>(k)]).max(0.0);

    sol.tail_mass = tail_mass_series(op, ext, sol.eta, dt).cumulative;

    SpaceTimeField eta_ext_field(ext, dt, M + 1);
    for (Index k = 0; k <= M; ++k) eta_ext_field[k] = embed_in_extended(g, ext, sol.eta[k]);
    sol.enthalpy = compute_enthalpy(eta_ext_field, sol.rho_cum, sol.nu, StefanType::freezing);

    // Forward barrier: s(x) = sup{ t_k : eta(t_k, x) > tol }, 0 off E,
    // +inf where the temperature survives the computed horizon.
    ArrayXr s_base = ArrayXr::Zero(g.node_count());
    for (Index i = 0; i < g.node_count(); ++i) {
        if (sol.eta[M][i] > tol) {
            s_base[i] = INFINITY;
            continue;
        }
        Real last = 0.0;
        bool ever = false;
        for (Index k = M; k >= 0; --k) {
            if (sol.eta[k][i] > tol) {
                last = sol.eta.time(k);
                ever = true;
                break;
            }
        }
        s_base[i] = ever ? last : 0.0;
    }
    // The initial expansion: every node of E is active at t = 0+.
    for (Index i = 0; i < g.node_count(); ++i)
        if (sol.initial_domain[i] && s_base[i] == 0.0) s_base[i] = dt;
    sol.barrier.grid = ext;
    sol.barrier.forward = true;
    sol.barrier.stop_time = embed_in_extended(g, ext, s_base);

    sol.insulated = positive_set(sol.eta[M], tol);
    return sol;
}

SpaceTimeField conservation_rho(const StefanSolution& sol) {
    const GridSpec& g = sol.data.grid;
    const GridSpec& ext = sol.ext_grid;
    ArrayXr mu_ext = embed_in_extended(g, ext, sol.data.mu.field.values);
    SpaceTimeField out(ext, sol.rho_cum.dt, sol.rho_cum.steps());
    for (Index k = 0; k < out.steps(); ++k) {
        ArrayXr eta_ext = embed_in_extended(g, ext, sol.eta[k]);
        out[k] = mu_ext - eta_ext - sol.aeta_cum[k];
    }
    return out;
}

Real rho_consistency(const StefanSolution& sol) {
    SpaceTimeField cons = conservation_rho(sol);
    Real worst = 0.0;
    for (Index k = 0; k < cons.steps(); ++k)
        worst = std::max(worst, l1_distance(sol.ext_grid, sol.rho_cum[k], cons[k]));
    return worst;
}

Real enthalpy_residual(const StefanSolution& sol, const FracOperator& op) {
    const GridSpec& g = sol.data.grid;
    const GridSpec& ext = sol.ext_grid;
    const Real dt = sol.enthalpy.dt;
    const Index M = sol.enthalpy.steps() - 1;
    const Real T_end = Real(M) * dt;
    const Real L = g.half_width;

    // Spatial bump profiles (well inside the base box) and their images under
    // the operator; temporal windows vanish before the horizon.
    struct Spatial {
        Real c, r;
    };
    const Spatial profiles[4] = {{0.0, 0.5 * L}, {0.0, 0.25 * L}, {0.25 * L, 0.25 * L},
                                 {-0.375 * L, 0.2 * L}};
    auto bump = [](Real u) { return std::abs(u) < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0; };

    std::vector<ArrayXr> X(4), AX(4), Xext(4);
    for (int p = 0; p < 4; ++p) {
        ArrayXr v(g.node_count());
        for (Index i = 0; i < g.node_count(); ++i) {
            auto xy = g.coord(i);
            Real rad = g.dim == 1 ? std::abs(xy[0] - profiles[p].c)
                                  : std::hypot(xy[0] - profiles[p].c, xy[1] - profiles[p].c);
            v[i] = bump(rad / profiles[p].r);
        }
        X[p] = v;
        AX[p] = op.apply(v);
        Xext[p] = embed_in_extended(g, ext, v);
    }

    auto window = [&](int q, Real t) -> Real {
        if (q < 4) {
            Real Ta = (0.35 + 0.2 * q) * T_end;
            Real u = t / Ta;
            return u < 1.0 ? (1.0 - u * u) * (1.0 - u * u) : 0.0;
        }
        Real u = (t - 0.45 * T_end) / (0.4 * T_end);
        return bump(u);
    };

    const Real vol_ext = ext.cell_volume();
    const Real vol = g.cell_volume();
    Real worst = 0.0;
    for (int p = 0; p < 4; ++p) {
        for (int q = 0; q < 5; ++q) {
            Real term_dh = 0.0, term_flux = 0.0;
            for (Index k = 1; k <= M; ++k) {
                Real Wt = window(q, sol.enthalpy.time(k));
                if (Wt == 0.0) continue;
                term_dh += Wt * ((sol.enthalpy[k] - sol.enthalpy[k - 1]) * Xext[p]).sum() * vol_ext;
                term_flux += Wt * dt * (AX[p] * sol.eta[k]).sum() * vol;
            }
            Real denom = std::max(std::abs(term_dh), std::abs(term_flux));
            if (denom < 1e-14) continue;
            worst = std::max(worst, std::abs(term_dh + term_flux) / denom);
        }
    }
    return worst;
}

}  // namespace fracstefan
