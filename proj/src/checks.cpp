#include "fracstefan/checks.hpp"

#include <cmath>
#include <cstdio>

namespace fracstefan {

uint64_t fnv1a(const void* data, size_t bytes, uint64_t h) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::string digest_fields(std::initializer_list<const ArrayXr*> fields) {
    uint64_t h = 1469598103934665603ull;
    for (const ArrayXr* f : fields)
        h = fnv1a(f->data(), static_cast<size_t>(f->size()) * sizeof(Real), h);
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

CheckReport make(const std::string& name, Real metric, Real tol,
                 const std::string& provenance, const std::string& digest) {
    CheckReport r;
    r.name = name;
    r.metric = metric;
    r.tolerance = tol;
    r.pass = metric <= tol;
    r.provenance = provenance;
    r.inputs_digest = digest;
    return r;
}

Mask ever_active(const StefanSolution& sol) {
    // melting masks grow, freezing masks shrink from the initial domain
    return sol.type == StefanType::melting ? sol.active.back() : sol.active.front();
}

}  // namespace

CheckReport check_mass_conservation(const StefanSolution& sol, Real tol) {
    const Real mu_mass = sol.data.mu.mass();
    Real worst = 0.0;
    for (Index k = 0; k < sol.rho_cum.steps(); ++k) {
        Real total = sol.eta_mass[static_cast<size_t>(k)] +
                     integrate(sol.ext_grid, sol.rho_cum[k]) +
                     sol.tail_mass[static_cast<size_t>(k)];
        worst = std::max(worst, std::abs(total - mu_mass));
    }
    auto r = make("mass_conservation", mu_mass > 0 ? worst / mu_mass : worst, tol,
                  "decomposition of the pre-stop law into active and stopped mass",
                  digest_fields({&sol.nu.values, &sol.data.mu.field.values}));
    return r;
}

CheckReport check_saturation(const StefanSolution& sol, Real tol) {
    Mask region = ever_active(sol);
    Real fmax = std::max<Real>(1e-300, sol.data.f.values.maxCoeff());
    Real worst = 0.0;
    for (Index i = 0; i < sol.data.grid.node_count(); ++i)
        if (region[i])
            worst = std::max(worst, std::abs(sol.nu_base.values[i] - sol.data.f.values[i]));
    return make("saturation", worst / fmax, tol,
                "target measure equals the capacity on the ever-active region",
                digest_fields({&sol.nu_base.values, &sol.data.f.values}));
}

CheckReport check_l1_contraction(const StefanSolution& a, const StefanSolution& b,
                                 Real slack) {
    if (!a.ext_grid.same_nodes(b.ext_grid))
        throw std::invalid_argument("check_l1_contraction: grid mismatch");
    if ((a.data.f.values - b.data.f.values).abs().maxCoeff() > 1e-12)
        throw std::invalid_argument("check_l1_contraction: capacities differ");
    Real vol = a.ext_grid.cell_volume();
    Real nu_part = (a.nu.values - b.nu.values).max(0.0).sum() * vol;
    ArrayXr dmu = a.data.mu.field.values - b.data.mu.field.values;
    Real mu_part = dmu.max(0.0).sum() * a.data.grid.cell_volume();
    Real mass = a.data.mu.mass();
    auto r = make("l1_contraction", nu_part - mu_part, slack * mass,
                  "positive-part L1 contraction from source to target measures",
                  digest_fields({&a.nu.values, &b.nu.values}));
    return r;
}

CheckReport check_bv_bound(const StefanSolution& sol, Real slack) {
    if (sol.data.grid.dim != 1)
        throw std::invalid_argument("check_bv_bound: d=1 only");
    Real fspread = sol.data.f.values.maxCoeff() - sol.data.f.values.minCoeff();
    if (fspread > 1e-12)
        throw std::invalid_argument("check_bv_bound: constant f only");
    Real tv_nu = total_variation_1d(sol.nu);
    Real tv_mu = total_variation_1d(sol.data.mu.field);
    return make("bv_bound", tv_nu - tv_mu, slack * std::max<Real>(tv_mu, 1e-12),
                "total variation does not increase from mu to nu",
                digest_fields({&sol.nu.values, &sol.data.mu.field.values}));
}

CheckReport check_monotonicity(const StefanSolution& a, const StefanSolution& b,
                               Real tol) {
    if (!a.ext_grid.same_nodes(b.ext_grid))
        throw std::invalid_argument("check_monotonicity: grid mismatch");
    if ((a.data.mu.field.values - b.data.mu.field.values).maxCoeff() > 1e-12)
        throw std::invalid_argument("check_monotonicity: requires mu1 <= mu2");
    Real nu_viol = std::max<Real>(0.0, (a.nu.values - b.nu.values).maxCoeff());
    auto r = make("monotonicity", nu_viol, tol,
                  "larger sources stop later and produce larger target measures",
                  digest_fields({&a.nu.values, &b.nu.values}));
    if (a.type == StefanType::freezing && b.type == StefanType::freezing) {
        Real dt = a.data.dt;
        Index bad = 0;
        for (Index i = 0; i < a.barrier.stop_time.size(); ++i) {
            Real s1 = a.barrier.stop_time[i], s2 = b.barrier.stop_time[i];
            if (std::isinf(s1) && !std::isinf(s2)) ++bad;
            else if (!std::isinf(s1) && s1 > s2 + dt + 1e-12) ++bad;
        }
        r.note = "barrier ordering violations: " + std::to_string(bad);
        if (bad > 0) r.pass = false;
    }
    return r;
}

CheckReport check_universality(const FracOperator& op, const ProblemData& data,
                               Real slack) {
    // Type I route: nu from the elliptic obstacle problem alone.
    SpaceField forcing(data.grid, data.f.values - data.mu.field.values);
    PsorOptions opt;
    opt.tol = 1e-9;
    auto [u, rep] = solve_elliptic_obstacle(op, forcing, opt);
    GridSpec ext = data.grid.extended();
    ArrayXr nu_I = (embed_in_extended(data.grid, ext, data.mu.field.values) -
                    op.apply_extended(u.values, ext))
                       .max(0.0);
    // Type II route: final stopped mass of the melting pipeline.
    StefanSolution melt = solve_melting(op, data);
    Real dist = l1_distance(ext, nu_I, melt.nu.values);
    auto r = make("universality", dist, slack * data.mu.mass(),
                  "the optimal target measure is independent of the cost type",
                  digest_fields({&nu_I, &melt.nu.values}));
    return r;
}

CheckReport check_extinction(const StefanSolution& sol) {
    CheckReport r;
    r.name = "extinction";
    r.provenance = "uniformly positive capacity freezes everything in finite time";
    r.inputs_digest = digest_fields({&sol.data.mu.field.values});
    if (sol.type != StefanType::freezing)
        throw std::invalid_argument("check_extinction: freezing solutions only");
    if (sol.data.has_insulation()) {
        r.skipped = true;
        r.pass = true;
        r.metric = INFINITY;
        r.tolerance = sol.data.horizon;
        r.note = "hypothesis f >= delta violated by the insulated set; skipped";
        return r;
    }
    r.metric = sol.extinction_time;
    r.tolerance = sol.data.horizon;
    r.pass = std::isfinite(sol.extinction_time) && sol.extinction_time < sol.data.horizon;
    return r;
}

CheckReport check_insulated_recovery(const StefanSolution& sol) {
    if (sol.type != StefanType::freezing || !sol.data.has_insulation())
        throw std::invalid_argument("check_insulated_recovery: needs an insulated freezing run");
    const GridSpec& g = sol.data.grid;
    const Mask& G = sol.data.insulated_G;
    const Mask& S = sol.insulated;
    auto near_boundary = [&](Index i) {
        auto ij = g.unflatten(i);
        for (Index dx = -1; dx <= 1; ++dx) {
            for (Index dy = -1; dy <= 1; ++dy) {
                if (g.dim == 1 && dy != 0) continue;
                Index nx = ij[0] + dx, ny = ij[1] + dy;
                if (nx < 0 || nx >= g.points_per_axis) continue;
                if (g.dim == 2 && (ny < 0 || ny >= g.points_per_axis)) continue;
                if (G[g.flatten(nx, ny)] != G[i]) return true;
            }
        }
        return false;
    };
    Index mismatched = 0;
    for (Index i = 0; i < g.node_count(); ++i)
        if (S[i] != G[i] && !near_boundary(i)) ++mismatched;
    CheckReport r;
    r.name = "insulated_region_recovery";
    r.metric = Real(mismatched);
    r.tolerance = 0.0;
    r.pass = mismatched == 0;
    r.provenance = "the insulated region of the constructed solution equals G";
    r.inputs_digest = digest_fields({&sol.nu.values});
    return r;
}

CheckReport cross_validate_mc(const StefanSolution& sol, const EulerianEstimate& est,
                              Index n_particles, Real tol_at_1e6) {
    const Real mass = sol.data.mu.mass();
    Real worst = 0.0;
    std::string note;
    // probe times T/8, T/4, T/2
    Real T = sol.eta.time(sol.eta.steps() - 1);
    for (Real frac : {0.125, 0.25, 0.5}) {
        Real t = frac * T;
        Index k_pde = static_cast<Index>(std::lround(t / sol.eta.dt));
        Index k_mc = static_cast<Index>(std::lround(t / est.eta_hat.dt));
        if (k_pde >= sol.eta.steps() || k_mc >= est.eta_hat.steps()) continue;
        Real d = l1_distance(sol.data.grid, sol.eta[k_pde], est.eta_hat[k_mc]) / mass;
        worst = std::max(worst, d);
        note += "eta@" + std::to_string(t) + "=" + std::to_string(d) + " ";
    }
    Index k_last_pde = sol.rho_cum.steps() - 1;
    Index k_last_mc = est.rho_cum_hat.steps() - 1;
    Real d_rho =
        l1_distance(sol.ext_grid, sol.rho_cum[k_last_pde], est.rho_cum_hat[k_last_mc]) / mass;
    worst = std::max(worst, d_rho);
    note += "rho@T=" + std::to_string(d_rho);

    Real tol = tol_at_1e6 * std::max(1.0, std::sqrt(1e6 / Real(n_particles)));
    auto r = make("cross_validate_mc", worst, tol,
                  "PDE and particle definitions of the Eulerian variables coincide",
                  digest_fields({&sol.nu.values, &est.rho_cum_hat[k_last_mc]}));
    r.note = note;
    return r;
}

}  // namespace fracstefan
