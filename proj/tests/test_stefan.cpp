#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fracstefan/stefan.hpp"

using namespace fracstefan;

namespace {

ProblemData benchmark(const GridSpec& g, Real T = 2.0, Real dt = 1.0 / 256.0) {
    ProblemData d;
    d.grid = g;
    d.s = 0.4;
    ArrayXr mu(g.node_count());
    for (Index i = 0; i < g.node_count(); ++i)
        mu[i] = std::abs(g.axis_coord(i)) < 1.0 ? 2.0 : 0.0;
    d.mu = DensityField(SpaceField(g, mu));
    d.f = SpaceField(g, ArrayXr::Ones(g.node_count()));
    d.f_background = 1.0;
    d.horizon = T;
    d.dt = dt;
    return d;
}

// shared across cases: the benchmark runs once per pipeline
struct Fixture {
    GridSpec g{1, 4.0, 256, 3.0};
    FracOperator op = FracOperator::build(g, 0.4);
    ProblemData data = benchmark(g, 2.0, 1.0 / 128.0);
    StefanSolution melt = solve_melting(op, data);
    StefanSolution frz = solve_freezing(op, data);
};

Fixture& fixture() {
    static Fixture f;
    return f;
}

}  // namespace

TEST_CASE("mushy melting data is rejected; mu = 0 yields the zero bundle") {
    GridSpec g(1, 4.0, 64);
    FracOperator op = FracOperator::build(g, 0.4);
    ProblemData d = benchmark(g, 0.25, 1.0 / 32.0);
    ArrayXr mushy = (0.5 * d.mu.field.values).eval();
    d.mu = DensityField(SpaceField(g, mushy));
    CHECK_THROWS_WITH_AS(static_cast<void>(solve_melting(op, d)),
                         doctest::Contains("mushy"), std::invalid_argument);

    ProblemData z = benchmark(g, 0.25, 1.0 / 32.0);
    z.mu = DensityField(SpaceField(g));
    StefanSolution sol = solve_melting(op, z);
    for (Index k = 0; k < sol.eta.steps(); ++k) {
        CHECK(sol.eta[k].abs().maxCoeff() == 0.0);
        CHECK(sol.rho_cum[k].abs().maxCoeff() == 0.0);
    }
    CHECK(sol.nu.values.abs().maxCoeff() == 0.0);

    StefanSolution fz = solve_freezing(op, z);
    CHECK(fz.extinction_time == 0.0);
    CHECK(fz.initial_domain.count() == 0);
}

TEST_CASE("melting: active set grows and saturates the source region") {
    auto& F = fixture();
    const StefanSolution& sol = F.melt;
    Real tol = F.data.resolved_active_tol();
    // raw slab masks are nondecreasing
    for (Index k = 2; k < sol.eta.steps(); ++k) {
        Mask prev = positive_set(sol.eta[k - 1], tol);
        Mask cur = positive_set(sol.eta[k], tol);
        for (Index i = 0; i < F.g.node_count(); ++i)
            if (prev[i]) CHECK(cur[i]);
    }
    // active set at T strictly contains [-1, 1]
    Mask last = positive_set(sol.eta[sol.eta.steps() - 1], tol);
    Real lo = 1e9, hi = -1e9;
    for (Index i = 0; i < F.g.node_count(); ++i)
        if (last[i]) {
            lo = std::min(lo, F.g.axis_coord(i));
            hi = std::max(hi, F.g.axis_coord(i));
        }
    CHECK(lo < -1.0);
    CHECK(hi > 1.0);
    // rho_cum(T) = 1 on [-1, 1] within 1e-3
    Index M = sol.rho_cum.steps() - 1;
    for (Index i = 0; i < sol.ext_grid.node_count(); ++i)
        if (std::abs(sol.ext_grid.axis_coord(i)) < 1.0)
            CHECK(sol.rho_cum[M][i] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("melting enthalpy identities") {
    auto& F = fixture();
    const StefanSolution& sol = F.melt;
    const GridSpec& ext = sol.ext_grid;
    ArrayXr mu_ext = embed_in_extended(F.g, ext, F.data.mu.field.values);
    CHECK((sol.enthalpy[0] - mu_ext).abs().maxCoeff() <= 1e-6);
    for (Index k = 0; k < sol.enthalpy.steps(); ++k) {
        ArrayXr eta_ext = embed_in_extended(F.g, ext, sol.eta[k]);
        CHECK(((sol.enthalpy[k] - 1.0).max(0.0) - eta_ext).abs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("Duvaut identity holds exactly (melting and freezing)") {
    auto& F = fixture();
    {
        const StefanSolution& sol = F.melt;
        ArrayXr acc = ArrayXr::Zero(F.g.node_count());
        for (Index k = 1; k < sol.w.steps(); ++k) {
            acc += sol.data.dt * sol.eta[k];
            CHECK((sol.w[k] - acc).abs().maxCoeff() <= 1e-10);
        }
    }
    {
        const StefanSolution& sol = F.frz;
        Index M = sol.w.steps() - 1;
        ArrayXr acc = sol.w[M];
        for (Index k = M - 1; k >= 0; --k) {
            acc += sol.data.dt * sol.eta[k + 1];
            CHECK((sol.w[k] - acc).abs().maxCoeff() <= 1e-10);
        }
    }
}

TEST_CASE("rho_cum is monotone, bounded by nu, and conservation-consistent") {
    auto& F = fixture();
    for (const StefanSolution* sol : {&F.melt, &F.frz}) {
        Index M = sol->rho_cum.steps() - 1;
        for (Index k = 1; k <= M; ++k)
            CHECK((sol->rho_cum[k] - sol->rho_cum[k - 1]).minCoeff() >= -1e-12);
        for (Index k = 0; k <= M; ++k) {
            CHECK(sol->rho_cum[k].minCoeff() >= 0.0);
            CHECK((sol->rho_cum[k] - sol->nu.values).maxCoeff() <= 1e-9);
            CHECK((sol->kappa[k] - sol->nu.values).maxCoeff() <= 1e-9);
            CHECK(sol->kappa[k].minCoeff() >= 0.0);
        }
        CHECK(rho_consistency(*sol) <= 0.02 * sol->data.mu.mass());
    }
}

TEST_CASE("freezing: finite extinction, saturation of nu, enthalpy line") {
    auto& F = fixture();
    const StefanSolution& sol = F.frz;
    CHECK(std::isfinite(sol.extinction_time));
    CHECK(sol.extinction_time < F.data.horizon);
    CHECK(sol.eta_mass.back() < F.data.extinction_threshold);

    // nu = f on the initial domain up to solver tolerance; mass balances
    for (Index i = 0; i < F.g.node_count(); ++i)
        if (sol.initial_domain[i])
            CHECK(std::abs(sol.nu_base.values[i] - 1.0) <= 1e-6);
    Real nu_total = integrate(sol.ext_grid, sol.nu.values) + sol.nu_tail_mass;
    CHECK(nu_total == doctest::Approx(F.data.mu.mass()).epsilon(0.01));

    // h = eta - 1 on the active phase
    for (Index k = 0; k < sol.enthalpy.steps(); ++k) {
        ArrayXr eta_ext = embed_in_extended(F.g, sol.ext_grid, sol.eta[k]);
        const Mask& phase = sol.active[static_cast<size_t>(k)];
        for (Index i = 0; i < F.g.node_count(); ++i) {
            if (!phase[i]) continue;
            Index j = sol.ext_grid.locate(F.g.axis_coord(i));
            CHECK(std::abs(sol.enthalpy[k][j] - (eta_ext[j] - 1.0)) <= 1e-6);
        }
    }
}

TEST_CASE("barrier duality: active sets match the stopping surface") {
    auto& F = fixture();
    Real dt = F.data.dt;
    Real tol = F.data.resolved_active_tol();
    {
        const StefanSolution& sol = F.frz;  // forward: active iff t < s(x)
        for (Index k = 0; k < sol.eta.steps(); k += 8) {
            Real t = sol.eta.time(k);
            Mask act = positive_set(sol.eta[k], tol);
            for (Index i = 0; i < F.g.node_count(); ++i) {
                Real sx = sol.barrier.at(F.g.axis_coord(i));
                if (act[i]) CHECK(t <= sx + dt);
                if (!act[i] && k > 0) CHECK(t >= sx - dt);
            }
        }
    }
    {
        const StefanSolution& sol = F.melt;  // backward: active iff t > s(x)
        for (Index k = 8; k < sol.eta.steps(); k += 8) {
            Real t = sol.eta.time(k);
            Mask act = positive_set(sol.eta[k], tol);
            for (Index i = 0; i < F.g.node_count(); ++i) {
                Real sx = sol.barrier.at(F.g.axis_coord(i));
                if (act[i]) CHECK(t >= sx - dt);
                if (!act[i]) CHECK(t <= sx + dt);
            }
        }
    }
}

TEST_CASE("insulated freezing: nu vanishes on G, temperature survives there") {
    GridSpec g(1, 4.0, 256, 3.0);
    FracOperator op = FracOperator::build(g, 0.4);
    ProblemData d = benchmark(g, 2.0, 1.0 / 128.0);
    Mask G(g.node_count());
    ArrayXr fv(g.node_count());
    for (Index i = 0; i < g.node_count(); ++i) {
        G[i] = std::abs(g.axis_coord(i)) < 0.25;
        fv[i] = G[i] ? 0.0 : 1.0;
    }
    d.insulated_G = G;
    d.f = SpaceField(g, fv);
    StefanSolution sol = solve_freezing(op, d);

    CHECK(std::isinf(sol.extinction_time));
    for (Index i = 0; i < g.node_count(); ++i) {
        Index j = sol.ext_grid.locate(g.axis_coord(i));
        if (G[i]) CHECK(sol.nu.values[j] <= 1e-8);
    }
    // eta stays positive on G at every computed slice
    Real tol = d.resolved_active_tol();
    for (Index k = 0; k < sol.eta.steps(); ++k)
        for (Index i = 0; i < g.node_count(); ++i)
            if (G[i]) CHECK(sol.eta[k][i] > (k == 0 ? -1.0 : tol));
    // recovered insulated region matches G within one cell layer
    Index mismatched = 0;
    for (Index i = 1; i + 1 < g.node_count(); ++i)
        if (sol.insulated[i] != G[i] && G[i - 1] == G[i] && G[i + 1] == G[i]) ++mismatched;
    CHECK(mismatched == 0);
    // the barrier carries the +inf sentinel on the insulated set
    for (Index i = 0; i < g.node_count(); ++i)
        if (G[i]) CHECK(std::isinf(sol.barrier.at(g.axis_coord(i))));
}

TEST_CASE("enthalpy residual is small against the smooth dictionary") {
    auto& F = fixture();
    CHECK(enthalpy_residual(F.melt, F.op) <= 0.02);
    CHECK(enthalpy_residual(F.frz, F.op) <= 0.03);
}

TEST_CASE("compute_enthalpy validates shapes") {
    auto& F = fixture();
    SpaceTimeField bad(F.g, F.data.dt, 3);
    CHECK_THROWS(compute_enthalpy(bad, F.melt.rho_cum, F.melt.nu, StefanType::melting));
}

TEST_CASE("nu tail decays like the kernel") {
    auto& F = fixture();
    const StefanSolution& sol = F.frz;
    Real sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (Index i = 0; i < sol.ext_grid.node_count(); ++i) {
        Real x = sol.ext_grid.axis_coord(i);
        if (x >= 3.0 && x <= 12.0 && sol.nu.values[i] > 0) {
            Real lx = std::log(x), ly = std::log(sol.nu.values[i]);
            sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
            ++n;
        }
    }
    Real slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope == doctest::Approx(-(1.0 + 2.0 * 0.4)).epsilon(0.15));
}

TEST_CASE("freezing rejects recurrent-regime potentials") {
    GridSpec g(1, 4.0, 64);
    CHECK_THROWS(FracOperator::build(g, 1.2));
    FracOperator op = FracOperator::build(g, 0.6);
    ProblemData d = benchmark(g, 0.25, 1.0 / 32.0);
    d.s = 0.6;
    // the pipeline itself never builds a Riesz kernel now, but the regime
    // guard still protects potential construction
    CHECK_THROWS(RieszKernel(1, 0.6));
    (void)op;
}
