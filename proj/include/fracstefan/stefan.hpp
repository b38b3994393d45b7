#pragma once

#include "fracstefan/obstacle.hpp"

namespace fracstefan {

/// Type I freezes (active set shrinks, forward barrier); Type II melts
/// (active set grows, backward barrier). Only the type matters for every
/// computed object: the optimal target measure does not depend on the cost.
enum class StefanType { freezing, melting };

struct ProblemData {
    GridSpec grid;
    Real s = 0.4;
    DensityField mu;            // initial distribution, base grid
    SpaceField f;               // capacity, base grid
    Real f_background = 1.0;    // value of f outside the base box
    Mask insulated_G;           // freezing only; size 0 means none
    Real horizon = 2.0;         // T
    Real dt = 1.0 / 256.0;
    Real extinction_threshold = 1e-4;
    Real active_tol = 0.0;      // 0: auto = 1e-6 * max(1, ||mu||_inf)

    Real resolved_active_tol() const;
    bool has_insulation() const { return insulated_G.size() > 0 && insulated_G.any(); }
    /// Throws with the violated rule when data is inadmissible for `type`.
    void validate(StefanType type) const;
};

/// Per-node stopping surface on the extended grid. Forward barriers stop a
/// particle at (t, x) when t >= s(x); backward barriers when t <= s(x).
struct BarrierFunction {
    GridSpec grid;
    ArrayXr stop_time;
    bool forward = true;

    /// Nearest-node lookup; outside the grid the particle must stop
    /// (compact active region), encoded as 0 (forward) / +inf (backward).
    Real at(Real x, Real y = 0.0) const {
        Index i = grid.locate(x, y);
        if (i < 0) return forward ? 0.0 : INFINITY;
        return stop_time[i];
    }
};

/**
 * Full output of one melting/freezing run.
 *
 * Time layout: w has slices 0..M at t_k = k dt. eta slice 0 is the initial
 * temperature data; eta slice k >= 1 is the slab value on (t_{k-1}, t_k],
 * i.e. +-(w_k - w_{k-1})/dt, so the Duvaut identities
 *   w_k = dt sum_{j<=k} eta_j           (melting)
 *   w_k - w_M = dt sum_{j>k} eta_j      (freezing)
 * hold exactly. rho_cum, kappa and enthalpy live on the extended grid;
 * rho_cum slice 0 carries the instant t=0 stopped layer (melting).
 */
struct StefanSolution {
    StefanType type = StefanType::melting;
    ProblemData data;
    GridSpec ext_grid;

    SpaceField u;               // elliptic obstacle solution (freezing; else 0)
    SpaceTimeField w;           // base grid
    SpaceTimeField eta;         // base grid
    SpaceTimeField rho_cum;     // extended grid
    SpaceTimeField kappa;       // extended grid
    SpaceTimeField enthalpy;    // extended grid
    SpaceTimeField aeta_cum;    // extended grid: dt * sum_{j<=k} A eta_j
    SpaceField nu;              // extended grid
    SpaceField nu_base;         // nu restricted to the base grid
    SpaceField instant_layer;   // base grid (melting: f on supp mu)

    BarrierFunction barrier;
    Mask initial_domain;        // E, base grid
    Mask insulated;             // Sigma, base grid
    std::vector<Mask> active;   // monotone-closed active masks per slice, base grid

    std::vector<Real> eta_mass;   // integral of eta per slice
    std::vector<Real> tail_mass;  // mass stopped beyond the extended box, per slice
    Real nu_tail_mass = 0.0;      // kernel mass of nu beyond the extended box (freezing)
    Real extinction_time = INFINITY;
    Real eta_clamp_defect = 0.0;
    Real kappa_clamp_defect = 0.0;
    ObstacleSolveReport report;

    Index steps() const { return eta.steps() - 1; }
};

/// Theorem: melting data (mu, f) with mu > f on supp mu; eta solves the
/// weighted melting problem, w its running time integral.
StefanSolution solve_melting(const FracOperator& op, const ProblemData& data);

/// Theorem: freezing data; nu from the elliptic obstacle problem, w the
/// future time integral of eta; finite extinction when f >= delta > 0.
StefanSolution solve_freezing(const FracOperator& op, const ProblemData& data);

/// h = eta + rho_cum (- nu for freezing), all on the extended grid; the
/// melting t=0 slice equals mu exactly (instant layer included).
SpaceTimeField compute_enthalpy(const SpaceTimeField& eta_ext, const SpaceTimeField& rho_cum,
                                const SpaceField& nu, StefanType type);

/// sup-in-time, L1-in-space distance between the structural rho_cum and the
/// conservation-law reconstruction mu - eta - int A eta.
Real rho_consistency(const StefanSolution& sol);

/// Normalized weak-form residual of the enthalpy equation against a fixed
/// dictionary of 20 smooth space-time test functions.
Real enthalpy_residual(const StefanSolution& sol, const FracOperator& op);

/// Conservation-law reconstruction of rho_cum (extended grid).
SpaceTimeField conservation_rho(const StefanSolution& sol);

}  // namespace fracstefan
