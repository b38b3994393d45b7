#pragma once

#include <functional>
#include <vector>

#include "fracstefan/frac_operator.hpp"

namespace fracstefan {

struct ObstacleSolveReport {
    std::vector<int> iterations;     // PSOR sweeps per solve / per time step
    Real max_complementarity = 0.0;  // max over nodes/steps of |min(residual, w)|
    Real wall_seconds = 0.0;
};

struct PsorOptions {
    Real omega = 1.5;
    Real tol = 1e-8;
    int max_iter = 0;   // 0: use 10 * node count
};

/**
 * Projected SOR for the linear complementarity problem
 *   min{ alpha u + A u + q, u } = 0
 * with A the M-matrix fractional operator and alpha >= 0 a mass shift
 * (alpha = 1/dt for implicit time steps, 0 for the elliptic problem).
 * Sweeps alternate lexicographic and reversed order. Returns the iterate
 * once max_i |min((alpha + A)u + q, u)_i| <= tol.
 */
ArrayXr psor(const FracOperator& op, Real alpha, const ArrayXr& q,
             const PsorOptions& opt, ArrayXr init, int* sweeps_out);

/**
 * min{ A u + forcing, u } = 0 with u -> 0 at the box edge.
 * Complementarity tolerance 1e-8 * max(1, ||forcing||_inf).
 */
std::pair<SpaceField, ObstacleSolveReport> solve_elliptic_obstacle(
    const FracOperator& op, const SpaceField& forcing, const PsorOptions& opt = {});

/**
 * Implicit Euler steps of min{ d_t w + A w + forcing, w } = 0:
 *   min{ (w_k - w_{k-1})/dt + A w_k + forcing, w_k } = 0.
 * Runs n_steps steps (slices 0..n_steps, slice 0 = w0). stop_early, when
 * given, is evaluated after each step and truncates the stack.
 */
std::pair<SpaceTimeField, ObstacleSolveReport> solve_parabolic_obstacle(
    const FracOperator& op, const SpaceField& w0, const SpaceField& forcing,
    Real dt, Index n_steps, const PsorOptions& opt = {},
    const std::function<bool(Index, const ArrayXr&)>& stop_early = nullptr);

}  // namespace fracstefan
