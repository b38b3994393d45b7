#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "fracstefan/grid.hpp"

namespace fracstefan {

/// Normalization constant C_{d,s} making (-Delta)^s the multiplier |xi|^{2s}.
Real frac_laplacian_constant(int d, Real s);

/// Riesz kernel constant so that (-Delta)^s (N * m) = m (transient regime).
Real riesz_constant(int d, Real s);

/// True if the 2s-stable process is transient (d >= 2, or d = 1 and s < 1/2).
bool transient_regime(int d, Real s);

/**
 * Discrete restricted fractional Laplacian on the grid box, exterior values
 * pinned to 0. Rows combine exact per-cell kernel integrals inside the box
 * with the closed-form kernel mass outside it:
 *
 *   (A v)_i = (sum_{j != i} w_{ij} + t_i) v_i - sum_{j != i} w_{ij} v_j,
 *
 * w_{ij} = C_{d,s} int_{cell_j} |x_i - y|^{-d-2s} dy (translation invariant,
 * hence symmetric), t_i = C_{d,s} int_{box^c} |x_i - y|^{-d-2s} dy. Diagonal
 * positive, off-diagonal <= 0, row sums t_i > 0: an M-matrix with a discrete
 * maximum principle.
 */
class FracOperator {
public:
    static FracOperator build(const GridSpec& grid, Real s);

    const GridSpec& grid() const { return grid_; }
    Real order() const { return s_; }

    Real diag(Index i) const { return diag_[i]; }
    Real tail(Index i) const { return tail_[i]; }
    /// Kernel-integral weight between distinct nodes (>= 0).
    Real weight(Index i, Index j) const;
    /// sum_{j != i} w_{ij} v_j
    Real neighbor_sum(const ArrayXr& v, Index i) const;

    /// (-Delta)^s v at base nodes.
    ArrayXr apply(const ArrayXr& v) const;
    /// (-Delta)^s v at extended-box nodes (pure kernel integral off the box).
    ArrayXr apply_extended(const ArrayXr& v, const GridSpec& ext) const;

    /**
     * (-Delta)^s at base nodes of a function with known nonzero exterior
     * values (e.g. a Riesz potential, which decays like |y|^{2s-d} and must
     * not be pinned to 0 outside the box). Equals apply(v) minus the kernel
     * integral of `exterior` over the box complement. d = 1 only.
     */
    ArrayXr apply_full(const ArrayXr& v,
                       const std::function<Real(Real)>& exterior) const;

    /// C_{d,s} * kernel mass beyond the extended box, per base node
    /// (rate at which mass stopped outside the evaluation box accrues).
    ArrayXr tail_rate_beyond(const GridSpec& ext) const;

    /// Self-adjoint form <Au, v> = <u, Av>; convenience inner product.
    Real dirichlet_form(const ArrayXr& u, const ArrayXr& v) const;

private:
    GridSpec grid_;
    Real s_ = 0.0;
    Real constant_ = 0.0;
    // d=1: weights_[k] for axis offset k (index 0 unused).
    // d=2: weights_[|di| * n + |dj|].
    std::vector<Real> weights_;
    ArrayXr diag_;
    ArrayXr tail_;

    Real cell_integral_from_point(Real px, Real py, Index jx, Index jy) const;
};

/// Riesz kernel N(y) = C |y|^{2s-d}; constructible only in the transient regime.
struct RieszKernel {
    Real s;
    int d;
    Real constant;

    RieszKernel(int d_, Real s_);
    Real operator()(Real r) const;      // point value at distance r > 0
    Real cell_average(Real h) const;    // exact average of N over one cell at 0
};

/**
 * Potential U_m(y) = sum_x N(y - x) m(x) h^d with the singular self-cell
 * replaced by the exact cell average of N. Evaluated on eval_grid (defaults
 * to the field's own grid).
 */
SpaceField riesz_potential(const DensityField& m, const RieszKernel& kernel,
                           std::optional<GridSpec> eval_grid = std::nullopt);
ArrayXr riesz_potential(const GridSpec& src, const ArrayXr& m, const RieszKernel& kernel,
                        const GridSpec& eval);

/**
 * One implicit Euler step: solves (I + dt A) u = v + dt * source by
 * Gauss-Seidel sweeps to residual <= 1e-10 * max(1, ||rhs||_inf).
 * Nonnegative v and source give a nonnegative result (M-matrix).
 */
ArrayXr implicit_heat_step(const FracOperator& op, const ArrayXr& v, Real dt,
                           const ArrayXr& source);

struct EigenvalueEstimate {
    Real lambda = 0.0;
    Real residual = 0.0;
    Real radius = 0.0;   // max node distance in the mask + h/2
    int iterations = 0;
};

/**
 * Smallest Dirichlet eigenvalue of the operator restricted to the masked
 * nodes (zero outside), by inverse power iteration with CG inner solves.
 * Stops when ||A v - lambda v|| <= 1e-8 ||v||.
 */
EigenvalueEstimate principal_eigenvalue(const FracOperator& op, const Mask& mask);

}  // namespace fracstefan
