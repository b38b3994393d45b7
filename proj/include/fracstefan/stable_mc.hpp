#pragma once

#include <cstdint>
#include <vector>

#include "fracstefan/stefan.hpp"

namespace fracstefan {

/**
 * Isotropic 2s-stable increment sampler via Gaussian subordination:
 * X = sqrt(2 T) Z with Z standard d-dimensional Gaussian and T a positive
 * s-stable subordinator increment over dt, sampled by the
 * Chambers-Mallows-Stuck construction and calibrated so that
 * E exp(i theta . X_dt) = exp(-dt |theta|^{2s}) exactly.
 */
struct StableSampler {
    Real s;
    int d;
    uint64_t seed;

    StableSampler(Real s_, int d_, uint64_t seed_);

    /// Subordinator increment over dt from two uniforms in (0,1).
    Real subordinator(Real u_angle, Real u_exp, Real dt) const;

    /// One increment from a 4-uniform block; dy unused for d = 1.
    void increment(const std::array<Real, 4>& u, Real dt, Real& dx, Real& dy) const;

    /// Convenience: increment for particle/step from the seeded stream.
    void increment_for(uint64_t particle, uint32_t step, Real dt, Real& dx, Real& dy) const;

private:
    Real cms_scale_;  // cos(pi s / 2)^{1/s}
};

enum class ParticleStatus : uint8_t { active = 0, stopped = 1, tail = 2 };

/// Positions, statuses and stop data for the particle system. Weights are
/// constant (= mass(mu)/N); stopped particles never move, so (x, y) of a
/// stopped particle is its stop position.
struct ParticleEnsemble {
    Real s = 0.4;
    int d = 1;
    uint64_t seed = 42;
    Real weight = 0.0;
    std::vector<Real> x, y;
    std::vector<ParticleStatus> status;
    std::vector<Real> stop_time;

    Index size() const { return static_cast<Index>(x.size()); }
};

/// Initial positions drawn from mu: inverse CDF within cells (d=1),
/// rejection against the bounding box (d=2). Deterministic in (seed, N).
ParticleEnsemble init_ensemble(const DensityField& mu, Index N, Real s, uint64_t seed);

/**
 * Run all particles against the barrier with time step dt up to horizon T.
 * Type I stops a particle at the first t_k >= s(X); Type II randomizes the
 * t=0 instant layer with probability min(f, mu)/mu and then stops at the
 * first t_k > 0 with t_k <= s(X). A particle landing outside the extended
 * box stops there and is tallied as tail mass. Active-particle histograms
 * are recorded every record_every steps. Bitwise deterministic for any
 * worker count (integer counts, per-particle state).
 */
struct McSimResult {
    GridSpec base_grid, ext_grid;
    Real dt = 0.0;
    int record_every = 1;
    std::vector<ArrayXr> active_counts;  // per record slice, base grid
    Index n_steps = 0;
};

McSimResult simulate_to_barrier(ParticleEnsemble& ens, const BarrierFunction& barrier,
                                StefanType type, const GridSpec& base_grid,
                                const SpaceField& f, const DensityField& mu, Real dt,
                                Real T, int record_every, int workers);

/// Eulerian estimates from a finished simulation: eta_hat on the base grid,
/// rho_cum_hat on the extended grid, cumulative tail mass per record slice.
struct EulerianEstimate {
    SpaceTimeField eta_hat;
    SpaceTimeField rho_cum_hat;
    std::vector<Real> tail_mass;
};

EulerianEstimate estimate_eulerian(const ParticleEnsemble& ens, const McSimResult& sim);

/// Empirical ball-exit law against the quadrature of the reference density.
struct ExitLaw {
    Real r = 1.0;
    Real x0 = 0.0;
    std::vector<Real> samples;  // d=1: signed exit positions; d=2: radii
    Real ks = 0.0;              // Kolmogorov-Smirnov distance to the reference CDF
};

ExitLaw exit_ball_law(Real s, int d, Real x0, Real r, Index N, Real dt, uint64_t seed,
                      int workers);

/// Reference exit-position CDF (mass of {position <= y} for d=1, {|X| <= y}
/// for d=2), numerically integrated and normalized to 1.
Real exit_law_reference_cdf(Real s, int d, Real x0, Real r, Real y);

/// Fitted decay rate of log P(tau_r > t) over the trailing decade of decay.
struct SurvivalFit {
    Real rate = 0.0;
    Real window_start = 0.0;
    Index samples_at_end = 0;
};

SurvivalFit survival_tail(Real s, int d, Real r, Index N, Real dt, Real horizon,
                          uint64_t seed, int workers);

}  // namespace fracstefan
