#include "fracstefan/obstacle.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace fracstefan {

namespace {

Real complementarity_residual(const FracOperator& op, Real alpha, const ArrayXr& q,
                              const ArrayXr& u) {
    Real worst = 0.0;
    for (Index i = 0; i < u.size(); ++i) {
        Real r = (alpha + op.diag(i)) * u[i] - op.neighbor_sum(u, i) + q[i];
        worst = std::max(worst, std::abs(std::min(r, u[i])));
    }
    return worst;
}

}  // namespace

ArrayXr psor(const FracOperator& op, Real alpha, const ArrayXr& q,
             const PsorOptions& opt, ArrayXr init, int* sweeps_out) {
    if (!(opt.omega > 0 && opt.omega < 2))
        throw std::invalid_argument("psor: omega must be in (0,2)");
    const Index N = q.size();
    if (N != op.grid().node_count() || init.size() != N)
        throw std::invalid_argument("psor: size mismatch");
    ArrayXr u = std::move(init);
    const int max_iter = opt.max_iter > 0 ? opt.max_iter : static_cast<int>(10 * N);
    for (int sweep = 1; sweep <= max_iter; ++sweep) {
        bool forward = (sweep % 2) == 1;
        for (Index k = 0; k < N; ++k) {
            Index i = forward ? k : N - 1 - k;
            Real d = alpha + op.diag(i);
            Real unconstrained = u[i] - opt.omega * ((d * u[i] - op.neighbor_sum(u, i) + q[i]) / d);
            u[i] = std::max<Real>(0.0, unconstrained);
        }
        if (complementarity_residual(op, alpha, q, u) <= opt.tol) {
            if (sweeps_out) *sweeps_out = sweep;
            return u;
        }
    }
    throw std::runtime_error("psor: exceeded max iterations (residual " +
                             std::to_string(complementarity_residual(op, alpha, q, u)) + ")");
}

std::pair<SpaceField, ObstacleSolveReport> solve_elliptic_obstacle(
    const FracOperator& op, const SpaceField& forcing, const PsorOptions& opt_in) {
    if (!forcing.grid.same_nodes(op.grid()))
        throw std::invalid_argument("solve_elliptic_obstacle: grid mismatch");
    auto t0 = std::chrono::steady_clock::now();
    PsorOptions opt = opt_in;
    Real scale = std::max<Real>(1.0, forcing.values.abs().maxCoeff());
    opt.tol = opt_in.tol * scale;
    int sweeps = 0;
    ArrayXr u = psor(op, 0.0, forcing.values, opt,
                     ArrayXr::Zero(op.grid().node_count()), &sweeps);
    ObstacleSolveReport rep;
    rep.iterations.push_back(sweeps);
    rep.max_complementarity = complementarity_residual(op, 0.0, forcing.values, u);
    rep.wall_seconds =
        std::chrono::duration<Real>(std::chrono::steady_clock::now() - t0).count();
    return {SpaceField(op.grid(), std::move(u)), rep};
}

std::pair<SpaceTimeField, ObstacleSolveReport> solve_parabolic_obstacle(
    const FracOperator& op, const SpaceField& w0, const SpaceField& forcing,
    Real dt, Index n_steps, const PsorOptions& opt_in,
    const std::function<bool(Index, const ArrayXr&)>& stop_early) {
    if (!w0.grid.same_nodes(op.grid()) || !forcing.grid.same_nodes(op.grid()))
        throw std::invalid_argument("solve_parabolic_obstacle: grid mismatch");
    if (!(dt > 0)) throw std::invalid_argument("solve_parabolic_obstacle: dt must be > 0");
    if ((w0.values < 0).any())
        throw std::invalid_argument("solve_parabolic_obstacle: w0 must be >= 0");

    auto t0 = std::chrono::steady_clock::now();
    PsorOptions opt = opt_in;
    Real scale = std::max({Real(1.0), forcing.values.abs().maxCoeff(),
                           w0.values.abs().maxCoeff()});
    opt.tol = opt_in.tol * scale;
    const Real alpha = 1.0 / dt;

    SpaceTimeField w(op.grid(), dt, n_steps + 1);
    w[0] = w0.values;
    ObstacleSolveReport rep;
    for (Index k = 1; k <= n_steps; ++k) {
        ArrayXr q = forcing.values - alpha * w[k - 1];
        int sweeps = 0;
        w[k] = psor(op, alpha, q, opt, w[k - 1], &sweeps);
        rep.iterations.push_back(sweeps);
        rep.max_complementarity =
            std::max(rep.max_complementarity, complementarity_residual(op, alpha, q, w[k]));
        if (stop_early && stop_early(k, w[k])) {
            w.slices.resize(static_cast<size_t>(k) + 1);
            break;
        }
    }
    rep.wall_seconds =
        std::chrono::duration<Real>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(w), rep};
}

}  // namespace fracstefan
