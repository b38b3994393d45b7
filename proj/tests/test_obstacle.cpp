#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fracstefan/obstacle.hpp"

using namespace fracstefan;

namespace {

ArrayXr indicator(const GridSpec& g, Real a, Real b, Real scale = 1.0) {
    ArrayXr v(g.node_count());
    for (Index i = 0; i < g.node_count(); ++i) {
        Real x = g.axis_coord(i);
        v[i] = (x >= a && x < b) ? scale : 0.0;
    }
    return v;
}

Real lcp_residual(const FracOperator& op, Real alpha, const ArrayXr& q, const ArrayXr& u) {
    Real worst = 0.0;
    for (Index i = 0; i < u.size(); ++i) {
        Real r = (alpha + op.diag(i)) * u[i] - op.neighbor_sum(u, i) + q[i];
        worst = std::max(worst, std::abs(std::min(r, u[i])));
    }
    return worst;
}

}  // namespace

TEST_CASE("psor: zero rhs gives zero; omega domain enforced") {
    GridSpec g(1, 4.0, 64);
    FracOperator op = FracOperator::build(g, 0.4);
    PsorOptions opt;
    int sweeps = 0;
    ArrayXr u = psor(op, 0.0, ArrayXr::Zero(g.node_count()), opt,
                     ArrayXr::Zero(g.node_count()), &sweeps);
    CHECK(u.abs().maxCoeff() == 0.0);

    PsorOptions badw;
    badw.omega = 2.5;
    CHECK_THROWS(psor(op, 0.0, ArrayXr::Zero(g.node_count()), badw,
                      ArrayXr::Zero(g.node_count()), nullptr));
    PsorOptions tiny;
    tiny.max_iter = 1;
    tiny.tol = 1e-14;
    ArrayXr q = -indicator(g, -1.0, 1.0);
    CHECK_THROWS(psor(op, 0.0, q, tiny, ArrayXr::Zero(g.node_count()), nullptr));
}

TEST_CASE("psor with inactive constraint matches the unconstrained solve") {
    GridSpec g(1, 4.0, 128);
    FracOperator op = FracOperator::build(g, 0.4);
    // rhs chosen so the unconstrained solution of (I/dt + A)u = b is >= 0
    Real dt = 1.0 / 64.0;
    ArrayXr b = indicator(g, -1.0, 1.0);
    ArrayXr ref = implicit_heat_step(op, b, dt, ArrayXr::Zero(g.node_count()));
    PsorOptions opt;
    opt.tol = 1e-12;
    int sweeps = 0;
    // min{ (1/dt + A) u - b/dt, u } = 0  <=>  implicit step with source 0
    ArrayXr u = psor(op, 1.0 / dt, (-b / dt).eval(), opt, ArrayXr::Zero(g.node_count()),
                     &sweeps);
    CHECK((u - ref).abs().maxCoeff() <= 1e-8);
}

TEST_CASE("psor matches a dense projected-gradient oracle on a random instance") {
    GridSpec g(1, 2.0, 32);
    FracOperator op = FracOperator::build(g, 0.35);
    const Index N = g.node_count();
    std::mt19937_64 rng(99);
    std::normal_distribution<Real> N01;
    ArrayXr q(N);
    for (Index i = 0; i < N; ++i) q[i] = N01(rng);

    PsorOptions opt;
    opt.tol = 1e-10;
    ArrayXr u = psor(op, 0.5, q, opt, ArrayXr::Zero(N), nullptr);

    // oracle: projected gradient on (1/2) u^T (alpha I + A) u + q^T u, u >= 0
    MatrixXr A(N, N);
    for (Index i = 0; i < N; ++i)
        for (Index j = 0; j < N; ++j)
            A(i, j) = (i == j ? 0.5 + op.diag(i) : -op.weight(i, j));
    Real step = 0.9 / A.eigenvalues().real().maxCoeff();
    VectorXr v = VectorXr::Zero(N);
    for (int it = 0; it < 400000; ++it) {
        VectorXr grad = A * v + q.matrix();
        v = (v - step * grad).cwiseMax(0.0);
    }
    CHECK((u.matrix() - v).lpNorm<Eigen::Infinity>() <= 1e-6);
}

TEST_CASE("elliptic obstacle: nonnegative forcing gives the zero solution") {
    GridSpec g(1, 4.0, 128);
    FracOperator op = FracOperator::build(g, 0.4);
    ArrayXr f = indicator(g, -2.0, 2.0, 0.3) + 0.1;
    auto [u, rep] = solve_elliptic_obstacle(op, SpaceField(g, f));
    CHECK(u.values.abs().maxCoeff() == 0.0);
    CHECK(rep.max_complementarity <= 1e-8);
}

TEST_CASE("elliptic obstacle with f=0: constraint never binds, A u = mu") {
    // On all of R^d the solution would be the Riesz potential of mu; on the
    // truncated box the defining property is the never-binding constraint.
    GridSpec g(1, 4.0, 256);
    FracOperator op = FracOperator::build(g, 0.4);
    ArrayXr mu = indicator(g, -1.0, 1.0);
    auto [u, rep] = solve_elliptic_obstacle(op, SpaceField(g, (-mu).eval()));
    CHECK(u.values.minCoeff() > 0.0);  // strictly positive in the whole box
    ArrayXr Au = op.apply(u.values);
    CHECK((Au - mu).abs().maxCoeff() <= 1e-7);
    CHECK(rep.max_complementarity <= 1e-8);
}

TEST_CASE("elliptic obstacle benchmark: positivity set strictly contains the source") {
    const Real s = 0.4;
    auto run = [&](int n) {
        GridSpec g(1, 4.0, n);
        FracOperator op = FracOperator::build(g, s);
        ArrayXr forcing = ArrayXr::Ones(g.node_count()) - indicator(g, -1.0, 1.0, 2.0);
        auto [u, rep] = solve_elliptic_obstacle(op, SpaceField(g, forcing));
        Mask E = positive_set(u.values, default_positive_tol(u.values));
        Real lo = 1e9, hi = -1e9;
        for (Index i = 0; i < g.node_count(); ++i)
            if (E[i]) {
                lo = std::min(lo, g.axis_coord(i));
                hi = std::max(hi, g.axis_coord(i));
            }
        for (Index i = 0; i < g.node_count(); ++i)
            if (std::abs(g.axis_coord(i)) < 1.0) CHECK(E[i]);
        return std::pair<Real, Real>(lo, hi);
    };
    auto [lo64, hi64] = run(64);
    auto [lo512, hi512] = run(512);
    CHECK(lo64 < -1.0);
    CHECK(hi64 > 1.0);
    // the computed set is stable under refinement (coarse oracle)
    CHECK(std::abs(lo64 - lo512) <= 2.0 * 8.0 / 64.0);
    CHECK(std::abs(hi64 - hi512) <= 2.0 * 8.0 / 64.0);
}

TEST_CASE("parabolic obstacle: melting-type data is nondecreasing in time") {
    GridSpec g(1, 4.0, 128);
    FracOperator op = FracOperator::build(g, 0.4);
    ArrayXr forcing = ArrayXr::Ones(g.node_count()) - indicator(g, -1.0, 1.0, 2.0);
    auto [w, rep] = solve_parabolic_obstacle(op, SpaceField(g), SpaceField(g, forcing),
                                             1.0 / 64.0, 32);
    CHECK(rep.max_complementarity <= 1e-8 * 2.0);
    for (Index k = 1; k < w.steps(); ++k) {
        CHECK(w[k].minCoeff() >= 0.0);
        CHECK(((w[k] - w[k - 1]).minCoeff()) >= -1e-9);
    }
    // w0 = 0 with forcing >= 0 stays identically zero
    auto [wz, repz] = solve_parabolic_obstacle(op, SpaceField(g),
                                               SpaceField(g, forcing.abs()), 1.0 / 64.0, 8);
    for (Index k = 0; k < wz.steps(); ++k) CHECK(wz[k].abs().maxCoeff() == 0.0);
}

TEST_CASE("parabolic obstacle: freezing-type data is nonincreasing in time") {
    GridSpec g(1, 4.0, 128);
    FracOperator op = FracOperator::build(g, 0.4);
    // forcing nu >= 0 and a nonnegative initial transform
    ArrayXr mu = indicator(g, -1.0, 1.0, 2.0);
    auto [u, urep] = solve_elliptic_obstacle(
        op, SpaceField(g, (ArrayXr::Ones(g.node_count()) - mu).eval()));
    ArrayXr nu = (mu - op.apply(u.values)).max(0.0);
    auto [w, rep] =
        solve_parabolic_obstacle(op, u, SpaceField(g, nu), 1.0 / 64.0, 32);
    for (Index k = 1; k < w.steps(); ++k) {
        CHECK(w[k].minCoeff() >= 0.0);
        CHECK(((w[k - 1] - w[k]).minCoeff()) >= -1e-9);
    }
    CHECK_THROWS(solve_parabolic_obstacle(op, SpaceField(g, (-mu).eval()),
                                          SpaceField(g, nu), 0.01, 4));
}

TEST_CASE("comparison principle on random forcing pairs") {
    GridSpec g(1, 4.0, 64);
    FracOperator op = FracOperator::build(g, 0.45);
    std::mt19937_64 rng(2024);
    std::normal_distribution<Real> N01;
    for (int trial = 0; trial < 5; ++trial) {
        ArrayXr f1(g.node_count()), gap(g.node_count());
        for (Index i = 0; i < g.node_count(); ++i) {
            f1[i] = N01(rng);
            gap[i] = std::abs(N01(rng));
        }
        ArrayXr f2 = f1 + gap;  // f1 <= f2
        auto [u1, r1] = solve_elliptic_obstacle(op, SpaceField(g, f1));
        auto [u2, r2] = solve_elliptic_obstacle(op, SpaceField(g, f2));
        // smaller forcing -> larger solution
        CHECK((u2.values - u1.values).maxCoeff() <= 1e-8 * 10);

        auto [w1, p1] = solve_parabolic_obstacle(op, SpaceField(g), SpaceField(g, f1),
                                                 1.0 / 32.0, 8);
        auto [w2, p2] = solve_parabolic_obstacle(op, SpaceField(g), SpaceField(g, f2),
                                                 1.0 / 32.0, 8);
        for (Index k = 0; k < w1.steps(); ++k)
            CHECK((w2[k] - w1[k]).maxCoeff() <= 1e-8 * 10);
    }
}

TEST_CASE("complementarity residual is reported and within tolerance") {
    GridSpec g(1, 4.0, 128);
    FracOperator op = FracOperator::build(g, 0.4);
    ArrayXr forcing = ArrayXr::Ones(g.node_count()) - indicator(g, -1.0, 1.0, 2.0);
    auto [u, rep] = solve_elliptic_obstacle(op, SpaceField(g, forcing));
    Real scale = std::max<Real>(1.0, forcing.abs().maxCoeff());
    CHECK(rep.max_complementarity <= 1e-8 * scale);
    CHECK(rep.max_complementarity == doctest::Approx(lcp_residual(op, 0.0, forcing, u.values)));
}
