#include "fracstefan/frac_operator.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "fracstefan/quadrature.hpp"

namespace fracstefan {

namespace {
constexpr Real kPi = 3.14159265358979323846;

// int_a^b z^{-1-2s} dz for 0 < a < b (b may be +inf).
Real kernel_mass_1d(Real a, Real b, Real s) {
    Real inv = 1.0 / (2.0 * s);
    if (std::isinf(b)) return inv * std::pow(a, -2.0 * s);
    return inv * (std::pow(a, -2.0 * s) - std::pow(b, -2.0 * s));
}

// int cos^{2s}(phi) dphi over [phi1, phi2] in (-pi/2, pi/2).
Real cos_power_integral(Real phi1, Real phi2, Real s) {
    return gauss_legendre([s](Real p) { return std::pow(std::cos(p), 2.0 * s); },
                          phi1, phi2, 32);
}

// 2D kernel integral int_cell |p - y|^{-2-2s} dy over the square cell
// centered at c with side h; p outside the cell. Tensor Gauss with
// subdivision graded by distance.
Real kernel_cell_integral_2d(Real px, Real py, Real cx, Real cy, Real h, Real s) {
    Real dist = std::hypot(px - cx, py - cy);
    int sub = dist <= 1.6 * h ? 4 : (dist <= 3.6 * h ? 2 : 1);
    Real hs = h / sub;
    Real total = 0.0;
    Real expo = -(2.0 + 2.0 * s) / 2.0;
    for (int a = 0; a < sub; ++a) {
        Real x0 = cx - 0.5 * h + a * hs, x1 = x0 + hs;
        for (int b = 0; b < sub; ++b) {
            Real y0 = cy - 0.5 * h + b * hs, y1 = y0 + hs;
            total += gauss_legendre(
                [&](Real x) {
                    Real dx2 = (x - px) * (x - px);
                    return gauss_legendre(
                        [&](Real y) {
                            Real r2 = dx2 + (y - py) * (y - py);
                            return std::pow(r2, expo);
                        },
                        y0, y1, 8);
                },
                x0, x1, 8);
        }
    }
    return total;
}

// int_{box^c} |p - y|^{-d-2s} dy for p strictly inside the square box
// [-L, L]^2, via the polar reduction rho(theta)^{-2s} / (2s) per side.
Real exterior_mass_2d(Real px, Real py, Real L, Real s) {
    struct Side {
        Real a;        // perpendicular distance
        Real u1, u2;   // lateral corner offsets from the foot
    };
    Side sides[4] = {
        {L - px, -L - py, L - py},   // right
        {L + px, -L - py, L - py},   // left
        {L - py, -L - px, L - px},   // top
        {L + py, -L - px, L - px},   // bottom
    };
    Real total = 0.0;
    for (const Side& sd : sides) {
        Real phi1 = std::atan(sd.u1 / sd.a);
        Real phi2 = std::atan(sd.u2 / sd.a);
        total += std::pow(sd.a, -2.0 * s) * cos_power_integral(phi1, phi2, s);
    }
    return total / (2.0 * s);
}

}  // namespace

Real frac_laplacian_constant(int d, Real s) {
    if (!(s > 0 && s < 1)) throw std::invalid_argument("s must be in (0,1)");
    return std::pow(4.0, s) * s * std::tgamma(0.5 * d + s) /
           (std::pow(kPi, 0.5 * d) * std::tgamma(1.0 - s));
}

Real riesz_constant(int d, Real s) {
    if (!transient_regime(d, s))
        throw std::invalid_argument("Riesz kernel requires the transient regime");
    return std::tgamma(0.5 * d - s) /
           (std::pow(4.0, s) * std::pow(kPi, 0.5 * d) * std::tgamma(s));
}

bool transient_regime(int d, Real s) {
    if (!(s > 0 && s < 1)) return false;
    return d >= 2 || s < 0.5;
}

FracOperator FracOperator::build(const GridSpec& grid, Real s) {
    if (!(s > 0 && s < 1)) throw std::invalid_argument("build_operator: s must be in (0,1)");
    if (grid.points_per_axis < 16)
        throw std::invalid_argument("build_operator: n >= 16 required");

    FracOperator op;
    op.grid_ = grid;
    op.s_ = s;
    op.constant_ = frac_laplacian_constant(grid.dim, s);

    const Real h = grid.spacing();
    const Real L = grid.half_width;
    const Index n = grid.points_per_axis;
    const Index N = grid.node_count();

    if (grid.dim == 1) {
        op.weights_.assign(static_cast<size_t>(n), 0.0);
        for (Index k = 1; k < n; ++k)
            op.weights_[k] = op.constant_ *
                             kernel_mass_1d((Real(k) - 0.5) * h, (Real(k) + 0.5) * h, s);
        op.tail_ = ArrayXr(N);
        for (Index i = 0; i < N; ++i) {
            Real x = grid.axis_coord(i);
            op.tail_[i] = op.constant_ * (kernel_mass_1d(L - x, INFINITY, s) +
                                          kernel_mass_1d(L + x, INFINITY, s));
        }
        op.diag_ = ArrayXr(N);
        for (Index i = 0; i < N; ++i) {
            Real sum = 0.0;
            for (Index j = 0; j < N; ++j)
                if (j != i) sum += op.weights_[std::abs(i - j)];
            op.diag_[i] = sum + op.tail_[i];
        }
    } else {
        op.weights_.assign(static_cast<size_t>(n * n), 0.0);
        for (Index di = 0; di < n; ++di) {
            for (Index dj = di; dj < n; ++dj) {
                if (di == 0 && dj == 0) continue;
                Real w = op.constant_ *
                         kernel_cell_integral_2d(0.0, 0.0, di * h, dj * h, h, s);
                op.weights_[di * n + dj] = w;
                op.weights_[dj * n + di] = w;
            }
        }
        op.tail_ = ArrayXr(N);
        for (Index i = 0; i < N; ++i) {
            auto p = grid.coord(i);
            op.tail_[i] = op.constant_ * exterior_mass_2d(p[0], p[1], L, s);
        }
        op.diag_ = ArrayXr(N);
        for (Index i = 0; i < N; ++i) {
            auto ij = grid.unflatten(i);
            Real sum = 0.0;
            for (Index jx = 0; jx < n; ++jx)
                for (Index jy = 0; jy < n; ++jy) {
                    if (jx == ij[0] && jy == ij[1]) continue;
                    sum += op.weights_[std::abs(jx - ij[0]) * n + std::abs(jy - ij[1])];
                }
            op.diag_[i] = sum + op.tail_[i];
        }
    }
    return op;
}

Real FracOperator::weight(Index i, Index j) const {
    if (i == j) return 0.0;
    const Index n = grid_.points_per_axis;
    if (grid_.dim == 1) return weights_[std::abs(i - j)];
    auto a = grid_.unflatten(i), b = grid_.unflatten(j);
    return weights_[std::abs(a[0] - b[0]) * n + std::abs(a[1] - b[1])];
}

Real FracOperator::neighbor_sum(const ArrayXr& v, Index i) const {
    const Index n = grid_.points_per_axis;
    Real sum = 0.0;
    if (grid_.dim == 1) {
        const Real* w = weights_.data();
        const Real* vv = v.data();
        for (Index j = 0; j < i; ++j) sum += w[i - j] * vv[j];
        for (Index j = i + 1; j < n; ++j) sum += w[j - i] * vv[j];
    } else {
        auto ij = grid_.unflatten(i);
        const Real* vv = v.data();
        for (Index jx = 0; jx < n; ++jx) {
            const Real* wrow = &weights_[std::abs(jx - ij[0]) * n];
            const Real* vrow = vv + jx * n;
            for (Index jy = 0; jy < n; ++jy)
                sum += wrow[std::abs(jy - ij[1])] * vrow[jy];
        }
        sum -= weights_[0] * v[i];  // weights_[0] == 0, kept for clarity
    }
    return sum;
}

ArrayXr FracOperator::apply(const ArrayXr& v) const {
    if (v.size() != grid_.node_count())
        throw std::invalid_argument("FracOperator::apply: grid mismatch");
    const Index N = v.size();
    ArrayXr out(N);
    for (Index i = 0; i < N; ++i) out[i] = diag_[i] * v[i] - neighbor_sum(v, i);
    return out;
}

Real FracOperator::cell_integral_from_point(Real px, Real py, Index jx, Index jy) const {
    const Real h = grid_.spacing();
    if (grid_.dim == 1) {
        Real dist = std::abs(px - grid_.axis_coord(jx));
        return kernel_mass_1d(dist - 0.5 * h, dist + 0.5 * h, s_);
    }
    return kernel_cell_integral_2d(px, py, grid_.axis_coord(jx), grid_.axis_coord(jy), h, s_);
}

ArrayXr FracOperator::apply_extended(const ArrayXr& v, const GridSpec& ext) const {
    if (v.size() != grid_.node_count())
        throw std::invalid_argument("apply_extended: grid mismatch");
    const Index off = (ext.points_per_axis - grid_.points_per_axis) / 2;
    const Index n = grid_.points_per_axis;
    ArrayXr base = apply(v);
    ArrayXr out = ArrayXr::Zero(ext.node_count());
    if (grid_.dim == 1) {
        out.segment(off, n) = base;
        for (Index i = 0; i < ext.points_per_axis; ++i) {
            if (i >= off && i < off + n) continue;
            Real y = ext.axis_coord(i);
            Real acc = 0.0;
            for (Index j = 0; j < n; ++j)
                acc += cell_integral_from_point(y, 0.0, j, 0) * v[j];
            out[i] = -constant_ * acc;
        }
    } else {
        for (Index ix = 0; ix < n; ++ix)
            for (Index iy = 0; iy < n; ++iy)
                out[ext.flatten(ix + off, iy + off)] = base[grid_.flatten(ix, iy)];
        for (Index ix = 0; ix < ext.points_per_axis; ++ix) {
            for (Index iy = 0; iy < ext.points_per_axis; ++iy) {
                bool inside = ix >= off && ix < off + n && iy >= off && iy < off + n;
                if (inside) continue;
                Real px = ext.axis_coord(ix), py = ext.axis_coord(iy);
                Real acc = 0.0;
                for (Index jx = 0; jx < n; ++jx)
                    for (Index jy = 0; jy < n; ++jy)
                        acc += cell_integral_from_point(px, py, jx, jy) *
                               v[grid_.flatten(jx, jy)];
                out[ext.flatten(ix, iy)] = -constant_ * acc;
            }
        }
    }
    return out;
}

ArrayXr FracOperator::apply_full(const ArrayXr& v,
                                 const std::function<Real(Real)>& exterior) const {
    if (grid_.dim != 1)
        throw std::invalid_argument("apply_full: d=1 only");
    ArrayXr out = apply(v);
    const Real L = grid_.half_width;
    const Index N = grid_.node_count();
    // Segments grow geometrically in distance from the node, so the first
    // ones resolve the kernel's near-singularity at nodes close to the edge.
    const Real far_cut = 600.0 * L;
    for (Index i = 0; i < N; ++i) {
        Real x = grid_.axis_coord(i);
        Real corr = 0.0;
        for (int side = 0; side < 2; ++side) {
            Real sgn = side == 0 ? 1.0 : -1.0;
            Real xs = sgn * x;  // node position seen from this side
            auto f = [&](Real y) {
                return exterior(sgn * y) * std::pow(y - xs, -1.0 - 2.0 * s_);
            };
            Real a = L;
            while (a < far_cut) {
                Real b = xs + 2.0 * (a - xs);
                corr += gauss_legendre(f, a, b, 16);
                a = b;
            }
            // beyond the cut the integrand is below solver tolerances
        }
        out[i] -= constant_ * corr;
    }
    return out;
}

ArrayXr FracOperator::tail_rate_beyond(const GridSpec& ext) const {
    const Index N = grid_.node_count();
    ArrayXr out(N);
    for (Index i = 0; i < N; ++i) {
        auto p = grid_.coord(i);
        if (grid_.dim == 1) {
            out[i] = constant_ * (kernel_mass_1d(ext.half_width - p[0], INFINITY, s_) +
                                  kernel_mass_1d(ext.half_width + p[0], INFINITY, s_));
        } else {
            out[i] = constant_ * exterior_mass_2d(p[0], p[1], ext.half_width, s_);
        }
    }
    return out;
}

Real FracOperator::dirichlet_form(const ArrayXr& u, const ArrayXr& v) const {
    return (apply(u) * v).sum() * grid_.cell_volume();
}

RieszKernel::RieszKernel(int d_, Real s_) : s(s_), d(d_) {
    if (!transient_regime(d_, s_))
        throw std::invalid_argument(
            "RieszKernel: recurrent regime (d=1 requires s < 1/2)");
    constant = riesz_constant(d_, s_);
}

Real RieszKernel::operator()(Real r) const {
    return constant * std::pow(r, 2.0 * s - d);
}

Real RieszKernel::cell_average(Real h) const {
    if (d == 1) return constant * std::pow(0.5 * h, 2.0 * s) / (s * h);
    // (1/h^2) * 8 int_0^{pi/4} int_0^{(h/2)/cos t} r^{2s-1} dr dt
    Real ang = gauss_legendre(
        [this](Real t) { return std::pow(std::cos(t), -2.0 * s); }, 0.0, 0.25 * kPi, 32);
    return constant * 8.0 * std::pow(0.5 * h, 2.0 * s) * ang / (2.0 * s * h * h);
}

ArrayXr riesz_potential(const GridSpec& src, const ArrayXr& m, const RieszKernel& kernel,
                        const GridSpec& eval) {
    if (m.size() != src.node_count())
        throw std::invalid_argument("riesz_potential: size mismatch");
    if (src.dim != kernel.d || eval.dim != src.dim)
        throw std::invalid_argument("riesz_potential: dimension mismatch");
    const Real h = src.spacing();
    const Real vol = src.cell_volume();
    const Real self = kernel.cell_average(h);
    ArrayXr out = ArrayXr::Zero(eval.node_count());
    for (Index i = 0; i < eval.node_count(); ++i) {
        auto p = eval.coord(i);
        Real acc = 0.0;
        for (Index j = 0; j < src.node_count(); ++j) {
            if (m[j] == 0.0) continue;
            auto q = src.coord(j);
            Real r = src.dim == 1 ? std::abs(p[0] - q[0])
                                  : std::hypot(p[0] - q[0], p[1] - q[1]);
            acc += (r < 0.25 * h ? self : kernel(r)) * m[j];
        }
        out[i] = acc * vol;
    }
    return out;
}

SpaceField riesz_potential(const DensityField& m, const RieszKernel& kernel,
                           std::optional<GridSpec> eval_grid) {
    const GridSpec& eval = eval_grid ? *eval_grid : m.field.grid;
    return SpaceField(eval, riesz_potential(m.field.grid, m.field.values, kernel, eval));
}

ArrayXr implicit_heat_step(const FracOperator& op, const ArrayXr& v, Real dt,
                           const ArrayXr& source) {
    if (!(dt > 0)) throw std::invalid_argument("implicit_heat_step: dt must be > 0");
    if (v.size() != op.grid().node_count() || source.size() != v.size())
        throw std::invalid_argument("implicit_heat_step: grid mismatch");
    const Index N = v.size();
    ArrayXr b = v + dt * source;
    Real scale = std::max<Real>(1.0, b.abs().maxCoeff());
    Real tol = 1e-10 * scale;
    ArrayXr u = ArrayXr::Zero(N);
    const int max_sweeps = 500;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        for (Index i = 0; i < N; ++i)
            u[i] = (b[i] + dt * op.neighbor_sum(u, i)) / (1.0 + dt * op.diag(i));
        Real res = 0.0;
        for (Index i = 0; i < N; ++i) {
            Real r = b[i] - (1.0 + dt * op.diag(i)) * u[i] + dt * op.neighbor_sum(u, i);
            res = std::max(res, std::abs(r));
        }
        if (res <= tol) return u;
    }
    throw std::runtime_error("implicit_heat_step: Gauss-Seidel did not converge");
}

EigenvalueEstimate principal_eigenvalue(const FracOperator& op, const Mask& mask) {
    const GridSpec& g = op.grid();
    if (mask.size() != g.node_count())
        throw std::invalid_argument("principal_eigenvalue: mask size mismatch");
    std::vector<Index> nodes;
    for (Index i = 0; i < mask.size(); ++i)
        if (mask[i]) nodes.push_back(i);
    const Index m = static_cast<Index>(nodes.size());
    if (m == 0) throw std::invalid_argument("principal_eigenvalue: empty mask");

    MatrixXr A(m, m);
    for (Index a = 0; a < m; ++a) {
        for (Index b = 0; b < m; ++b)
            A(a, b) = a == b ? op.diag(nodes[a]) : -op.weight(nodes[a], nodes[b]);
    }
    A = 0.5 * (A + A.transpose()).eval();

    Eigen::LDLT<MatrixXr> ldlt(A);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("principal_eigenvalue: factorization failed");

    VectorXr v = VectorXr::Ones(m);
    v.normalize();
    EigenvalueEstimate est;
    const int max_iter = 500;
    for (int it = 1; it <= max_iter; ++it) {
        VectorXr z = ldlt.solve(v);
        z.normalize();
        VectorXr Az = A * z;
        Real lambda = z.dot(Az);
        Real res = (Az - lambda * z).norm();
        v = z;
        est.lambda = lambda;
        est.residual = res;
        est.iterations = it;
        if (res <= 1e-8 * std::max<Real>(1.0, std::abs(lambda))) break;
    }
    if (est.residual > 1e-8 * std::max<Real>(1.0, std::abs(est.lambda)))
        throw std::runtime_error("principal_eigenvalue: inverse iteration did not converge");

    Real rmax = 0.0;
    for (Index i : nodes) {
        auto p = g.coord(i);
        Real r = g.dim == 1 ? std::abs(p[0]) : std::hypot(p[0], p[1]);
        rmax = std::max(rmax, r);
    }
    est.radius = rmax + 0.5 * g.spacing();
    return est;
}

}  // namespace fracstefan
