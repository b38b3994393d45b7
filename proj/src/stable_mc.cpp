#include "fracstefan/stable_mc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "fracstefan/quadrature.hpp"
#include "fracstefan/rng.hpp"

namespace fracstefan {

namespace {
constexpr Real kPi = 3.14159265358979323846;

void run_partitioned(Index n, int workers, const std::function<void(Index, Index)>& fn) {
    if (workers <= 1) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    Index chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        Index lo = w * chunk, hi = std::min<Index>(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(fn, lo, hi);
    }
    for (auto& t : pool) t.join();
}

}  // namespace

StableSampler::StableSampler(Real s_, int d_, uint64_t seed_) : s(s_), d(d_), seed(seed_) {
    if (!(s > 0 && s < 1)) throw std::invalid_argument("StableSampler: s in (0,1)");
    if (d != 1 && d != 2) throw std::invalid_argument("StableSampler: d in {1,2}");
    cms_scale_ = 1.0;
}

Real StableSampler::subordinator(Real u_angle, Real u_exp, Real dt) const {
    // CMS one-sided alpha-stable, alpha = s, beta = 1. In this fully skewed
    // case the construction has E exp(-lambda S) = exp(-lambda^s) exactly
    // (it coincides with Kanter's form), so only the self-similar time
    // scaling dt^{1/s} is needed for E exp(-lambda T) = exp(-dt lambda^s).
    const Real a = s;
    const Real V = kPi * (u_angle - 0.5);
    const Real W = -std::log(u_exp);
    const Real arg = a * (V + 0.5 * kPi);
    Real cms = std::sin(arg) / std::pow(std::cos(V), 1.0 / a) *
               std::pow(std::cos(V - arg) / W, (1.0 - a) / a);
    return std::pow(dt, 1.0 / s) * cms;
}

void StableSampler::increment(const std::array<Real, 4>& u, Real dt, Real& dx,
                              Real& dy) const {
    Real T = subordinator(u[0], u[1], dt);
    Real R = std::sqrt(-2.0 * std::log(u[2]));
    Real c = std::cos(2.0 * kPi * u[3]);
    Real amp = std::sqrt(2.0 * T);
    dx = amp * R * c;
    if (d == 2) {
        Real sn = std::sin(2.0 * kPi * u[3]);
        dy = amp * R * sn;
    } else {
        dy = 0.0;
    }
}

void StableSampler::increment_for(uint64_t particle, uint32_t step, Real dt, Real& dx,
                                  Real& dy) const {
    increment(Philox::uniforms(seed, particle, step, kPurposeMove), dt, dx, dy);
}

ParticleEnsemble init_ensemble(const DensityField& mu, Index N, Real s, uint64_t seed) {
    if (N <= 0) throw std::invalid_argument("init_ensemble: N must be positive");
    const GridSpec& g = mu.field.grid;
    const Real total = mu.mass();
    if (!(total > 0)) throw std::invalid_argument("init_ensemble: mu has no mass");

    ParticleEnsemble ens;
    ens.s = s;
    ens.d = g.dim;
    ens.seed = seed;
    ens.weight = total / Real(N);
    ens.x.assign(static_cast<size_t>(N), 0.0);
    ens.y.assign(static_cast<size_t>(N), 0.0);
    ens.status.assign(static_cast<size_t>(N), ParticleStatus::active);
    ens.stop_time.assign(static_cast<size_t>(N), INFINITY);

    const Real h = g.spacing();
    if (g.dim == 1) {
        std::vector<Real> cum(static_cast<size_t>(g.node_count()) + 1, 0.0);
        for (Index i = 0; i < g.node_count(); ++i)
            cum[static_cast<size_t>(i) + 1] = cum[static_cast<size_t>(i)] + mu.field.values[i];
        Real norm = cum.back();
        for (Index p = 0; p < N; ++p) {
            auto u = Philox::uniforms(seed, static_cast<uint64_t>(p), 0, kPurposeInit);
            Real target = u[0] * norm;
            auto it = std::upper_bound(cum.begin() + 1, cum.end(), target);
            Index cell = std::min<Index>(g.node_count() - 1,
                                         static_cast<Index>(it - cum.begin()) - 1);
            Real lo = cum[static_cast<size_t>(cell)], hi = cum[static_cast<size_t>(cell) + 1];
            Real frac = hi > lo ? (target - lo) / (hi - lo) : 0.5;
            ens.x[static_cast<size_t>(p)] = g.axis_coord(cell) + (frac - 0.5) * h;
        }
    } else {
        Real mmax = mu.field.values.maxCoeff();
        for (Index p = 0; p < N; ++p) {
            for (uint32_t attempt = 0;; ++attempt) {
                if (attempt > 100000)
                    throw std::runtime_error("init_ensemble: rejection sampling stalled");
                auto u = Philox::uniforms(seed, static_cast<uint64_t>(p), attempt,
                                          kPurposeReject);
                Real px = -g.half_width + u[0] * 2.0 * g.half_width;
                Real py = -g.half_width + u[1] * 2.0 * g.half_width;
                Index cell = g.locate(px, py);
                if (cell >= 0 && u[2] * mmax < mu.field.values[cell]) {
                    ens.x[static_cast<size_t>(p)] = px;
                    ens.y[static_cast<size_t>(p)] = py;
                    break;
                }
            }
        }
    }
    return ens;
}

McSimResult simulate_to_barrier(ParticleEnsemble& ens, const BarrierFunction& barrier,
                                StefanType type, const GridSpec& base_grid,
                                const SpaceField& f, const DensityField& mu, Real dt,
                                Real T, int record_every, int workers) {
    if (!(dt > 0) || !(T > 0)) throw std::invalid_argument("simulate_to_barrier: dt, T > 0");
    if (record_every < 1) record_every = 1;
    const Index n_steps = static_cast<Index>(std::lround(T / dt));
    const Index n_records = n_steps / record_every + 1;
    const GridSpec& ext = barrier.grid;
    const StableSampler sampler(ens.s, ens.d, ens.seed);
    const bool forward = type == StefanType::freezing;

    McSimResult sim;
    sim.base_grid = base_grid;
    sim.ext_grid = ext;
    sim.dt = dt;
    sim.record_every = record_every;
    sim.n_steps = n_steps;
    sim.active_counts.assign(static_cast<size_t>(n_records),
                             ArrayXr::Zero(base_grid.node_count()));

    const Index N = ens.size();
    const int W = std::max(1, workers);
    std::vector<std::vector<ArrayXr>> local(static_cast<size_t>(W));

    auto body = [&](int widx, Index lo, Index hi) {
        auto& hist = local[static_cast<size_t>(widx)];
        hist.assign(static_cast<size_t>(n_records), ArrayXr::Zero(base_grid.node_count()));
        for (Index p = lo; p < hi; ++p) {
            Real px = ens.x[static_cast<size_t>(p)], py = ens.y[static_cast<size_t>(p)];
            bool active = true;

            if (type == StefanType::melting) {
                Index cell = base_grid.locate(px, py);
                Real muv = cell >= 0 ? mu.field.values[cell] : 0.0;
                Real fv = cell >= 0 ? f.values[cell] : 0.0;
                Real prob = muv > 0 ? std::min(fv, muv) / muv : 1.0;
                auto u = Philox::uniforms(ens.seed, static_cast<uint64_t>(p), 0, kPurposeInstant);
                if (u[0] < prob) {
                    ens.status[static_cast<size_t>(p)] = ParticleStatus::stopped;
                    ens.stop_time[static_cast<size_t>(p)] = 0.0;
                    active = false;
                }
            } else {
                // Type I: stop at t=0 where the barrier already covers x.
                if (0.0 >= barrier.at(px, py)) {
                    ens.status[static_cast<size_t>(p)] = ParticleStatus::stopped;
                    ens.stop_time[static_cast<size_t>(p)] = 0.0;
                    active = false;
                }
            }
            if (active) {
                Index cell = base_grid.locate(px, py);
                if (cell >= 0) hist[0][cell] += 1.0;
            }

            for (Index step = 1; active && step <= n_steps; ++step) {
                Real t = Real(step) * dt;
                Real dx, dy;
                sampler.increment_for(static_cast<uint64_t>(p),
                                      static_cast<uint32_t>(step), dt, dx, dy);
                px += dx;
                py += dy;
                bool beyond_ext = std::abs(px) >= ext.half_width ||
                                  (ens.d == 2 && std::abs(py) >= ext.half_width);
                bool beyond_base = std::abs(px) >= base_grid.half_width ||
                                   (ens.d == 2 && std::abs(py) >= base_grid.half_width);
                if (beyond_ext) {
                    ens.status[static_cast<size_t>(p)] = ParticleStatus::tail;
                    ens.stop_time[static_cast<size_t>(p)] = t;
                    active = false;
                } else if (beyond_base) {
                    // compact active region: a particle landing outside the
                    // base box stops immediately where it lands
                    ens.status[static_cast<size_t>(p)] = ParticleStatus::stopped;
                    ens.stop_time[static_cast<size_t>(p)] = t;
                    active = false;
                } else {
                    Real sb = barrier.at(px, py);
                    bool hit = forward ? (t >= sb) : (t <= sb);
                    if (hit) {
                        ens.status[static_cast<size_t>(p)] = ParticleStatus::stopped;
                        ens.stop_time[static_cast<size_t>(p)] = t;
                        active = false;
                    }
                }
                if (active && step % record_every == 0) {
                    Index cell = base_grid.locate(px, py);
                    if (cell >= 0) hist[static_cast<size_t>(step / record_every)][cell] += 1.0;
                }
            }
            ens.x[static_cast<size_t>(p)] = px;
            ens.y[static_cast<size_t>(p)] = py;
        }
    };

    if (W == 1) {
        body(0, 0, N);
    } else {
        std::vector<std::thread> pool;
        Index chunk = (N + W - 1) / W;
        for (int w = 0; w < W; ++w) {
            Index lo = w * chunk, hi = std::min<Index>(N, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(body, w, lo, hi);
        }
        for (auto& t : pool) t.join();
    }

    for (int w = 0; w < W; ++w) {
        if (local[static_cast<size_t>(w)].empty()) continue;
        for (Index k = 0; k < n_records; ++k)
            sim.active_counts[static_cast<size_t>(k)] += local[static_cast<size_t>(w)][static_cast<size_t>(k)];
    }
    return sim;
}

EulerianEstimate estimate_eulerian(const ParticleEnsemble& ens, const McSimResult& sim) {
    const GridSpec& base = sim.base_grid;
    const GridSpec& ext = sim.ext_grid;
    const Index n_records = static_cast<Index>(sim.active_counts.size());
    const Real record_dt = sim.dt * sim.record_every;
    const Real wcell_base = ens.weight / base.cell_volume();
    const Real wcell_ext = ens.weight / ext.cell_volume();

    EulerianEstimate out;
    out.eta_hat = SpaceTimeField(base, record_dt, n_records);
    out.rho_cum_hat = SpaceTimeField(ext, record_dt, n_records);
    out.tail_mass.assign(static_cast<size_t>(n_records), 0.0);

    for (Index k = 0; k < n_records; ++k)
        out.eta_hat[k] = sim.active_counts[static_cast<size_t>(k)] * wcell_base;

    // Bucket stops by record index, then accumulate.
    std::vector<ArrayXr> inc(static_cast<size_t>(n_records), ArrayXr::Zero(ext.node_count()));
    std::vector<Real> tail_inc(static_cast<size_t>(n_records), 0.0);
    for (Index p = 0; p < ens.size(); ++p) {
        if (ens.status[static_cast<size_t>(p)] == ParticleStatus::active) continue;
        Real ts = ens.stop_time[static_cast<size_t>(p)];
        Index rec = static_cast<Index>(std::ceil(ts / record_dt - 1e-12));
        if (rec >= n_records) continue;
        if (rec < 0) rec = 0;
        if (ens.status[static_cast<size_t>(p)] == ParticleStatus::tail) {
            tail_inc[static_cast<size_t>(rec)] += ens.weight;
        } else {
            Index cell = ext.locate(ens.x[static_cast<size_t>(p)], ens.y[static_cast<size_t>(p)]);
            if (cell >= 0)
                inc[static_cast<size_t>(rec)][cell] += wcell_ext;
            else
                tail_inc[static_cast<size_t>(rec)] += ens.weight;
        }
    }
    ArrayXr acc = ArrayXr::Zero(ext.node_count());
    Real tail_acc = 0.0;
    for (Index k = 0; k < n_records; ++k) {
        acc += inc[static_cast<size_t>(k)];
        tail_acc += tail_inc[static_cast<size_t>(k)];
        out.rho_cum_hat[k] = acc;
        out.tail_mass[static_cast<size_t>(k)] = tail_acc;
    }
    return out;
}

namespace {

// Unnormalized exit-position density from x0 in B_r: for d=1 the signed
// position y with |y| > r, for d=2 the radius rho > r (angularly integrated).
Real exit_density(Real s, int d, Real x0, Real r, Real y) {
    if (d == 1) {
        if (std::abs(y) <= r) return 0.0;
        return std::pow((r * r - x0 * x0) / (y * y - r * r), s) / std::abs(y - x0);
    }
    if (y <= r) return 0.0;
    // x0 = 0 radial law; the angular integral is rotation invariant.
    return std::pow((r * r) / (y * y - r * r), s) / y;
}

// Integral of the density over (a, b) (one side), via the substitution
// v = (y - r)^{1-s} that removes the boundary singularity.
Real exit_mass(Real s, int d, Real x0, Real r, Real a, Real b) {
    if (b <= a) return 0.0;
    Real va = std::pow(a - r, 1.0 - s), vb = std::pow(b - r, 1.0 - s);
    auto f = [&](Real v) {
        Real y = r + std::pow(v, 1.0 / (1.0 - s));
        Real jac = std::pow(v, s / (1.0 - s)) / (1.0 - s);
        return exit_density(s, d, x0, r, y) * jac;
    };
    return adaptive_simpson(f, va, vb, 1e-11);
}

struct ExitCdfTable {
    std::vector<Real> y;    // |position| grid, ascending
    std::vector<Real> cup;  // mass of (r, y] on the positive side
    std::vector<Real> cdn;  // mass of [-y, -r) on the negative side (d=1)
    Real total;

    Real upper_mass_pos(Real yy) const { return interp(cup, yy); }
    Real upper_mass_neg(Real yy) const { return interp(cdn, yy); }

    Real interp(const std::vector<Real>& c, Real yy) const {
        if (yy <= y.front()) return 0.0;
        if (yy >= y.back()) return c.back();
        auto it = std::upper_bound(y.begin(), y.end(), yy);
        size_t j = static_cast<size_t>(it - y.begin());
        Real t = (yy - y[j - 1]) / (y[j] - y[j - 1]);
        return c[j - 1] + t * (c[j] - c[j - 1]);
    }
};

ExitCdfTable build_exit_table(Real s, int d, Real x0, Real r) {
    ExitCdfTable tab;
    const int n = 4000;
    const Real ymax = 1e7 * r;
    tab.y.resize(n + 1);
    tab.cup.assign(n + 1, 0.0);
    tab.cdn.assign(n + 1, 0.0);
    // log-spaced offsets from the boundary
    const Real o0 = 1e-9 * r, o1 = ymax - r;
    for (int i = 0; i <= n; ++i)
        tab.y[static_cast<size_t>(i)] =
            r + o0 * std::pow(o1 / o0, Real(i) / Real(n));
    tab.y[0] = r;
    for (int i = 1; i <= n; ++i) {
        size_t j = static_cast<size_t>(i);
        tab.cup[j] = tab.cup[j - 1] + exit_mass(s, d, x0, r, tab.y[j - 1], tab.y[j]);
        if (d == 1)
            tab.cdn[j] = tab.cdn[j - 1] +
                         exit_mass(s, d, -x0, r, tab.y[j - 1], tab.y[j]);
    }
    tab.total = tab.cup.back() + (d == 1 ? tab.cdn.back() : 0.0);
    return tab;
}

Real exit_cdf_from_table(const ExitCdfTable& tab, int d, Real y) {
    if (d == 2) return tab.upper_mass_pos(y) / tab.total;
    // signed position: F(y) = P(X <= y)
    if (y < 0) {
        // mass of (-inf, y] = mass of [-|y|...) upper tail on the negative side
        return (tab.cdn.back() - tab.upper_mass_neg(-y)) / tab.total;
    }
    return (tab.cdn.back() + tab.upper_mass_pos(y)) / tab.total;
}

}  // namespace

Real exit_law_reference_cdf(Real s, int d, Real x0, Real r, Real y) {
    ExitCdfTable tab = build_exit_table(s, d, x0, r);
    return exit_cdf_from_table(tab, d, y);
}

ExitLaw exit_ball_law(Real s, int d, Real x0, Real r, Index N, Real dt, uint64_t seed,
                      int workers) {
    if (std::abs(x0) >= r) throw std::invalid_argument("exit_ball_law: need |x0| < r");
    StableSampler sampler(s, d, seed);
    ExitLaw law;
    law.r = r;
    law.x0 = x0;
    law.samples.assign(static_cast<size_t>(N), 0.0);

    run_partitioned(N, std::max(1, workers), [&](Index lo, Index hi) {
        for (Index p = lo; p < hi; ++p) {
            Real px = x0, py = 0.0;
            for (uint32_t step = 1;; ++step) {
                Real dx, dy;
                sampler.increment_for(static_cast<uint64_t>(p), step, dt, dx, dy);
                px += dx;
                py += dy;
                Real rad = d == 1 ? std::abs(px) : std::hypot(px, py);
                if (rad >= r) {
                    law.samples[static_cast<size_t>(p)] = d == 1 ? px : rad;
                    break;
                }
            }
        }
    });

    std::vector<Real> sorted = law.samples;
    std::sort(sorted.begin(), sorted.end());
    ExitCdfTable tab = build_exit_table(s, d, x0, r);
    Real ks = 0.0;
    const Real n = Real(N);
    for (Index i = 0; i < N; ++i) {
        Real F = exit_cdf_from_table(tab, d, sorted[static_cast<size_t>(i)]);
        ks = std::max(ks, std::abs(F - Real(i) / n));
        ks = std::max(ks, std::abs(Real(i + 1) / n - F));
    }
    law.ks = ks;
    return law;
}

SurvivalFit survival_tail(Real s, int d, Real r, Index N, Real dt, Real horizon,
                          uint64_t seed, int workers) {
    StableSampler sampler(s, d, seed);
    const Index n_steps = static_cast<Index>(std::lround(horizon / dt));
    std::vector<Index> exit_step(static_cast<size_t>(N), n_steps + 1);

    run_partitioned(N, std::max(1, workers), [&](Index lo, Index hi) {
        for (Index p = lo; p < hi; ++p) {
            Real px = 0.0, py = 0.0;
            for (Index step = 1; step <= n_steps; ++step) {
                Real dx, dy;
                sampler.increment_for(static_cast<uint64_t>(p),
                                      static_cast<uint32_t>(step), dt, dx, dy);
                px += dx;
                py += dy;
                Real rad = d == 1 ? std::abs(px) : std::hypot(px, py);
                if (rad >= r) {
                    exit_step[static_cast<size_t>(p)] = step;
                    break;
                }
            }
        }
    });

    // survivor counts on a coarse grid of times (every ~1/200 of the horizon)
    Index stride = std::max<Index>(1, n_steps / 200);
    std::vector<Index> times;
    std::vector<Real> surv;
    std::vector<Index> sorted(exit_step);
    std::sort(sorted.begin(), sorted.end());
    for (Index k = stride; k <= n_steps; k += stride) {
        auto it = std::upper_bound(sorted.begin(), sorted.end(), k);
        Index alive = static_cast<Index>(sorted.end() - it);
        if (alive <= 0) break;
        times.push_back(k);
        surv.push_back(Real(alive));
    }
    if (times.empty()) throw std::runtime_error("survival_tail: everything exited instantly");

    Real s_end = surv.back();
    if (s_end < 100.0)
        throw std::runtime_error("survival_tail: fewer than 100 surviving samples in the fit window");

    // fit over the trailing stretch where survival is within 10x of the end
    size_t lo = surv.size();
    while (lo > 0 && surv[lo - 1] <= 10.0 * s_end) --lo;
    if (surv.size() - lo < 5) lo = surv.size() >= 5 ? surv.size() - 5 : 0;

    Real n = 0, st = 0, sy = 0, stt = 0, sty = 0;
    for (size_t i = lo; i < surv.size(); ++i) {
        Real t = Real(times[i]) * dt, yv = std::log(surv[i]);
        n += 1; st += t; sy += yv; stt += t * t; sty += t * yv;
    }
    SurvivalFit fit;
    fit.rate = -(n * sty - st * sy) / (n * stt - st * st);
    fit.window_start = Real(times[lo]) * dt;
    fit.samples_at_end = static_cast<Index>(s_end);
    return fit;
}

}  // namespace fracstefan
