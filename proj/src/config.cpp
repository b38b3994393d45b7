#include "fracstefan/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fracstefan/csv.hpp"

namespace fracstefan {

using ordered_json = nlohmann::ordered_json;
using json = nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& why) {
    throw std::invalid_argument("config." + path + ": " + why);
}

Real get_num(const json& j, const std::string& path, const std::string& key, Real dflt) {
    if (!j.contains(key)) return dflt;
    if (!j[key].is_number()) bad(path + "." + key, "expected a number");
    return j[key].get<Real>();
}

PieceSpec parse_piece(const json& j, const std::string& path, int dim) {
    PieceSpec p;
    if (!j.contains("lo") || !j.contains("hi")) bad(path, "piece needs lo and hi");
    auto read_pt = [&](const json& v, Real out[2], const char* key) {
        if (v.is_number()) {
            out[0] = v.get<Real>();
            out[1] = out[0];
        } else if (v.is_array() && v.size() == static_cast<size_t>(dim)) {
            for (int a = 0; a < dim; ++a) out[a] = v[static_cast<size_t>(a)].get<Real>();
        } else {
            bad(path + "." + key, "expected a number (d=1) or an array of d numbers");
        }
    };
    read_pt(j["lo"], p.lo, "lo");
    read_pt(j["hi"], p.hi, "hi");
    p.value = get_num(j, path, "value", 1.0);
    for (int a = 0; a < dim; ++a)
        if (!(p.lo[a] < p.hi[a])) bad(path, "needs lo < hi per axis");
    return p;
}

bool inside_piece(const PieceSpec& p, int dim, Real x, Real y) {
    if (x < p.lo[0] || x >= p.hi[0]) return false;
    if (dim == 2 && (y < p.lo[1] || y >= p.hi[1])) return false;
    return true;
}

ArrayXr sample_pieces(const GridSpec& g, const std::vector<PieceSpec>& pieces,
                      Real background) {
    ArrayXr v = ArrayXr::Constant(g.node_count(), background);
    for (Index i = 0; i < g.node_count(); ++i) {
        auto xy = g.coord(i);
        for (const PieceSpec& p : pieces)
            if (inside_piece(p, g.dim, xy[0], xy[1])) v[i] = p.value;
    }
    return v;
}

std::vector<Index> default_slice_indices(Index M) {
    std::set<Index> ks = {0, M / 8, M / 4, M / 2, (3 * M) / 4, M};
    return {ks.begin(), ks.end()};
}

std::vector<Index> slice_indices(const RunConfig& cfg, const SpaceTimeField& f) {
    if (cfg.slice_times.empty()) return default_slice_indices(f.steps() - 1);
    std::set<Index> ks;
    for (Real t : cfg.slice_times) {
        Index k = static_cast<Index>(std::lround(t / f.dt));
        if (k >= 0 && k < f.steps()) ks.insert(k);
    }
    return {ks.begin(), ks.end()};
}

Real check_tol(const RunConfig& cfg, const std::string& name, Real dflt) {
    auto it = cfg.tolerances.find(name);
    return it == cfg.tolerances.end() ? dflt : it->second;
}

ordered_json report_json(const CheckReport& r) {
    ordered_json j;
    j["name"] = r.name;
    j["metric"] = std::isfinite(r.metric) ? ordered_json(r.metric) : ordered_json("inf");
    j["tolerance"] = r.tolerance;
    j["pass"] = r.pass;
    j["skipped"] = r.skipped;
    j["provenance"] = r.provenance;
    j["inputs_digest"] = r.inputs_digest;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

ordered_json config_json(const RunConfig& cfg) {
    ordered_json j;
    j["mode"] = cfg.mode;
    j["grid"] = {{"d", cfg.grid.dim},
                 {"L", cfg.grid.half_width},
                 {"n", cfg.grid.points_per_axis},
                 {"c_ext", cfg.grid.ext_factor}};
    j["s"] = cfg.s;
    j["dt"] = cfg.dt;
    j["T"] = cfg.horizon;
    j["mc"] = {{"N", cfg.mc.N},       {"dt", cfg.mc.dt},   {"seed", cfg.mc.seed},
               {"workers", cfg.mc.workers}, {"type", cfg.mc.type}, {"trace", cfg.mc.trace}};
    j["extinction_threshold"] = cfg.extinction_threshold;
    char dig[24];
    std::snprintf(dig, sizeof dig, "%016llx", static_cast<unsigned long long>(cfg.digest()));
    j["digest"] = dig;
    return j;
}

void write_solution_artifacts(const RunConfig& cfg, const StefanSolution& sol) {
    namespace fs = std::filesystem;
    const fs::path dir = cfg.out_dir;
    fs::create_directories(dir);
    auto ks = slice_indices(cfg, sol.eta);
    write_spacetime_csv(dir, "eta", sol.eta, ks);
    write_spacetime_csv(dir, "w", sol.w, ks);
    write_spacetime_csv(dir, "rho_cum", sol.rho_cum, ks);
    write_spacetime_csv(dir, "kappa", sol.kappa, ks);
    write_spacetime_csv(dir, "enthalpy", sol.enthalpy, ks);
    write_field_csv(dir / "nu.csv", sol.nu);
    write_field_csv(dir / "nu_base.csv", sol.nu_base);
    if (sol.type == StefanType::freezing) write_field_csv(dir / "u.csv", sol.u);
    if (sol.type == StefanType::melting)
        write_field_csv(dir / "instant_layer.csv", sol.instant_layer);
    write_barrier_csv(dir / "barrier.csv", sol.barrier.grid, sol.barrier.stop_time);
}

ordered_json solution_manifest(const RunConfig& cfg, const StefanSolution& sol,
                               const FracOperator& op) {
    ordered_json m;
    m["config"] = config_json(cfg);
    Index M = sol.rho_cum.steps() - 1;
    m["masses"] = {
        {"mu", sol.data.mu.mass()},
        {"nu", integrate(sol.ext_grid, sol.nu.values)},
        {"nu_tail", sol.nu_tail_mass},
        {"eta_final", sol.eta_mass.back()},
        {"rho_final", integrate(sol.ext_grid, sol.rho_cum[M])},
        {"tail_final", sol.tail_mass.back()},
    };
    m["residuals"] = {
        {"max_complementarity", sol.report.max_complementarity},
        {"rho_consistency", rho_consistency(sol)},
        {"weak_residual", enthalpy_residual(sol, op)},
        {"eta_clamp", sol.eta_clamp_defect},
        {"kappa_clamp", sol.kappa_clamp_defect},
    };
    m["extinction_time"] = std::isfinite(sol.extinction_time)
                               ? ordered_json(sol.extinction_time)
                               : ordered_json(nullptr);
    m["checks"] = ordered_json::array();
    return m;
}

void write_manifest(const RunConfig& cfg, const ordered_json& m) {
    std::ofstream out(cfg.out_dir / "manifest.json");
    out << m.dump(2) << "\n";
}

void write_trace_csv(const RunConfig& cfg, const ParticleEnsemble& ens) {
    std::FILE* f = std::fopen((cfg.out_dir / "trace.csv").c_str(), "w");
    if (!f) return;
    std::fprintf(f, ens.d == 1 ? "t,x,status\n" : "t,x,y,status\n");
    Index step = std::max<Index>(1, ens.size() / 10000);
    for (Index p = 0; p < ens.size(); p += step) {
        size_t q = static_cast<size_t>(p);
        Real t = ens.status[q] == ParticleStatus::active ? INFINITY : ens.stop_time[q];
        const char* st = ens.status[q] == ParticleStatus::active
                             ? "active"
                             : (ens.status[q] == ParticleStatus::stopped ? "stopped" : "tail");
        if (ens.d == 1)
            std::fprintf(f, "%.17g,%.17g,%s\n", t, ens.x[q], st);
        else
            std::fprintf(f, "%.17g,%.17g,%.17g,%s\n", t, ens.x[q], ens.y[q], st);
    }
    std::fclose(f);
}

int run_solve_mode(const RunConfig& cfg, StefanType type) {
    ProblemData data = make_problem_data(cfg);
    FracOperator op = FracOperator::build(cfg.grid, cfg.s);
    StefanSolution sol =
        type == StefanType::melting ? solve_melting(op, data) : solve_freezing(op, data);
    write_solution_artifacts(cfg, sol);
    ordered_json m = solution_manifest(cfg, sol, op);
    write_manifest(cfg, m);
    return 0;
}

int run_mc_mode(const RunConfig& cfg) {
    ProblemData data = make_problem_data(cfg);
    FracOperator op = FracOperator::build(cfg.grid, cfg.s);
    StefanType type = cfg.mc.type == "freeze" ? StefanType::freezing : StefanType::melting;
    StefanSolution sol =
        type == StefanType::melting ? solve_melting(op, data) : solve_freezing(op, data);

    Real mc_dt = cfg.mc.dt > 0 ? cfg.mc.dt : cfg.dt / 4.0;
    int record_every = std::max(1, static_cast<int>(std::lround(cfg.dt / mc_dt)));
    ParticleEnsemble ens = init_ensemble(data.mu, cfg.mc.N, cfg.s, cfg.mc.seed);
    Real T_sim = sol.eta.time(sol.eta.steps() - 1);
    McSimResult sim = simulate_to_barrier(ens, sol.barrier, type, cfg.grid, data.f, data.mu,
                                          mc_dt, T_sim, record_every, cfg.mc.workers);
    EulerianEstimate est = estimate_eulerian(ens, sim);
    CheckReport cv = cross_validate_mc(sol, est, cfg.mc.N,
                                       check_tol(cfg, "cross_validate_mc", 0.05));

    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    auto ks = slice_indices(cfg, est.eta_hat);
    write_spacetime_csv(cfg.out_dir, "eta_hat", est.eta_hat, ks);
    write_spacetime_csv(cfg.out_dir, "rho_cum_hat", est.rho_cum_hat, ks);
    if (cfg.mc.trace) write_trace_csv(cfg, ens);

    ordered_json m = solution_manifest(cfg, sol, op);
    m["masses"]["mc_tail_final"] = est.tail_mass.back();
    m["checks"].push_back(report_json(cv));
    write_manifest(cfg, m);
    return cv.pass ? 0 : 1;
}

int run_exit_law_mode(const RunConfig& cfg) {
    ExitLaw law = exit_ball_law(cfg.s, cfg.grid.dim, cfg.exit_x0, cfg.exit_r, cfg.mc.N,
                                cfg.mc.dt > 0 ? cfg.mc.dt : 1e-4, cfg.mc.seed,
                                cfg.mc.workers);
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    std::FILE* f = std::fopen((cfg.out_dir / "exit_samples.csv").c_str(), "w");
    if (f) {
        std::fprintf(f, "sample\n");
        Index step = std::max<Index>(1, static_cast<Index>(law.samples.size()) / 10000);
        for (size_t i = 0; i < law.samples.size(); i += static_cast<size_t>(step))
            std::fprintf(f, "%.17g\n", law.samples[i]);
        std::fclose(f);
    }
    Real tol = check_tol(cfg, "exit_law_ks", 0.015);
    ordered_json m;
    m["config"] = config_json(cfg);
    m["exit_law"] = {{"x0", cfg.exit_x0}, {"r", cfg.exit_r}, {"ks", law.ks}, {"tolerance", tol}};
    m["checks"] = ordered_json::array();
    CheckReport r;
    r.name = "exit_law_ks";
    r.metric = law.ks;
    r.tolerance = tol;
    r.pass = law.ks <= tol;
    r.provenance = "ball-exit law of the stable process has the explicit density";
    r.inputs_digest = "";
    m["checks"].push_back(report_json(r));
    write_manifest(cfg, m);
    return r.pass ? 0 : 1;
}

int run_tail_mode(const RunConfig& cfg) {
    SurvivalFit fit = survival_tail(cfg.s, cfg.grid.dim, cfg.tail_r, cfg.mc.N,
                                    cfg.mc.dt > 0 ? cfg.mc.dt : 1e-3, cfg.tail_horizon,
                                    cfg.mc.seed, cfg.mc.workers);
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    ordered_json m;
    m["config"] = config_json(cfg);
    m["tail"] = {{"rate", fit.rate},
                 {"window_start", fit.window_start},
                 {"samples_at_end", fit.samples_at_end}};
    m["checks"] = ordered_json::array();
    write_manifest(cfg, m);
    return 0;
}

int run_validate_mode(const RunConfig& cfg) {
    ProblemData data = make_problem_data(cfg);
    FracOperator op = FracOperator::build(cfg.grid, cfg.s);
    std::vector<CheckReport> reports;

    // Melting pipeline checks.
    StefanSolution melt = solve_melting(op, data);
    reports.push_back(check_mass_conservation(melt, check_tol(cfg, "mass_conservation", 0.01)));
    reports.back().name = "mass_conservation_melting";
    reports.push_back(check_saturation(melt, check_tol(cfg, "saturation", 1e-3)));
    reports.back().name = "saturation_melting";

    // Freezing pipeline checks.
    StefanSolution frz = solve_freezing(op, data);
    reports.push_back(check_mass_conservation(frz, check_tol(cfg, "mass_conservation", 0.01)));
    reports.back().name = "mass_conservation_freezing";
    reports.push_back(check_saturation(frz, check_tol(cfg, "saturation", 1e-3)));
    reports.back().name = "saturation_freezing";
    reports.push_back(check_extinction(frz));

    // Contraction / monotonicity / BV against modified sources.
    {
        ProblemData half = data;
        ArrayXr mu2 = data.mu.field.values;
        for (Index i = 0; i < cfg.grid.node_count(); ++i) {
            auto xy = cfg.grid.coord(i);
            Real r = cfg.grid.dim == 1 ? std::abs(xy[0]) : std::max(std::abs(xy[0]), std::abs(xy[1]));
            if (r > 0.5) mu2[i] = 0.0;
        }
        half.mu = DensityField(SpaceField(cfg.grid, mu2));
        StefanSolution frz_half = solve_freezing(op, half);
        reports.push_back(
            check_l1_contraction(frz, frz_half, check_tol(cfg, "l1_contraction", 0.01)));
        CheckReport swapped =
            check_l1_contraction(frz_half, frz, check_tol(cfg, "l1_contraction", 0.01));
        swapped.name = "l1_contraction_swapped";
        reports.push_back(swapped);

        ProblemData larger = data;
        larger.mu = DensityField(SpaceField(cfg.grid, (1.5 * data.mu.field.values).eval()));
        StefanSolution frz_15 = solve_freezing(op, larger);
        reports.push_back(check_monotonicity(frz, frz_15, check_tol(cfg, "monotonicity", 1e-3)));
    }
    if (cfg.grid.dim == 1)
        reports.push_back(check_bv_bound(frz, check_tol(cfg, "bv_bound", 0.05)));

    // Universality needs the melt run to outlive its transient.
    {
        ProblemData longer = data;
        longer.horizon = std::max(data.horizon, 6.0);
        reports.push_back(
            check_universality(op, longer, check_tol(cfg, "universality", 0.03)));
    }

    // Insulated-region construction.
    if (cfg.grid.dim == 1) {
        ProblemData ins = data;
        Mask G(cfg.grid.node_count());
        ArrayXr fv(cfg.grid.node_count());
        for (Index i = 0; i < cfg.grid.node_count(); ++i) {
            G[i] = std::abs(cfg.grid.axis_coord(i)) < 0.25;
            fv[i] = G[i] ? 0.0 : 1.0;
        }
        ins.insulated_G = G;
        ins.f = SpaceField(cfg.grid, fv);
        StefanSolution frz_ins = solve_freezing(op, ins);
        reports.push_back(check_insulated_recovery(frz_ins));
        CheckReport sat = check_saturation(frz_ins, check_tol(cfg, "saturation", 1e-3));
        sat.name = "saturation_insulated";
        reports.push_back(sat);
    }

    // PDE <-> MC cross-validation at the configured particle count.
    {
        Real mc_dt = cfg.mc.dt > 0 ? cfg.mc.dt : cfg.dt / 4.0;
        int record_every = std::max(1, static_cast<int>(std::lround(cfg.dt / mc_dt)));
        ParticleEnsemble ens = init_ensemble(data.mu, cfg.mc.N, cfg.s, cfg.mc.seed);
        McSimResult sim =
            simulate_to_barrier(ens, melt.barrier, StefanType::melting, cfg.grid, data.f,
                                data.mu, mc_dt, data.horizon, record_every, cfg.mc.workers);
        EulerianEstimate est = estimate_eulerian(ens, sim);
        reports.push_back(cross_validate_mc(melt, est, cfg.mc.N,
                                            check_tol(cfg, "cross_validate_mc", 0.05)));
    }

    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    ordered_json m;
    m["config"] = config_json(cfg);
    m["checks"] = ordered_json::array();
    bool all_pass = true;
    for (const CheckReport& r : reports) {
        m["checks"].push_back(report_json(r));
        if (!r.pass && !r.skipped) all_pass = false;
    }
    write_manifest(cfg, m);
    return all_pass ? 0 : 1;
}

}  // namespace

uint64_t RunConfig::digest() const {
    uint64_t h = fnv1a(mode.data(), mode.size());
    Real nums[] = {Real(grid.dim), grid.half_width, Real(grid.points_per_axis),
                   grid.ext_factor, s, dt, horizon, Real(mc.N), mc.dt, Real(mc.seed),
                   Real(mc.workers), extinction_threshold, exit_x0, exit_r, tail_r,
                   tail_horizon};
    h = fnv1a(nums, sizeof nums, h);
    for (const PieceSpec& p : mu.segments) h = fnv1a(&p, sizeof p, h);
    h = fnv1a(mu.preset.data(), mu.preset.size(), h);
    h = fnv1a(f.kind.data(), f.kind.size(), h);
    h = fnv1a(&f.constant, sizeof f.constant, h);
    for (const PieceSpec& p : f.segments) h = fnv1a(&p, sizeof p, h);
    return h;
}

RunConfig parse_config_json(const std::string& text, const std::string& mode_override) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) bad("", "top level must be an object");

    RunConfig cfg;
    if (j.contains("mode")) {
        cfg.mode = j["mode"].get<std::string>();
        static const std::set<std::string> modes = {"melt", "freeze",   "mc",
                                                    "validate", "exit-law", "tail"};
        if (!modes.count(cfg.mode))
            bad("mode", "must be one of melt|freeze|mc|validate|exit-law|tail");
    }
    if (!mode_override.empty()) cfg.mode = mode_override;
    int d = 1;
    Real L = 4.0, c_ext = 3.0;
    int n = 512;
    if (j.contains("grid")) {
        const json& gj = j["grid"];
        if (!gj.is_object()) bad("grid", "expected an object");
        d = static_cast<int>(get_num(gj, "grid", "d", 1));
        if (d != 1 && d != 2) bad("grid.d", "must be 1 or 2");
        L = get_num(gj, "grid", "L", 4.0);
        if (!(L > 0)) bad("grid.L", "must be > 0");
        n = static_cast<int>(get_num(gj, "grid", "n", 512));
        if (n < 16) bad("grid.n", "must be >= 16 (quadrature needs resolution)");
        c_ext = get_num(gj, "grid", "c_ext", 3.0);
        if (!(c_ext >= 1.0)) bad("grid.c_ext", "must be >= 1");
    }
    cfg.grid = GridSpec(d, L, n, c_ext);

    cfg.s = get_num(j, "", "s", 0.4);
    if (!(cfg.s > 0 && cfg.s < 1)) bad("s", "must be in (0,1)");
    cfg.dt = get_num(j, "", "dt", 1.0 / 256.0);
    if (!(cfg.dt > 0)) bad("dt", "must be > 0");
    cfg.horizon = get_num(j, "", "T", 2.0);
    if (!(cfg.horizon >= cfg.dt)) bad("T", "must be >= dt");
    cfg.extinction_threshold = get_num(j, "", "extinction_threshold", 1e-4);

    if (j.contains("mu")) {
        const json& mj = j["mu"];
        if (mj.contains("preset")) cfg.mu.preset = mj["preset"].get<std::string>();
        if (mj.contains("segments")) {
            size_t idx = 0;
            for (const json& pj : mj["segments"])
                cfg.mu.segments.push_back(
                    parse_piece(pj, "mu.segments[" + std::to_string(idx++) + "]", d));
        }
        if (cfg.mu.preset.empty() && cfg.mu.segments.empty())
            bad("mu", "needs a preset or segments");
    }
    if (j.contains("f")) {
        const json& fj = j["f"];
        if (fj.contains("constant")) {
            cfg.f.kind = "constant";
            cfg.f.constant = fj["constant"].get<Real>();
            if (!(cfg.f.constant >= 0)) bad("f.constant", "must be >= 0");
        } else if (fj.contains("one_minus_indicator")) {
            cfg.f.kind = "one_minus_indicator";
            cfg.f.box = parse_piece(fj["one_minus_indicator"], "f.one_minus_indicator", d);
        } else if (fj.contains("segments")) {
            cfg.f.kind = "segments";
            size_t idx = 0;
            for (const json& pj : fj["segments"])
                cfg.f.segments.push_back(
                    parse_piece(pj, "f.segments[" + std::to_string(idx++) + "]", d));
            cfg.f.background = get_num(fj, "f", "background", 1.0);
        } else {
            bad("f", "needs constant, one_minus_indicator or segments");
        }
    }
    if (j.contains("mc")) {
        const json& mj = j["mc"];
        cfg.mc.N = static_cast<Index>(get_num(mj, "mc", "N", 100000));
        if (cfg.mc.N < 1) bad("mc.N", "must be >= 1");
        cfg.mc.dt = get_num(mj, "mc", "dt", 0.0);
        cfg.mc.seed = static_cast<uint64_t>(get_num(mj, "mc", "seed", 42));
        cfg.mc.workers = static_cast<int>(get_num(mj, "mc", "workers", 1));
        if (cfg.mc.workers < 1) bad("mc.workers", "must be >= 1");
        if (mj.contains("type")) {
            cfg.mc.type = mj["type"].get<std::string>();
            if (cfg.mc.type != "melt" && cfg.mc.type != "freeze")
                bad("mc.type", "must be melt or freeze");
        }
        if (mj.contains("trace")) cfg.mc.trace = mj["trace"].get<bool>();
    }
    if (j.contains("exit_law")) {
        cfg.exit_x0 = get_num(j["exit_law"], "exit_law", "x0", 0.0);
        cfg.exit_r = get_num(j["exit_law"], "exit_law", "r", 1.0);
        if (!(std::abs(cfg.exit_x0) < cfg.exit_r)) bad("exit_law", "needs |x0| < r");
    }
    if (j.contains("tail")) {
        cfg.tail_r = get_num(j["tail"], "tail", "r", 1.0);
        cfg.tail_horizon = get_num(j["tail"], "tail", "horizon", 5.0);
    }
    if (j.contains("slices"))
        for (const json& t : j["slices"]) cfg.slice_times.push_back(t.get<Real>());
    if (j.contains("tolerances"))
        for (auto it = j["tolerances"].begin(); it != j["tolerances"].end(); ++it)
            cfg.tolerances[it.key()] = it.value().get<Real>();
    if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();

    // Rules that depend on the mode.
    bool needs_potentials = cfg.mode == "freeze" || cfg.mode == "validate" ||
                            (cfg.mode == "mc" && cfg.mc.type == "freeze");
    if (needs_potentials && !transient_regime(cfg.grid.dim, cfg.s))
        bad("s", "transience violated: potentials require s in (0,1/2) for d=1");

    // Data-level admissibility (mushy region etc.) surfaces early.
    if (cfg.mode == "melt" || cfg.mode == "freeze" || cfg.mode == "mc" ||
        cfg.mode == "validate") {
        ProblemData data = make_problem_data(cfg);
        if (cfg.mode == "melt" || cfg.mode == "validate" ||
            (cfg.mode == "mc" && cfg.mc.type == "melt"))
            data.validate(StefanType::melting);
        if (cfg.mode == "freeze" || cfg.mode == "validate" ||
            (cfg.mode == "mc" && cfg.mc.type == "freeze"))
            data.validate(StefanType::freezing);
    }
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path,
                       const std::string& mode_override) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_json(ss.str(), mode_override);
}

ProblemData make_problem_data(const RunConfig& cfg) {
    ProblemData data;
    data.grid = cfg.grid;
    data.s = cfg.s;
    data.horizon = cfg.horizon;
    data.dt = cfg.dt;
    data.extinction_threshold = cfg.extinction_threshold;

    std::vector<PieceSpec> mu_pieces = cfg.mu.segments;
    if (mu_pieces.empty()) {
        std::string preset = cfg.mu.preset.empty() ? "benchmark" : cfg.mu.preset;
        if (preset == "benchmark") {
            PieceSpec p;
            p.lo[0] = p.lo[1] = -1.0;
            p.hi[0] = p.hi[1] = 1.0;
            p.value = 2.0;
            mu_pieces.push_back(p);
        } else {
            bad("mu.preset", "unknown preset '" + preset + "'");
        }
    }
    ArrayXr mu_vals = sample_pieces(cfg.grid, mu_pieces, 0.0);
    if ((mu_vals < 0).any()) bad("mu", "must be >= 0");
    data.mu = DensityField(SpaceField(cfg.grid, mu_vals));

    if (cfg.f.kind == "constant") {
        data.f = SpaceField(cfg.grid, ArrayXr::Constant(cfg.grid.node_count(), cfg.f.constant));
        data.f_background = cfg.f.constant;
    } else if (cfg.f.kind == "one_minus_indicator") {
        ArrayXr fv(cfg.grid.node_count());
        Mask G(cfg.grid.node_count());
        for (Index i = 0; i < cfg.grid.node_count(); ++i) {
            auto xy = cfg.grid.coord(i);
            G[i] = inside_piece(cfg.f.box, cfg.grid.dim, xy[0], xy[1]);
            fv[i] = G[i] ? 0.0 : 1.0;
        }
        data.f = SpaceField(cfg.grid, fv);
        data.insulated_G = G;
        data.f_background = 1.0;
    } else {
        data.f = SpaceField(cfg.grid, sample_pieces(cfg.grid, cfg.f.segments, cfg.f.background));
        data.f_background = cfg.f.background;
    }
    return data;
}

int run(const RunConfig& cfg) {
    if (cfg.mode == "melt") return run_solve_mode(cfg, StefanType::melting);
    if (cfg.mode == "freeze") return run_solve_mode(cfg, StefanType::freezing);
    if (cfg.mode == "mc") return run_mc_mode(cfg);
    if (cfg.mode == "validate") return run_validate_mode(cfg);
    if (cfg.mode == "exit-law") return run_exit_law_mode(cfg);
    if (cfg.mode == "tail") return run_tail_mode(cfg);
    throw std::invalid_argument("config.mode: unknown mode " + cfg.mode);
}

}  // namespace fracstefan
