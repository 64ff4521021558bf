// pairspin: command-line driver tying the simulation modules into
// reproducible runs. Every invocation writes its outputs plus a run.json
// manifest echoing the fully resolved configuration and master seed.
//
// Units on this surface: frequencies are plain Hz (never 2*pi-multiplied),
// times are seconds, fields are tesla unless a flag says gauss.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pairspin/analysis.hpp"
#include "pairspin/config.hpp"
#include "pairspin/decaymodels.hpp"
#include "pairspin/geometry.hpp"
#include "pairspin/io.hpp"
#include "pairspin/measurement.hpp"
#include "pairspin/montecarlo.hpp"
#include "pairspin/noisefield.hpp"
#include "pairspin/parallel.hpp"
#include "pairspin/spinsys.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace pairspin;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct RunContext {
    fs::path out = ".";
    std::uint64_t seed = 12345;
    int threads = 0;
    std::vector<std::string> outputs;

    fs::path file(const std::string& name) {
        outputs.push_back(name);
        return out / name;
    }
};

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> t(std::size_t(std::max(n, 1)));
    if (n <= 1) {
        t[0] = a;
        return t;
    }
    for (int i = 0; i < n; ++i) t[std::size_t(i)] = a + (b - a) * double(i) / double(n - 1);
    return t;
}

void write_manifest(const RunContext& ctx, const std::string& command, const json& params) {
    json m;
    m["command"] = command;
    m["parameters"] = params;
    m["master_seed"] = ctx.seed;
    m["threads"] = ctx.threads;
    m["outputs"] = ctx.outputs;
    std::ofstream f(ctx.out / "run.json");
    f << m.dump(2) << "\n";
}

BathTarget parse_target(const std::string& name, int orientation) {
    if (name == "pair-ab" || name == "nn-pair") return BathTarget::nn_pair();
    if (name == "pair-c") return BathTarget::pair_c(orientation);
    if (name == "single") return BathTarget::single();
    throw std::invalid_argument("unknown target '" + name + "' (pair-ab | pair-c | single)");
}

// ---------------------------------------------------------------------------
// subcommand payloads
// ---------------------------------------------------------------------------

struct BdistArgs {
    std::string target = "pair-ab";
    int orientation = 0;
    int baths = 10000;
    LatticeConfig lattice;
};

json run_bdist(RunContext& ctx, const BdistArgs& a) {
    const auto dist = b_distribution(a.lattice, parse_target(a.target, a.orientation), a.baths,
                                     ctx.seed);
    CsvWriter csv(ctx.file("bdist.csv").string(), {"b_hz"});
    for (double v : dist.values) csv.row({v});
    json summary = {{"target", a.target},
                    {"n_baths", a.baths},
                    {"mean_hz", dist.mean},
                    {"std_hz", dist.stddev}};
    std::ofstream(ctx.file("bdist.json")) << summary.dump(2) << "\n";
    return summary;
}

struct CensusArgs {
    int baths = 10000;
    double z_min = 50.0, z_max = 500.0;
    double larmor = default_larmor_hz;
    LatticeConfig lattice;
};

json run_census(RunContext& ctx, const CensusArgs& a) {
    const auto res = pair_census(a.lattice, a.baths, a.z_min, a.z_max, ctx.seed, a.larmor);
    CsvWriter csv(ctx.file("census_counts.csv").string(), {"pairs_in_window"});
    for (int c : res.counts) csv.row({double(c)});
    json summary = {{"n_baths", a.baths}, {"z_min_hz", a.z_min},   {"z_max_hz", a.z_max},
                    {"mean", res.mean},  {"std", res.stddev},      {"frac_ge1", res.frac_ge1}};
    std::ofstream(ctx.file("census.json")) << summary.dump(2) << "\n";
    return summary;
}

struct CtableArgs {
    double radius = 8.0;
    double tol = 0.005;
};

json run_ctable(RunContext& ctx, const CtableArgs& a) {
    const auto table = coupling_table(a.radius, a.tol);
    CsvWriter csv(ctx.file("ctable.csv").string(), {"x_hz", "occurrence", "rx", "ry", "rz"});
    for (const auto& e : table)
        csv.row({e.x_hz, double(e.occurrence), double(e.representative.x),
                 double(e.representative.y), double(e.representative.z)});
    json summary = {{"rows", table.size()},
                    {"top_x_hz", table.empty() ? 0.0 : table.front().x_hz}};
    return summary;
}

struct EnvelopeArgs {
    std::string model = "full";
    double b = 13.9, x = 2080.99, z = 130.0, tau_c = 0.1, scale = 0.0;
    int ms = 0;
    double t_max = 1.0;
    int points = 200;
};

json run_envelope(RunContext& ctx, const EnvelopeArgs& a) {
    const PairParams p{a.x, a.z, a.b, a.tau_c, a.ms};
    const auto times = linspace(0.0, a.t_max, a.points);
    Envelope env;
    json summary;
    if (a.model == "full") {
        env = envelope_full(p, times);
    } else if (a.model == "quasistatic") {
        env = envelope_quasistatic_clock(p, times);
    } else if (a.model == "slow") {
        env = envelope_slow(p, times);
        summary["t2star_s"] = t2star_slow(a.b, a.x, p.rate());
    } else if (a.model == "fast") {
        env = envelope_fast(p, times);
        summary["t2star_s"] = t2star_fast(a.b, a.x, p.rate());
        summary["frequency_shift_hz"] = clock_frequency_shift_hz(a.b, a.x);
    } else if (a.model == "gaussian") {
        const double scale = a.scale > 0.0 ? a.scale
                             : a.ms == 0   ? 1.0
                                           : detuned_clock_scale(a.x, a.z);
        env = envelope_gaussian_static(a.b, scale, times);
        summary["t2star_s"] = t2star_gaussian_static(a.b, scale);
    } else if (a.model == "relaxation") {
        env = relaxation_factor(p, times);
        summary["t2star_s"] = t2star_relaxation(a.b, a.x, p.rate());
    } else {
        throw std::invalid_argument("unknown envelope model '" + a.model + "'");
    }
    summary["model"] = a.model;
    summary["regime"] = to_string(classify_regime(p));
    CsvWriter csv(ctx.file("envelope.csv").string(), {"t_s", "re", "im", "abs"});
    for (std::size_t i = 0; i < env.times.size(); ++i)
        csv.row({env.times[i], env.values[i].real(), env.values[i].imag(),
                 std::abs(env.values[i])});
    std::ofstream(ctx.file("envelope.json")) << summary.dump(2) << "\n";
    return summary;
}

struct McArgs {
    std::string kind = "ramsey";
    double b = 13.9, x = 2080.99, z = 0.0, tau_c = 0.1;
    int ms = 0;
    double t_max = 1.0;
    int points = 50;
    int n_traj = 2000;
    double dt = 0.0;
    bool relaxation = false;
    std::string init = "z";
    std::string readout = "z";
    std::string echo_axis = "z";
};

Axis parse_axis(const std::string& s) {
    if (s == "x") return Axis::X;
    if (s == "y") return Axis::Y;
    if (s == "z") return Axis::Z;
    throw std::invalid_argument("unknown axis '" + s + "'");
}

json run_mc(RunContext& ctx, const McArgs& a) {
    const PairParams p{a.x, a.z, a.b, a.tau_c, a.ms};
    McOptions opt;
    opt.n_traj = a.n_traj;
    opt.seed = ctx.seed;
    opt.dt_override = a.dt;
    opt.apply_relaxation_factor = a.relaxation;
    const auto times = linspace(0.0, a.t_max, a.points);
    json summary = {{"kind", a.kind}, {"n_traj", a.n_traj}};
    if (a.kind == "ramsey") {
        const Vec3 init = axis_vector(parse_axis(a.init));
        const auto res = ensemble_ramsey(p, times, opt, init, parse_axis(a.readout));
        CsvWriter sig(ctx.file("mc.csv").string(), {"t_s", "mean", "stderr"});
        for (std::size_t i = 0; i < res.signal.times.size(); ++i)
            sig.row({res.signal.times[i], res.signal.mean[i], res.signal.stderr_[i]});
        CsvWriter env(ctx.file("mc_envelope.csv").string(), {"t_s", "mean", "stderr"});
        for (std::size_t i = 0; i < res.envelope.times.size(); ++i)
            env.row({res.envelope.times[i], res.envelope.mean[i], res.envelope.stderr_[i]});
        summary["final_envelope"] = res.envelope.mean.back();
    } else if (a.kind == "echo") {
        auto total_times = times;
        if (!total_times.empty() && total_times.front() == 0.0) total_times.erase(total_times.begin());
        const Vec3 init = axis_vector(parse_axis(a.init));
        const auto curve = ensemble_echo(p, total_times, opt, init, parse_axis(a.echo_axis));
        CsvWriter csv(ctx.file("mc.csv").string(), {"t_s", "mean", "stderr"});
        for (std::size_t i = 0; i < curve.times.size(); ++i)
            csv.row({curve.times[i], curve.mean[i], curve.stderr_[i]});
        summary["final_mean"] = curve.mean.back();
    } else {
        throw std::invalid_argument("unknown mc kind '" + a.kind + "'");
    }
    std::ofstream(ctx.file("mc.json")) << summary.dump(2) << "\n";
    return summary;
}

struct EffxArgs {
    double bperp_max_gauss = 20.0;
    int points = 21;
    double x = 2062.37;
    double larmor = default_larmor_hz;
    std::vector<double> a_par;   // [A1, A2] in Hz
    std::vector<double> a_perp;  // [A1, A2] in Hz
};

json run_effx(RunContext& ctx, const EffxArgs& a) {
    auto spec = HamiltonianSpec::with_larmor(a.larmor);
    spec.x_hz = a.x;
    if (!a.a_par.empty()) {
        if (a.a_par.size() != 2 || a.a_perp.size() != 2)
            throw std::invalid_argument("--apar/--aperp need two values each (Hz)");
        spec.a_par_hz = {a.a_par[0], a.a_par[1]};
        spec.a_perp_hz = {a.a_perp[0], a.a_perp[1]};
    }
    std::vector<double> sweep;
    for (int i = 0; i < a.points; ++i)
        sweep.push_back(a.bperp_max_gauss * 1e-4 * double(i) / double(std::max(1, a.points - 1)));
    const auto pts = effective_x(spec, sweep);
    CsvWriter csv(ctx.file("effx.csv").string(), {"b_perp_gauss", "x_eff_hz", "flag"});
    for (const auto& pt : pts)
        csv.row({pt.b_perp_t * 1e4, pt.x_eff_hz, pt.flagged ? 1.0 : 0.0});
    json summary = {{"bare_x_hz", a.x},
                    {"max_shift_hz", std::abs(pts.back().x_eff_hz - a.x)},
                    {"points", a.points}};
    std::ofstream(ctx.file("effx.json")) << summary.dump(2) << "\n";
    return summary;
}

struct CalibArgs {
    int m_min = 1, m_max = 50;
    long trials = 3000;
    double lambda = 0.004, kappa = 0.0015;
    double f0 = 0.905, f1 = 0.986;
    int parity_reps = 20, parity_min = 15;
    int spin_reps = 30, spin_hi = 26, spin_lo = 2;
};

json run_calib(RunContext& ctx, const CalibArgs& a) {
    ReadoutModel model;
    model.f0 = a.f0;
    model.f1 = a.f1;
    model.dephasing = a.lambda;
    model.leakage = a.kappa;
    SpinCalibConfig cfg;
    cfg.m_min = a.m_min;
    cfg.m_max = a.m_max;
    cfg.trials = a.trials;
    cfg.parity_reps = a.parity_reps;
    cfg.parity_min_clicks = a.parity_min;
    cfg.spin_reps = a.spin_reps;
    cfg.spin_hi = a.spin_hi;
    cfg.spin_lo = a.spin_lo;
    const auto rows = calibrate_spin_pipeline(model, cfg, ctx.seed);
    CsvWriter csv(ctx.file("calib.csv").string(), {"m", "threshold", "fidelity", "stderr"});
    std::size_t best = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        csv.row({double(rows[i].readouts), double(rows[i].best_threshold), rows[i].fidelity,
                 rows[i].stderr_});
        if (rows[i].fidelity > rows[best].fidelity) best = i;
    }
    json summary = {{"optimal_m", rows[best].readouts},
                    {"optimal_threshold", rows[best].best_threshold},
                    {"fidelity", rows[best].fidelity},
                    {"stderr", rows[best].stderr_}};
    std::ofstream(ctx.file("calib.json")) << summary.dump(2) << "\n";
    return summary;
}

struct EntangleArgs {
    long trials = 2000;
    double lambda = 0.004, kappa = 0.0015;
    double f0 = 0.905, f1 = 0.986;
    double x = 2080.99;
    bool ideal = false;
    int sweep_points = 0;       // > 0: parity oscillation over one period
    double sweep_t_max = 0.0;   // default one full period
};

json run_entangle(RunContext& ctx, const EntangleArgs& a) {
    ReadoutModel model;
    if (a.ideal) {
        model.f0 = 1.0;
        model.f1 = 1.0;
    } else {
        model.f0 = a.f0;
        model.f1 = a.f1;
        model.dephasing = a.lambda;
        model.leakage = a.kappa;
    }
    EntangleConfig cfg;
    cfg.trials = a.trials;
    cfg.x_hz = a.x;
    const auto res = entangle_protocol(model, cfg, ctx.seed);
    json summary = {{"herald_rate", res.herald_rate}, {"xx", res.xx},        {"yy", res.yy},
                    {"zz", res.zz},                   {"F", res.fidelity},   {"accepted", res.accepted}};
    std::ofstream(ctx.file("entangle.json")) << summary.dump(2) << "\n";
    if (a.sweep_points > 0) {
        const double t_max = a.sweep_t_max > 0.0 ? a.sweep_t_max : 1.0 / a.x;
        const auto times = linspace(0.0, t_max, a.sweep_points);
        const auto zz = entangle_parity_oscillation(model, cfg, times, ctx.seed + 1);
        CsvWriter csv(ctx.file("entangle_zz.csv").string(), {"t_s", "zz"});
        for (std::size_t i = 0; i < times.size(); ++i) csv.row({times[i], zz[i]});
    }
    return summary;
}

struct FitArgs {
    std::string input;
    std::string model = "stretched-cos";
    int tones = 1;
    int peaks = 1;
    bool bootstrap = false;
};

json run_fit(RunContext& ctx, const FitArgs& a) {
    std::ifstream in(a.input);
    if (!in) throw std::invalid_argument("cannot read input file " + a.input);
    std::string line;
    std::vector<double> xs, ys;
    bool first = true;
    while (std::getline(in, line)) {
        if (first) {  // header row
            first = false;
            continue;
        }
        std::stringstream ss(line);
        std::string a1, a2;
        if (!std::getline(ss, a1, ',') || !std::getline(ss, a2, ',')) continue;
        xs.push_back(std::stod(a1));
        ys.push_back(std::stod(a2));
    }
    FitOptions opt;
    opt.bootstrap = a.bootstrap;
    FitResult fit;
    if (a.model == "stretched-cos") {
        fit = fit_stretched_cos(xs, ys, a.tones, {}, opt);
    } else if (a.model == "gaussian-peaks") {
        fit = fit_gaussian_peaks(xs, ys, a.peaks);
    } else if (a.model == "stretched-exp") {
        fit = fit_stretched_exp(xs, ys, opt);
    } else {
        throw std::invalid_argument("unknown fit model '" + a.model + "'");
    }
    json params;
    for (std::size_t i = 0; i < fit.names.size(); ++i)
        params[fit.names[i]] = {{"value", fit.values[i]}, {"sigma", fit.sigmas[i]}};
    json summary = {{"model", a.model},
                    {"parameters", params},
                    {"residual_norm", fit.residual_norm},
                    {"converged", fit.converged},
                    {"flagged", fit.flagged},
                    {"iterations", fit.iterations}};
    if (a.model == "gaussian-peaks") {
        json t2;
        for (const auto& n : fit.names)
            if (n.rfind("sigma", 0) == 0) t2["t2star_from_" + n] = t2star_from_sigma(fit[n]);
        summary["t2star_s"] = t2;
    }
    std::ofstream(ctx.file("fit.json")) << summary.dump(2) << "\n";
    return summary;
}

struct ExtnoiseArgs {
    std::string which = "both";
    double current = 1e-4;
    double wire_distance = 1e-5;
    double magnet_distance = 0.01, magnet_radius = 0.005, magnet_length = 0.005;
    double remanence = 1.5;
    double spacing = 1e-9;
};

json run_extnoise(RunContext& ctx, const ExtnoiseArgs& a) {
    json summary;
    if (a.which == "wire" || a.which == "both") {
        summary["wire"] = {
            {"field_t", wire_field(a.current, a.wire_distance)},
            {"gradient_t",
             wire_gradient(a.current, a.wire_distance, a.wire_distance + a.spacing)}};
    }
    if (a.which == "magnet" || a.which == "both") {
        summary["magnet"] = {
            {"field_t", magnet_field(a.magnet_distance, a.magnet_radius, a.magnet_length,
                                     a.remanence)},
            {"gradient_t", magnet_gradient(a.magnet_distance, a.magnet_radius, a.magnet_length,
                                           a.remanence, a.spacing)}};
    }
    std::ofstream(ctx.file("extnoise.json")) << summary.dump(2) << "\n";
    return summary;
}

// ---------------------------------------------------------------------------
// config file application
// ---------------------------------------------------------------------------

// Applies [section] key = value pairs as option defaults; explicit
// command-line flags keep precedence because defaults only fill absences.
void apply_config(CLI::App& app, const ConfigFile& cfg) {
    for (const auto& [section, entries] : cfg.sections()) {
        CLI::App* target = &app;
        if (!section.empty()) {
            target = app.get_subcommand_no_throw(section);
            if (target == nullptr)
                throw ConfigError(entries.begin()->second.line,
                                  "unknown section [" + section + "]");
        }
        for (const auto& [key, entry] : entries) {
            CLI::Option* opt = target->get_option_no_throw("--" + key);
            if (opt == nullptr)
                throw ConfigError(entry.line, "unknown key '" + key + "' in section [" +
                                                  section + "]");
            try {
                opt->default_val(entry.value);
            } catch (const CLI::Error& e) {
                throw ConfigError(entry.line, "bad value for '" + key + "': " + e.what());
            }
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pairspin: nuclear spin-pair decoherence and measurement toolkit"};
    app.require_subcommand(0, 1);

    RunContext ctx;
    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 12345;
    if (const char* env = std::getenv("PAIRSPIN_SEED")) seed = std::strtoull(env, nullptr, 10);
    int threads = 0;

    app.add_option("--config", config_path, "config file (key = value, [section] per subcommand)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "master RNG seed (default from PAIRSPIN_SEED)");
    app.add_option("--threads", threads, "worker thread cap (0 = all cores)");

    // ---- bdist ----
    BdistArgs bd;
    auto* bdist = app.add_subcommand("bdist", "noise-strength b distribution over sampled baths");
    bdist->add_option("--target", bd.target, "pair-ab | pair-c | single");
    bdist->add_option("--orientation", bd.orientation, "pair-c bond orientation, 0..2");
    bdist->add_option("--baths", bd.baths, "number of baths");
    bdist->add_option("--cells", bd.lattice.cells_per_axis, "conventional cells per axis");
    bdist->add_option("--abundance", bd.lattice.abundance, "13C occupation probability");
    bdist->add_option("--cutoff", bd.lattice.exclusion_cutoff_hz, "coupling exclusion cutoff [Hz]");

    // ---- census ----
    CensusArgs cs;
    auto* census = app.add_subcommand("census", "nearest-neighbour pair census around the NV");
    census->add_option("--baths", cs.baths, "number of baths");
    census->add_option("--zmin", cs.z_min, "lower |Z| bound [Hz]");
    census->add_option("--zmax", cs.z_max, "upper |Z| bound [Hz]");
    census->add_option("--larmor", cs.larmor, "13C Larmor frequency [Hz]");
    census->add_option("--cells", cs.lattice.cells_per_axis,
                       "cells from the NV to the volume face (half extent)");
    census->add_option("--abundance", cs.lattice.abundance, "13C occupation probability");

    // ---- ctable ----
    CtableArgs ct;
    auto* ctable = app.add_subcommand("ctable", "intra-pair coupling table with multiplicities");
    ctable->add_option("--radius", ct.radius, "enumeration radius [a0/4]");
    ctable->add_option("--tol", ct.tol, "coupling grouping tolerance [Hz]");

    // ---- envelope ----
    EnvelopeArgs en;
    auto* envelope = app.add_subcommand("envelope", "analytic coherence envelopes");
    envelope->add_option("--model", en.model,
                         "full | quasistatic | slow | fast | gaussian | relaxation");
    envelope->add_option("--b", en.b, "noise strength b [Hz]");
    envelope->add_option("--X", en.x, "intra-pair coupling X [Hz]");
    envelope->add_option("--Z", en.z, "hyperfine difference Z [Hz]");
    envelope->add_option("--tauc", en.tau_c, "bath correlation time [s]");
    envelope->add_option("--R", en.tau_c,
                         "bath fluctuation rate R = 1/tau_c [1/s] (overrides --tauc)")
        ->transform(CLI::Validator(
            [](std::string& s) -> std::string {
                try {
                    const double r = std::stod(s);
                    if (r <= 0.0) return "R must be > 0";
                    char buf[32];
                    std::snprintf(buf, sizeof buf, "%.17g", 1.0 / r);
                    s = buf;
                    return {};
                } catch (...) {
                    return "R must be a number";
                }
            },
            "R->tauc"));
    envelope->add_option("--ms", en.ms, "NV spin projection (0 or -1)");
    envelope->add_option("--scale", en.scale, "gaussian model noise scale (0 = auto)");
    envelope->add_option("--tmax", en.t_max, "last sample time [s]");
    envelope->add_option("--points", en.points, "number of samples");

    // ---- mc ----
    McArgs mc;
    auto* mcs = app.add_subcommand("mc", "stochastic trajectory ensembles (Ramsey / echo)");
    mcs->add_option("--kind", mc.kind, "ramsey | echo");
    mcs->add_option("--b", mc.b, "noise strength b [Hz]");
    mcs->add_option("--X", mc.x, "intra-pair coupling X [Hz]");
    mcs->add_option("--Z", mc.z, "hyperfine difference Z [Hz]");
    mcs->add_option("--tauc", mc.tau_c, "bath correlation time [s]");
    mcs->add_option("--ms", mc.ms, "NV spin projection (0 or -1)");
    mcs->add_option("--tmax", mc.t_max, "last sample time [s]");
    mcs->add_option("--points", mc.points, "number of sample times");
    mcs->add_option("--ntraj", mc.n_traj, "trajectories per point");
    mcs->add_option("--dt", mc.dt, "integration step override [s] (0 = auto caps)");
    mcs->add_flag("--relaxation", mc.relaxation, "apply the analytic relaxation factor");
    mcs->add_option("--init", mc.init, "initial Bloch direction: x | y | z");
    mcs->add_option("--readout", mc.readout, "readout axis: x | y | z");
    mcs->add_option("--echo-axis", mc.echo_axis, "echo pi-pulse axis: x | y | z");

    // ---- effx ----
    EffxArgs ef;
    auto* effx = app.add_subcommand("effx", "effective coupling vs transverse field");
    effx->add_option("--bmax", ef.bperp_max_gauss, "largest transverse field [gauss]");
    effx->add_option("--points", ef.points, "sweep points");
    effx->add_option("--X", ef.x, "bare coupling X [Hz]");
    effx->add_option("--larmor", ef.larmor, "13C Larmor frequency [Hz]");
    effx->add_option("--apar", ef.a_par, "parallel hyperfine of the two carbons [Hz]")
        ->expected(2);
    effx->add_option("--aperp", ef.a_perp, "perpendicular hyperfine of the two carbons [Hz]")
        ->expected(2);

    // ---- calib ----
    CalibArgs ca;
    auto* calib = app.add_subcommand("calib", "repetition/threshold calibration sweep");
    calib->add_option("--mmin", ca.m_min, "smallest readout count");
    calib->add_option("--mmax", ca.m_max, "largest readout count");
    calib->add_option("--trials", ca.trials, "heralded trials per class");
    calib->add_option("--lambda", ca.lambda, "per-repetition pair dephasing probability");
    calib->add_option("--kappa", ca.kappa, "per-repetition leakage probability");
    calib->add_option("--f0", ca.f0, "NV readout fidelity for the click outcome");
    calib->add_option("--f1", ca.f1, "NV readout fidelity for the dark outcome");
    calib->add_option("--parity-reps", ca.parity_reps, "parity initialisation repetitions");
    calib->add_option("--parity-min", ca.parity_min, "parity herald minimum clicks");
    calib->add_option("--spin-reps", ca.spin_reps, "spin initialisation repetitions");
    calib->add_option("--spin-hi", ca.spin_hi, "up-up herald minimum clicks");
    calib->add_option("--spin-lo", ca.spin_lo, "down-down herald maximum clicks");

    // ---- entangle ----
    EntangleArgs et;
    auto* entangle = app.add_subcommand("entangle", "entanglement by parity measurements");
    entangle->add_option("--trials", et.trials, "trials per observable");
    entangle->add_option("--lambda", et.lambda, "per-repetition pair dephasing probability");
    entangle->add_option("--kappa", et.kappa, "per-repetition leakage probability");
    entangle->add_option("--f0", et.f0, "NV readout fidelity for the click outcome");
    entangle->add_option("--f1", et.f1, "NV readout fidelity for the dark outcome");
    entangle->add_option("--X", et.x, "intra-pair coupling X [Hz]");
    entangle->add_flag("--ideal", et.ideal, "perfect readout, no decoherence");
    entangle->add_option("--sweep-points", et.sweep_points,
                         "parity-oscillation sweep points (0 = off)");
    entangle->add_option("--sweep-tmax", et.sweep_t_max, "sweep end time [s] (0 = one period)");

    // ---- fit ----
    FitArgs fa;
    auto* fit = app.add_subcommand("fit", "model fits on two-column CSV data");
    fit->add_option("--input", fa.input, "CSV file (header + two numeric columns)")->required();
    fit->add_option("--model", fa.model, "stretched-cos | gaussian-peaks | stretched-exp");
    fit->add_option("--tones", fa.tones, "cosine tones (stretched-cos)");
    fit->add_option("--peaks", fa.peaks, "gaussian peaks (gaussian-peaks)");
    fit->add_flag("--bootstrap", fa.bootstrap, "bootstrap uncertainties");

    // ---- extnoise ----
    ExtnoiseArgs ex;
    auto* extnoise = app.add_subcommand("extnoise", "external field-source estimates");
    extnoise->add_option("--which", ex.which, "wire | magnet | both");
    extnoise->add_option("--current", ex.current, "wire current [A]");
    extnoise->add_option("--wire-distance", ex.wire_distance, "NV-wire distance [m]");
    extnoise->add_option("--magnet-distance", ex.magnet_distance, "NV-magnet distance [m]");
    extnoise->add_option("--magnet-radius", ex.magnet_radius, "magnet radius [m]");
    extnoise->add_option("--magnet-length", ex.magnet_length, "magnet length [m]");
    extnoise->add_option("--remanence", ex.remanence, "remanence field [T]");
    extnoise->add_option("--spacing", ex.spacing, "pair spacing for gradients [m]");

    // config file first (as defaults), then command line overrides
    try {
        for (int i = 1; i < argc - 1; ++i)
            if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
        if (!config_path.empty()) apply_config(app, ConfigFile::parse_file(config_path));
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        std::cerr << app.help() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    if (app.get_subcommands().empty()) {
        std::cerr << app.help() << "\n";
        return kExitConfig;
    }

    ctx.out = out_dir;
    ctx.seed = seed;
    ctx.threads = threads;
    set_max_threads(threads);
    std::error_code ec;
    fs::create_directories(ctx.out, ec);

    try {
        json params;
        std::string command;
        if (bdist->parsed()) {
            command = "bdist";
            params = run_bdist(ctx, bd);
        } else if (census->parsed()) {
            command = "census";
            params = run_census(ctx, cs);
        } else if (ctable->parsed()) {
            command = "ctable";
            params = run_ctable(ctx, ct);
        } else if (envelope->parsed()) {
            command = "envelope";
            params = run_envelope(ctx, en);
        } else if (mcs->parsed()) {
            command = "mc";
            params = run_mc(ctx, mc);
        } else if (effx->parsed()) {
            command = "effx";
            params = run_effx(ctx, ef);
        } else if (calib->parsed()) {
            command = "calib";
            params = run_calib(ctx, ca);
        } else if (entangle->parsed()) {
            command = "entangle";
            params = run_entangle(ctx, et);
        } else if (fit->parsed()) {
            command = "fit";
            params = run_fit(ctx, fa);
        } else if (extnoise->parsed()) {
            command = "extnoise";
            params = run_extnoise(ctx, ex);
        }
        write_manifest(ctx, command, params);
        std::cout << params.dump(2) << "\n";
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
