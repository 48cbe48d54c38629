// lnakit command line: sweeps, noise reports, pole/zero reports, design
// solving, and the composite metric bundle. One command per process; every
// output file is written atomically with 9-significant-digit formatting.

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lnakit/analytic.hpp"
#include "lnakit/design.hpp"
#include "lnakit/mna.hpp"
#include "lnakit/netlist.hpp"
#include "lnakit/noise.hpp"
#include "lnakit/polezero.hpp"
#include "lnakit/report_io.hpp"

namespace {

using namespace lnakit;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitNoConverge = 3;

struct RunConfig {
    std::string topology;
    std::string netlist_path;
    std::string design_path;
    std::string band; // "LO:HI"
    int points = 401;
    bool flag_linear = false;
    bool flag_log = false;
    std::vector<std::string> sets;
    std::string out_dir = ".";
    std::string format; // empty = command default
};

// Shipped default: the bundled solver's solution on the fitted device
// model. designs/default_lna.json carries the same numbers.
LnaDesign default_design() {
    LnaDesign d;
    d.ic1 = 0.0056216;
    d.ft1 = 24.741e9;
    d.ic3 = 0.0049189;
    d.ft3 = 58.043e9;
    d.cbc1 = 5e-15;
    d.cbc3 = 2.5989e-14;
    d.rb = 5.0;
    d.beta = 150.0;
    d.r1 = 150.0;
    d.l2 = 1.9928e-9;
    d.c2 = 2.1746e-12;
    d.c3 = 2.5549e-12;
    d.r2 = 24.786;
    d.c4 = 1.1137e-13;
    d.rf = 32.895;
    d.lf = 2.06327e-9;
    d.l4 = 8.5955e-9;
    d.match_target = 50.0;
    return d;
}

struct Overrides {
    bool noise_off = false;
    bool zs_zopt = false;
    std::complex<double> zs{50.0, 0.0};
    std::map<std::string, double> design_keys;
    std::map<std::string, double> bound_keys;
    std::vector<std::pair<std::string, double>> elements;
};

const std::set<std::string> kDesignKeys = {
    "ic1", "ft1", "ic3", "ft3", "cbc1", "cbc3", "rb", "beta", "r1", "l2",
    "c2", "c3", "r2", "c4", "rf", "lf", "l4", "match_target"};

const std::set<std::string> kBoundKeys = {"r_lo",  "r_hi",  "l_lo",  "l_hi",
                                          "c_lo",  "c_hi",  "ic_lo", "ic_hi"};

Overrides parse_sets(const std::vector<std::string>& sets) {
    Overrides ov;
    for (const std::string& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0)
            throw std::invalid_argument("--set expects LABEL=VALUE, got '" + s +
                                        "'");
        const std::string key = s.substr(0, eq);
        const std::string val = s.substr(eq + 1);
        if (key == "noise") {
            if (val == "off")
                ov.noise_off = true;
            else if (val == "on")
                ov.noise_off = false;
            else
                throw std::invalid_argument("--set noise expects on or off");
            continue;
        }
        if (key == "zs" && val == "zopt") {
            ov.zs_zopt = true;
            continue;
        }
        double num;
        try {
            num = parse_value(val);
        } catch (const std::invalid_argument&) {
            throw std::invalid_argument("--set " + key + ": bad value '" + val +
                                        "'");
        }
        if (key == "zs_re")
            ov.zs.real(num);
        else if (key == "zs_im")
            ov.zs.imag(num);
        else if (kDesignKeys.count(key))
            ov.design_keys[key] = num;
        else if (kBoundKeys.count(key))
            ov.bound_keys[key] = num;
        else
            ov.elements.emplace_back(key, num);
    }
    return ov;
}

void apply_design_keys(LnaDesign& d, const Overrides& ov) {
    for (const auto& [key, v] : ov.design_keys) {
        if (key == "ic1") d.ic1 = v;
        else if (key == "ft1") d.ft1 = v;
        else if (key == "ic3") d.ic3 = v;
        else if (key == "ft3") d.ft3 = v;
        else if (key == "cbc1") d.cbc1 = v;
        else if (key == "cbc3") d.cbc3 = v;
        else if (key == "rb") d.rb = v;
        else if (key == "beta") d.beta = v;
        else if (key == "r1") d.r1 = v;
        else if (key == "l2") d.l2 = v;
        else if (key == "c2") d.c2 = v;
        else if (key == "c3") d.c3 = v;
        else if (key == "r2") d.r2 = v;
        else if (key == "c4") d.c4 = v;
        else if (key == "rf") d.rf = v;
        else if (key == "lf") d.lf = v;
        else if (key == "l4") d.l4 = v;
        else if (key == "match_target") d.match_target = v;
    }
}

DesignBounds apply_bound_keys(const Overrides& ov) {
    DesignBounds b;
    for (const auto& [key, v] : ov.bound_keys) {
        if (key == "r_lo") b.r.lo = v;
        else if (key == "r_hi") b.r.hi = v;
        else if (key == "l_lo") b.l.lo = v;
        else if (key == "l_hi") b.l.hi = v;
        else if (key == "c_lo") b.c.lo = v;
        else if (key == "c_hi") b.c.hi = v;
        else if (key == "ic_lo") b.ic.lo = v;
        else if (key == "ic_hi") b.ic.hi = v;
    }
    return b;
}

void apply_element_sets(Circuit& c, const Overrides& ov) {
    for (const auto& [label, v] : ov.elements) {
        bool found = false;
        for (Component& comp : c.components) {
            if (comp.label != label) continue;
            if (comp.kind == ComponentKind::bjt)
                throw std::invalid_argument("--set cannot override device '" +
                                            label + "'");
            comp.value = v;
            found = true;
            break;
        }
        if (!found)
            throw std::invalid_argument("--set: no element labeled '" + label +
                                        "'");
    }
}

struct SweepSpec {
    double lo = 1e9;
    double hi = 15e9;
    double band_lo = 3.1e9;
    double band_hi = 10.6e9;
};

SweepSpec sweep_spec(const RunConfig& cfg) {
    SweepSpec s;
    if (cfg.band.empty()) return s;
    const auto colon = cfg.band.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("--band expects LO:HI");
    double lo, hi;
    try {
        lo = parse_value(cfg.band.substr(0, colon));
        hi = parse_value(cfg.band.substr(colon + 1));
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("--band: bad frequency in '" + cfg.band +
                                    "'");
    }
    if (!(lo > 0.0) || !(hi > lo))
        throw std::invalid_argument("--band needs 0 < LO < HI");
    s.lo = s.band_lo = lo;
    s.hi = s.band_hi = hi;
    return s;
}

FrequencyGrid make_grid(const RunConfig& cfg, const SweepSpec& sp) {
    if (cfg.flag_linear && cfg.flag_log)
        throw std::invalid_argument("--log and --linear are exclusive");
    if (cfg.flag_linear)
        return FrequencyGrid::linear_points(sp.lo, sp.hi, cfg.points);
    return FrequencyGrid::log_points(sp.lo, sp.hi, cfg.points);
}

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw std::invalid_argument("cannot read '" + path + "'");
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

LnaDesign load_design(const RunConfig& cfg, const Overrides& ov) {
    LnaDesign d = cfg.design_path.empty() ? default_design()
                                          : load_design_json(slurp(cfg.design_path));
    apply_design_keys(d, ov);
    return d;
}

// Input circuit for the sweep-style commands. Topology mode materializes
// the design; netlist mode parses the file. Element overrides land last.
Circuit load_circuit(const RunConfig& cfg, const LnaDesign& d,
                     const Overrides& ov, bool* topology_mode,
                     TopologyKind* kind_out) {
    if (!cfg.topology.empty() && !cfg.netlist_path.empty())
        throw std::invalid_argument("--topology and --netlist are exclusive");
    Circuit c;
    if (!cfg.topology.empty()) {
        const TopologyKind kind = topology_from_name(cfg.topology);
        TopologyParams tp;
        tp.input = d.input_params();
        tp.output = d.output_params();
        tp.lna = d.lna_params();
        c = build_topology(kind, tp);
        if (topology_mode) *topology_mode = true;
        if (kind_out) *kind_out = kind;
    } else if (!cfg.netlist_path.empty()) {
        c = parse_netlist(slurp(cfg.netlist_path));
        if (topology_mode) *topology_mode = false;
        if (!ov.design_keys.empty())
            throw std::invalid_argument(
                "--set of a design key needs a --topology run");
    } else {
        throw std::invalid_argument("need --topology NAME or --netlist PATH");
    }
    apply_element_sets(c, ov);
    validate(c);
    return c;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

void emit(const RunConfig& cfg, const std::string& name,
          const std::string& content) {
    const std::string path = out_path(cfg, name);
    atomic_write(path, content);
    std::cout << "wrote " << path << "\n";
}

std::string sweep_json(const TwoPortSweep& sw) {
    std::ostringstream os;
    auto entry = [&](int i, int j) {
        os << "\"s" << i + 1 << j + 1 << "\":[";
        for (std::size_t k = 0; k < sw.s.size(); ++k) {
            if (k) os << ',';
            os << '[' << format_sig9(sw.s[k](i, j).real()) << ','
               << format_sig9(sw.s[k](i, j).imag()) << ']';
        }
        os << ']';
    };
    os << "{\"freq_hz\":[";
    for (std::size_t k = 0; k < sw.freq_hz.size(); ++k) {
        if (k) os << ',';
        os << format_sig9(sw.freq_hz[k]);
    }
    os << "],";
    entry(0, 0);
    os << ',';
    entry(0, 1);
    os << ',';
    entry(1, 0);
    os << ',';
    entry(1, 1);
    os << "}\n";
    return os.str();
}

// The analytic device of the front end: the CE stage's own model with the
// feedback cap removed, the reduction every closed form here is written
// against.
HybridPiParams analytic_device(const LnaDesign& d) {
    HybridPiParams q = d.lna_params().q1;
    q.cbc = 0.0;
    return q;
}

int cmd_analyze(const RunConfig& cfg) {
    const Overrides ov = parse_sets(cfg.sets);
    const LnaDesign d = load_design(cfg, ov);
    const Circuit c = load_circuit(cfg, d, ov, nullptr, nullptr);
    const SweepSpec sp = sweep_spec(cfg);
    const FrequencyGrid grid = make_grid(cfg, sp);

    const TwoPortSweep sw = two_port_sparams(c, grid);
    const double flat = gain_flatness(sw, sp.band_lo, sp.band_hi);

    std::string derived = derived_csv(sw, {});
    derived += "# flatness_db," + format_sig9(flat) + "\n";

    const bool all = cfg.format.empty();
    if (all || cfg.format == "csv") {
        emit(cfg, "sparams.csv", sparams_csv(sw));
        emit(cfg, "derived.csv", derived);
    }
    if (all || cfg.format == "s2p") emit(cfg, "sweep.s2p", touchstone_s2p(sw));
    if (cfg.format == "json") emit(cfg, "sweep.json", sweep_json(sw));
    return kExitOk;
}

int cmd_noise(const RunConfig& cfg) {
    const Overrides ov = parse_sets(cfg.sets);
    const LnaDesign d = load_design(cfg, ov);

    bool topo_mode = false;
    TopologyKind kind = TopologyKind::full_lna;
    Circuit c;
    if (!cfg.topology.empty() &&
        topology_from_name(cfg.topology) == TopologyKind::input_stage) {
        // the noisy single-stage comparison target: real device (shot noise,
        // finite beta), degeneration, output port at the collector
        topo_mode = true;
        kind = TopologyKind::input_stage;
        const HybridPiParams q = analytic_device(d);
        const double l1 = d.lna_params().l1;
        c.title = "noise comparison CE stage";
        c.bjt("Q1", 1, 3, l1 > 0.0 ? 2 : 0, q);
        if (l1 > 0.0) c.inductor("L1", 2, 0, l1);
        c.ports.push_back(Port{1, 0, 50.0});
        c.ports.push_back(Port{3, 0, 50.0});
        apply_element_sets(c, ov);
        validate(c);
    } else {
        c = load_circuit(cfg, d, ov, &topo_mode, &kind);
    }

    const SweepSpec sp = sweep_spec(cfg);
    const FrequencyGrid grid = make_grid(cfg, sp);

    const bool have_analytic = topo_mode || !cfg.design_path.empty();
    const HybridPiParams q = analytic_device(d);
    const double l1 = d.lna_params().l1;

    std::ostringstream os;
    os << "freq_hz,nf_db_analytic,nf_db_oracle,nfmin_db,rn_ohm,zopt_re,"
          "zopt_im,divergent\n";
    for (double f : grid.hz) {
        const double w = 2.0 * M_PI * f;
        double nf_an = 1.0, nfmin = 1.0, rn = 0.0;
        std::complex<double> zopt{0.0, 0.0};
        std::complex<double> zs = ov.zs;
        if (have_analytic) {
            const NoiseParameters np = noise_parameters(q, l1, w);
            nfmin = np.nfmin;
            rn = np.rn;
            zopt = np.zopt;
            if (ov.zs_zopt) zs = np.zopt;
            nf_an = ov.zs_zopt ? np.nfmin : nf_from_params(np, zs);
        }
        FrequencyGrid one;
        one.hz = {f};
        const double nf_or = noise_figure_oracle(c, one, zs, ov.noise_off)[0];

        double db_an = ov.noise_off ? 0.0 : 10.0 * std::log10(nf_an);
        if (!have_analytic) db_an = 0.0;
        const double db_or = ov.noise_off ? 0.0 : 10.0 * std::log10(nf_or);
        int divergent = 0;
        if (have_analytic && !ov.noise_off &&
            std::abs(nf_an - nf_or) / nf_or > 0.10)
            divergent = 1;

        os << format_sig9(f) << ',' << format_sig9(db_an) << ','
           << format_sig9(db_or) << ','
           << format_sig9(have_analytic ? 10.0 * std::log10(nfmin) : 0.0) << ','
           << format_sig9(have_analytic ? rn : 0.0) << ','
           << format_sig9(have_analytic ? zopt.real() : 0.0) << ','
           << format_sig9(have_analytic ? zopt.imag() : 0.0) << ','
           << divergent << "\n";
    }
    emit(cfg, "noise.csv", os.str());
    return kExitOk;
}

std::string complex_json(std::complex<double> v) {
    return "{\"re\":" + format_sig9(v.real()) +
           ",\"im\":" + format_sig9(v.imag()) + "}";
}

int cmd_polezero(const RunConfig& cfg) {
    const Overrides ov = parse_sets(cfg.sets);
    const LnaDesign d = load_design(cfg, ov);
    bool topo_mode = false;
    TopologyKind kind = TopologyKind::full_lna;
    Circuit c = load_circuit(cfg, d, ov, &topo_mode, &kind);
    if (c.ports.empty())
        throw std::invalid_argument("polezero needs at least one port");

    // drive: unit current into port 1 (no source impedance); every other
    // port terminated in its z0; output: port-2 voltage, or the circuit's
    // current probe when there is only one port
    Circuit drv = c;
    drv.isource("_pz_is", drv.ports[0].npos, drv.ports[0].nneg, 1.0);
    for (std::size_t i = 1; i < drv.ports.size(); ++i)
        drv.resistor("_pz_rt" + std::to_string(i), drv.ports[i].npos,
                     drv.ports[i].nneg, drv.ports[i].z0);
    OutputSel out;
    if (drv.ports.size() >= 2)
        out = NodeOutput{drv.ports[1].npos};
    else if (drv.find("VOUT"))
        out = BranchOutput{"VOUT"};
    else
        out = NodeOutput{drv.ports[0].npos};

    const PoleZeroSet pz = pole_zero_report(drv, "_pz_is", out);
    const std::vector<ResidualEntry> res = cancellation_residual(pz);

    // closed-form counterpart where one exists for the chosen topology
    bool have_analytic = false;
    PoleZeroSet an;
    if (topo_mode) {
        if (kind == TopologyKind::input_stage) {
            an = input_stage_poles(d.input_params());
            have_analytic = true;
        } else if (kind == TopologyKind::output_stage) {
            an = output_stage_zeros_pole(d.output_params());
            have_analytic = true;
        } else if (kind == TopologyKind::full_lna) {
            an = input_stage_poles(d.input_params());
            const PoleZeroSet outs = output_stage_zeros_pole(d.output_params());
            an.poles.insert(an.poles.end(), outs.poles.begin(),
                            outs.poles.end());
            an.zeros = outs.zeros;
            have_analytic = true;
        }
    }

    std::ostringstream os;
    os << "{\n\"numeric\": " << pole_zero_json(pz, res) << ",\n";
    if (have_analytic) {
        auto list = [&](const std::vector<std::complex<double>>& v) {
            os << '[';
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) os << ',';
                os << complex_json(v[i]);
            }
            os << ']';
        };
        os << "\"analytic\": {\"poles\":";
        list(an.poles);
        os << ",\"zeros\":";
        list(an.zeros);
        os << "},\n\"agreement\": [";
        bool first = true;
        auto nearest = [&](std::complex<double> a,
                           const std::vector<std::complex<double>>& num,
                           const char* kind_name) {
            if (!first) os << ',';
            first = false;
            os << "{\"kind\":\"" << kind_name
               << "\",\"analytic\":" << complex_json(a);
            if (num.empty()) {
                os << ",\"nearest_numeric\":null,\"rel\":null}";
                return;
            }
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < num.size(); ++i) {
                const double dd = std::abs(num[i] - a) /
                                  std::max(std::abs(a), kResidualRefOmega);
                if (dd < best_d) {
                    best_d = dd;
                    best = i;
                }
            }
            os << ",\"nearest_numeric\":" << complex_json(num[best])
               << ",\"rel\":" << format_sig9(best_d) << '}';
        };
        for (const auto& p : an.poles) nearest(p, pz.poles, "pole");
        for (const auto& z : an.zeros) nearest(z, pz.zeros, "zero");
        os << "]\n";
    } else {
        os << "\"analytic\": null,\n\"agreement\": []\n";
    }
    os << "}\n";
    emit(cfg, "polezero.json", os.str());
    return kExitOk;
}

int cmd_design(const RunConfig& cfg) {
    const Overrides ov = parse_sets(cfg.sets);
    if (!ov.elements.empty())
        throw std::invalid_argument(
            "design takes design-key or bound overrides only");
    if (!cfg.netlist_path.empty())
        throw std::invalid_argument("design reads a design JSON, not a netlist");
    LnaDesign d = load_design(cfg, ov);
    const DesignBounds bounds = apply_bound_keys(ov);
    const SweepSpec sp = sweep_spec(cfg);

    // 1. input match: closed-form degeneration inductance
    InputStageParams in_p = d.input_params();
    InputStageParams solve_p = in_p;
    solve_p.l = 0.0;
    const DesignVariables match =
        solve_input_match(solve_p, d.match_target, MatchVar::l, bounds);
    in_p.l = match.l;
    const double match_residual =
        std::abs(zin_analytic(in_p, 2.0 * M_PI * 6.5e9).real() -
                 d.match_target);

    // 2. cancellation over the feedback pair
    CancellationConfig ccfg;
    ccfg.bounds = bounds;
    DesignReport rep = solve_cancellation(
        in_p, d.output_params(), {CancelVar::rf, CancelVar::lf}, ccfg);
    rep.residuals.input_match_ohm = match_residual;
    rep.variables.ic = d.ic1;
    d.rf = rep.variables.rf;
    d.lf = rep.variables.lf;

    // 3. score the assembled design
    TopologyParams tp;
    tp.input = d.input_params();
    tp.output = d.output_params();
    tp.lna = d.lna_params();
    const Circuit c = build_topology(TopologyKind::full_lna, tp);
    rep.flatness_db = flatness_score(c, sp.band_lo, sp.band_hi);

    const HybridPiParams q = analytic_device(d);
    const FrequencyGrid band =
        FrequencyGrid::log_points(sp.band_lo, sp.band_hi, cfg.points);
    double mn = std::numeric_limits<double>::infinity();
    double mx = -mn;
    for (double f : band.hz) {
        const NoiseParameters np =
            noise_parameters(q, d.lna_params().l1, 2.0 * M_PI * f);
        const double db = 10.0 * std::log10(nf_from_params(np, ov.zs));
        mn = std::min(mn, db);
        mx = std::max(mx, db);
    }
    rep.nf_db_min = mn;
    rep.nf_db_max = mx;

    emit(cfg, "design_report.json", design_report_json(rep));
    emit(cfg, "design.net", serialize_netlist(c));
    if (!rep.converged) {
        std::cerr << "design did not converge: worst residual above "
                  << format_sig9(ccfg.tol) << "\n";
        return kExitNoConverge;
    }
    return kExitOk;
}

int cmd_report(const RunConfig& cfg) {
    const Overrides ov = parse_sets(cfg.sets);
    const LnaDesign d = load_design(cfg, ov);
    TopologyParams tp;
    tp.input = d.input_params();
    tp.output = d.output_params();
    tp.lna = d.lna_params();
    Circuit c = build_topology(TopologyKind::full_lna, tp);
    apply_element_sets(c, ov);
    validate(c);

    const SweepSpec sp = sweep_spec(cfg);
    const FrequencyGrid grid = make_grid(cfg, sp);
    const TwoPortSweep sw = two_port_sparams(c, grid);
    const StabilityReport st = stability(sw);
    const std::vector<double> gd = group_delay(sw);
    const std::vector<double> nf =
        noise_figure_oracle(c, grid, ov.zs, ov.noise_off);

    ReportBundle rb;
    rb.flatness_db = gain_flatness(sw, sp.band_lo, sp.band_hi);
    rb.s21_peak_db = -std::numeric_limits<double>::infinity();
    double gd_min = std::numeric_limits<double>::infinity();
    double gd_max = -gd_min;
    rb.nf_min_db = std::numeric_limits<double>::infinity();
    rb.nf_max_db = -rb.nf_min_db;
    rb.k_min = std::numeric_limits<double>::infinity();
    rb.delta_max = 0.0;
    const double lo_edge = sp.band_lo * (1.0 - 1e-9);
    const double hi_edge = sp.band_hi * (1.0 + 1e-9);
    for (std::size_t i = 0; i < sw.freq_hz.size(); ++i) {
        rb.k_min = std::min(rb.k_min, st.k[i]);
        rb.delta_max = std::max(rb.delta_max, st.delta_mag[i]);
        const double f = sw.freq_hz[i];
        if (f < lo_edge || f > hi_edge) continue;
        const double s21_db = 20.0 * std::log10(std::abs(sw.s[i](1, 0)));
        if (s21_db > rb.s21_peak_db) {
            rb.s21_peak_db = s21_db;
            rb.s21_peak_hz = f;
        }
        gd_min = std::min(gd_min, gd[i]);
        gd_max = std::max(gd_max, gd[i]);
        const double nf_db = 10.0 * std::log10(nf[i]);
        rb.nf_min_db = std::min(rb.nf_min_db, nf_db);
        rb.nf_max_db = std::max(rb.nf_max_db, nf_db);
    }
    rb.group_delay_var_s = 0.5 * (gd_max - gd_min);
    PowerBudget pb;
    pb.vcc1 = pb.vcc2 = 1.0;
    pb.i1 = d.ic1;
    pb.i2 = d.ic3;
    pb.ic = d.ic1;
    rb.power_ratio = power_comparison(pb).ratio;
    rb.disclaimer =
        "Metrics computed on the bundled fitted small-signal model; "
        "fabricated-device numbers depend on process and layout parasitics "
        "this model does not carry.";

    emit(cfg, "report.json", report_bundle_json(rb));
    return kExitOk;
}

void add_common(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--topology", cfg.topology,
                    "built-in topology: two_stage, current_reuse, "
                    "input_stage, output_stage, full_lna");
    sub->add_option("--netlist", cfg.netlist_path, "netlist file");
    sub->add_option("--design", cfg.design_path, "design parameter JSON");
    sub->add_option("--band", cfg.band, "sweep band LO:HI in Hz");
    sub->add_option("--points", cfg.points, "sweep point count");
    sub->add_flag("--log", cfg.flag_log, "log-spaced sweep (default)");
    sub->add_flag("--linear", cfg.flag_linear, "linearly spaced sweep");
    sub->add_option("--set", cfg.sets, "override LABEL=VALUE (repeatable)")
        ->take_all();
    sub->add_option("--out", cfg.out_dir, "output directory");
    sub->add_option("--format", cfg.format, "csv, json, or s2p")
        ->check(CLI::IsMember({"csv", "json", "s2p"}));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"small-signal RF LNA analysis toolkit"};
    app.require_subcommand(1);
    RunConfig cfg;

    CLI::App* analyze = app.add_subcommand("analyze", "S-parameter sweep");
    CLI::App* noise = app.add_subcommand("noise", "noise figure report");
    CLI::App* polezero = app.add_subcommand("polezero", "pole/zero report");
    CLI::App* design = app.add_subcommand("design", "solve a design");
    CLI::App* report = app.add_subcommand("report", "composite metric bundle");
    for (CLI::App* sub : {analyze, noise, polezero, design, report})
        add_common(sub, cfg);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return kExitInput;
    }

    try {
        if (analyze->parsed()) return cmd_analyze(cfg);
        if (noise->parsed()) return cmd_noise(cfg);
        if (polezero->parsed()) return cmd_polezero(cfg);
        if (design->parsed()) return cmd_design(cfg);
        if (report->parsed()) return cmd_report(cfg);
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const singular_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::domain_error& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
