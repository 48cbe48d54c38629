#include "lnakit/design.hpp"

#include "lnakit/noise.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace lnakit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kResidualFloor = 1e-3; // converged-tie level for start ranking
constexpr double kRefOmega = 2.0 * M_PI * 6.5e9; // origin regularizer, rad/s

double reldist(std::complex<double> pole, std::complex<double> zero) {
    return std::abs(zero - pole) / std::max(std::abs(pole), kRefOmega);
}

// radical-inverse of k in the given prime base, in (0, 1)
double van_der_corput(unsigned k, unsigned base) {
    double t = 0.0;
    double f = 1.0 / base;
    while (k > 0) {
        t += (k % base) * f;
        k /= base;
        f /= base;
    }
    return t;
}

struct FreeVar {
    CancelVar which;
    Interval range;
    unsigned prime;
};

double get_var(const OutputStageParams& p, CancelVar v) {
    switch (v) {
    case CancelVar::rf: return p.rf;
    case CancelVar::lf: return p.lf;
    case CancelVar::r2: return p.r2;
    case CancelVar::c4: return p.c4;
    }
    return 0.0;
}

void set_var(OutputStageParams& p, CancelVar v, double x) {
    switch (v) {
    case CancelVar::rf: p.rf = x; break;
    case CancelVar::lf: p.lf = x; break;
    case CancelVar::r2: p.r2 = x; break;
    case CancelVar::c4: p.c4 = x; break;
    }
}

// greedy pole-order pairing: each pole claims its nearest unclaimed zero
struct PairSet {
    double p1_rel = 0.0; // residual of the pair holding the input-stage pole
    double p2_rel = 0.0; // residual of the pair holding the output-stage pole
};

PairSet pair_residuals(std::complex<double> p1, const PoleZeroSet& zp,
                       PairingMode mode) {
    const std::complex<double> p0(0.0, 0.0);
    const std::complex<double> p2 = zp.poles[0];
    const std::vector<std::complex<double>> zeros = zp.zeros; // Z0 Z1 Z2
    PairSet out;
    if (mode == PairingMode::positional) {
        out.p1_rel = reldist(p1, zeros[1]);
        out.p2_rel = reldist(p2, zeros[2]);
        return out;
    }
    const std::complex<double> poles[3] = {p0, p1, p2};
    bool claimed[3] = {false, false, false};
    double rel[3] = {0.0, 0.0, 0.0};
    for (int pi = 0; pi < 3; ++pi) {
        int best = -1;
        double best_d = kInf;
        for (int zi = 0; zi < 3; ++zi) {
            if (claimed[zi]) continue;
            const double d = reldist(poles[pi], zeros[zi]);
            if (d < best_d) {
                best_d = d;
                best = zi;
            }
        }
        claimed[best] = true;
        rel[pi] = best_d;
    }
    out.p1_rel = rel[1];
    out.p2_rel = rel[2];
    return out;
}

} // namespace

DesignVariables solve_input_match(const InputStageParams& p, double target,
                                  MatchVar free_var, const DesignBounds& bounds,
                                  double ft_hz, double cbc, double temp_k) {
    DesignVariables vars;
    vars.bounds = bounds;
    if (target < p.rb)
        throw std::domain_error(
            "solve_input_match: target below rb, no positive inductance "
            "reaches it");

    if (free_var == MatchVar::l) {
        if (!(p.gm > 0.0) || !(p.cpi > 0.0))
            throw std::domain_error("solve_input_match: gm and cpi must be positive");
        const double l = (target - p.rb) * p.cpi / p.gm;
        if (l != 0.0 && !bounds.l.holds(l))
            throw std::domain_error("solve_input_match: required inductance "
                                    "falls outside the bounds");
        vars.l = l;
        vars.ic = 0.0;
        return vars;
    }

    // bias-current mode: gm = q ic / kT, cpi = gm / wt - cbc with wt fixed
    if (!(ft_hz > 0.0))
        throw std::domain_error("solve_input_match: bias-current mode needs ft_hz");
    if (!(p.l > 0.0))
        throw std::domain_error("solve_input_match: bias-current mode needs L > 0");
    const double wt = 2.0 * M_PI * ft_hz;
    auto mismatch = [&](double ic) {
        const double gm = gm_from_bias(ic, temp_k);
        const double cpi = gm / wt - cbc;
        if (!(cpi > 0.0)) return kInf; // device infeasible at this bias
        return p.rb + p.l * gm / cpi - target;
    };
    double lo = bounds.ic.lo;
    double hi = bounds.ic.hi;
    double flo = mismatch(lo);
    double fhi = mismatch(hi);
    if (flo == 0.0) {
        vars.ic = lo;
        vars.l = p.l;
        return vars;
    }
    if (fhi == 0.0) {
        vars.ic = hi;
        vars.l = p.l;
        return vars;
    }
    if (!((flo < 0.0 && fhi > 0.0) || (flo > 0.0 && fhi < 0.0)))
        throw std::domain_error(
            "solve_input_match: target not bracketed by the bias bounds");
    for (int i = 0; i < 200 && (hi - lo) > 1e-16 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = mismatch(mid);
        if (fm == 0.0) {
            lo = hi = mid;
            break;
        }
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    vars.ic = 0.5 * (lo + hi);
    vars.l = p.l;
    return vars;
}

DesignReport solve_cancellation(const InputStageParams& in_p,
                                const OutputStageParams& out_p,
                                const std::set<CancelVar>& free_vars,
                                const CancellationConfig& cfg) {
    if (free_vars.size() < 2)
        throw std::invalid_argument(
            "solve_cancellation: need at least two free variables");

    const bool p1_active = free_vars.count(CancelVar::rf) ||
                           free_vars.count(CancelVar::lf);
    const bool p2_active = free_vars.count(CancelVar::r2) ||
                           free_vars.count(CancelVar::c4);
    if (p1_active && !(in_p.gm > 0.0 && in_p.l > 0.0))
        throw std::domain_error(
            "solve_cancellation: input stage has no finite pole (gm, L must "
            "be positive)");
    const std::complex<double> p1 =
        (in_p.gm > 0.0 && in_p.l > 0.0)
            ? std::complex<double>(-1.0 / (in_p.gm * in_p.l), 0.0)
            : std::complex<double>(0.0, 0.0);

    // fixed coordinate order; primes drive the low-discrepancy starts
    const CancelVar order[4] = {CancelVar::rf, CancelVar::lf, CancelVar::r2,
                                CancelVar::c4};
    const unsigned primes[4] = {2, 3, 5, 7};
    std::vector<FreeVar> fv;
    for (int i = 0; i < 4; ++i) {
        if (!free_vars.count(order[i])) continue;
        Interval range;
        switch (order[i]) {
        case CancelVar::rf:
        case CancelVar::r2: range = cfg.bounds.r; break;
        case CancelVar::lf: range = cfg.bounds.l; break;
        case CancelVar::c4: range = cfg.bounds.c; break;
        }
        fv.push_back(FreeVar{order[i], range, primes[i]});
    }

    auto objective = [&](const OutputStageParams& cand) {
        PoleZeroSet zp;
        try {
            zp = output_stage_zeros_pole(cand);
        } catch (const std::domain_error&) {
            return kInf;
        }
        const PairSet pr = pair_residuals(p1, zp, cfg.pairing);
        double obj = 0.0;
        if (p1_active) obj = std::max(obj, pr.p1_rel);
        if (p2_active) obj = std::max(obj, pr.p2_rel);
        if (!std::isfinite(obj)) return kInf;
        return obj;
    };

    struct StartResult {
        OutputStageParams point;
        double obj = kInf;
        int improvements = 0;
    };

    std::vector<StartResult> results;
    for (int start = 0; start < 8; ++start) {
        OutputStageParams cur = out_p;
        for (const FreeVar& v : fv) {
            double x;
            if (start == 0) {
                x = v.range.clamp(get_var(out_p, v.which));
            } else {
                const double t = van_der_corput(static_cast<unsigned>(start),
                                                v.prime);
                x = std::exp(std::log(v.range.lo) +
                             t * (std::log(v.range.hi) - std::log(v.range.lo)));
            }
            set_var(cur, v.which, x);
        }

        double cur_obj = objective(cur);
        int improvements = 0;
        const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
        for (int sweep = 0; sweep < 60; ++sweep) {
            bool moved = false;
            for (const FreeVar& v : fv) {
                const double ulo = std::log(v.range.lo);
                const double uhi = std::log(v.range.hi);
                auto eval_u = [&](double u) {
                    OutputStageParams t = cur;
                    set_var(t, v.which, std::exp(u));
                    return objective(t);
                };
                // coarse scan
                int best_i = 0;
                double best_scan = kInf;
                const int n = 33;
                for (int i = 0; i < n; ++i) {
                    const double u = ulo + (uhi - ulo) * i / (n - 1);
                    const double f = eval_u(u);
                    if (f < best_scan) {
                        best_scan = f;
                        best_i = i;
                    }
                }
                const double ua =
                    ulo + (uhi - ulo) * std::max(0, best_i - 1) / (n - 1);
                const double ub =
                    ulo + (uhi - ulo) * std::min(n - 1, best_i + 1) / (n - 1);
                // golden section inside the scan bracket
                double a = ua, b = ub;
                double c1 = b - invphi * (b - a);
                double c2 = a + invphi * (b - a);
                double f1 = eval_u(c1);
                double f2 = eval_u(c2);
                for (int it = 0; it < 80; ++it) {
                    if (f1 <= f2) {
                        b = c2;
                        c2 = c1;
                        f2 = f1;
                        c1 = b - invphi * (b - a);
                        f1 = eval_u(c1);
                    } else {
                        a = c1;
                        c1 = c2;
                        f1 = f2;
                        c2 = a + invphi * (b - a);
                        f2 = eval_u(c2);
                    }
                }
                const double ug = 0.5 * (a + b);
                const double fg = eval_u(ug);
                double ubest =
                    ulo + (uhi - ulo) * best_i / (n - 1);
                double fbest = best_scan;
                if (fg < fbest) {
                    fbest = fg;
                    ubest = ug;
                }
                if (fbest < cur_obj - 1e-15) {
                    set_var(cur, v.which, std::exp(ubest));
                    cur_obj = fbest;
                    ++improvements;
                    moved = true;
                }
            }
            if (!moved) break;
        }
        results.push_back(StartResult{cur, cur_obj, improvements});
    }

    // converged starts tie at the floor; the lowest start index wins, so a
    // converged passed-in point comes back unchanged
    int best = 0;
    for (int i = 1; i < 8; ++i) {
        const double a = std::max(results[i].obj, kResidualFloor);
        const double b = std::max(results[best].obj, kResidualFloor);
        if (a < b) best = i;
    }
    const StartResult& win = results[best];

    DesignReport rep;
    rep.variables.l = in_p.l;
    rep.variables.ic = 0.0;
    rep.variables.rf = win.point.rf;
    rep.variables.lf = win.point.lf;
    rep.variables.r2 = win.point.r2;
    rep.variables.c4 = win.point.c4;
    rep.variables.bounds = cfg.bounds;
    PoleZeroSet zp_final;
    bool final_ok = true;
    try {
        zp_final = output_stage_zeros_pole(win.point);
    } catch (const std::domain_error&) {
        final_ok = false;
    }
    if (final_ok) {
        const PairSet pr = pair_residuals(p1, zp_final, cfg.pairing);
        rep.residuals.z1p1_rel = p1_active ? pr.p1_rel : 0.0;
        rep.residuals.z2p2_rel = p2_active ? pr.p2_rel : 0.0;
    } else {
        rep.residuals.z1p1_rel = p1_active ? kInf : 0.0;
        rep.residuals.z2p2_rel = p2_active ? kInf : 0.0;
    }
    rep.converged = win.obj < cfg.tol;
    rep.iterations = win.improvements;
    return rep;
}

DesignReport noise_optimize(const HybridPiParams& d, double le,
                            std::complex<double> zs, const FrequencyGrid& grid,
                            const DesignBounds& bounds, bool zs_track_zopt) {
    if (!(bounds.ic.lo > 0.0) || !(bounds.ic.hi > bounds.ic.lo))
        throw std::domain_error("noise_optimize: bad bias bounds");
    if (grid.hz.empty())
        throw std::domain_error("noise_optimize: empty grid");
    const double wt = d.omega_t();
    if (!(wt > 0.0))
        throw std::domain_error("noise_optimize: device transit frequency "
                                "must be positive");

    int evals = 0;
    auto band_nf_db = [&](double ic, double* out_min, double* out_max) {
        ++evals;
        HybridPiParams dev = d;
        dev.ic = ic;
        dev.gm = gm_from_bias(ic, d.temp_k);
        dev.cpi = dev.gm / wt - d.cbc;
        if (!(dev.cpi > 0.0)) return kInf;
        double sum = 0.0;
        double mn = kInf, mx = -kInf;
        for (double f : grid.hz) {
            const double w = 2.0 * M_PI * f;
            double nf;
            try {
                const NoiseParameters np = noise_parameters(dev, le, w);
                nf = zs_track_zopt ? np.nfmin : nf_from_params(np, zs);
            } catch (const std::domain_error&) {
                return kInf;
            }
            const double db = 10.0 * std::log10(nf);
            sum += db;
            mn = std::min(mn, db);
            mx = std::max(mx, db);
        }
        if (out_min) *out_min = mn;
        if (out_max) *out_max = mx;
        return sum / static_cast<double>(grid.hz.size());
    };

    const double ulo = std::log(bounds.ic.lo);
    const double uhi = std::log(bounds.ic.hi);
    const int n = 33;
    int best_i = 0;
    double best_f = kInf;
    for (int i = 0; i < n; ++i) {
        const double u = ulo + (uhi - ulo) * i / (n - 1);
        const double f = band_nf_db(std::exp(u), nullptr, nullptr);
        if (f < best_f) {
            best_f = f;
            best_i = i;
        }
    }
    if (!std::isfinite(best_f))
        throw std::domain_error(
            "noise_optimize: no feasible bias inside the bounds");
    double a = ulo + (uhi - ulo) * std::max(0, best_i - 1) / (n - 1);
    double b = ulo + (uhi - ulo) * std::min(n - 1, best_i + 1) / (n - 1);
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c1 = b - invphi * (b - a);
    double c2 = a + invphi * (b - a);
    double f1 = band_nf_db(std::exp(c1), nullptr, nullptr);
    double f2 = band_nf_db(std::exp(c2), nullptr, nullptr);
    for (int it = 0; it < 80; ++it) {
        if (f1 <= f2) {
            b = c2;
            c2 = c1;
            f2 = f1;
            c1 = b - invphi * (b - a);
            f1 = band_nf_db(std::exp(c1), nullptr, nullptr);
        } else {
            a = c1;
            c1 = c2;
            f1 = f2;
            c2 = a + invphi * (b - a);
            f2 = band_nf_db(std::exp(c2), nullptr, nullptr);
        }
    }
    double u_best = 0.5 * (a + b);
    double f_gold = band_nf_db(std::exp(u_best), nullptr, nullptr);
    if (best_f < f_gold) u_best = ulo + (uhi - ulo) * best_i / (n - 1);

    const double ic_best = std::exp(u_best);
    DesignReport rep;
    double mn = 0.0, mx = 0.0;
    const double f_final = band_nf_db(ic_best, &mn, &mx);
    rep.variables.ic = ic_best;
    rep.variables.l = le;
    rep.variables.bounds = bounds;
    rep.nf_db_min = mn;
    rep.nf_db_max = mx;
    rep.converged = std::isfinite(f_final);
    rep.iterations = evals;
    return rep;
}

double flatness_score(const Circuit& c, double lo_hz, double hi_hz) {
    const FrequencyGrid grid = FrequencyGrid::log_points(lo_hz, hi_hz, 401);
    const TwoPortSweep sw = two_port_sparams(c, grid);
    return gain_flatness(sw, lo_hz, hi_hz);
}

} // namespace lnakit
