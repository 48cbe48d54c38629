#pragma once

#include <complex>
#include <set>
#include <string>

#include "lnakit/analytic.hpp"
#include "lnakit/mna.hpp"

namespace lnakit {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double clamp(double v) const { return v < lo ? lo : (v > hi ? hi : v); }
    bool holds(double v) const { return v >= lo && v <= hi; }
};

// Plausible monolithic ranges; declared, not derived.
struct DesignBounds {
    Interval r = {10.0, 5e3};        // ohms
    Interval l = {0.05e-9, 10e-9};   // henries
    Interval c = {10e-15, 10e-12};   // farads
    Interval ic = {0.1e-3, 20e-3};   // amps
};

struct DesignVariables {
    double l = 0.0;   // henries, emitter degeneration
    double ic = 0.0;  // amps
    double rf = 0.0;  // ohms
    double lf = 0.0;  // henries
    double r2 = 0.0;  // ohms
    double c4 = 0.0;  // farads
    DesignBounds bounds;
};

struct DesignResiduals {
    double input_match_ohm = 0.0;
    double z1p1_rel = 0.0;
    double z2p2_rel = 0.0;
};

struct DesignReport {
    DesignVariables variables;
    DesignResiduals residuals;
    double flatness_db = 0.0;
    double nf_db_min = 0.0;
    double nf_db_max = 0.0;
    bool converged = false;
    int iterations = 0;
};

enum class MatchVar { l, ic };

// Solve rb + L gm/cpi = target for the chosen free variable. L is closed
// form; ic couples through gm(ic) and cpi(ic) and is found by bisection
// (ft and cbc pin the cpi(ic) relation). target == rb returns the boundary
// l = 0; anything else unreachable inside bounds (target < rb included)
// throws std::domain_error.
DesignVariables solve_input_match(const InputStageParams& p, double target,
                                  MatchVar free_var,
                                  const DesignBounds& bounds = {},
                                  double ft_hz = 0.0, double cbc = 0.0,
                                  double temp_k = kRoomTempK);

enum class CancelVar { rf, lf, r2, c4 };

// Zero/pole pairing for the cancellation objective. positional: pairs the
// closed-form roots by index, Z1 with P1 and Z2 with P2. matched: greedy
// nearest pairing by regularized relative distance, which at physical
// element scales puts Z2 = -rf/lf against P1 (that identity is what the
// solver actually exploits). Neither assignment is canonical, so both are
// exposed.
enum class PairingMode { matched, positional };

struct CancellationConfig {
    PairingMode pairing = PairingMode::matched;
    DesignBounds bounds;
    double tol = 1e-3;
};

// Minimize the worst matched-pair residual over the free subset of
// {rf, lf, r2, c4}. Deterministic multi-start (the passed-in out_p point
// plus 7 low-discrepancy points) into coordinate descent with golden-
// section line searches in log space. A pair enters the objective only
// when its pole's canonical adjusting variables intersect the free set
// (P1-side: rf/lf, P2-side: r2/c4; the origin pair has no variables).
// Ties between converged starts resolve to the lowest start index, so a
// converged passed-in point is returned unchanged. Requires at least two
// free variables (std::invalid_argument).
DesignReport solve_cancellation(const InputStageParams& in_p,
                                const OutputStageParams& out_p,
                                const std::set<CancelVar>& free_vars,
                                const CancellationConfig& cfg = {});

// Band-average noise figure minimization over the bias current by golden
// section on [bounds.ic]. zs_track_zopt substitutes Zs = Zopt(w) at every
// point, the floor configuration. Reports band NF extremes at the optimum.
DesignReport noise_optimize(const HybridPiParams& d, double le,
                            std::complex<double> zs, const FrequencyGrid& grid,
                            const DesignBounds& bounds = {},
                            bool zs_track_zopt = false);

// gain_flatness of a fresh 401-point sweep across the band.
double flatness_score(const Circuit& c, double lo_hz, double hi_hz);

} // namespace lnakit
