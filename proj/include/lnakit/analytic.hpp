#pragma once

#include <complex>
#include <string>

#include "lnakit/circuit.hpp"
#include "lnakit/polezero.hpp"

namespace lnakit {

// Degenerated common-emitter input stage, idealized device: no r_pi, no
// feedback cap. The closed forms below are written against exactly this
// reduction.
struct InputStageParams {
    double rb = 5.0;    // ohms
    double gm = 0.04;   // siemens
    double cpi = 0.0;   // farads
    double l = 0.0;     // henries, emitter degeneration
    double rs = 50.0;   // ohms, source resistance
};

// Shunt-feedback output stage around the third device.
struct OutputStageParams {
    double gm3 = 0.0;   // siemens
    double rf = 0.0;    // ohms,   collector-base feedback R
    double lf = 0.0;    // henries, collector-base feedback L
    double r2 = 0.0;    // ohms,   emitter network R
    double c4 = 0.0;    // farads, emitter network C
    double rl = 50.0;   // ohms, load
    double l4 = 0.0;    // henries, shunt load inductor
    double cpi3 = 0.0;  // farads
};

struct PowerBudget {
    double vcc1 = 0.0;
    double vcc2 = 0.0;
    double i1 = 0.0;
    double i2 = 0.0;
    double ic = 0.0;
};

struct PowerComparison {
    double p_two_stage = 0.0; // vcc1 (i1 + i2)
    double p_reuse = 0.0;     // vcc2 ic
    double ratio = 0.0;       // p_reuse / p_two_stage
};

// Throws std::domain_error when the two-stage budget is zero.
PowerComparison power_comparison(const PowerBudget& b);

// Product of the two stage transconductances; identical for the stacked and
// the two-stage arrangement by construction. Note the units come out as S^2;
// the per-stage statement "cascode transadmittance ~ gm1" is the part that
// survives a numeric check.
double effective_gm(double gm1, double gm3);

// Zin = rb + 1/(jw cpi) + jwL + L gm / cpi
std::complex<double> zin_analytic(const InputStageParams& p, double w);

// i_out/v_s of the degenerated stage in its hand-derived design form:
//   gm / [ ((rs + rb + L gm/cpi) s cpi + 1 + s^2 L cpi) (1 + gm s L) ]
// The trailing (1 + gm s L) factor is part of that form and is kept
// verbatim; the physical circuit's denominator is only the quadratic
// bracket (see the oracle tests). simplified=true drops the
// "1 + s^2 L cpi" terms of the bracket, the band-limited reduction used
// to read off the pole pair.
RationalTF input_stage_tf(const InputStageParams& p, bool simplified = false);

// The claimed pole pair {0, -1/(gm L)} of the simplified response.
// l = 0 keeps only the origin pole (the finite one runs off to -inf).
PoleZeroSet input_stage_poles(const InputStageParams& p);

// Hand-derived zero/pole design formulas of the feedback output stage,
// kept verbatim:
//   Z0 = 0
//   Z1 = -(gm3 r2 + 2 - gm3 rf) / (gm3 lf + (gm3 rf - 2) r2)
//   Z2 = -rf/lf
//   P2 = -rf rl (1 + gm3 r2) /
//        [ rl (1 + gm3 r2) lf + c4 (rl rf + r2 rl rf) + rf rl gm3 l4 ]
// Throws std::domain_error naming the vanishing denominator symbol. These
// forms have known defects (Z1 is not even dimensionally a frequency);
// compare against zeros_of on the built output stage before trusting any
// of them (see tests and the discrepancy suite).
PoleZeroSet output_stage_zeros_pole(const OutputStageParams& p);

enum class TopologyKind {
    two_stage,     // cascode first stage, separately fed second stage
    current_reuse, // second stage stacked on the cascode bias current
    input_stage,   // degenerated CE stage alone, idealized device
    output_stage,  // feedback output stage alone
    full_lna,      // current-reuse core plus dual feedback and shunt load
};

// Complete element set for the two- and three-transistor topologies.
struct LnaParams {
    HybridPiParams q1; // degenerated CE
    HybridPiParams q2; // cascode CB
    HybridPiParams q3; // output CE
    double l1 = 0.0;   // emitter degeneration
    double r1 = 0.0;   // cascode base bias (to AC ground)
    double l2 = 0.0;   // interstage / stacking inductor
    double c2 = 0.0;   // interstage coupling
    double c3 = 0.0;   // mid-node bypass (current-reuse and full only)
    double r2 = 0.0;   // output emitter network (full only)
    double c4 = 0.0;
    double rf = 0.0;   // feedback branch (full only)
    double lf = 0.0;
    double l4 = 0.0;   // shunt load inductor (full only)
};

struct TopologyParams {
    InputStageParams input;
    OutputStageParams output;
    LnaParams lna;
};

// Small-signal circuit with 50-ohm ports for the requested arrangement.
// Bias networks appear as their AC equivalents: bias feeds open, bypass and
// coupling caps as plain capacitors, self-bias resistors as resistors.
// Throws std::invalid_argument when a needed element value is missing.
Circuit build_topology(TopologyKind kind, const TopologyParams& p);

TopologyKind topology_from_name(const std::string& name); // throws on unknown
std::string topology_name(TopologyKind kind);

// Primitive per-design values shipped in designs/*.json: bias points and
// passives, with the derived elements (gm, cpi, l1, and the feedback pair)
// materialized by lna_params().
struct LnaDesign {
    double ic1 = 0.0, ft1 = 0.0; // shared by q1/q2
    double ic3 = 0.0, ft3 = 0.0;
    double cbc1 = 0.0, cbc3 = 0.0;
    double rb = 5.0;
    double beta = 150.0;
    double r1 = 0.0, l2 = 0.0, c2 = 0.0, c3 = 0.0;
    double r2 = 0.0, c4 = 0.0;
    double rf = 0.0, lf = 0.0, l4 = 0.0;
    double match_target = 50.0; // drives l1 = (target - rb) cpi1 / gm1

    LnaParams lna_params() const;
    InputStageParams input_params() const;
    OutputStageParams output_params() const;
};

} // namespace lnakit
