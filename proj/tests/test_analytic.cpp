#include <doctest.h>

#include <cmath>
#include <complex>

#include "lnakit/analytic.hpp"
#include "lnakit/mna.hpp"
#include "lnakit/polezero.hpp"

using namespace lnakit;
using cplx = std::complex<double>;

namespace {
InputStageParams matched_input() {
    InputStageParams p;
    p.rb = 5.0;
    p.gm = 0.04;
    p.cpi = p.gm / 1.607142857142857e11; // gm/cpi ratio set for a 45 ohm lift
    p.l = 0.28e-9;
    p.rs = 50.0;
    return p;
}

LnaDesign bundled_design() {
    LnaDesign d;
    d.ic1 = 0.0056216;
    d.ft1 = 24.741e9;
    d.ic3 = 0.0049189;
    d.ft3 = 58.043e9;
    d.cbc1 = 5e-15;
    d.cbc3 = 2.5989e-14;
    d.r1 = 150.0;
    d.l2 = 1.9928e-9;
    d.c2 = 2.1746e-12;
    d.c3 = 2.5549e-12;
    d.r2 = 24.786;
    d.c4 = 1.1137e-13;
    d.rf = 32.895;
    d.lf = 2.06327e-9;
    d.l4 = 8.5955e-9;
    return d;
}

double s21_db_at(const Circuit& c, double fhz) {
    const TwoPortSweep sw =
        two_port_sparams(c, FrequencyGrid{std::vector<double>{fhz}});
    return 20.0 * std::log10(std::abs(sw.s[0](1, 0)));
}
} // namespace

TEST_CASE("stacking the stages halves an equal-split supply budget") {
    PowerBudget b;
    b.vcc1 = 1.8;
    b.vcc2 = 1.8;
    b.i1 = 5e-3;
    b.i2 = 5e-3;
    b.ic = 5e-3;
    const PowerComparison pc = power_comparison(b);
    CHECK(pc.p_two_stage == doctest::Approx(0.018).epsilon(1e-12));
    CHECK(pc.p_reuse == doctest::Approx(0.009).epsilon(1e-12));
    CHECK(pc.ratio == 0.5);

    b.ic = 7e-3; // unequal currents scale the ratio linearly
    CHECK(power_comparison(b).ratio == doctest::Approx(0.7).epsilon(1e-12));

    PowerBudget zero;
    CHECK_THROWS_AS(power_comparison(zero), std::domain_error);
}

TEST_CASE("composite transconductance is the stage product") {
    CHECK(effective_gm(0.04, 0.04) == doctest::Approx(1.6e-3).epsilon(1e-15));
}

TEST_CASE("degeneration lifts the input resistance without a resistor") {
    const InputStageParams p = matched_input();
    const double w = 2.0 * M_PI * 6.5e9;
    const cplx z = zin_analytic(p, w);
    CHECK(z.real() == doctest::Approx(50.0).epsilon(1e-12));
    CHECK(z.imag() == doctest::Approx(-86.94334504).epsilon(1e-9));
    // the lift is frequency independent
    CHECK(zin_analytic(p, 2.0 * w).real() ==
          doctest::Approx(z.real()).epsilon(1e-12));
    // and linear in L at fixed gm/cpi
    InputStageParams half = p;
    half.l = p.l / 2.0;
    CHECK(zin_analytic(half, w).real() ==
          doctest::Approx(5.0 + 22.5).epsilon(1e-12));

    CHECK_THROWS_AS(zin_analytic(p, 0.0), std::domain_error);
    InputStageParams bad = p;
    bad.cpi = 0.0;
    CHECK_THROWS_AS(zin_analytic(bad, w), std::domain_error);
}

TEST_CASE("band-limited response form carries the claimed pole pair") {
    const InputStageParams p = matched_input();
    const PoleZeroSet pz = factor(input_stage_tf(p, true));
    REQUIRE(pz.poles.size() == 2);
    bool origin = false, finite = false;
    for (const cplx& s0 : pz.poles) {
        if (std::abs(s0) < 1.0) origin = true;
        if (std::abs(s0 - cplx{-8.9285714285714e10, 0.0}) < 1e2)
            finite = true;
    }
    CHECK(origin);
    CHECK(finite);

    const PoleZeroSet direct = input_stage_poles(p);
    REQUIRE(direct.poles.size() == 2);
    CHECK(direct.poles[0].real() ==
          doctest::Approx(-1.0 / (p.gm * p.l)).epsilon(1e-15));
    CHECK(direct.poles[1] == cplx{0.0, 0.0});
    CHECK(direct.gain == doctest::Approx(1.4349489796e20).epsilon(1e-9));
}

TEST_CASE("no degeneration leaves a single pole") {
    InputStageParams p = matched_input();
    p.l = 0.0;
    const PoleZeroSet pz = input_stage_poles(p);
    REQUIRE(pz.poles.size() == 1);
    CHECK(pz.poles[0] == cplx{0.0, 0.0});
    CHECK(pz.gain == doctest::Approx(p.gm / (55.0 * p.cpi)).epsilon(1e-12));

    // the full form collapses to one pole as well
    const PoleZeroSet full = factor(input_stage_tf(p, false));
    REQUIRE(full.poles.size() == 1);
    CHECK(full.poles[0].real() ==
          doctest::Approx(-1.0 / (55.0 * p.cpi)).epsilon(1e-9));
}

TEST_CASE("full and band-limited forms share the dominant behavior, not the "
          "fine structure") {
    const InputStageParams p = matched_input();
    const RationalTF full = input_stage_tf(p, false);
    const RationalTF simp = input_stage_tf(p, true);
    // at the series resonance 1/sqrt(L cpi) the two dropped bracket terms
    // cancel each other and the forms agree exactly
    const cplx ws{0.0, 1.0 / std::sqrt(p.l * p.cpi)};
    CHECK(std::abs(full.eval(ws) / simp.eval(ws)) ==
          doctest::Approx(1.0).epsilon(1e-9));
    // but at band center the dropped terms are not negligible
    const cplx wc{0.0, 2.0 * M_PI * 6.5e9};
    CHECK(std::abs(full.eval(wc) / simp.eval(wc) - 1.0) > 0.05);
    // this element set stays overdamped: three real poles, one of them the
    // -1/(gm L) tail
    const PoleZeroSet fz = factor(full);
    REQUIRE(fz.poles.size() == 3);
    for (const cplx& s0 : fz.poles)
        CHECK(std::abs(s0.imag()) < 1.0);
    const double tail = 1.0 / (p.gm * p.l);
    double best = 1e300;
    for (const cplx& s0 : fz.poles)
        best = std::min(best, std::abs(s0.real() + tail));
    CHECK(best / tail < 1e-9);
}

TEST_CASE("closed-form output-stage roots at a fixed element set") {
    OutputStageParams p;
    p.gm3 = 0.02;
    p.rf = 300.0;
    p.lf = 1e-9;
    p.r2 = 30.0;
    p.c4 = 1e-13;
    p.rl = 50.0;
    p.l4 = 2e-9;
    const PoleZeroSet pz = output_stage_zeros_pole(p);
    REQUIRE(pz.zeros.size() == 3);
    CHECK(pz.zeros[0] == cplx{0.0, 0.0});
    CHECK(pz.zeros[1].real() == doctest::Approx(0.028333333).epsilon(1e-6));
    CHECK(pz.zeros[2].real() == doctest::Approx(-3e11).epsilon(1e-12));
    REQUIRE(pz.poles.size() == 1);
    CHECK(pz.poles[0].real() ==
          doctest::Approx(-3.3035099794e10).epsilon(1e-9));
}

TEST_CASE("output-stage formula guards name the vanishing denominator") {
    OutputStageParams p;
    p.gm3 = 0.02;
    p.rf = 300.0;
    p.lf = 0.0;
    p.r2 = 30.0;
    CHECK_THROWS_WITH_AS(output_stage_zeros_pole(p),
                         doctest::Contains("lf"), std::domain_error);

    // gm3*rf = 1 exactly, so (gm3*rf - 2) = -1 and r2 = gm3*lf zeroes the
    // Z1 denominator without touching lf
    p.gm3 = 0.25;
    p.rf = 4.0;
    p.lf = 1e-9;
    p.r2 = 0.25 * 1e-9;
    CHECK_THROWS_WITH_AS(output_stage_zeros_pole(p),
                         doctest::Contains("Z1"), std::domain_error);

    p.r2 = 30.0;
    p.rl = 0.0; // every P2 denominator term carries rl or lf
    p.c4 = 1e-13;
    p.l4 = 2e-9;
    CHECK_THROWS_WITH_AS(output_stage_zeros_pole(p),
                         doctest::Contains("P2"), std::domain_error);
}

TEST_CASE("built input stage reproduces the input impedance closed form") {
    const InputStageParams p = matched_input();
    TopologyParams tp;
    tp.input = p;
    const Circuit c = expand_devices(build_topology(TopologyKind::input_stage, tp));
    for (double f : {3.1e9, 6.5e9, 10.6e9}) {
        const cplx zn = input_impedance(c, 0, f);
        const cplx za = zin_analytic(p, 2.0 * M_PI * f);
        CHECK(std::abs(zn - za) <= 1e-9 * std::abs(za));
    }
}

TEST_CASE("cascode transadmittance stays near gm1 well below the corner") {
    const LnaDesign d = bundled_design();
    const LnaParams lp = d.lna_params();
    Circuit c;
    c.vsource("VS", 1, 0, 1.0);
    c.resistor("RS", 1, 2, 1.0);
    c.bjt("Q1", 2, 4, 3, lp.q1);
    c.inductor("L1", 3, 0, lp.l1);
    c.bjt("Q2", 5, 6, 4, lp.q2);
    c.resistor("R1", 5, 0, lp.r1);
    c.vsource("VM", 0, 6, 0.0); // ammeter pins the cascode output to ground
    const MnaPencil pen = assemble(expand_devices(c));
    const Eigen::VectorXcd x = solve_ac(pen, 100e6);
    const double ratio = std::abs(branch_current(pen, x, "VM")) / lp.q1.gm;
    CHECK(ratio > 0.97);
    CHECK(ratio < 1.005);
}

TEST_CASE("a hard mid-node bypass turns the stack into the two-stage") {
    const LnaDesign d = bundled_design();
    TopologyParams tp;
    tp.lna = d.lna_params();
    const Circuit two = build_topology(TopologyKind::two_stage, tp);
    tp.lna.c3 = 1e-6; // near-ideal bypass
    const Circuit reuse = build_topology(TopologyKind::current_reuse, tp);
    for (double f : {4e9, 6.5e9, 9e9}) {
        CHECK(s21_db_at(reuse, f) ==
              doctest::Approx(s21_db_at(two, f)).epsilon(5e-3));
    }
}

TEST_CASE("complete arrangement carries every element of the design") {
    const LnaDesign d = bundled_design();
    TopologyParams tp;
    tp.lna = d.lna_params();
    const Circuit c = build_topology(TopologyKind::full_lna, tp);
    for (const char* label : {"Q1", "Q2", "Q3", "L1", "R1", "L2", "C2", "C3",
                              "R2", "C4", "Rf", "L3", "L4"})
        CHECK(c.find(label) != nullptr);
    CHECK(c.ports.size() == 2);
    CHECK(c.ports[0].z0 == 50.0);
    CHECK(c.ports[1].z0 == 50.0);
    CHECK_NOTHROW(validate(c));
}

TEST_CASE("missing element values are reported by name") {
    const LnaDesign d = bundled_design();
    TopologyParams tp;
    tp.lna = d.lna_params();

    TopologyParams no_l2 = tp;
    no_l2.lna.l2 = 0.0;
    CHECK_THROWS_WITH_AS(build_topology(TopologyKind::two_stage, no_l2),
                         doctest::Contains("L2"), std::invalid_argument);

    TopologyParams no_rf = tp;
    no_rf.lna.rf = 0.0;
    CHECK_THROWS_WITH_AS(build_topology(TopologyKind::full_lna, no_rf),
                         doctest::Contains("Rf"), std::invalid_argument);

    TopologyParams bad_in;
    bad_in.input = matched_input();
    bad_in.input.l = -1e-9;
    CHECK_THROWS_AS(build_topology(TopologyKind::input_stage, bad_in),
                    std::invalid_argument);

    TopologyParams bad_out;
    bad_out.output = d.output_params();
    bad_out.output.cpi3 = 0.0;
    CHECK_THROWS_WITH_AS(build_topology(TopologyKind::output_stage, bad_out),
                         doctest::Contains("cpi3"), std::invalid_argument);
}

TEST_CASE("topology names round-trip") {
    for (TopologyKind k :
         {TopologyKind::two_stage, TopologyKind::current_reuse,
          TopologyKind::input_stage, TopologyKind::output_stage,
          TopologyKind::full_lna})
        CHECK(topology_from_name(topology_name(k)) == k);
    CHECK_THROWS_WITH_AS(topology_from_name("cascode"),
                         doctest::Contains("full_lna"), std::invalid_argument);
}

TEST_CASE("design materialization honors the match target") {
    const LnaDesign d = bundled_design();
    const InputStageParams in = d.input_params();
    CHECK(zin_analytic(in, 2.0 * M_PI * 6.5e9).real() ==
          doctest::Approx(d.match_target).epsilon(1e-12));
    const LnaParams lp = d.lna_params();
    CHECK(in.l == lp.l1);
    CHECK(lp.q2.gm == lp.q1.gm);
    const OutputStageParams out = d.output_params();
    CHECK(out.gm3 == lp.q3.gm);
    CHECK(out.lf == d.lf);
}
