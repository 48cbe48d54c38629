#include "lnakit/analytic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lnakit {

namespace {

// conv of ascending polynomials, exact-zero high-order tail removed
std::vector<double> poly_mul(const std::vector<double>& a,
                             const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            out[i + j] += a[i] * b[j];
    while (out.size() > 1 && out.back() == 0.0) out.pop_back();
    return out;
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string("build_topology: ") + what +
                                    " must be positive");
}

void require_device(const HybridPiParams& q, const char* name) {
    if (!(q.gm > 0.0) || !(q.cpi > 0.0))
        throw std::invalid_argument(std::string("build_topology: device ") +
                                    name + " needs gm > 0 and cpi > 0");
}

// Shared cascode front end: degenerated CE under a CB device whose base is
// grounded through its bias resistor. Port 1 lands on the CE base.
// Nodes: 2 base, 3 emitter, 4 stack, 5 CB base, 6 cascode output.
void front_end(Circuit& c, const LnaParams& p) {
    require_device(p.q1, "Q1");
    require_device(p.q2, "Q2");
    require_positive(p.l1, "L1");
    require_positive(p.r1, "R1");
    c.bjt("Q1", 2, 4, 3, p.q1);
    c.inductor("L1", 3, 0, p.l1);
    c.bjt("Q2", 5, 6, 4, p.q2);
    c.resistor("R1", 5, 0, p.r1);
    c.ports.push_back(Port{2, 0, 50.0});
}

} // namespace

PowerComparison power_comparison(const PowerBudget& b) {
    PowerComparison pc;
    pc.p_two_stage = b.vcc1 * (b.i1 + b.i2);
    pc.p_reuse = b.vcc2 * b.ic;
    if (pc.p_two_stage == 0.0)
        throw std::domain_error("power_comparison: two-stage budget is zero");
    pc.ratio = pc.p_reuse / pc.p_two_stage;
    return pc;
}

double effective_gm(double gm1, double gm3) { return gm1 * gm3; }

std::complex<double> zin_analytic(const InputStageParams& p, double w) {
    if (!(w > 0.0)) throw std::domain_error("zin_analytic: w must be positive");
    if (!(p.cpi > 0.0))
        throw std::domain_error("zin_analytic: cpi must be positive");
    return {p.rb + p.l * p.gm / p.cpi, w * p.l - 1.0 / (w * p.cpi)};
}

RationalTF input_stage_tf(const InputStageParams& p, bool simplified) {
    // bracket coefficient of s written as (rs+rb) cpi + l gm so the l = 0
    // and cpi = 0 limits stay finite
    const double b1 = (p.rs + p.rb) * p.cpi + p.l * p.gm;
    std::vector<double> bracket;
    if (simplified)
        bracket = {0.0, b1};
    else
        bracket = {1.0, b1, p.l * p.cpi};
    const std::vector<double> tail = {1.0, p.gm * p.l};
    RationalTF tf;
    tf.num = {p.gm};
    tf.den = poly_mul(bracket, tail);
    return tf;
}

PoleZeroSet input_stage_poles(const InputStageParams& p) {
    PoleZeroSet pz;
    const double b1 = (p.rs + p.rb) * p.cpi + p.l * p.gm;
    if (p.gm > 0.0 && p.l > 0.0) {
        pz.poles.push_back({-1.0 / (p.gm * p.l), 0.0});
        pz.poles.push_back({0.0, 0.0});
        pz.gain = (b1 > 0.0) ? 1.0 / (b1 * p.l) : 1.0;
    } else {
        pz.poles.push_back({0.0, 0.0});
        pz.gain = (b1 > 0.0) ? p.gm / b1 : 1.0;
    }
    return pz;
}

PoleZeroSet output_stage_zeros_pole(const OutputStageParams& p) {
    if (p.lf == 0.0)
        throw std::domain_error(
            "output_stage_zeros_pole: lf vanishes, Z2 = -rf/lf is undefined");
    const double z1_den = p.gm3 * p.lf + (p.gm3 * p.rf - 2.0) * p.r2;
    if (z1_den == 0.0)
        throw std::domain_error(
            "output_stage_zeros_pole: Z1 denominator gm3*lf + (gm3*rf - 2)*r2 "
            "vanishes");
    const double p2_den = p.rl * (1.0 + p.gm3 * p.r2) * p.lf +
                          p.c4 * (p.rl * p.rf + p.r2 * p.rl * p.rf) +
                          p.rf * p.rl * p.gm3 * p.l4;
    if (p2_den == 0.0)
        throw std::domain_error(
            "output_stage_zeros_pole: P2 denominator rl*(1+gm3*r2)*lf + "
            "c4*(rl*rf + r2*rl*rf) + rf*rl*gm3*l4 vanishes");

    PoleZeroSet pz;
    pz.zeros.push_back({0.0, 0.0}); // Z0
    pz.zeros.push_back(
        {-(p.gm3 * p.r2 + 2.0 - p.gm3 * p.rf) / z1_den, 0.0}); // Z1
    pz.zeros.push_back({-p.rf / p.lf, 0.0});                   // Z2
    pz.poles.push_back(
        {-p.rf * p.rl * (1.0 + p.gm3 * p.r2) / p2_den, 0.0}); // P2
    pz.gain = 1.0;
    return pz;
}

Circuit build_topology(TopologyKind kind, const TopologyParams& p) {
    Circuit c;
    switch (kind) {
    case TopologyKind::two_stage: {
        c.title = "two-stage cascode + CE";
        front_end(c, p.lna);
        require_device(p.lna.q3, "Q3");
        require_positive(p.lna.l2, "L2");
        require_positive(p.lna.c2, "C2");
        c.inductor("L2", 6, 0, p.lna.l2); // choke load of the first stage
        c.capacitor("C2", 6, 8, p.lna.c2);
        c.bjt("Q3", 8, 10, 0, p.lna.q3);
        c.ports.push_back(Port{10, 0, 50.0});
        break;
    }
    case TopologyKind::current_reuse: {
        c.title = "current-reuse stacked LNA core";
        front_end(c, p.lna);
        require_device(p.lna.q3, "Q3");
        require_positive(p.lna.l2, "L2");
        require_positive(p.lna.c2, "C2");
        require_positive(p.lna.c3, "C3");
        c.inductor("L2", 6, 7, p.lna.l2); // stacking inductor
        c.capacitor("C3", 7, 0, p.lna.c3); // mid-node bypass
        c.capacitor("C2", 6, 8, p.lna.c2); // interstage coupling
        c.bjt("Q3", 8, 10, 7, p.lna.q3);   // emitter rides the bypassed node
        c.ports.push_back(Port{10, 0, 50.0});
        break;
    }
    case TopologyKind::full_lna: {
        c.title = "current-reuse LNA with dual feedback";
        front_end(c, p.lna);
        require_device(p.lna.q3, "Q3");
        require_positive(p.lna.l2, "L2");
        require_positive(p.lna.c2, "C2");
        require_positive(p.lna.c3, "C3");
        require_positive(p.lna.r2, "R2");
        require_positive(p.lna.c4, "C4");
        require_positive(p.lna.rf, "Rf");
        require_positive(p.lna.lf, "L3");
        require_positive(p.lna.l4, "L4");
        c.inductor("L2", 6, 7, p.lna.l2);
        c.capacitor("C3", 7, 0, p.lna.c3);
        c.capacitor("C2", 6, 8, p.lna.c2);
        c.bjt("Q3", 8, 10, 9, p.lna.q3);
        c.resistor("R2", 9, 7, p.lna.r2); // emitter network returns to the
        c.capacitor("C4", 9, 7, p.lna.c4); // bypassed mid node
        c.resistor("Rf", 10, 11, p.lna.rf); // collector-base feedback,
        c.inductor("L3", 11, 8, p.lna.lf);  // resistor in series with L3
        c.inductor("L4", 10, 0, p.lna.l4);  // shunt load
        c.ports.push_back(Port{10, 0, 50.0});
        break;
    }
    case TopologyKind::input_stage: {
        c.title = "degenerated CE input stage";
        if (!(p.input.gm > 0.0) || !(p.input.cpi > 0.0))
            throw std::invalid_argument(
                "build_topology: input stage needs gm > 0 and cpi > 0");
        if (p.input.l < 0.0)
            throw std::invalid_argument("build_topology: L1 must be >= 0");
        if (!(p.input.rs > 0.0))
            throw std::invalid_argument("build_topology: rs must be positive");
        HybridPiParams q;
        q.rb = p.input.rb;
        q.gm = p.input.gm;
        q.beta = std::numeric_limits<double>::infinity();
        q.cpi = p.input.cpi;
        q.cbc = 0.0;
        q.ic = 0.0;
        const int e = (p.input.l > 0.0) ? 2 : 0;
        c.bjt("Q1", 1, 3, e, q);
        if (p.input.l > 0.0) c.inductor("L1", 2, 0, p.input.l);
        // grounded 0 V source: i(VOUT) is the collector output current with
        // the sign of gm*v_be
        c.vsource("VOUT", 0, 3, 0.0);
        c.ports.push_back(Port{1, 0, p.input.rs});
        break;
    }
    case TopologyKind::output_stage: {
        c.title = "shunt-feedback output stage";
        require_positive(p.output.gm3, "gm3");
        require_positive(p.output.rf, "Rf");
        require_positive(p.output.lf, "Lf");
        require_positive(p.output.r2, "R2");
        require_positive(p.output.c4, "C4");
        require_positive(p.output.cpi3, "cpi3");
        require_positive(p.output.rl, "RL");
        if (p.output.l4 < 0.0)
            throw std::invalid_argument("build_topology: L4 must be >= 0");
        // explicit elements, no base resistance: the closed forms above
        // carry none
        c.capacitor("Cpi3", 1, 2, p.output.cpi3);
        c.vccs("Gm3", 3, 2, 1, 2, p.output.gm3);
        c.resistor("R2", 2, 0, p.output.r2);
        c.capacitor("C4", 2, 0, p.output.c4);
        c.resistor("Rf", 3, 4, p.output.rf);
        c.inductor("Lf", 4, 1, p.output.lf);
        c.resistor("RL", 3, 0, p.output.rl);
        if (p.output.l4 > 0.0) c.inductor("L4", 3, 0, p.output.l4);
        c.ports.push_back(Port{1, 0, 50.0});
        c.ports.push_back(Port{3, 0, 50.0});
        break;
    }
    }
    return c;
}

TopologyKind topology_from_name(const std::string& name) {
    if (name == "two_stage") return TopologyKind::two_stage;
    if (name == "current_reuse") return TopologyKind::current_reuse;
    if (name == "input_stage") return TopologyKind::input_stage;
    if (name == "output_stage") return TopologyKind::output_stage;
    if (name == "full_lna") return TopologyKind::full_lna;
    throw std::invalid_argument(
        "unknown topology '" + name +
        "' (expected two_stage, current_reuse, input_stage, output_stage, "
        "or full_lna)");
}

std::string topology_name(TopologyKind kind) {
    switch (kind) {
    case TopologyKind::two_stage: return "two_stage";
    case TopologyKind::current_reuse: return "current_reuse";
    case TopologyKind::input_stage: return "input_stage";
    case TopologyKind::output_stage: return "output_stage";
    case TopologyKind::full_lna: return "full_lna";
    }
    throw std::invalid_argument("unknown topology kind");
}

LnaParams LnaDesign::lna_params() const {
    LnaParams p;
    p.q1 = HybridPiParams::from_bias(ic1, ft1, cbc1, rb, beta);
    p.q2 = p.q1;
    p.q3 = HybridPiParams::from_bias(ic3, ft3, cbc3, rb, beta);
    p.l1 = (match_target - rb) * p.q1.cpi / p.q1.gm;
    p.r1 = r1;
    p.l2 = l2;
    p.c2 = c2;
    p.c3 = c3;
    p.r2 = r2;
    p.c4 = c4;
    p.rf = rf;
    p.lf = lf;
    p.l4 = l4;
    return p;
}

InputStageParams LnaDesign::input_params() const {
    const LnaParams p = lna_params();
    InputStageParams in;
    in.rb = rb;
    in.gm = p.q1.gm;
    in.cpi = p.q1.cpi;
    in.l = p.l1;
    in.rs = 50.0;
    return in;
}

OutputStageParams LnaDesign::output_params() const {
    const LnaParams p = lna_params();
    OutputStageParams out;
    out.gm3 = p.q3.gm;
    out.rf = rf;
    out.lf = lf;
    out.r2 = r2;
    out.c4 = c4;
    out.rl = 50.0;
    out.l4 = l4;
    out.cpi3 = p.q3.cpi;
    return out;
}

} // namespace lnakit
