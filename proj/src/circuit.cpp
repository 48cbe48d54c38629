#include "lnakit/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace lnakit {

double gm_from_bias(double ic_amps, double temp_k) {
    if (ic_amps <= 0.0 || temp_k <= 0.0)
        throw std::domain_error("gm_from_bias: ic and temperature must be positive");
    return kElectronCharge * ic_amps / (kBoltzmann * temp_k);
}

double cpi_from_ft(double gm_siemens, double omega_t, double cbc_farads) {
    if (gm_siemens <= 0.0 || omega_t <= 0.0)
        throw std::domain_error("cpi_from_ft: gm and omega_t must be positive");
    double cpi = gm_siemens / omega_t - cbc_farads;
    if (cpi <= 0.0)
        throw std::domain_error("cpi_from_ft: cbc exceeds the total transit capacitance");
    return cpi;
}

HybridPiParams HybridPiParams::from_bias(double ic_amps, double ft_hz, double cbc_farads,
                                         double rb_ohms, double beta, double temp_k) {
    HybridPiParams d;
    d.ic = ic_amps;
    d.temp_k = temp_k;
    d.gm = gm_from_bias(ic_amps, temp_k);
    d.cbc = cbc_farads;
    d.cpi = cpi_from_ft(d.gm, 2.0 * M_PI * ft_hz, cbc_farads);
    d.rb = rb_ohms;
    d.beta = beta;
    return d;
}

Component& Circuit::add(const Component& c) {
    components.push_back(c);
    return components.back();
}

static Component two_terminal(ComponentKind kind, const std::string& label, int a,
                              int b, double value) {
    Component c;
    c.kind = kind;
    c.label = label;
    c.nodes[0] = a;
    c.nodes[1] = b;
    c.value = value;
    return c;
}

Component& Circuit::resistor(const std::string& label, int a, int b, double ohms) {
    return add(two_terminal(ComponentKind::resistor, label, a, b, ohms));
}
Component& Circuit::capacitor(const std::string& label, int a, int b, double farads) {
    return add(two_terminal(ComponentKind::capacitor, label, a, b, farads));
}
Component& Circuit::inductor(const std::string& label, int a, int b, double henries) {
    return add(two_terminal(ComponentKind::inductor, label, a, b, henries));
}
Component& Circuit::vsource(const std::string& label, int a, int b, double volts) {
    return add(two_terminal(ComponentKind::vsource, label, a, b, volts));
}
Component& Circuit::isource(const std::string& label, int a, int b, double amps) {
    return add(two_terminal(ComponentKind::isource, label, a, b, amps));
}

Component& Circuit::vccs(const std::string& label, int outp, int outn, int sensep,
                         int sensen, double gm) {
    Component c;
    c.kind = ComponentKind::vccs;
    c.label = label;
    c.nodes[0] = outp;
    c.nodes[1] = outn;
    c.nodes[2] = sensep;
    c.nodes[3] = sensen;
    c.value = gm;
    return add(c);
}

Component& Circuit::bjt(const std::string& label, int base, int collector, int emitter,
                        const HybridPiParams& model) {
    Component c;
    c.kind = ComponentKind::bjt;
    c.label = label;
    c.nodes[0] = base;
    c.nodes[1] = collector;
    c.nodes[2] = emitter;
    c.model = model;
    return add(c);
}

static int node_count_of(const Component& c) {
    switch (c.kind) {
    case ComponentKind::vccs: return 4;
    case ComponentKind::bjt: return 3;
    default: return 2;
    }
}

int Circuit::max_node() const {
    int m = 0;
    for (const auto& c : components)
        for (int i = 0; i < node_count_of(c); ++i)
            m = std::max(m, c.nodes[i]);
    for (const auto& p : ports)
        m = std::max({m, p.npos, p.nneg});
    return m;
}

bool Circuit::has_devices() const {
    return std::any_of(components.begin(), components.end(), [](const Component& c) {
        return c.kind == ComponentKind::bjt;
    });
}

const Component* Circuit::find(const std::string& label) const {
    for (const auto& c : components)
        if (c.label == label) return &c;
    return nullptr;
}

Circuit expand_devices(const Circuit& c) {
    Circuit out;
    out.title = c.title;
    out.ports = c.ports;
    out.shots = c.shots;
    int next_node = c.max_node() + 1;

    for (const auto& comp : c.components) {
        if (comp.kind != ComponentKind::bjt) {
            out.add(comp);
            continue;
        }
        const HybridPiParams& d = comp.model;
        if (d.gm <= 0.0 || d.cpi <= 0.0)
            throw std::invalid_argument("expand_devices: device " + comp.label +
                                        " needs positive gm and cpi");
        int b = comp.nodes[0], col = comp.nodes[1], e = comp.nodes[2];

        // internal base node, merged away when rb is zero
        int bp = b;
        if (d.rb > 0.0) {
            bp = next_node++;
            out.resistor(comp.label + ".rb", b, bp, d.rb);
        }
        if (std::isfinite(d.beta)) {
            // r_pi carries no thermal source: base shot noise is the model
            out.resistor(comp.label + ".rpi", bp, e, d.beta / d.gm).thermal_noise = false;
        }
        out.capacitor(comp.label + ".cpi", bp, e, d.cpi);
        if (d.cbc > 0.0)
            out.capacitor(comp.label + ".cbc", bp, col, d.cbc);
        if (std::isfinite(d.ro))
            out.resistor(comp.label + ".ro", col, e, d.ro).thermal_noise = false;
        out.vccs(comp.label + ".gm", col, e, bp, e, d.gm);

        if (d.ic > 0.0) {
            double ib = std::isfinite(d.beta) ? d.ic / d.beta : 0.0;
            if (ib > 0.0) out.shots.push_back({bp, e, ib});
            out.shots.push_back({col, e, d.ic});
        }
    }
    return out;
}

void validate(const Circuit& c) {
    std::set<std::string> labels;
    std::map<int, int> touch; // node -> terminal count
    for (const auto& comp : c.components) {
        if (comp.label.empty())
            throw std::invalid_argument("validate: component without a label");
        if (!labels.insert(comp.label).second)
            throw std::invalid_argument("validate: duplicate label " + comp.label);
        switch (comp.kind) {
        case ComponentKind::resistor:
        case ComponentKind::capacitor:
        case ComponentKind::inductor:
            if (!(comp.value > 0.0))
                throw std::invalid_argument("validate: " + comp.label +
                                            " needs a positive value");
            break;
        default:
            break;
        }
        for (int i = 0; i < node_count_of(comp); ++i)
            ++touch[comp.nodes[i]];
    }
    for (const auto& p : c.ports) {
        ++touch[p.npos];
        ++touch[p.nneg];
    }
    for (const auto& [node, count] : touch) {
        if (node != 0 && count < 2)
            throw std::invalid_argument("validate: node " + std::to_string(node) +
                                        " is dangling");
    }
}

} // namespace lnakit
