#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace lnakit {

constexpr double kElectronCharge = 1.602176634e-19; // C
constexpr double kBoltzmann = 1.380649e-23;         // J/K
constexpr double kRoomTempK = 300.0;

// gm = q Ic / (k T)
double gm_from_bias(double ic_amps, double temp_k = kRoomTempK);

// C_pi from the transit angular frequency: gm / w_t minus the feedback cap
double cpi_from_ft(double gm_siemens, double omega_t, double cbc_farads);

// Small-signal hybrid-pi device model. beta may be +inf (base resistance
// path only through rb, no r_pi branch). ro defaults to infinite (omitted).
struct HybridPiParams {
    double rb = 0.0;   // ohms, base spreading resistance
    double gm = 0.0;   // siemens
    double beta = 150.0;
    double cpi = 0.0;  // farads, base-emitter
    double cbc = 0.0;  // farads, base-collector
    double ic = 0.0;   // amps, bias collector current (drives shot noise)
    double temp_k = kRoomTempK;
    double ro = std::numeric_limits<double>::infinity();

    // construct from bias point: gm from ic, cpi from ft
    static HybridPiParams from_bias(double ic_amps, double ft_hz, double cbc_farads,
                                    double rb_ohms, double beta = 150.0,
                                    double temp_k = kRoomTempK);

    double omega_t() const { return gm / (cpi + cbc); } // rad/s
};

enum class ComponentKind {
    resistor,
    capacitor,
    inductor,
    vccs,
    vsource,
    isource,
    bjt,
};

// One circuit element. Node ids are nonnegative ints, 0 = ground; ids may be
// sparse. nodes[] usage:
//   R/L/C/V/I: [n+, n-]
//   vccs:      [out+, out-, sense+, sense-], value = transconductance
//   bjt:       [base, collector, emitter], model holds the device
struct Component {
    ComponentKind kind;
    std::string label;
    int nodes[4] = {0, 0, 0, 0};
    double value = 0.0;
    HybridPiParams model;
    bool thermal_noise = true; // resistors only; cleared on synthetic r_pi
};

struct Port {
    int npos = 0;
    int nneg = 0;
    double z0 = 50.0;
};

// Shot noise attachment point, PSD = 2 q I (A^2/Hz), single-sided.
struct ShotSource {
    int npos = 0;
    int nneg = 0;
    double current = 0.0; // amps, DC bias current through the junction
};

struct Circuit {
    std::string title;
    std::vector<Component> components;
    std::vector<Port> ports;
    std::vector<ShotSource> shots;

    Component& add(const Component& c);
    Component& resistor(const std::string& label, int a, int b, double ohms);
    Component& capacitor(const std::string& label, int a, int b, double farads);
    Component& inductor(const std::string& label, int a, int b, double henries);
    Component& vccs(const std::string& label, int outp, int outn, int sensep,
                    int sensen, double gm);
    Component& vsource(const std::string& label, int a, int b, double volts);
    Component& isource(const std::string& label, int a, int b, double amps);
    Component& bjt(const std::string& label, int base, int collector, int emitter,
                   const HybridPiParams& model);

    int max_node() const;
    bool has_devices() const; // any unexpanded bjt left
    const Component* find(const std::string& label) const;
};

// Replace every bjt with its hybrid-pi elements. Internal base nodes are
// allocated above max_node(). Synthetic r_pi resistors carry no thermal
// noise (the shot pair models the junction); rb stays thermal. Shot sources
// are appended when the model has a bias current. Idempotent on circuits
// without devices.
Circuit expand_devices(const Circuit& c);

// Structural checks: duplicate labels, nonpositive R/L/C values, nodes that
// appear on only one terminal (dangling). Throws std::invalid_argument.
void validate(const Circuit& c);

} // namespace lnakit
