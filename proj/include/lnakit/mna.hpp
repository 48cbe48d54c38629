#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lnakit/circuit.hpp"

namespace lnakit {

struct singular_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Frequency-domain pencil (G + s C) x = b. Unknowns are node voltages for
// every non-ground node (remapped to contiguous indices) followed by branch
// currents for inductors and voltage sources.
struct MnaPencil {
    Eigen::MatrixXd G;
    Eigen::MatrixXd C;
    Eigen::VectorXd b;
    std::map<int, int> node_index;            // circuit node id -> row
    std::map<std::string, int> branch_index;  // V/L label -> row
    std::vector<std::string> row_names;       // "v(n)" / "i(label)"

    int dim() const { return static_cast<int>(G.rows()); }
    int row_of_node(int node) const; // -1 for ground
    int row_of_branch(const std::string& label) const; // throws if absent
};

// Stamp the expanded circuit. Throws std::invalid_argument if unexpanded
// devices remain, singular_error on a loop of voltage sources.
MnaPencil assemble(const Circuit& c);

// LU solve of (G + j w C) x = b at one frequency. Checks the residual
// against 1e-10 * ||b|| and throws singular_error when the factorization
// fails to deliver it.
Eigen::VectorXcd solve_ac(const MnaPencil& p, double f_hz);

std::complex<double> voltage_at(const MnaPencil& p, const Eigen::VectorXcd& x, int node);
std::complex<double> branch_current(const MnaPencil& p, const Eigen::VectorXcd& x,
                                    const std::string& label);

struct FrequencyGrid {
    std::vector<double> hz;
    static FrequencyGrid log_points(double lo_hz, double hi_hz, int n);
    static FrequencyGrid linear_points(double lo_hz, double hi_hz, int n);
};

struct TwoPortSweep {
    std::vector<double> freq_hz;
    std::vector<Eigen::Matrix2cd> s; // s[k](i,j) = S_{i+1,j+1}
    double z0[2] = {50.0, 50.0};
};

// S-parameters by port excitation: drive port j with a source behind z0j,
// terminate the other port, read reflected/transmitted waves. Requires
// exactly two ports. Independent sources inside the circuit are nulled.
TwoPortSweep two_port_sparams(const Circuit& c, const FrequencyGrid& grid);

// Impedance looking into a port: unit current injection with internal
// sources nulled and every other port terminated in its z0.
std::complex<double> input_impedance(const Circuit& c, int port, double f_hz);

struct StabilityReport {
    std::vector<double> k;         // Rollett factor, +inf where |S12 S21| = 0
    std::vector<double> delta_mag; // |S11 S22 - S12 S21|
};
StabilityReport stability(const TwoPortSweep& sw);

// Group delay of S21, -d(phase)/d(omega), phase unwrapped across the sweep.
// Three-point quadratic-fit derivative: second order on interior points and
// at the one-sided ends, valid on nonuniform grids.
std::vector<double> group_delay(const TwoPortSweep& sw);

// Half the |S21| dB ripple over [lo, hi]. Throws std::domain_error when the
// band reaches outside the swept range or holds fewer than two points.
double gain_flatness(const TwoPortSweep& sw, double lo_hz, double hi_hz);

// freq_hz,s11_re,s11_im,...,s22_im rows, 9 significant digits
std::string sparams_csv(const TwoPortSweep& sw);
// freq_hz,s21_db,nf_db,k,delta_mag,group_delay_s; nf_db may be empty (zeros)
std::string derived_csv(const TwoPortSweep& sw, const std::vector<double>& nf_db);
// Touchstone v1, "# HZ S RI R <z0>"
std::string touchstone_s2p(const TwoPortSweep& sw);

} // namespace lnakit
