#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "lnakit/mna.hpp"

namespace lnakit {

// Input-referred noise densities of a degenerated common-emitter stage,
// single-sided PSDs. le is the emitter inductance.
double voltage_noise_density(const HybridPiParams& d, double le, double w); // V^2/Hz
double current_noise_density(const HybridPiParams& d, double w);            // A^2/Hz

// Classic two-port noise parameters. nfmin and the figure returned by
// nf_from_params are linear factors (not dB).
struct NoiseParameters {
    double rn = 0.0;                  // ohms
    std::complex<double> zopt;        // ohms
    double nfmin = 1.0;
    double gn = 0.0;                  // siemens, the correlation conductance scale
};

// Closed-form parameters of the degenerated CE stage at one frequency.
// Throws std::domain_error when the formula's Rn comes out negative (the
// expression is only valid well below the transit frequency).
NoiseParameters noise_parameters(const HybridPiParams& d, double le, double w);

// F = Fmin + (2 gn / Re Zs) |Zopt - Zs|^2
double nf_from_params(const NoiseParameters& np, std::complex<double> zs);

// Circuit-level noise figure by source superposition: one LU factorization
// per frequency, one backsolve per noise source. The reference source is a
// thermal resistor Re(zs) attached at port 1; port 2 is terminated in a
// noiseless z0. Thermal current PSD 4kT/R for every resistor that has
// thermal_noise set, plus the circuit's shot sources. Returns linear F per
// grid point. disable_device_noise silences everything but the source.
std::vector<double> noise_figure_oracle(const Circuit& c, const FrequencyGrid& grid,
                                        std::complex<double> zs,
                                        bool disable_device_noise = false);

// Cascade formula over (F, gain) stage pairs, both linear. The last stage's
// gain is not consumed. Throws std::domain_error on an empty list.
double friis_cascade(const std::vector<std::pair<double, double>>& stages);

} // namespace lnakit
