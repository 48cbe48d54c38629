#pragma once

#include <complex>
#include <string>
#include <variant>
#include <vector>

#include "lnakit/mna.hpp"

namespace lnakit {

// Real-coefficient rational function in s, coefficients ascending.
struct RationalTF {
    std::vector<double> num;
    std::vector<double> den;

    std::complex<double> eval(std::complex<double> s) const;
};

struct PoleZeroSet {
    std::vector<std::complex<double>> poles; // rad/s
    std::vector<std::complex<double>> zeros; // rad/s
    double gain = 1.0; // ratio of leading coefficients
};

// Output selector for transfer functions: a node voltage or a branch current.
struct NodeOutput { int node; };
struct BranchOutput { std::string label; };
using OutputSel = std::variant<NodeOutput, BranchOutput>;

// Numeric H(s) from the named independent source to the selected output.
// All other independent sources are zeroed. The response and the pencil
// determinant are sampled at degree+1 points placed on the real and
// imaginary axes at radii spread around the pencil's eigenvalue scale, and
// both polynomials are recovered by weighted least squares. The fit is
// verified against direct solves at held-out points to 1e-8 relative and
// resampled (fresh point set) up to 3 times; if interpolation cannot reach
// that, coefficients are rebuilt from generalized-eigenvalue poles and
// zeros, which handles state counts where a monomial-basis fit runs out of
// double precision. Throws singular_error when no path verifies.
RationalTF transfer_function(const Circuit& c, const std::string& input_source,
                             const OutputSel& output);

// Finite generalized eigenvalues of (-G, C): the circuit's natural
// frequencies. Infinite eigenvalues from rank-deficient C are dropped;
// duplicates within 1e-9 relative collapse to one entry.
std::vector<std::complex<double>> poles_of(const MnaPencil& p);

// Transmission zeros of (input source -> output) via the bordered pencil
//   [ G  b ]      [ C  0 ]
//   [ l  0 ] + s  [ 0  0 ]
// whose finite generalized eigenvalues are the zeros. Robust at any state
// count, unlike polynomial interpolation.
std::vector<std::complex<double>> zeros_of(const Circuit& c,
                                           const std::string& input_source,
                                           const OutputSel& output);

// Companion-matrix roots of num and den after trimming coefficients below
// 1e-14 relative. Roots sorted by (Re, Im); gain = leading-coeff ratio.
PoleZeroSet factor(const RationalTF& tf);

// poles + zeros + gain assembled from the eigenvalue paths (poles_of /
// zeros_of, gain by point match). The robust way to get a PoleZeroSet for
// a full-size circuit.
PoleZeroSet pole_zero_report(const Circuit& c, const std::string& input_source,
                             const OutputSel& output);

struct ResidualEntry {
    std::complex<double> pole;
    std::complex<double> zero; // unset when matched = false
    double rel = 0.0;          // |p - z| / max(|p|, w_ref)
    bool matched = true;       // false: more poles than zeros, no partner left
};

constexpr double kResidualRefOmega = 2.0 * 3.14159265358979323846 * 6.5e9;

// Greedy nearest-neighbor pairing of each pole with an unclaimed zero.
// Residuals are relative, regularized at the origin by kResidualRefOmega.
std::vector<ResidualEntry> cancellation_residual(const PoleZeroSet& pz);

// {"poles":[{"re":..,"im":..}],"zeros":[...],"gain":..,"residuals":[...]}
std::string pole_zero_json(const PoleZeroSet& pz,
                           const std::vector<ResidualEntry>& residuals);

} // namespace lnakit
