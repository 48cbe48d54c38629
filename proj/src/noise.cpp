#include "lnakit/noise.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lnakit {

double voltage_noise_density(const HybridPiParams& d, double le, double w) {
    double ib = std::isfinite(d.beta) ? d.ic / d.beta : 0.0;
    double wt = d.omega_t();
    double wl = w * le;
    return 4.0 * kBoltzmann * d.temp_k * d.rb +
           2.0 * kElectronCharge * d.ic / (d.gm * d.gm) +
           2.0 * kElectronCharge * ib * wl * wl +
           (w * w) / (wt * wt) * 2.0 * kElectronCharge * d.ic * wl * wl;
}

double current_noise_density(const HybridPiParams& d, double w) {
    double ib = std::isfinite(d.beta) ? d.ic / d.beta : 0.0;
    double wt = d.omega_t();
    return 2.0 * kElectronCharge * ib +
           (w * w) / (wt * wt) * 2.0 * kElectronCharge * d.ic;
}

NoiseParameters noise_parameters(const HybridPiParams& d, double le, double w) {
    double wt = d.omega_t();
    double inv_beta = std::isfinite(d.beta) ? 1.0 / d.beta : 0.0;
    double gn = d.gm * inv_beta + w * w * d.gm / (wt * wt);

    NoiseParameters np;
    np.gn = gn;
    np.rn = d.rb + 0.5 * gn * w * w * le * le + 1.0 / (2.0 * d.gm) -
            (w / wt) * w * le;
    if (np.rn < 0.0)
        throw std::domain_error("noise_parameters: negative equivalent noise "
                                "resistance, model out of its validity range");
    double re = std::sqrt(2.0 * gn * d.rb + inv_beta) / gn;
    double im = w / (wt * d.gm * inv_beta + w * w * d.gm / wt) - w * le;
    np.zopt = {re, im};
    np.nfmin = 1.0 + 2.0 * std::sqrt(gn + inv_beta);
    return np;
}

double nf_from_params(const NoiseParameters& np, std::complex<double> zs) {
    double rs = zs.real();
    if (!(rs > 0.0))
        throw std::domain_error("nf_from_params: Re(Zs) must be positive");
    return np.nfmin + (2.0 * np.gn / rs) * std::norm(np.zopt - zs);
}

std::vector<double> noise_figure_oracle(const Circuit& c, const FrequencyGrid& grid,
                                        std::complex<double> zs,
                                        bool disable_device_noise) {
    if (c.ports.empty())
        throw std::invalid_argument("noise_figure_oracle: circuit has no ports");
    double rs = zs.real();
    if (!(rs > 0.0))
        throw std::domain_error("noise_figure_oracle: Re(Zs) must be positive");

    Circuit base = expand_devices(c);
    for (auto& comp : base.components)
        if (comp.kind == ComponentKind::vsource || comp.kind == ComponentKind::isource)
            comp.value = 0.0;

    const Port pin = base.ports[0];
    const Port pout = base.ports.size() >= 2 ? base.ports[1] : base.ports[0];
    for (size_t i = 1; i < base.ports.size(); ++i) {
        const Port& tp = base.ports[i];
        base.resistor("_noise_rt" + std::to_string(i), tp.npos, tp.nneg, tp.z0)
            .thermal_noise = false;
    }

    struct Src {
        int np, nn;
        double psd;
    };

    std::vector<double> out;
    out.reserve(grid.hz.size());
    for (double f : grid.hz) {
        double w = 2.0 * M_PI * f;
        Circuit net = base;

        // source impedance at the input port; its thermal noise is the
        // reference, injected explicitly below
        int rs_neg = pin.nneg;
        if (zs.imag() != 0.0) {
            int aux = net.max_node() + 1;
            rs_neg = aux;
            if (zs.imag() > 0.0)
                net.inductor("_noise_xs", aux, pin.nneg, zs.imag() / w);
            else
                net.capacitor("_noise_xs", aux, pin.nneg, -1.0 / (w * zs.imag()));
        }
        net.resistor("_noise_rs", pin.npos, rs_neg, rs).thermal_noise = false;

        std::vector<Src> srcs;
        srcs.push_back({pin.npos, rs_neg, 4.0 * kBoltzmann * kRoomTempK / rs});
        if (!disable_device_noise) {
            for (const auto& comp : net.components)
                if (comp.kind == ComponentKind::resistor && comp.thermal_noise)
                    srcs.push_back({comp.nodes[0], comp.nodes[1],
                                    4.0 * kBoltzmann * kRoomTempK / comp.value});
            for (const auto& sh : net.shots)
                srcs.push_back({sh.npos, sh.nneg, 2.0 * kElectronCharge * sh.current});
        }

        MnaPencil p = assemble(net);
        Eigen::MatrixXcd a =
            p.G.cast<std::complex<double>>() +
            std::complex<double>(0.0, w) * p.C.cast<std::complex<double>>();
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);

        int op = pout.npos == 0 ? -1 : p.row_of_node(pout.npos);
        int on = pout.nneg == 0 ? -1 : p.row_of_node(pout.nneg);

        double total = 0.0, ref = 0.0;
        for (size_t k = 0; k < srcs.size(); ++k) {
            Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(p.dim());
            int rp = srcs[k].np == 0 ? -1 : p.row_of_node(srcs[k].np);
            int rn = srcs[k].nn == 0 ? -1 : p.row_of_node(srcs[k].nn);
            if (rp >= 0) rhs(rp) += 1.0;
            if (rn >= 0) rhs(rn) -= 1.0;
            Eigen::VectorXcd x = lu.solve(rhs);
            std::complex<double> h = (op >= 0 ? x(op) : std::complex<double>(0.0)) -
                                     (on >= 0 ? x(on) : std::complex<double>(0.0));
            double pw = srcs[k].psd * std::norm(h);
            total += pw;
            if (k == 0) ref = pw;
        }
        if (!(ref > 0.0))
            throw singular_error("noise_figure_oracle: source noise does not reach "
                                 "the output at " + std::to_string(f) + " Hz");
        out.push_back(total / ref);
    }
    return out;
}

double friis_cascade(const std::vector<std::pair<double, double>>& stages) {
    if (stages.empty()) throw std::domain_error("friis_cascade: empty cascade");
    double f = 0.0, g = 1.0;
    bool first = true;
    for (const auto& [fk, gk] : stages) {
        if (!(fk >= 1.0))
            throw std::domain_error("friis_cascade: stage F below 1");
        if (!(gk > 0.0))
            throw std::domain_error("friis_cascade: stage gain must be positive");
        if (first) {
            f = fk;
            first = false;
        } else {
            f += (fk - 1.0) / g;
        }
        g *= gk;
    }
    return f;
}

} // namespace lnakit
