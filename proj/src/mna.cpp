#include "lnakit/mna.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace lnakit {

namespace {

std::string fmt9(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

int terminal_count(const Component& c) {
    switch (c.kind) {
    case ComponentKind::vccs: return 4;
    case ComponentKind::bjt: return 3;
    default: return 2;
    }
}

// union-find over node ids, for voltage-source loop detection
struct NodeSets {
    std::map<int, int> parent;
    int find(int x) {
        auto it = parent.emplace(x, x).first;
        while (it->second != x) {
            x = it->second;
            it = parent.find(x);
        }
        return x;
    }
    bool unite(int a, int b) {
        int ra = find(a), rb = find(b);
        if (ra == rb) return false;
        parent[ra] = rb;
        return true;
    }
};

} // namespace

int MnaPencil::row_of_node(int node) const {
    if (node == 0) return -1;
    auto it = node_index.find(node);
    if (it == node_index.end())
        throw std::invalid_argument("row_of_node: unknown node " + std::to_string(node));
    return it->second;
}

int MnaPencil::row_of_branch(const std::string& label) const {
    auto it = branch_index.find(label);
    if (it == branch_index.end())
        throw std::invalid_argument("row_of_branch: no branch current for " + label);
    return it->second;
}

MnaPencil assemble(const Circuit& c) {
    MnaPencil p;

    std::set<int> nodes;
    for (const auto& comp : c.components) {
        if (comp.kind == ComponentKind::bjt)
            throw std::invalid_argument("assemble: expand devices first (" + comp.label +
                                        ")");
        for (int i = 0; i < terminal_count(comp); ++i)
            if (comp.nodes[i] != 0) nodes.insert(comp.nodes[i]);
    }
    for (const auto& port : c.ports) {
        if (port.npos != 0) nodes.insert(port.npos);
        if (port.nneg != 0) nodes.insert(port.nneg);
    }

    int idx = 0;
    for (int n : nodes) p.node_index[n] = idx++;
    const int nn = idx;

    int nb = 0;
    for (const auto& comp : c.components)
        if (comp.kind == ComponentKind::inductor || comp.kind == ComponentKind::vsource)
            p.branch_index[comp.label] = nn + nb++;

    const int dim = nn + nb;
    p.G = Eigen::MatrixXd::Zero(dim, dim);
    p.C = Eigen::MatrixXd::Zero(dim, dim);
    p.b = Eigen::VectorXd::Zero(dim);

    p.row_names.resize(dim);
    for (const auto& [node, row] : p.node_index)
        p.row_names[row] = "v(" + std::to_string(node) + ")";
    for (const auto& [label, row] : p.branch_index)
        p.row_names[row] = "i(" + label + ")";

    auto row = [&](int node) { return node == 0 ? -1 : p.node_index.at(node); };
    auto add = [&](Eigen::MatrixXd& m, int r, int cc, double v) {
        if (r >= 0 && cc >= 0) m(r, cc) += v;
    };

    NodeSets vloops;
    for (const auto& comp : c.components) {
        int a = row(comp.nodes[0]);
        int b = row(comp.nodes[1]);
        switch (comp.kind) {
        case ComponentKind::resistor: {
            double g = 1.0 / comp.value;
            add(p.G, a, a, g);
            add(p.G, b, b, g);
            add(p.G, a, b, -g);
            add(p.G, b, a, -g);
            break;
        }
        case ComponentKind::capacitor: {
            add(p.C, a, a, comp.value);
            add(p.C, b, b, comp.value);
            add(p.C, a, b, -comp.value);
            add(p.C, b, a, -comp.value);
            break;
        }
        case ComponentKind::inductor: {
            int br = p.branch_index.at(comp.label);
            add(p.G, a, br, 1.0);
            add(p.G, b, br, -1.0);
            add(p.G, br, a, 1.0);
            add(p.G, br, b, -1.0);
            p.C(br, br) -= comp.value; // v(a) - v(b) - sL i = 0
            break;
        }
        case ComponentKind::vsource: {
            if (!vloops.unite(comp.nodes[0], comp.nodes[1]))
                throw singular_error("assemble: loop of ideal voltage sources through " +
                                     comp.label);
            int br = p.branch_index.at(comp.label);
            add(p.G, a, br, 1.0);
            add(p.G, b, br, -1.0);
            add(p.G, br, a, 1.0);
            add(p.G, br, b, -1.0);
            p.b(br) += comp.value;
            break;
        }
        case ComponentKind::isource: {
            if (a >= 0) p.b(a) += comp.value;
            if (b >= 0) p.b(b) -= comp.value;
            break;
        }
        case ComponentKind::vccs: {
            int sp = row(comp.nodes[2]);
            int sn = row(comp.nodes[3]);
            add(p.G, a, sp, comp.value);
            add(p.G, a, sn, -comp.value);
            add(p.G, b, sp, -comp.value);
            add(p.G, b, sn, comp.value);
            break;
        }
        case ComponentKind::bjt:
            break; // rejected above
        }
    }
    return p;
}

Eigen::VectorXcd solve_ac(const MnaPencil& p, double f_hz) {
    const double w = 2.0 * M_PI * f_hz;
    Eigen::MatrixXcd a =
        p.G.cast<std::complex<double>>() +
        std::complex<double>(0.0, w) * p.C.cast<std::complex<double>>();
    Eigen::VectorXcd rhs = p.b.cast<std::complex<double>>();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    Eigen::VectorXcd x = lu.solve(rhs);
    double resid = (a * x - rhs).norm();
    if (!x.allFinite() || resid > 1e-10 * rhs.norm())
        throw singular_error("solve_ac: singular system at " + fmt9(f_hz) + " Hz");
    return x;
}

std::complex<double> voltage_at(const MnaPencil& p, const Eigen::VectorXcd& x, int node) {
    int r = p.row_of_node(node);
    return r < 0 ? std::complex<double>(0.0, 0.0) : x(r);
}

std::complex<double> branch_current(const MnaPencil& p, const Eigen::VectorXcd& x,
                                    const std::string& label) {
    return x(p.row_of_branch(label));
}

FrequencyGrid FrequencyGrid::log_points(double lo_hz, double hi_hz, int n) {
    if (!(lo_hz > 0.0) || !(hi_hz > lo_hz) || n < 2)
        throw std::invalid_argument("log_points: need 0 < lo < hi and n >= 2");
    FrequencyGrid g;
    g.hz.resize(n);
    double ratio = hi_hz / lo_hz;
    for (int k = 0; k < n; ++k)
        g.hz[k] = lo_hz * std::pow(ratio, static_cast<double>(k) / (n - 1));
    g.hz.front() = lo_hz;
    g.hz.back() = hi_hz;
    return g;
}

FrequencyGrid FrequencyGrid::linear_points(double lo_hz, double hi_hz, int n) {
    if (!(lo_hz > 0.0) || !(hi_hz > lo_hz) || n < 2)
        throw std::invalid_argument("linear_points: need 0 < lo < hi and n >= 2");
    FrequencyGrid g;
    g.hz.resize(n);
    for (int k = 0; k < n; ++k)
        g.hz[k] = lo_hz + (hi_hz - lo_hz) * static_cast<double>(k) / (n - 1);
    g.hz.front() = lo_hz;
    g.hz.back() = hi_hz;
    return g;
}

TwoPortSweep two_port_sparams(const Circuit& c, const FrequencyGrid& grid) {
    if (c.ports.size() != 2)
        throw std::invalid_argument("two_port_sparams: exactly 2 ports required, got " +
                                    std::to_string(c.ports.size()));
    Circuit base = expand_devices(c);
    for (auto& comp : base.components)
        if (comp.kind == ComponentKind::vsource || comp.kind == ComponentKind::isource)
            comp.value = 0.0;

    TwoPortSweep sw;
    sw.freq_hz = grid.hz;
    sw.z0[0] = base.ports[0].z0;
    sw.z0[1] = base.ports[1].z0;
    sw.s.assign(grid.hz.size(), Eigen::Matrix2cd::Zero());

    for (int drv = 0; drv < 2; ++drv) {
        Circuit excited = base;
        const Port& dp = base.ports[drv];
        const Port& tp = base.ports[1 - drv];
        int aux = excited.max_node() + 1;
        excited.resistor("_sweep_rs", dp.npos, aux, dp.z0);
        excited.vsource("_sweep_vs", aux, dp.nneg, 1.0);
        excited.resistor("_sweep_rt", tp.npos, tp.nneg, tp.z0);

        MnaPencil pencil = assemble(excited);
        for (size_t k = 0; k < grid.hz.size(); ++k) {
            Eigen::VectorXcd x = solve_ac(pencil, grid.hz[k]);
            std::complex<double> vd =
                voltage_at(pencil, x, dp.npos) - voltage_at(pencil, x, dp.nneg);
            std::complex<double> vt =
                voltage_at(pencil, x, tp.npos) - voltage_at(pencil, x, tp.nneg);
            sw.s[k](drv, drv) = 2.0 * vd - 1.0;
            sw.s[k](1 - drv, drv) = 2.0 * vt * std::sqrt(dp.z0 / tp.z0);
        }
    }
    return sw;
}

std::complex<double> input_impedance(const Circuit& c, int port, double f_hz) {
    if (port < 0 || port >= static_cast<int>(c.ports.size()))
        throw std::invalid_argument("input_impedance: no port " + std::to_string(port));
    Circuit probe = expand_devices(c);
    for (auto& comp : probe.components)
        if (comp.kind == ComponentKind::vsource || comp.kind == ComponentKind::isource)
            comp.value = 0.0;
    const Port& mp = probe.ports[port];
    for (size_t i = 0; i < probe.ports.size(); ++i) {
        if (static_cast<int>(i) == port) continue;
        const Port& tp = probe.ports[i];
        probe.resistor("_zin_rt" + std::to_string(i), tp.npos, tp.nneg, tp.z0);
    }
    probe.isource("_zin_is", mp.npos, mp.nneg, 1.0);
    MnaPencil pencil = assemble(probe);
    Eigen::VectorXcd x = solve_ac(pencil, f_hz);
    return voltage_at(pencil, x, mp.npos) - voltage_at(pencil, x, mp.nneg);
}

StabilityReport stability(const TwoPortSweep& sw) {
    StabilityReport rep;
    rep.k.reserve(sw.s.size());
    rep.delta_mag.reserve(sw.s.size());
    for (const auto& s : sw.s) {
        std::complex<double> delta = s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0);
        double cross = std::abs(s(0, 1) * s(1, 0));
        rep.delta_mag.push_back(std::abs(delta));
        if (cross == 0.0) {
            rep.k.push_back(std::numeric_limits<double>::infinity());
        } else {
            double k = (1.0 - std::norm(s(0, 0)) - std::norm(s(1, 1)) +
                        std::norm(delta)) /
                       (2.0 * cross);
            rep.k.push_back(k);
        }
    }
    return rep;
}

std::vector<double> group_delay(const TwoPortSweep& sw) {
    const size_t n = sw.freq_hz.size();
    if (n < 3) throw std::domain_error("group_delay: need at least 3 grid points");

    std::vector<double> w(n), phi(n);
    double prev_raw = 0.0;
    for (size_t i = 0; i < n; ++i) {
        w[i] = 2.0 * M_PI * sw.freq_hz[i];
        double raw = std::arg(sw.s[i](1, 0));
        if (i == 0) {
            phi[0] = raw;
        } else {
            double d = raw - prev_raw;
            while (d > M_PI) d -= 2.0 * M_PI;
            while (d < -M_PI) d += 2.0 * M_PI;
            phi[i] = phi[i - 1] + d;
        }
        prev_raw = raw;
    }

    // derivative of the quadratic through three (w, phi) samples, valid on
    // nonuniform grids; reduces to central differences when spacing is even
    auto deriv = [&](size_t i0, size_t i1, size_t i2, double at) {
        double w0 = w[i0], w1 = w[i1], w2 = w[i2];
        return phi[i0] * (2.0 * at - w1 - w2) / ((w0 - w1) * (w0 - w2)) +
               phi[i1] * (2.0 * at - w0 - w2) / ((w1 - w0) * (w1 - w2)) +
               phi[i2] * (2.0 * at - w0 - w1) / ((w2 - w0) * (w2 - w1));
    };

    std::vector<double> tau(n);
    tau[0] = -deriv(0, 1, 2, w[0]);
    for (size_t i = 1; i + 1 < n; ++i) tau[i] = -deriv(i - 1, i, i + 1, w[i]);
    tau[n - 1] = -deriv(n - 3, n - 2, n - 1, w[n - 1]);
    return tau;
}

double gain_flatness(const TwoPortSweep& sw, double lo_hz, double hi_hz) {
    if (sw.freq_hz.empty() || !(lo_hz < hi_hz))
        throw std::domain_error("gain_flatness: empty sweep or inverted band");
    const double eps = 1e-9;
    if (lo_hz < sw.freq_hz.front() * (1.0 - eps) ||
        hi_hz > sw.freq_hz.back() * (1.0 + eps))
        throw std::domain_error("gain_flatness: band outside the swept range");
    double mn = std::numeric_limits<double>::infinity();
    double mx = -std::numeric_limits<double>::infinity();
    int count = 0;
    for (size_t i = 0; i < sw.freq_hz.size(); ++i) {
        double f = sw.freq_hz[i];
        if (f < lo_hz * (1.0 - eps) || f > hi_hz * (1.0 + eps)) continue;
        double db = 20.0 * std::log10(std::abs(sw.s[i](1, 0)));
        mn = std::min(mn, db);
        mx = std::max(mx, db);
        ++count;
    }
    if (count < 2) throw std::domain_error("gain_flatness: fewer than 2 points in band");
    return 0.5 * (mx - mn);
}

std::string sparams_csv(const TwoPortSweep& sw) {
    std::ostringstream os;
    os << "freq_hz,s11_re,s11_im,s12_re,s12_im,s21_re,s21_im,s22_re,s22_im\n";
    for (size_t k = 0; k < sw.freq_hz.size(); ++k) {
        const auto& s = sw.s[k];
        os << fmt9(sw.freq_hz[k]);
        const std::complex<double> order[4] = {s(0, 0), s(0, 1), s(1, 0), s(1, 1)};
        for (const auto& v : order)
            os << ',' << fmt9(v.real()) << ',' << fmt9(v.imag());
        os << '\n';
    }
    return os.str();
}

std::string derived_csv(const TwoPortSweep& sw, const std::vector<double>& nf_db) {
    if (!nf_db.empty() && nf_db.size() != sw.freq_hz.size())
        throw std::invalid_argument("derived_csv: nf_db length mismatch");
    StabilityReport st = stability(sw);
    std::vector<double> tau = group_delay(sw);
    std::ostringstream os;
    os << "freq_hz,s21_db,nf_db,k,delta_mag,group_delay_s\n";
    for (size_t k = 0; k < sw.freq_hz.size(); ++k) {
        double s21_db = 20.0 * std::log10(std::abs(sw.s[k](1, 0)));
        double nf = nf_db.empty() ? 0.0 : nf_db[k];
        os << fmt9(sw.freq_hz[k]) << ',' << fmt9(s21_db) << ',' << fmt9(nf) << ','
           << fmt9(st.k[k]) << ',' << fmt9(st.delta_mag[k]) << ',' << fmt9(tau[k])
           << '\n';
    }
    return os.str();
}

std::string touchstone_s2p(const TwoPortSweep& sw) {
    std::ostringstream os;
    os << "# HZ S RI R " << fmt9(sw.z0[0]) << "\n";
    for (size_t k = 0; k < sw.freq_hz.size(); ++k) {
        const auto& s = sw.s[k];
        // touchstone two-port order: S11 S21 S12 S22
        const std::complex<double> order[4] = {s(0, 0), s(1, 0), s(0, 1), s(1, 1)};
        os << fmt9(sw.freq_hz[k]);
        for (const auto& v : order)
            os << ' ' << fmt9(v.real()) << ' ' << fmt9(v.imag());
        os << '\n';
    }
    return os.str();
}

} // namespace lnakit
