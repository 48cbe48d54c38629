#include "lnakit/polezero.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace lnakit {

namespace {

using cplx = std::complex<double>;

std::string fmt9(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

cplx horner(const std::vector<double>& c, cplx s) {
    cplx acc(0.0, 0.0);
    for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) acc = acc * s + c[k];
    return acc;
}

struct Prepared {
    Circuit ckt;
    MnaPencil pencil;
    int out_row = -1;
};

Prepared prepare(const Circuit& c, const std::string& input_source,
                 const OutputSel& output) {
    Prepared pr;
    pr.ckt = expand_devices(c);
    bool found = false;
    for (auto& comp : pr.ckt.components) {
        bool is_src = comp.kind == ComponentKind::vsource ||
                      comp.kind == ComponentKind::isource;
        if (comp.label == input_source) {
            if (!is_src)
                throw std::invalid_argument("transfer_function: " + input_source +
                                            " is not an independent source");
            comp.value = 1.0;
            found = true;
        } else if (is_src) {
            comp.value = 0.0;
        }
    }
    if (!found)
        throw std::invalid_argument("transfer_function: no source named " + input_source);
    pr.pencil = assemble(pr.ckt);
    if (const NodeOutput* n = std::get_if<NodeOutput>(&output)) {
        if (n->node == 0)
            throw std::invalid_argument("transfer_function: output at ground is trivial");
        pr.out_row = pr.pencil.row_of_node(n->node);
    } else {
        pr.out_row = pr.pencil.row_of_branch(std::get<BranchOutput>(output).label);
    }
    return pr;
}

// one direct solve at complex s; optionally also the pencil determinant
cplx eval_point(const MnaPencil& p, cplx s, int out_row, cplx* det) {
    Eigen::MatrixXcd a = p.G.cast<cplx>() + s * p.C.cast<cplx>();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
    if (det) *det = lu.determinant();
    Eigen::VectorXcd x = lu.solve(p.b.cast<cplx>());
    return x(out_row);
}

// finite generalized eigenvalues of (-A, B), in the units of the pencil
std::vector<cplx> finite_gen_eigs(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges;
    ges.compute(-a, b, false);
    if (ges.info() != Eigen::Success)
        throw singular_error("finite_gen_eigs: QZ iteration failed");
    std::vector<cplx> out;
    for (int i = 0; i < ges.alphas().size(); ++i) {
        double beta = ges.betas()(i);
        if (beta == 0.0) continue;
        cplx lam = ges.alphas()(i) / beta;
        if (!std::isfinite(lam.real()) || !std::isfinite(lam.imag())) continue;
        if (std::abs(lam) > 1e8) continue; // structurally infinite mode
        out.push_back(lam);
    }
    std::sort(out.begin(), out.end(), [](cplx x, cplx y) {
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    });
    return out;
}

double geomean_scale(const std::vector<cplx>& eigs, double fallback) {
    double acc = 0.0;
    int cnt = 0;
    for (const auto& e : eigs) {
        double a = std::abs(e);
        if (a > 0.0) {
            acc += std::log(a);
            ++cnt;
        }
    }
    return cnt ? std::exp(acc / cnt) : fallback;
}

// weighted least squares for real polynomial coefficients from complex samples
std::vector<double> fit_poly(const std::vector<cplx>& sig, const std::vector<cplx>& val,
                             int ncoef) {
    const int m = static_cast<int>(sig.size());
    double vmax = 0.0;
    for (const auto& v : val) vmax = std::max(vmax, std::abs(v));
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * m, ncoef);
    Eigen::VectorXd rhs(2 * m);
    for (int k = 0; k < m; ++k) {
        double w = vmax > 0.0 ? 1.0 / std::max(std::abs(val[k]), 1e-12 * vmax) : 1.0;
        cplx pw(1.0, 0.0);
        for (int j = 0; j < ncoef; ++j) {
            a(2 * k, j) = w * pw.real();
            a(2 * k + 1, j) = w * pw.imag();
            pw *= sig[k];
        }
        rhs(2 * k) = w * val[k].real();
        rhs(2 * k + 1) = w * val[k].imag();
    }
    Eigen::VectorXd c = a.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
    return std::vector<double>(c.data(), c.data() + c.size());
}

void trim_rel(std::vector<double>& c, double tol = 1e-14) {
    double mx = 0.0;
    for (double v : c) mx = std::max(mx, std::fabs(v));
    if (mx == 0.0) {
        c.assign(1, 0.0);
        return;
    }
    for (double& v : c)
        if (std::fabs(v) <= tol * mx) v = 0.0;
    while (c.size() > 1 && c.back() == 0.0) c.pop_back();
}

// sigma-units polynomial -> s-units via sigma = s/rc
std::vector<double> rescale_down(const std::vector<double>& c, double rc) {
    std::vector<double> out(c.size());
    double f = 1.0;
    for (size_t k = 0; k < c.size(); ++k) {
        out[k] = c[k] * f;
        f /= rc;
    }
    return out;
}

double self_check(const RationalTF& tf, const MnaPencil& p, int out_row, double rc) {
    std::vector<cplx> pts;
    for (int i = 0; i < 10; ++i) {
        double w = rc / 5.0 * std::pow(25.0, i / 9.0);
        pts.emplace_back(0.0, w);
    }
    const cplx dirs[4] = {{0.6, 0.8}, {-0.6, 0.8}, {-0.6, -0.8}, {0.6, -0.8}};
    for (int i = 0; i < 10; ++i) {
        double r = rc / 4.0 * std::pow(16.0, i / 9.0);
        pts.push_back(r * dirs[i % 4]);
    }
    std::vector<cplx> direct(pts.size());
    double ymax = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
        direct[i] = eval_point(p, pts[i], out_row, nullptr);
        ymax = std::max(ymax, std::abs(direct[i]));
    }
    if (ymax == 0.0) {
        for (double v : tf.num)
            if (v != 0.0) return std::numeric_limits<double>::infinity();
        return 0.0;
    }
    double worst = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
        double err = std::abs(tf.eval(pts[i]) - direct[i]) /
                     std::max(std::abs(direct[i]), 1e-9 * ymax);
        worst = std::max(worst, err);
    }
    return worst;
}

void normalize_otf(RationalTF& tf) {
    double mx = 0.0;
    for (double v : tf.den) mx = std::max(mx, std::fabs(v));
    if (mx == 0.0) return;
    for (double& v : tf.num) v /= mx;
    for (double& v : tf.den) v /= mx;
}

// expand monic polynomial from roots; conjugate pairs multiplied as real
// quadratics so coefficients stay exactly real
std::vector<double> poly_from_roots(const std::vector<cplx>& roots) {
    std::vector<double> poly{1.0};
    std::vector<cplx> rest;
    for (const auto& r : roots) {
        if (r.imag() == 0.0 ||
            std::fabs(r.imag()) <= 1e-12 * std::max(1.0, std::abs(r))) {
            std::vector<double> nxt(poly.size() + 1, 0.0);
            for (size_t k = 0; k < poly.size(); ++k) {
                nxt[k + 1] += poly[k];
                nxt[k] -= r.real() * poly[k];
            }
            poly = std::move(nxt);
        } else if (r.imag() > 0.0) {
            double b2 = -2.0 * r.real();
            double b1 = std::norm(r);
            std::vector<double> nxt(poly.size() + 2, 0.0);
            for (size_t k = 0; k < poly.size(); ++k) {
                nxt[k + 2] += poly[k];
                nxt[k + 1] += b2 * poly[k];
                nxt[k] += b1 * poly[k];
            }
            poly = std::move(nxt);
        } // negative-imag partner handled with its conjugate
    }
    (void)rest;
    return poly;
}

} // namespace

std::complex<double> RationalTF::eval(std::complex<double> s) const {
    return horner(num, s) / horner(den, s);
}

std::vector<std::complex<double>> poles_of(const MnaPencil& p) {
    if (p.dim() == 0) return {};
    double cn = p.C.norm();
    if (cn == 0.0) return {}; // static network
    double gn = p.G.norm();
    double wc = gn > 0.0 ? gn / cn : 1.0;
    std::vector<cplx> sig = finite_gen_eigs(p.G, wc * p.C);
    std::vector<cplx> out;
    for (const auto& s : sig) {
        cplx lam = s * wc;
        if (!out.empty()) {
            cplx prev = out.back();
            if (std::abs(lam - prev) <= 1e-9 * std::max(std::abs(lam), std::abs(prev)))
                continue; // collapse duplicates
        }
        out.push_back(lam);
    }
    return out;
}

std::vector<std::complex<double>> zeros_of(const Circuit& c,
                                           const std::string& input_source,
                                           const OutputSel& output) {
    Prepared pr = prepare(c, input_source, output);
    const int n = pr.pencil.dim();
    double cn = pr.pencil.C.norm();
    if (cn == 0.0) return {};
    double gn = pr.pencil.G.norm();
    double wc = gn > 0.0 ? gn / cn : 1.0;

    Eigen::MatrixXd ab = Eigen::MatrixXd::Zero(n + 1, n + 1);
    Eigen::MatrixXd bb = Eigen::MatrixXd::Zero(n + 1, n + 1);
    ab.topLeftCorner(n, n) = pr.pencil.G;
    ab.topRightCorner(n, 1) = pr.pencil.b;
    ab(n, pr.out_row) = 1.0;
    bb.topLeftCorner(n, n) = wc * pr.pencil.C;

    std::vector<cplx> sig = finite_gen_eigs(ab, bb);
    std::vector<cplx> out;
    out.reserve(sig.size());
    for (const auto& s : sig) out.push_back(s * wc);
    return out;
}

RationalTF transfer_function(const Circuit& c, const std::string& input_source,
                             const OutputSel& output) {
    Prepared pr = prepare(c, input_source, output);
    const MnaPencil& p = pr.pencil;
    const int dim = p.dim();

    std::vector<cplx> nat = poles_of(p);
    double fallback = p.C.norm() > 0.0 ? p.G.norm() / p.C.norm() : 1.0;
    double rc = geomean_scale(nat, fallback);
    const int m = dim + 1;
    const cplx dirs[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};

    for (int attempt = 0; attempt < 3; ++attempt) {
        uint64_t st = 0x9E3779B97F4A7C15ull * static_cast<uint64_t>(attempt + 1);
        auto next01 = [&st]() {
            st = st * 6364136223846793005ull + 1442695040888963407ull;
            return static_cast<double>((st >> 33) & 0xFFFFFFFFull) / 4294967296.0;
        };

        std::vector<cplx> sig(m), dets(m), nums(m);
        for (int k = 0; k < m; ++k) {
            double t = m > 1 ? static_cast<double>(k) / (m - 1) : 0.5;
            double r = rc / 8.0 * std::pow(64.0, t);
            r *= 1.0 + 0.01 * (next01() - 0.5);
            cplx s = r * dirs[k % 4];
            cplx det;
            cplx y = eval_point(p, s, pr.out_row, &det);
            sig[k] = s / rc;
            dets[k] = det;
            nums[k] = y * det;
        }

        RationalTF tf;
        tf.den = fit_poly(sig, dets, m);
        tf.num = fit_poly(sig, nums, m);
        trim_rel(tf.den);
        trim_rel(tf.num);
        tf.den = rescale_down(tf.den, rc);
        tf.num = rescale_down(tf.num, rc);
        normalize_otf(tf);

        if (self_check(tf, p, pr.out_row, rc) <= 1e-8) return tf;
    }

    // monomial fit ran out of precision at this state count: rebuild the
    // polynomials from generalized-eigenvalue poles and zeros instead
    std::vector<cplx> poles = nat;
    std::vector<cplx> zers = zeros_of(c, input_source, output);

    std::vector<cplx> psig(poles.size()), zsig(zers.size());
    for (size_t i = 0; i < poles.size(); ++i) psig[i] = poles[i] / rc;
    for (size_t i = 0; i < zers.size(); ++i) zsig[i] = zers[i] / rc;

    RationalTF tf;
    tf.den = poly_from_roots(psig);
    tf.num = poly_from_roots(zsig);

    // match the gain at a probe point away from every root
    cplx sp = rc * cplx(0.7331, 1.2344);
    cplx y = eval_point(p, sp, pr.out_row, nullptr);
    cplx g = y * horner(tf.den, sp / rc) / horner(tf.num, sp / rc);
    for (double& v : tf.num) v *= g.real();

    tf.den = rescale_down(tf.den, rc);
    tf.num = rescale_down(tf.num, rc);
    normalize_otf(tf);

    if (self_check(tf, p, pr.out_row, rc) <= 1e-8) return tf;
    throw singular_error("transfer_function: interpolation failed to verify after "
                         "resampling and eigenvalue reconstruction");
}

PoleZeroSet factor(const RationalTF& tf) {
    // Coefficients of a physical s-domain polynomial span many decades, so
    // the 1e-14 relative trim runs on rho-balanced coefficients (rho from
    // the endpoint ratio, i.e. the geometric mean of the root magnitudes),
    // never on the raw s-unit values.
    struct FP {
        std::vector<cplx> roots;
        double lead = 0.0;
        bool zero = true;
    };
    auto run = [](std::vector<double> c) {
        FP fp;
        while (c.size() > 1 && c.back() == 0.0) c.pop_back();
        bool allz = true;
        for (double v : c)
            if (v != 0.0) allz = false;
        if (c.empty() || allz) return fp;
        fp.zero = false;

        size_t stripped = 0;
        while (stripped + 1 < c.size() && c[stripped] == 0.0) {
            fp.roots.emplace_back(0.0, 0.0);
            ++stripped;
        }
        c.erase(c.begin(), c.begin() + stripped);

        int n = static_cast<int>(c.size()) - 1;
        if (n < 1) {
            fp.lead = c[0];
            return fp;
        }
        double rho = std::pow(std::fabs(c.front() / c.back()), 1.0 / n);
        if (!(rho > 0.0) || !std::isfinite(rho)) rho = 1.0;
        std::vector<double> b(c.size());
        double f = 1.0;
        for (size_t k = 0; k < c.size(); ++k) {
            b[k] = c[k] * f;
            f *= rho;
        }
        trim_rel(b);
        size_t more = 0;
        while (more + 1 < b.size() && b[more] == 0.0) {
            fp.roots.emplace_back(0.0, 0.0);
            ++more;
        }
        b.erase(b.begin(), b.begin() + more);

        n = static_cast<int>(b.size()) - 1;
        fp.lead = b[n] / std::pow(rho, static_cast<double>(n));
        if (n < 1) return fp;

        Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
        for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
        for (int i = 0; i < n; ++i) comp(i, n - 1) = -b[i] / b[n];
        Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
        if (es.info() != Eigen::Success)
            throw singular_error("factor: companion eigenvalue iteration failed");
        for (int i = 0; i < n; ++i) fp.roots.push_back(es.eigenvalues()(i) * rho);
        return fp;
    };

    FP den = run(tf.den);
    if (den.zero) throw std::invalid_argument("factor: zero denominator");
    FP num = run(tf.num);

    PoleZeroSet pz;
    pz.poles = den.roots;
    if (num.zero) {
        pz.gain = 0.0;
    } else {
        pz.zeros = num.roots;
        pz.gain = num.lead / den.lead;
    }

    auto by_re_im = [](const cplx& x, const cplx& y) {
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    };
    std::sort(pz.poles.begin(), pz.poles.end(), by_re_im);
    std::sort(pz.zeros.begin(), pz.zeros.end(), by_re_im);
    return pz;
}

PoleZeroSet pole_zero_report(const Circuit& c, const std::string& input_source,
                             const OutputSel& output) {
    Prepared pr = prepare(c, input_source, output);
    PoleZeroSet pz;
    pz.poles = poles_of(pr.pencil);
    pz.zeros = zeros_of(c, input_source, output);

    double fallback = pr.pencil.C.norm() > 0.0 ? pr.pencil.G.norm() / pr.pencil.C.norm()
                                               : 1.0;
    double rc = geomean_scale(pz.poles, fallback);
    cplx sp = rc * cplx(0.7331, 1.2344);
    cplx y = eval_point(pr.pencil, sp, pr.out_row, nullptr);

    // interleave pole and zero factors to keep the running product bounded
    cplx g = y;
    size_t nz = pz.zeros.size();
    for (size_t k = 0; k < pz.poles.size(); ++k) {
        g *= (sp - pz.poles[k]);
        if (k < nz) g /= (sp - pz.zeros[k]);
    }
    for (size_t k = pz.poles.size(); k < nz; ++k) g /= (sp - pz.zeros[k]);
    pz.gain = g.real();
    return pz;
}

std::vector<ResidualEntry> cancellation_residual(const PoleZeroSet& pz) {
    std::vector<bool> used(pz.zeros.size(), false);
    std::vector<ResidualEntry> out;
    out.reserve(pz.poles.size());
    for (const auto& p : pz.poles) {
        int best = -1;
        double bestd = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < pz.zeros.size(); ++i) {
            if (used[i]) continue;
            double d = std::abs(p - pz.zeros[i]);
            if (d < bestd) {
                bestd = d;
                best = static_cast<int>(i);
            }
        }
        ResidualEntry e;
        e.pole = p;
        if (best < 0) {
            e.matched = false;
            e.rel = std::numeric_limits<double>::infinity();
        } else {
            used[best] = true;
            e.zero = pz.zeros[best];
            e.rel = bestd / std::max(std::abs(p), kResidualRefOmega);
        }
        out.push_back(e);
    }
    return out;
}

std::string pole_zero_json(const PoleZeroSet& pz,
                           const std::vector<ResidualEntry>& residuals) {
    std::ostringstream os;
    auto root_list = [&](const std::vector<cplx>& v) {
        os << '[';
        for (size_t i = 0; i < v.size(); ++i) {
            if (i) os << ',';
            os << "{\"re\":" << fmt9(v[i].real()) << ",\"im\":" << fmt9(v[i].imag())
               << '}';
        }
        os << ']';
    };
    os << "{\"poles\":";
    root_list(pz.poles);
    os << ",\"zeros\":";
    root_list(pz.zeros);
    os << ",\"gain\":" << fmt9(pz.gain) << ",\"residuals\":[";
    for (size_t i = 0; i < residuals.size(); ++i) {
        const ResidualEntry& e = residuals[i];
        if (i) os << ',';
        os << "{\"pole\":{\"re\":" << fmt9(e.pole.real())
           << ",\"im\":" << fmt9(e.pole.imag()) << "},\"zero\":";
        if (e.matched)
            os << "{\"re\":" << fmt9(e.zero.real()) << ",\"im\":" << fmt9(e.zero.imag())
               << "},\"rel\":" << fmt9(e.rel);
        else
            os << "null,\"rel\":null";
        os << ",\"matched\":" << (e.matched ? "true" : "false") << '}';
    }
    os << "]}";
    return os.str();
}

} // namespace lnakit
