#include "lnakit/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace lnakit {

namespace {

struct Tok {
    std::string text;
    int col; // 1-based
};

std::string lower(const std::string& s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return out;
}

std::vector<Tok> tokenize(const std::string& line) {
    std::vector<Tok> out;
    size_t i = 0;
    while (i < line.size()) {
        unsigned char ch = static_cast<unsigned char>(line[i]);
        if (std::isspace(ch)) {
            ++i;
            continue;
        }
        if (line[i] == '#') break;
        size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) &&
               line[j] != '#')
            ++j;
        out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
        i = j;
    }
    return out;
}

int parse_node(const Tok& t, int line) {
    bool digits = !t.text.empty() &&
                  std::all_of(t.text.begin(), t.text.end(),
                              [](unsigned char ch) { return std::isdigit(ch); });
    if (!digits)
        throw parse_error("node must be a non-negative integer, got '" + t.text + "'",
                          line, t.col);
    try {
        return std::stoi(t.text);
    } catch (const std::out_of_range&) {
        throw parse_error("node id out of range: " + t.text, line, t.col);
    }
}

bool split_kv(const std::string& s, std::string& key, std::string& val) {
    auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 >= s.size()) return false;
    key = lower(s.substr(0, eq));
    val = s.substr(eq + 1);
    return true;
}

double value_of(const Tok& t, int line) {
    try {
        return parse_value(t.text);
    } catch (const std::invalid_argument& e) {
        throw parse_error(e.what(), line, t.col);
    }
}

int terminal_count(const Component& c) {
    switch (c.kind) {
    case ComponentKind::vccs: return 4;
    case ComponentKind::bjt: return 3;
    default: return 2;
    }
}

std::string fmt_exact(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    // max_digits10 so parse(serialize(c)) reproduces every value bitwise
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

double parse_value(const std::string& token) {
    if (token.empty()) throw std::invalid_argument("empty numeric token");
    if (lower(token) == "inf") return std::numeric_limits<double>::infinity();
    const char* begin = token.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) throw std::invalid_argument("not a number: '" + token + "'");
    std::string suffix = lower(end);
    if (suffix.empty()) return v;
    int exp10 = 0;
    if (suffix == "meg") // must win over the single-letter m
        exp10 = 6;
    else if (suffix == "f")
        exp10 = -15;
    else if (suffix == "p")
        exp10 = -12;
    else if (suffix == "n")
        exp10 = -9;
    else if (suffix == "u")
        exp10 = -6;
    else if (suffix == "m")
        exp10 = -3;
    else if (suffix == "k")
        exp10 = 3;
    else if (suffix == "g")
        exp10 = 9;
    else
        throw std::invalid_argument("unknown suffix '" + suffix + "' in '" + token + "'");
    // splice the suffix in as a decimal exponent so the value rounds once
    // ("10f" is exactly 1e-14, not 10 * 1e-15)
    const std::string mantissa(begin, static_cast<std::size_t>(end - begin));
    if (mantissa.find('e') == std::string::npos &&
        mantissa.find('E') == std::string::npos)
        return std::strtod((mantissa + "e" + std::to_string(exp10)).c_str(),
                           nullptr);
    return v * std::pow(10.0, exp10);
}

Circuit parse_netlist(const std::string& text) {
    Circuit ckt;
    std::map<std::string, HybridPiParams> models;
    struct PendingQ {
        size_t index;
        std::string model;
        int line, col;
    };
    std::vector<PendingQ> pending;
    std::set<std::string> labels;
    std::map<int, std::pair<int, int>> node_loc; // first reference, for diagnostics

    auto note_node = [&](int node, int line, int col) {
        node_loc.emplace(node, std::make_pair(line, col));
    };

    int lineno = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t nl = text.find('\n', pos);
        std::string line =
            text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
        pos = (nl == std::string::npos) ? text.size() + 1 : nl + 1;
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto toks = tokenize(line);
        if (toks.empty()) continue;

        std::string head = lower(toks[0].text);
        if (head[0] == '.') {
            if (head == ".title") {
                std::string t;
                for (size_t i = 1; i < toks.size(); ++i) {
                    if (i > 1) t += ' ';
                    t += toks[i].text;
                }
                ckt.title = t;
            } else if (head == ".model") {
                if (toks.size() < 3)
                    throw parse_error(".model needs a name and parameters", lineno,
                                      toks[0].col);
                const std::string& name = toks[1].text;
                if (models.count(name))
                    throw parse_error("duplicate model " + name, lineno, toks[1].col);
                double rb = 0, ic = 0, beta = 0, cpi = 0, cbc = 0, t_k = 300.0;
                bool saw_rb = false, saw_ic = false, saw_beta = false, saw_cpi = false,
                     saw_cbc = false;
                for (size_t i = 2; i < toks.size(); ++i) {
                    std::string k, v;
                    if (!split_kv(toks[i].text, k, v))
                        throw parse_error("expected key=value, got '" + toks[i].text + "'",
                                          lineno, toks[i].col);
                    double num = value_of({v, toks[i].col}, lineno);
                    if (k == "rb") {
                        rb = num;
                        saw_rb = true;
                    } else if (k == "ic") {
                        ic = num;
                        saw_ic = true;
                    } else if (k == "beta") {
                        beta = num;
                        saw_beta = true;
                    } else if (k == "cpi") {
                        cpi = num;
                        saw_cpi = true;
                    } else if (k == "cbc") {
                        cbc = num;
                        saw_cbc = true;
                    } else if (k == "t") {
                        t_k = num;
                    } else {
                        throw parse_error("unknown model key '" + k + "'", lineno,
                                          toks[i].col);
                    }
                }
                if (!(saw_rb && saw_ic && saw_beta && saw_cpi && saw_cbc))
                    throw parse_error(".model " + name + " needs rb, ic, beta, cpi, cbc",
                                      lineno, toks[0].col);
                if (rb < 0.0)
                    throw parse_error("rb must be non-negative", lineno, toks[0].col);
                if (!(beta > 1.0))
                    throw parse_error("beta must exceed 1", lineno, toks[0].col);
                if (!(cpi > 0.0) || !std::isfinite(cpi))
                    throw parse_error("cpi must be positive", lineno, toks[0].col);
                if (cbc < 0.0 || !std::isfinite(cbc))
                    throw parse_error("cbc must be non-negative", lineno, toks[0].col);
                HybridPiParams d;
                try {
                    d.gm = gm_from_bias(ic, t_k);
                } catch (const std::domain_error& e) {
                    throw parse_error(e.what(), lineno, toks[0].col);
                }
                d.rb = rb;
                d.ic = ic;
                d.beta = beta;
                d.cpi = cpi;
                d.cbc = cbc;
                d.temp_k = t_k;
                models[name] = d;
            } else if (head == ".port") {
                if (toks.size() != 4)
                    throw parse_error(".port needs <n+> <n-> z0=<ohms>", lineno,
                                      toks[0].col);
                int np = parse_node(toks[1], lineno);
                note_node(np, lineno, toks[1].col);
                int nn = parse_node(toks[2], lineno);
                note_node(nn, lineno, toks[2].col);
                std::string k, v;
                if (!split_kv(toks[3].text, k, v) || k != "z0")
                    throw parse_error("expected z0=<ohms>, got '" + toks[3].text + "'",
                                      lineno, toks[3].col);
                double z0 = value_of({v, toks[3].col}, lineno);
                if (!(z0 > 0.0) || !std::isfinite(z0))
                    throw parse_error("z0 must be positive", lineno, toks[3].col);
                ckt.ports.push_back({np, nn, z0});
            } else {
                throw parse_error("unknown directive " + toks[0].text, lineno,
                                  toks[0].col);
            }
            continue;
        }

        const std::string& label = toks[0].text;
        char kind = static_cast<char>(std::toupper(static_cast<unsigned char>(label[0])));
        if (!labels.insert(label).second)
            throw parse_error("duplicate label " + label, lineno, toks[0].col);

        switch (kind) {
        case 'R':
        case 'L':
        case 'C':
        case 'V':
        case 'I': {
            if (toks.size() != 4)
                throw parse_error(label + " needs <n+> <n-> <value>", lineno,
                                  toks[0].col);
            int a = parse_node(toks[1], lineno);
            note_node(a, lineno, toks[1].col);
            int b = parse_node(toks[2], lineno);
            note_node(b, lineno, toks[2].col);
            double v = value_of(toks[3], lineno);
            if (kind == 'R' || kind == 'L' || kind == 'C') {
                if (!(v > 0.0) || !std::isfinite(v))
                    throw parse_error(label + " needs a positive finite value", lineno,
                                      toks[3].col);
            } else if (!std::isfinite(v)) {
                throw parse_error(label + " needs a finite value", lineno, toks[3].col);
            }
            if (kind == 'R')
                ckt.resistor(label, a, b, v);
            else if (kind == 'L')
                ckt.inductor(label, a, b, v);
            else if (kind == 'C')
                ckt.capacitor(label, a, b, v);
            else if (kind == 'V')
                ckt.vsource(label, a, b, v);
            else
                ckt.isource(label, a, b, v);
            break;
        }
        case 'G': {
            if (toks.size() != 6)
                throw parse_error(label + " needs <out+> <out-> <sense+> <sense-> <gm>",
                                  lineno, toks[0].col);
            int n[4];
            for (int i = 0; i < 4; ++i) {
                n[i] = parse_node(toks[i + 1], lineno);
                note_node(n[i], lineno, toks[i + 1].col);
            }
            double gm = value_of(toks[5], lineno);
            if (!std::isfinite(gm))
                throw parse_error(label + " needs a finite transconductance", lineno,
                                  toks[5].col);
            ckt.vccs(label, n[0], n[1], n[2], n[3], gm);
            break;
        }
        case 'Q': {
            if (toks.size() != 5)
                throw parse_error(label + " needs <base> <collector> <emitter> model=<name>",
                                  lineno, toks[0].col);
            int n[3];
            for (int i = 0; i < 3; ++i) {
                n[i] = parse_node(toks[i + 1], lineno);
                note_node(n[i], lineno, toks[i + 1].col);
            }
            std::string k, v;
            if (!split_kv(toks[4].text, k, v) || k != "model")
                throw parse_error("expected model=<name>, got '" + toks[4].text + "'",
                                  lineno, toks[4].col);
            ckt.bjt(label, n[0], n[1], n[2], HybridPiParams{});
            pending.push_back({ckt.components.size() - 1, v, lineno, toks[4].col});
            break;
        }
        default:
            throw parse_error("unknown element kind '" + std::string(1, label[0]) + "'",
                              lineno, toks[0].col);
        }
    }

    for (const auto& q : pending) {
        auto it = models.find(q.model);
        if (it == models.end())
            throw parse_error("unknown model " + q.model, q.line, q.col);
        ckt.components[q.index].model = it->second;
    }

    std::map<int, int> touch;
    for (const auto& comp : ckt.components)
        for (int i = 0; i < terminal_count(comp); ++i)
            ++touch[comp.nodes[i]];
    for (const auto& p : ckt.ports) {
        ++touch[p.npos];
        ++touch[p.nneg];
    }
    for (const auto& [node, count] : touch) {
        if (node != 0 && count < 2) {
            auto loc = node_loc[node];
            throw parse_error("dangling node " + std::to_string(node), loc.first,
                              loc.second);
        }
    }
    return ckt;
}

std::string serialize_netlist(const Circuit& c) {
    std::ostringstream os;
    if (!c.title.empty()) os << ".title " << c.title << "\n";
    for (const auto& comp : c.components) {
        if (comp.kind != ComponentKind::bjt) continue;
        const HybridPiParams& d = comp.model;
        os << ".model m_" << comp.label << " rb=" << fmt_exact(d.rb) << " ic=" << fmt_exact(d.ic)
           << " beta=" << fmt_exact(d.beta) << " cpi=" << fmt_exact(d.cpi)
           << " cbc=" << fmt_exact(d.cbc) << " t=" << fmt_exact(d.temp_k) << "\n";
    }
    for (const auto& comp : c.components) {
        switch (comp.kind) {
        case ComponentKind::vccs:
            os << comp.label << ' ' << comp.nodes[0] << ' ' << comp.nodes[1] << ' '
               << comp.nodes[2] << ' ' << comp.nodes[3] << ' ' << fmt_exact(comp.value)
               << "\n";
            break;
        case ComponentKind::bjt:
            os << comp.label << ' ' << comp.nodes[0] << ' ' << comp.nodes[1] << ' '
               << comp.nodes[2] << " model=m_" << comp.label << "\n";
            break;
        default:
            os << comp.label << ' ' << comp.nodes[0] << ' ' << comp.nodes[1] << ' '
               << fmt_exact(comp.value) << "\n";
            break;
        }
    }
    for (const auto& p : c.ports)
        os << ".port " << p.npos << ' ' << p.nneg << " z0=" << fmt_exact(p.z0) << "\n";
    return os.str();
}

} // namespace lnakit
