#include "lnakit/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace lnakit {

namespace {

// JSON-safe number: non-finite values become null
std::string json_num(double v) {
    if (!std::isfinite(v)) return "null";
    return format_sig9(v);
}

std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char ch : s) {
        switch (ch) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default:
            if (static_cast<unsigned char>(ch) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", ch);
                out += buf;
            } else {
                out += ch;
            }
        }
    }
    return out;
}

struct FieldRef {
    const char* key;
    double LnaDesign::*member;
    bool required;
};

const FieldRef kDesignFields[] = {
    {"ic1", &LnaDesign::ic1, true},
    {"ft1", &LnaDesign::ft1, true},
    {"ic3", &LnaDesign::ic3, true},
    {"ft3", &LnaDesign::ft3, true},
    {"cbc1", &LnaDesign::cbc1, false},
    {"cbc3", &LnaDesign::cbc3, false},
    {"rb", &LnaDesign::rb, false},
    {"beta", &LnaDesign::beta, false},
    {"r1", &LnaDesign::r1, false},
    {"l2", &LnaDesign::l2, false},
    {"c2", &LnaDesign::c2, false},
    {"c3", &LnaDesign::c3, false},
    {"r2", &LnaDesign::r2, false},
    {"c4", &LnaDesign::c4, false},
    {"rf", &LnaDesign::rf, false},
    {"lf", &LnaDesign::lf, false},
    {"l4", &LnaDesign::l4, false},
    {"match_target", &LnaDesign::match_target, false},
};

} // namespace

LnaDesign load_design_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("design json: ") + e.what());
    }
    if (!j.is_object())
        throw std::invalid_argument("design json: top level must be an object");

    LnaDesign d;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        if (key == "comment" || key == "provenance") {
            if (!it.value().is_string())
                throw std::invalid_argument("design json: '" + key +
                                            "' must be a string");
            continue;
        }
        bool known = false;
        for (const FieldRef& f : kDesignFields) {
            if (key != f.key) continue;
            if (!it.value().is_number())
                throw std::invalid_argument("design json: '" + key +
                                            "' must be a number");
            d.*(f.member) = it.value().get<double>();
            known = true;
            break;
        }
        if (!known)
            throw std::invalid_argument("design json: unknown key '" + key + "'");
    }
    for (const FieldRef& f : kDesignFields) {
        if (f.required && !j.contains(f.key))
            throw std::invalid_argument(
                std::string("design json: missing required key '") + f.key +
                "'");
    }
    return d;
}

std::string design_json(const LnaDesign& d) {
    std::ostringstream os;
    os << "{\n";
    bool first = true;
    for (const FieldRef& f : kDesignFields) {
        if (!first) os << ",\n";
        first = false;
        os << "  \"" << f.key << "\": " << json_num(d.*(f.member));
    }
    os << "\n}\n";
    return os.str();
}

std::string design_report_json(const DesignReport& r) {
    std::ostringstream os;
    os << "{\n";
    os << "  \"variables\": {"
       << "\"l\": " << json_num(r.variables.l)
       << ", \"ic\": " << json_num(r.variables.ic)
       << ", \"rf\": " << json_num(r.variables.rf)
       << ", \"lf\": " << json_num(r.variables.lf)
       << ", \"r2\": " << json_num(r.variables.r2)
       << ", \"c4\": " << json_num(r.variables.c4) << "},\n";
    os << "  \"residuals\": {"
       << "\"input_match_ohm\": " << json_num(r.residuals.input_match_ohm)
       << ", \"z1p1_rel\": " << json_num(r.residuals.z1p1_rel)
       << ", \"z2p2_rel\": " << json_num(r.residuals.z2p2_rel) << "},\n";
    os << "  \"flatness_db\": " << json_num(r.flatness_db) << ",\n";
    os << "  \"nf_db_band\": [" << json_num(r.nf_db_min) << ", "
       << json_num(r.nf_db_max) << "],\n";
    os << "  \"converged\": " << (r.converged ? "true" : "false") << ",\n";
    os << "  \"iterations\": " << r.iterations << "\n";
    os << "}\n";
    return os.str();
}

std::string report_bundle_json(const ReportBundle& r) {
    std::ostringstream os;
    os << "{\n";
    os << "  \"s21_peak_db\": " << json_num(r.s21_peak_db) << ",\n";
    os << "  \"s21_peak_hz\": " << json_num(r.s21_peak_hz) << ",\n";
    os << "  \"flatness_db\": " << json_num(r.flatness_db) << ",\n";
    os << "  \"nf_min_db\": " << json_num(r.nf_min_db) << ",\n";
    os << "  \"nf_max_db\": " << json_num(r.nf_max_db) << ",\n";
    os << "  \"k_min\": " << json_num(r.k_min) << ",\n";
    os << "  \"delta_max\": " << json_num(r.delta_max) << ",\n";
    os << "  \"group_delay_var_s\": " << json_num(r.group_delay_var_s) << ",\n";
    os << "  \"power_ratio\": " << json_num(r.power_ratio) << ",\n";
    os << "  \"disclaimer\": \"" << json_escape(r.disclaimer) << "\"\n";
    os << "}\n";
    return os.str();
}

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os)
            throw std::runtime_error("atomic_write: cannot open " + tmp);
        os.write(content.data(),
                 static_cast<std::streamsize>(content.size()));
        os.flush();
        if (!os) throw std::runtime_error("atomic_write: write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw std::runtime_error("atomic_write: rename failed: " + path);
    }
}

std::string format_sig9(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

} // namespace lnakit
