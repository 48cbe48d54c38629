#pragma once

#include <string>

#include "lnakit/analytic.hpp"
#include "lnakit/design.hpp"

namespace lnakit {

// designs/*.json primitives -> LnaDesign. Unknown keys rejected, missing
// required keys reported by name. Throws std::invalid_argument.
LnaDesign load_design_json(const std::string& text);
std::string design_json(const LnaDesign& d);

std::string design_report_json(const DesignReport& r);

// Composite metric bundle emitted by the report command.
struct ReportBundle {
    double s21_peak_db = 0.0;
    double s21_peak_hz = 0.0;
    double flatness_db = 0.0;
    double nf_min_db = 0.0;
    double nf_max_db = 0.0;
    double k_min = 0.0;
    double delta_max = 0.0;
    double group_delay_var_s = 0.0;
    double power_ratio = 0.0;
    std::string disclaimer;
};
std::string report_bundle_json(const ReportBundle& r);

// Write-to-temp-then-rename; target directory must exist.
void atomic_write(const std::string& path, const std::string& content);

// Fixed 9-significant-digit scalar used by every emitter.
std::string format_sig9(double v);

} // namespace lnakit
