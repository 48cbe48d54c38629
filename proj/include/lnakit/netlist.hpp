#pragma once

#include <stdexcept>
#include <string>

#include "lnakit/circuit.hpp"

namespace lnakit {

struct parse_error : std::runtime_error {
    int line;
    int col;
    parse_error(const std::string& msg, int line_, int col_)
        : std::runtime_error(msg + " (line " + std::to_string(line_) + ", col " +
                             std::to_string(col_) + ")"),
          line(line_), col(col_) {}
};

// Netlist grammar, one statement per line, '#' starts a comment:
//   .title <text>
//   .model <name> rb=<v> ic=<v> beta=<v> cpi=<v> cbc=<v> [t=<v>]
//   .port <n+> <n-> z0=<v>
//   R<label> <n+> <n-> <value>        (same shape for L, C, V, I)
//   G<label> <out+> <out-> <sense+> <sense-> <gm>
//   Q<label> <base> <collector> <emitter> model=<name>
// Values take engineering suffixes f p n u m k meg g (case-insensitive,
// "meg" checked before "m"). Node 0 is ground. beta accepts "inf".
Circuit parse_netlist(const std::string& text);

// Inverse of parse_netlist: parse(serialize(c)) reproduces c exactly.
// Numbers are written with 17 significant digits so every double survives
// the round trip bitwise.
std::string serialize_netlist(const Circuit& c);

// Engineering-notation scalar, e.g. "2.2p", "1meg", "4.7k", "inf".
double parse_value(const std::string& token); // throws std::invalid_argument

} // namespace lnakit
