#pragma once

#include <iosfwd>
#include <string>
#include <variant>

#include "l2betti/families.hpp"

namespace l2betti {

using Description = std::variant<OrbitGraph, CofiniteComplex>;

/// Parse a line-oriented description ('#' comments, UTF-8):
///   family <name> <params...>
///   adjacency            (followed by `edge u v` lines)
///   orbit <id> arity <n> stab <p>/<q> flipped <0|1>
///   folner <rule> <params...>
/// Rational weights parse exactly; mass consistency is checked.
/// Parse errors carry the line number; consistency violations name the orbit.
Description parse_description(std::istream& in, const std::string& source_name = "<input>");
Description parse_description_file(const std::string& path);

/// Canonical text form; parse(serialize(parse(x))) == parse(x).
std::string serialize_description(const Description& d);

bool descriptions_equal(const Description& a, const Description& b);

} // namespace l2betti
