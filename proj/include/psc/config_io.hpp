#pragma once

#include "psc/model.hpp"

#include <iosfwd>
#include <string>

namespace psc {

/// Parses the flat key = value configuration format. Scalar keys default to
/// the stock system parameters; `segment.<n>.<s> = A,B,L` lines (1-based n, s)
/// replace the generated default load. Unknown keys, malformed lines, and
/// gaps in the segment numbering raise ValidationError; structural invariants
/// are left to validate().
Bundle parse_config(std::istream& in, const std::string& source_name);

Bundle load_config_file(const std::string& path);

}  // namespace psc
