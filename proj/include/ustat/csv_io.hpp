#pragma once

#include <string>

#include "ustat/sample.hpp"

namespace ustat {

// Reads a headerless single-column CSV of reals, one value per line. Rejects
// NaN/inf and interior blank lines; a trailing newline is fine. Parse errors
// cite the line number.
Sample read_sample_csv(const std::string& path);

}  // namespace ustat
