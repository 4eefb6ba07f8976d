#pragma once

#include <functional>
#include <ostream>
#include <string>

namespace absa::textio {

/// Formats a double with 17 significant digits, enough to round-trip any
/// 64-bit value exactly through the text form.
std::string format_double(double v);

double parse_double(const std::string& token, const std::string& context);

/// Writes through a temporary file in the same directory, then renames it
/// onto `path`, so readers never observe a half-written file.
void atomic_write(const std::string& path,
                  const std::function<void(std::ostream&)>& writer);

std::string read_file(const std::string& path);

}  // namespace absa::textio
