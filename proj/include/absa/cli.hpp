#pragma once

#include <string>
#include <vector>

namespace absa::cli {

/// Runs the command-line front end. Exit codes: 0 success, 1 usage error,
/// 2 data error (missing or malformed files, bad configuration), 3 numeric
/// failure (NaN/Inf detected during training or inference).
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace absa::cli
