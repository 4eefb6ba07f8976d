#pragma once

#include <span>
#include <string>

#include "absa/autodiff.hpp"

namespace absa::nn {

/// Saves named parameter blocks as a self-describing text file:
///
///   absa-params 1
///   count <n>
///   param <name> <rows> <cols>
///   <rows lines of <cols> decimal values>
///   ...
///
/// Values carry 17 significant digits and round-trip exactly. Blocks appear
/// in the order given, so the same parameter set always produces identical
/// bytes.
void save_params(const std::string& path, std::span<ad::Param* const> params);

/// Restores parameter values by name. Every listed parameter must appear in
/// the file with a matching shape, and the file may not contain unknown
/// blocks; violations raise FormatError with the offending name or line.
void load_params(const std::string& path, std::span<ad::Param* const> params);

}  // namespace absa::nn
