#pragma once

#include <string>

#include "stratvar/simlab.hpp"

namespace stratvar {

/// Strict JSON config for the simulate subcommand. Unknown keys and invariant
/// violations raise ParseError with the offending key.
SimConfig parse_config(const std::string& path);

/// Subcommand dispatch. Returns 0 on success, 1 on a domain error (the error
/// name goes to stderr), 2 on a usage error.
int dispatch(int argc, const char* const* argv);

}  // namespace stratvar
