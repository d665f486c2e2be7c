#pragma once

#include <ostream>

namespace pabias::cli {

/// Entry point of the `pabias` tool. Returns 0 on success, 1 when a module
/// reports an error and 2 on usage errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pabias::cli
