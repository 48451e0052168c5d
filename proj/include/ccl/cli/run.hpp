#pragma once

#include <iosfwd>

#include "ccl/cli/config.hpp"

namespace ccl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitComputation = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

/// Executes one command. Results go to cfg.output (atomically) or to `out`; diagnostics to `err`.
/// Returns 0 on success, 1 on solver failure, 2 on invalid input, 3 on I/O errors.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// parse_args + run, with usage errors reported on `err`.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ccl::cli
