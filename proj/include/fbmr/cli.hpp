#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace fbmr {

struct CliInvocation {
  std::string subcommand;  // constants, simulate, riemann, verify-*, run
  std::string config_path;
  std::string output_path;  // empty writes to stdout
  std::optional<std::string> format;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::vector<std::string> measures;  // constants only
};

/// 0 on success, 1 on config or validation error, 2 on a failed control.
int run(const CliInvocation& invocation, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to run().
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fbmr
