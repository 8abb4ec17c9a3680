#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "equid/json_io.hpp"

namespace equid {

/// A recorded invocation of the command-line tool. Replaying it with the same
/// binary reproduces the CSV bodies byte for byte.
struct ExperimentManifest {
  std::vector<std::string> command;  // e.g. {"count"} or {"experiment", "cex4.1"}
  std::string system;                // system file path, empty when unused
  std::map<std::string, std::string> parameters;  // long flag name -> value ("" for switches)
  std::uint64_t seed = 0;
  std::map<std::string, std::string> outputs;  // "out", "full-table"

  json to_json() const;
  static ExperimentManifest from_json(const json& j);
  std::vector<std::string> to_args() const;

  friend bool operator==(const ExperimentManifest&, const ExperimentManifest&) = default;
};

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPrecondition = 1;
inline constexpr int kExitBudget = 2;
inline constexpr int kExitInvariant = 3;
inline constexpr int kExitUsage = 64;

// args excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, char** argv);

}  // namespace equid
