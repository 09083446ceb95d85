#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace trapqa::cli {

inline constexpr std::uint64_t kDefaultSeed = 20231107;

enum ExitCode : int { kOk = 0, kDomainError = 1, kConfigError = 2 };

/// Parsed command line. `options` holds every flag by its long name (without
/// dashes); flags given without a value map to "true".
struct CommandSpec {
    std::string subcommand;
    std::map<std::string, std::string> options;
    std::filesystem::path out;
    std::string format;
    std::uint64_t seed = kDefaultSeed;
};

/// Parses argv-style arguments (args[0] is the program name). Help and parse
/// errors are reported through the returned exit code; `spec` is filled on success.
int parse_command_line(const std::vector<std::string>& args, CommandSpec& spec,
                       std::ostream& out, std::ostream& err);

/// Runs one subcommand. 0 on success, 1 on domain errors, 2 on configuration
/// errors (missing files, schema violations, unknown ids).
int execute(const CommandSpec& spec, std::ostream& out, std::ostream& err);

/// parse_command_line followed by execute.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Schema and invariant checks for each file without running anything. One
/// finding per problem, formatted "path: pointer: message".
std::vector<std::string> validate_config(const std::vector<std::filesystem::path>& paths);

}  // namespace trapqa::cli
