#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace seclab {

inline constexpr const char* kToolVersion = "0.1.0";

/// Exit codes shared by every subcommand.
namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kMismatch = 1; ///< replay produced different bytes
inline constexpr int kValidation = 2;
inline constexpr int kSizeGuard = 3;
inline constexpr int kIo = 4;
} // namespace exit_code

/// Record of one CLI run. Replaying `args` must reproduce `digests` exactly;
/// timestamps are informational and never hashed.
struct RunManifest {
    std::string command;
    std::vector<std::string> args; ///< full argument list after the program name
    std::uint64_t seed = 0;
    std::string version = kToolVersion;
    std::string started_at;
    std::string finished_at;
    std::map<std::string, std::string> digests; ///< output name -> sha256 hex ("stdout" for printed output)
};

std::string sha256_hex(const std::string& bytes);

std::string manifest_to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text);

/// Entry point behind the `seclab` binary. `args` excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace seclab
