#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace prunekit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

/// Runs one `prunekit` invocation; `args` excludes the program name.
/// Returns 0 on success, 1 on validation errors, 2 on I/O errors.
int dispatch(std::span<const std::string> args, std::ostream& out, std::ostream& err);

/// FNV-1a 64-bit hash, rendered as 16 lowercase hex digits.
std::string fnv1a64_hex(std::string_view data);

/// Fields recovered from a printed reproducibility header.
struct ReproHeader {
    std::string version;
    std::string command;
    std::string digest;
    std::vector<std::string> argv;
};

/// Parses the `# key: value` header lines from captured stdout.
ReproHeader parse_header(std::string_view text);

}  // namespace prunekit::cli
