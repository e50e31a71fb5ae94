#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace htype::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitNumerical = 4;

/// Runs one command line (args[0] is the program name). Reports go to `out`,
/// diagnostics to `err`. Every command that writes an artifact also writes
/// `<artifact>.manifest.json` next to it.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// 64-bit FNV-1a of a file's bytes, as lower-case hex; used by manifests to
/// record and re-check artifacts.
std::string file_digest(const std::string& path);

}  // namespace htype::cli
