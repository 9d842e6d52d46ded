#pragma once

#include <filesystem>
#include <string>

namespace pmfpair::io {

// %.9g, the float format used in all CSV output.
std::string format_g9(double value);

// Writes to <path>.tmp in the same directory and renames into place, so a
// crashed run never leaves a half-written file behind.
void atomic_write_text(const std::filesystem::path& path,
                       const std::string& content);

// Reads a whole file; throws ConfigError when the file cannot be opened.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace pmfpair::io
