#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace spinlock {

// Shortest representation that round-trips a double (17 significant digits).
std::string format_g17(double v);

// Writes content to a temporary file in the target directory and renames it
// into place, so readers never observe a partially written file and an
// interrupted run leaves no partial output at the destination.
void write_text_atomic(const std::filesystem::path& path,
                       const std::string& content);

// header is written as-is (no trailing newline needed); each row becomes a
// comma-separated line of %.17g numbers.
void write_csv_atomic(const std::filesystem::path& path,
                      const std::string& header,
                      const std::vector<std::vector<double>>& rows);

}  // namespace spinlock
