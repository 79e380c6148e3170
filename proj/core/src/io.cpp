#include "spinlock/io.hpp"

#include <cstdio>
#include <fstream>
#include <random>
#include <system_error>

#include "spinlock/errors.hpp"

namespace spinlock {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_atomic(const std::filesystem::path& path,
                       const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path dir = path.has_parent_path() ? path.parent_path() : ".";
  std::error_code ec;
  fs::create_directories(dir, ec);

  // Unique sibling name keeps the final rename within one filesystem.
  const fs::path tmp =
      dir / (path.filename().string() + ".tmp." +
             std::to_string(
                 std::random_device{}() ^
                 static_cast<unsigned>(reinterpret_cast<std::uintptr_t>(
                     &content))));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw ConfigError("cannot open output file " + tmp.string());
    }
    out << content;
    out.flush();
    if (!out) {
      std::error_code rm;
      fs::remove(tmp, rm);
      throw ConfigError("failed writing " + tmp.string());
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code rm;
    fs::remove(tmp, rm);
    throw ConfigError("failed to move output into place at " + path.string() +
                      ": " + ec.message());
  }
}

void write_csv_atomic(const std::filesystem::path& path,
                      const std::string& header,
                      const std::vector<std::vector<double>>& rows) {
  std::string content;
  content.reserve(32 + rows.size() * (rows.empty() ? 0 : rows[0].size()) * 26);
  content += header;
  content += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) content += ',';
      content += format_g17(row[i]);
    }
    content += '\n';
  }
  write_text_atomic(path, content);
}

}  // namespace spinlock
