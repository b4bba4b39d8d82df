#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

namespace stylized {

[[nodiscard]] std::string sha256_hex(std::string_view bytes);
[[nodiscard]] std::string sha256_file(const std::filesystem::path& path);

/// Shortest text that parses back to the same double.
[[nodiscard]] std::string format_double(double value);

}  // namespace stylized
