#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stylized {

/// Failure categories. The string form doubles as the reason code stored in
/// report rows when a statistic cannot be computed.
enum class Errc {
  invalid_argument,
  insufficient_data,
  degenerate_series,
  too_few_tail_points,
  too_few_lags,
  missing_lags,
  parse_error,
  network_disabled,
  fetch_failed,
  io_error,
  config_error,
  unknown_figure,
};

[[nodiscard]] std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  [[nodiscard]] Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace stylized
