#include "stylized/error.hpp"

namespace stylized {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::insufficient_data: return "insufficient_data";
    case Errc::degenerate_series: return "degenerate_series";
    case Errc::too_few_tail_points: return "too_few_tail_points";
    case Errc::too_few_lags: return "too_few_lags";
    case Errc::missing_lags: return "missing_lags";
    case Errc::parse_error: return "parse_error";
    case Errc::network_disabled: return "network_disabled";
    case Errc::fetch_failed: return "fetch_failed";
    case Errc::io_error: return "io_error";
    case Errc::config_error: return "config_error";
    case Errc::unknown_figure: return "unknown_figure";
  }
  return "unknown";
}

}  // namespace stylized
