#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stylized/timeseries.hpp"

namespace stylized {

/// One weekly trading window in local time, minutes after local midnight.
struct SessionRule {
  std::chrono::weekday day;
  int open_minute = 0;
  int close_minute = 24 * 60;
};

/// Weekly session rules in an IANA time zone plus a holiday list. A calendar
/// built with always_open() treats time as one continuous session.
class SessionCalendar {
 public:
  struct Session {
    Timestamp open = 0;
    Timestamp close = 0;
    std::int64_t day = 0;  // days since epoch of the session's local date
  };

  /// 24/7 trading. Days for TRA grouping start at `day_offset_seconds` past
  /// UTC midnight.
  [[nodiscard]] static SessionCalendar always_open(std::int64_t day_offset_seconds = 0);

  /// Regular US equity hours: Mon-Fri 09:30-16:00 America/New_York.
  [[nodiscard]] static SessionCalendar us_equity(
      std::vector<std::chrono::year_month_day> holidays = {});

  /// Throws invalid_argument for unknown zones, open >= close, or overlapping
  /// rules on one weekday.
  SessionCalendar(std::string time_zone, std::vector<SessionRule> rules,
                  std::vector<std::chrono::year_month_day> holidays = {});

  [[nodiscard]] bool is_always_open() const noexcept { return always_open_; }
  [[nodiscard]] const std::string& time_zone() const noexcept { return time_zone_; }
  [[nodiscard]] const std::vector<SessionRule>& rules() const noexcept { return rules_; }

  /// The session with open <= t < close, if any. Back-to-back windows that meet
  /// at local midnight are merged into one session.
  [[nodiscard]] std::optional<Session> session_at(Timestamp t) const;

  /// True when [start, end] lies inside one session.
  [[nodiscard]] bool contains(Timestamp start, Timestamp end) const;

  /// Trading-day key of the interval [start, end], or nullopt when it does
  /// not sit inside one session.
  [[nodiscard]] std::optional<std::int64_t> day_of(Timestamp start, Timestamp end) const;

 private:
  SessionCalendar() = default;

  struct Zone;

  bool always_open_ = false;
  std::int64_t day_offset_seconds_ = 0;
  std::string time_zone_ = "UTC";
  std::vector<SessionRule> rules_;
  std::vector<std::int64_t> holidays_;  // days since epoch, sorted
  std::shared_ptr<const Zone> zone_;
};

}  // namespace stylized
