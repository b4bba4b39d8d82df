#include "stylized/calendar.hpp"

#include <absl/time/civil_time.h>
#include <absl/time/time.h>

#include <algorithm>
#include <limits>

#include "stylized/error.hpp"

namespace stylized {

struct SessionCalendar::Zone {
  absl::TimeZone tz;
};

namespace {

constexpr int kMinutesPerDay = 24 * 60;
constexpr int kMaxMergedDays = 14;

const absl::CivilDay kEpochDay(1970, 1, 1);

std::int64_t days_since_epoch(absl::CivilDay d) { return d - kEpochDay; }

std::int64_t days_since_epoch(std::chrono::year_month_day ymd) {
  return std::chrono::sys_days(ymd).time_since_epoch().count();
}

unsigned to_c_weekday(absl::Weekday w) {
  switch (w) {
    case absl::Weekday::sunday: return 0;
    case absl::Weekday::monday: return 1;
    case absl::Weekday::tuesday: return 2;
    case absl::Weekday::wednesday: return 3;
    case absl::Weekday::thursday: return 4;
    case absl::Weekday::friday: return 5;
    case absl::Weekday::saturday: return 6;
  }
  return 0;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace

SessionCalendar SessionCalendar::always_open(std::int64_t day_offset_seconds) {
  SessionCalendar cal;
  cal.always_open_ = true;
  cal.day_offset_seconds_ = day_offset_seconds;
  auto zone = std::make_shared<Zone>();
  zone->tz = absl::UTCTimeZone();
  cal.zone_ = std::move(zone);
  return cal;
}

SessionCalendar SessionCalendar::us_equity(std::vector<std::chrono::year_month_day> holidays) {
  using std::chrono::Friday, std::chrono::Monday, std::chrono::Thursday, std::chrono::Tuesday,
      std::chrono::Wednesday;
  std::vector<SessionRule> rules;
  for (auto day : {Monday, Tuesday, Wednesday, Thursday, Friday}) {
    rules.push_back({day, 9 * 60 + 30, 16 * 60});
  }
  return SessionCalendar("America/New_York", std::move(rules), std::move(holidays));
}

SessionCalendar::SessionCalendar(std::string time_zone, std::vector<SessionRule> rules,
                                 std::vector<std::chrono::year_month_day> holidays)
    : time_zone_(std::move(time_zone)), rules_(std::move(rules)) {
  auto zone = std::make_shared<Zone>();
  if (!absl::LoadTimeZone(time_zone_, &zone->tz)) {
    throw Error(Errc::invalid_argument, "unknown time zone '" + time_zone_ + "'");
  }
  zone_ = std::move(zone);

  for (const auto& r : rules_) {
    if (!r.day.ok() || r.open_minute < 0 || r.close_minute > kMinutesPerDay ||
        r.open_minute >= r.close_minute) {
      throw Error(Errc::invalid_argument, "session rule needs 0 <= open < close <= 1440");
    }
  }
  std::sort(rules_.begin(), rules_.end(), [](const SessionRule& a, const SessionRule& b) {
    if (a.day.c_encoding() != b.day.c_encoding()) return a.day.c_encoding() < b.day.c_encoding();
    return a.open_minute < b.open_minute;
  });
  for (std::size_t i = 1; i < rules_.size(); ++i) {
    if (rules_[i].day == rules_[i - 1].day && rules_[i].open_minute < rules_[i - 1].close_minute) {
      throw Error(Errc::invalid_argument, "overlapping session rules on one weekday");
    }
  }

  for (const auto& h : holidays) {
    if (!h.ok()) throw Error(Errc::invalid_argument, "invalid holiday date");
    holidays_.push_back(days_since_epoch(h));
  }
  std::sort(holidays_.begin(), holidays_.end());
  holidays_.erase(std::unique(holidays_.begin(), holidays_.end()), holidays_.end());
}

std::optional<SessionCalendar::Session> SessionCalendar::session_at(Timestamp t) const {
  if (always_open_) {
    return Session{std::numeric_limits<Timestamp>::min(), std::numeric_limits<Timestamp>::max(),
                   floor_div(t - day_offset_seconds_, 86400)};
  }
  const auto& tz = zone_->tz;
  const auto local = tz.At(absl::FromUnixSeconds(t)).cs;
  const absl::CivilDay day(local);
  const int minute = static_cast<int>(local.hour()) * 60 + static_cast<int>(local.minute());

  auto is_holiday = [&](absl::CivilDay d) {
    return std::binary_search(holidays_.begin(), holidays_.end(), days_since_epoch(d));
  };
  auto rule_for = [&](absl::CivilDay d, auto pred) -> const SessionRule* {
    if (is_holiday(d)) return nullptr;
    const unsigned wd = to_c_weekday(absl::GetWeekday(d));
    for (const auto& r : rules_) {
      if (r.day.c_encoding() == wd && pred(r)) return &r;
    }
    return nullptr;
  };
  auto at = [&](absl::CivilDay d, int minutes) {
    return absl::ToUnixSeconds(tz.At(absl::CivilSecond(d) + minutes * 60).pre);
  };

  const SessionRule* rule =
      rule_for(day, [&](const SessionRule& r) { return r.open_minute <= minute && minute < r.close_minute; });
  if (rule == nullptr) return std::nullopt;

  Session s;
  s.day = days_since_epoch(day);
  s.open = at(day, rule->open_minute);
  s.close = at(day, rule->close_minute);

  // Windows that meet at midnight form one continuous session.
  const SessionRule* edge = rule;
  absl::CivilDay d = day;
  for (int i = 0; i < kMaxMergedDays && edge->close_minute == kMinutesPerDay; ++i) {
    const auto next = rule_for(d + 1, [](const SessionRule& r) { return r.open_minute == 0; });
    if (next == nullptr) break;
    d += 1;
    edge = next;
    s.close = at(d, edge->close_minute);
  }
  edge = rule;
  d = day;
  for (int i = 0; i < kMaxMergedDays && edge->open_minute == 0; ++i) {
    const auto prev =
        rule_for(d - 1, [](const SessionRule& r) { return r.close_minute == kMinutesPerDay; });
    if (prev == nullptr) break;
    d -= 1;
    edge = prev;
    s.open = at(d, edge->open_minute);
  }
  return s;
}

bool SessionCalendar::contains(Timestamp start, Timestamp end) const {
  if (always_open_) return true;
  if (end < start) return false;
  const auto s = session_at(start);
  return s.has_value() && end <= s->close;
}

std::optional<std::int64_t> SessionCalendar::day_of(Timestamp start, Timestamp end) const {
  const auto s = session_at(start);
  if (!s || end > s->close) return std::nullopt;
  return s->day;
}

}  // namespace stylized
