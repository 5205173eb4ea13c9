#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace patentlens {

/// Proleptic Gregorian calendar date backed by std::chrono::sys_days.
class Date {
 public:
  Date() = default;
  explicit Date(std::chrono::year_month_day ymd) : days_(std::chrono::sys_days{ymd}) {}
  static Date from_days(std::int64_t days_since_epoch);

  /// Parses "YYYYMMDD" (bulk XML form) or "YYYY-MM-DD" (JSON form).
  /// Returns nullopt on wrong shape or an impossible calendar date.
  static std::optional<Date> parse(std::string_view text);

  int year() const;
  std::chrono::year_month_day ymd() const { return std::chrono::year_month_day{days_}; }
  std::int64_t days_since_epoch() const { return days_.time_since_epoch().count(); }

  /// "YYYY-MM-DD".
  std::string iso() const;

  friend std::int64_t days_between(Date from, Date to) {
    return to.days_since_epoch() - from.days_since_epoch();
  }

  friend auto operator<=>(const Date&, const Date&) = default;

 private:
  std::chrono::sys_days days_{};
};

}  // namespace patentlens
