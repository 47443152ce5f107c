#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace sentcast {

/// A calendar day with no time-of-day component.
class Date {
 public:
  Date() = default;
  explicit Date(std::chrono::sys_days days) : days_(days) {}
  Date(int year, unsigned month, unsigned day);

  /// Parses `YYYY-MM-DD`; returns false on malformed or invalid dates.
  static bool parse(std::string_view text, Date& out);
  /// Throwing variant of parse for call sites that already validated input.
  static Date from_iso(std::string_view text);

  std::string to_iso() const;
  std::chrono::sys_days days() const { return days_; }
  std::chrono::weekday weekday() const { return std::chrono::weekday{days_}; }

  Date plus_days(int n) const { return Date{days_ + std::chrono::days{n}}; }

  friend auto operator<=>(const Date&, const Date&) = default;
  friend bool operator==(const Date&, const Date&) = default;

 private:
  std::chrono::sys_days days_{};
};

}  // namespace sentcast
