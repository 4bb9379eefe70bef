#pragma once

#include <chrono>
#include <compare>
#include <string>
#include <string_view>

namespace gbmfolio {

/// Calendar date parsed from / printed as ISO-8601 (YYYY-MM-DD).
/// Dates are treated as ordered labels only; no exchange calendar logic.
class Date {
public:
  Date() = default;
  explicit Date(std::chrono::year_month_day ymd) : ymd_(ymd) {}
  Date(int year, unsigned month, unsigned day);

  /// Throws DataError unless `text` is a valid YYYY-MM-DD date.
  static Date parse(std::string_view text);

  std::chrono::year_month_day ymd() const { return ymd_; }
  std::string to_string() const;

  /// Next calendar day.
  Date next_day() const;
  /// 0 = Monday ... 6 = Sunday.
  unsigned weekday_index() const;

  friend bool operator==(const Date&, const Date&) = default;
  friend std::strong_ordering operator<=>(const Date& a, const Date& b) {
    return std::chrono::sys_days(a.ymd_) <=> std::chrono::sys_days(b.ymd_);
  }

private:
  std::chrono::year_month_day ymd_{std::chrono::year{1970}, std::chrono::month{1},
                                   std::chrono::day{1}};
};

}  // namespace gbmfolio
