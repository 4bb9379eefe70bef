#include "gbmfolio/date.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

#include "gbmfolio/errors.hpp"

namespace gbmfolio {

namespace {

bool parse_uint(std::string_view text, unsigned& out) {
  if (text.empty()) return false;
  for (char c : text) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size();
}

}  // namespace

Date::Date(int year, unsigned month, unsigned day)
    : ymd_(std::chrono::year{year}, std::chrono::month{month}, std::chrono::day{day}) {
  if (!ymd_.ok()) throw DataError("invalid calendar date");
}

Date Date::parse(std::string_view text) {
  unsigned y = 0, m = 0, d = 0;
  if (text.size() != 10 || text[4] != '-' || text[7] != '-' || !parse_uint(text.substr(0, 4), y) ||
      !parse_uint(text.substr(5, 2), m) || !parse_uint(text.substr(8, 2), d)) {
    throw DataError("malformed date '" + std::string(text) + "' (expected YYYY-MM-DD)");
  }
  std::chrono::year_month_day ymd{std::chrono::year{static_cast<int>(y)}, std::chrono::month{m},
                                  std::chrono::day{d}};
  if (!ymd.ok()) throw DataError("invalid calendar date '" + std::string(text) + "'");
  return Date(ymd);
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd_.year()),
                static_cast<unsigned>(ymd_.month()), static_cast<unsigned>(ymd_.day()));
  return buf;
}

Date Date::next_day() const {
  return Date(std::chrono::year_month_day(std::chrono::sys_days(ymd_) + std::chrono::days{1}));
}

unsigned Date::weekday_index() const {
  return std::chrono::weekday(std::chrono::sys_days(ymd_)).iso_encoding() - 1;
}

}  // namespace gbmfolio
