#include "succor/timestamp.hpp"

#include "succor/error.hpp"

#include <algorithm>
#include <array>
#include <cstdio>

namespace succor {

namespace {

int digits(std::string_view text, std::size_t pos, std::size_t count) {
    int value = 0;
    for (std::size_t i = pos; i < pos + count; ++i) {
        const char c = text[i];
        if (c < '0' || c > '9')
            fail(ErrorCode::Validation, "non-digit in date/time: " + std::string(text));
        value = value * 10 + (c - '0');
    }
    return value;
}

void expect(std::string_view text, std::size_t pos, char c) {
    if (text[pos] != c)
        fail(ErrorCode::Validation, "malformed date/time: " + std::string(text));
}

std::chrono::year_month_day checked_ymd(int y, int m, int d, std::string_view text) {
    const std::chrono::year_month_day ymd{std::chrono::year(y), std::chrono::month(unsigned(m)),
                                          std::chrono::day(unsigned(d))};
    if (!ymd.ok())
        fail(ErrorCode::Validation, "invalid calendar date: " + std::string(text));
    return ymd;
}

Timestamp compose(std::chrono::year_month_day ymd, int hh, int mm, int ss, int ms,
                  std::string_view text) {
    if (hh > 23 || mm > 59 || ss > 59)
        fail(ErrorCode::Validation, "invalid time of day: " + std::string(text));
    using namespace std::chrono;
    const auto tp = sys_days(ymd) + hours(hh) + minutes(mm) + seconds(ss) + milliseconds(ms);
    return Timestamp(time_point_cast<milliseconds>(tp));
}

struct Fields {
    int y, mo, d, h, mi, s, ms;
};

Fields split(Timestamp ts) {
    using namespace std::chrono;
    const auto tp = ts.time_point();
    const auto day = floor<days>(tp);
    const year_month_day ymd(day);
    const hh_mm_ss tod(tp - day);
    return {int(ymd.year()),      int(unsigned(ymd.month())),  int(unsigned(ymd.day())),
            int(tod.hours().count()), int(tod.minutes().count()), int(tod.seconds().count()),
            int(tod.subseconds().count())};
}

}  // namespace

Timestamp Timestamp::parse(std::string_view text) {
    if (text.size() != 23)
        fail(ErrorCode::Validation, "timestamp must be YYYY-MM-DD HH:MM:SS.mmm: " + std::string(text));
    expect(text, 4, '-');
    expect(text, 7, '-');
    expect(text, 10, ' ');
    expect(text, 13, ':');
    expect(text, 16, ':');
    expect(text, 19, '.');
    const auto ymd = checked_ymd(digits(text, 0, 4), digits(text, 5, 2), digits(text, 8, 2), text);
    return compose(ymd, digits(text, 11, 2), digits(text, 14, 2), digits(text, 17, 2),
                   digits(text, 20, 3), text);
}

Timestamp Timestamp::parse_compact(std::string_view text) {
    if (text.size() != 17)
        fail(ErrorCode::Validation, "compact timestamp must be yyyyMMddHHmmssSSS: " + std::string(text));
    const auto ymd = checked_ymd(digits(text, 0, 4), digits(text, 4, 2), digits(text, 6, 2), text);
    return compose(ymd, digits(text, 8, 2), digits(text, 10, 2), digits(text, 12, 2),
                   digits(text, 14, 3), text);
}

std::string Timestamp::str() const {
    const auto f = split(*this);
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%04d-%02d-%02d %02d:%02d:%02d.%03d", f.y, f.mo, f.d, f.h,
                  f.mi, f.s, f.ms);
    return buf.data();
}

std::string Timestamp::compact() const {
    const auto f = split(*this);
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%04d%02d%02d%02d%02d%02d%03d", f.y, f.mo, f.d, f.h, f.mi,
                  f.s, f.ms);
    return buf.data();
}

Date Date::parse(std::string_view text) {
    if (text.size() != 10)
        fail(ErrorCode::Validation, "date must be YYYY-MM-DD: " + std::string(text));
    expect(text, 4, '-');
    expect(text, 7, '-');
    return Date(checked_ymd(digits(text, 0, 4), digits(text, 5, 2), digits(text, 8, 2), text));
}

Date Date::today() {
    return Date(std::chrono::year_month_day(
        std::chrono::floor<std::chrono::days>(std::chrono::system_clock::now())));
}

std::string Date::str() const {
    std::array<char, 16> buf{};
    std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02u", int(ymd_.year()),
                  unsigned(ymd_.month()), unsigned(ymd_.day()));
    return buf.data();
}

Timestamp system_now() {
    return Timestamp(
        std::chrono::time_point_cast<Timestamp::Duration>(std::chrono::system_clock::now()));
}

ServerClock::ServerClock() : source_(system_now) {}

ServerClock::ServerClock(Source source) : source_(std::move(source)) {}

Timestamp ServerClock::now() {
    const Timestamp t = source_();
    std::lock_guard lock(mutex_);
    last_ = std::max(last_, t);
    return last_;
}

}  // namespace succor
