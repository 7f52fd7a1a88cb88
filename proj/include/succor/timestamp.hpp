#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>

namespace succor {

/// Millisecond-resolution wall-clock instant, zone-naive, serialized as
/// "YYYY-MM-DD HH:MM:SS.mmm".
class Timestamp {
public:
    using Duration = std::chrono::milliseconds;
    using TimePoint = std::chrono::sys_time<Duration>;

    constexpr Timestamp() = default;
    constexpr explicit Timestamp(TimePoint tp) : tp_(tp) {}

    static Timestamp from_millis(std::int64_t ms) { return Timestamp(TimePoint(Duration(ms))); }
    /// Throws Error{Validation} unless `text` is exactly "YYYY-MM-DD HH:MM:SS.mmm".
    static Timestamp parse(std::string_view text);
    /// Compact form used in request keys: "yyyyMMddHHmmssSSS".
    static Timestamp parse_compact(std::string_view text);

    std::int64_t millis() const { return tp_.time_since_epoch().count(); }
    TimePoint time_point() const { return tp_; }

    std::string str() const;
    std::string compact() const;

    friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
    friend bool operator==(const Timestamp&, const Timestamp&) = default;

private:
    TimePoint tp_{};
};

/// Calendar date, serialized as "YYYY-MM-DD".
class Date {
public:
    constexpr Date() = default;
    constexpr explicit Date(std::chrono::year_month_day ymd) : ymd_(ymd) {}

    static Date parse(std::string_view text);
    static Date today();

    std::chrono::year_month_day ymd() const { return ymd_; }
    std::string str() const;

    friend auto operator<=>(const Date& a, const Date& b) {
        return std::chrono::sys_days(a.ymd_) <=> std::chrono::sys_days(b.ymd_);
    }
    friend bool operator==(const Date&, const Date&) = default;

private:
    std::chrono::year_month_day ymd_{std::chrono::year(1970), std::chrono::month(1),
                                     std::chrono::day(1)};
};

/// Server clock. Never returns a value earlier than one it already returned,
/// so server-generated timestamp chains stay monotone even if the system clock
/// steps backwards.
class ServerClock {
public:
    using Source = std::function<Timestamp()>;

    ServerClock();
    explicit ServerClock(Source source);

    Timestamp now();

private:
    Source source_;
    std::mutex mutex_;
    Timestamp last_{};
};

Timestamp system_now();

}  // namespace succor
