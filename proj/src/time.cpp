#include "nim/time.hpp"

#include <cctype>
#include <cstdio>

namespace nim {

Clock system_clock() {
    return [] { return std::chrono::time_point_cast<Duration>(std::chrono::system_clock::now()); };
}

std::string format_iso8601(Instant t) {
    using namespace std::chrono;
    const auto day = floor<days>(t);
    const year_month_day ymd{day};
    const hh_mm_ss hms{t - day};
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()), static_cast<int>(hms.subseconds().count()));
    return buf;
}

namespace {

class Cursor {
public:
    explicit Cursor(std::string_view s) : s_(s) {}

    bool digits(std::size_t n, int& out) {
        if (pos_ + n > s_.size()) return false;
        int v = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const char c = s_[pos_ + i];
            if (!std::isdigit(static_cast<unsigned char>(c))) return false;
            v = v * 10 + (c - '0');
        }
        out = v;
        pos_ += n;
        return true;
    }

    bool lit(char c) {
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    bool done() const { return pos_ == s_.size(); }
    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
};

} // namespace

std::optional<Instant> parse_iso8601(std::string_view text) {
    using namespace std::chrono;
    Cursor c(text);
    int y = 0, mo = 0, d = 0;
    if (!c.digits(4, y) || !c.lit('-') || !c.digits(2, mo) || !c.lit('-') || !c.digits(2, d)) return std::nullopt;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    Instant result = time_point_cast<Duration>(sys_days{ymd});
    if (c.done()) return result;

    int h = 0, mi = 0, s = 0;
    if (!(c.lit('T') || c.lit('t') || c.lit(' '))) return std::nullopt;
    if (!c.digits(2, h) || !c.lit(':') || !c.digits(2, mi)) return std::nullopt;
    if (c.lit(':') && !c.digits(2, s)) return std::nullopt;
    if (h > 23 || mi > 59 || s > 60) return std::nullopt;
    result += hours{h} + minutes{mi} + seconds{s};

    if (c.lit('.')) {
        int ms = 0, scale = 100, got = 0;
        while (std::isdigit(static_cast<unsigned char>(c.peek()))) {
            int digit = 0;
            c.digits(1, digit);
            ms += digit * scale;
            scale /= 10;
            ++got;
        }
        if (got == 0) return std::nullopt;
        result += milliseconds{ms};
    }

    if (c.lit('Z') || c.lit('z')) return c.done() ? std::optional{result} : std::nullopt;
    const char sign = c.peek();
    if (sign == '+' || sign == '-') {
        c.lit(sign);
        int oh = 0, om = 0;
        if (!c.digits(2, oh)) return std::nullopt;
        c.lit(':');
        if (!c.digits(2, om)) return std::nullopt;
        const auto offset = hours{oh} + minutes{om};
        result += sign == '+' ? -offset : offset;
        return c.done() ? std::optional{result} : std::nullopt;
    }
    return c.done() ? std::optional{result} : std::nullopt;
}

} // namespace nim
