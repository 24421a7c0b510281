/*
 * Copyright 2025 The fanrec Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "fanrec/time_util.hpp"

#include <cctype>
#include <cstdio>

namespace fanrec {

namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
    static const int lengths[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return lengths[m - 1];
}

}  // namespace

bool is_valid_date(const Date& d) {
    if (d.month < 1 || d.month > 12) return false;
    if (d.day < 1 || d.day > days_in_month(d.year, d.month)) return false;
    return true;
}

// Howard Hinnant's days_from_civil.
std::int64_t days_from_civil(const Date& d) {
    int y = d.year;
    const unsigned m = static_cast<unsigned>(d.month);
    const unsigned day = static_cast<unsigned>(d.day);
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + day - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

Date civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned day = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(day)};
}

namespace {

bool read_int(const std::string& s, std::size_t pos, std::size_t len, int* out) {
    if (pos + len > s.size()) return false;
    int v = 0;
    for (std::size_t i = 0; i < len; ++i) {
        char c = s[pos + i];
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        v = v * 10 + (c - '0');
    }
    *out = v;
    return true;
}

}  // namespace

bool parse_iso8601_utc(const std::string& text, std::int64_t* out_epoch_seconds) {
    // YYYY-MM-DD 'T' HH:MM:SS [.fraction] ('Z' | +HH:MM | -HH:MM)
    int year, month, day, hour, minute, second;
    if (!read_int(text, 0, 4, &year)) return false;
    if (text.size() < 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' ||
        text[13] != ':' || text[16] != ':')
        return false;
    if (!read_int(text, 5, 2, &month) || !read_int(text, 8, 2, &day) ||
        !read_int(text, 11, 2, &hour) || !read_int(text, 14, 2, &minute) ||
        !read_int(text, 17, 2, &second))
        return false;
    std::size_t pos = 19;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        std::size_t digits = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            ++pos;
            ++digits;
        }
        if (digits == 0) return false;
    }
    int offset_seconds = 0;
    if (pos >= text.size()) return false;
    if (text[pos] == 'Z') {
        ++pos;
    } else if (text[pos] == '+' || text[pos] == '-') {
        int sign = text[pos] == '+' ? 1 : -1;
        int oh, om;
        if (pos + 6 > text.size() || text[pos + 3] != ':') return false;
        if (!read_int(text, pos + 1, 2, &oh) || !read_int(text, pos + 4, 2, &om)) return false;
        offset_seconds = sign * (oh * 3600 + om * 60);
        pos += 6;
    } else {
        return false;
    }
    if (pos != text.size()) return false;
    Date d{year, month, day};
    if (!is_valid_date(d)) return false;
    if (hour > 23 || minute > 59 || second > 60) return false;
    std::int64_t t = days_from_civil(d) * 86400 + hour * 3600 + minute * 60 + second;
    *out_epoch_seconds = t - offset_seconds;
    return true;
}

std::string format_iso8601_utc(std::int64_t epoch_seconds) {
    std::int64_t days = epoch_seconds / 86400;
    std::int64_t rem = epoch_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    Date d = civil_from_days(days);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", d.year, d.month, d.day,
                  static_cast<int>(rem / 3600), static_cast<int>((rem / 60) % 60),
                  static_cast<int>(rem % 60));
    return buf;
}

std::string format_date_iso(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

bool parse_date_iso(const std::string& text, Date* out) {
    int y, m, day;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return false;
    if (!read_int(text, 0, 4, &y) || !read_int(text, 5, 2, &m) || !read_int(text, 8, 2, &day))
        return false;
    Date d{y, m, day};
    if (!is_valid_date(d)) return false;
    *out = d;
    return true;
}

}  // namespace fanrec
