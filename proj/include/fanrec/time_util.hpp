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

#ifndef FANREC_TIME_UTIL_HPP
#define FANREC_TIME_UTIL_HPP

#include <cstdint>
#include <string>

namespace fanrec {

/// Calendar date (proleptic Gregorian).
struct Date {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31

    auto operator<=>(const Date&) const = default;
};

bool is_valid_date(const Date& d);

/// Days since 1970-01-01.
std::int64_t days_from_civil(const Date& d);
Date civil_from_days(std::int64_t days);

/// "2023-10-10T00:12:34Z" (or "+hh:mm"/"-hh:mm" offset, optional
/// fractional seconds which are dropped) -> Unix seconds.
/// Returns false on anything that does not parse.
bool parse_iso8601_utc(const std::string& text, std::int64_t* out_epoch_seconds);

/// Unix seconds -> "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601_utc(std::int64_t epoch_seconds);

/// "YYYY-MM-DD" (used in serialized catalogs).
std::string format_date_iso(const Date& d);
bool parse_date_iso(const std::string& text, Date* out);

}  // namespace fanrec

#endif  // FANREC_TIME_UTIL_HPP
