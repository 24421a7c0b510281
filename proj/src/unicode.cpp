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

#include "fanrec/unicode.hpp"

#include <algorithm>

namespace fanrec::uni {

namespace {

struct CaseFoldEntry {
    std::uint32_t from;
    std::uint32_t to;
};

struct CpRange {
    std::uint32_t lo;
    std::uint32_t hi;
};

#include "unicode_tables.inc"

}  // namespace

char32_t decode_utf8(std::string_view text, std::size_t& pos) {
    const unsigned char b0 = static_cast<unsigned char>(text[pos]);
    if (b0 < 0x80) {
        ++pos;
        return b0;
    }
    int extra;
    char32_t cp;
    if ((b0 & 0xE0) == 0xC0) {
        extra = 1;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        extra = 2;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        extra = 3;
        cp = b0 & 0x07;
    } else {
        ++pos;
        return kReplacementChar;
    }
    if (pos + 1 + extra > text.size()) {
        ++pos;
        return kReplacementChar;
    }
    char32_t out = cp;
    for (int i = 1; i <= extra; ++i) {
        const unsigned char b = static_cast<unsigned char>(text[pos + i]);
        if ((b & 0xC0) != 0x80) {
            ++pos;
            return kReplacementChar;
        }
        out = (out << 6) | (b & 0x3F);
    }
    // reject overlong forms and surrogates
    static const char32_t min_for_len[4] = {0, 0x80, 0x800, 0x10000};
    if (out < min_for_len[extra] || out > 0x10FFFF || (out >= 0xD800 && out <= 0xDFFF)) {
        ++pos;
        return kReplacementChar;
    }
    pos += extra + 1;
    return out;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

char32_t fold_cp(char32_t cp) {
    if (cp < 0x80) {
        // fast path: ASCII
        if (cp >= U'A' && cp <= U'Z') return cp + 32;
        return cp;
    }
    const CaseFoldEntry* begin = kCaseFolds;
    const CaseFoldEntry* end = kCaseFolds + sizeof(kCaseFolds) / sizeof(kCaseFolds[0]);
    const CaseFoldEntry* it = std::lower_bound(
        begin, end, cp, [](const CaseFoldEntry& e, char32_t c) { return e.from < c; });
    if (it != end && it->from == cp) return it->to;
    return cp;
}

bool is_alnum_cp(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= U'0' && cp <= U'9') || (cp >= U'a' && cp <= U'z') ||
               (cp >= U'A' && cp <= U'Z');
    }
    const CpRange* begin = kAlnumRanges;
    const CpRange* end = kAlnumRanges + sizeof(kAlnumRanges) / sizeof(kAlnumRanges[0]);
    const CpRange* it =
        std::upper_bound(begin, end, cp, [](char32_t c, const CpRange& r) { return c < r.lo; });
    if (it == begin) return false;
    --it;
    return cp <= it->hi;
}

std::string case_fold(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        append_utf8(out, fold_cp(decode_utf8(text, pos)));
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const char32_t cp = decode_utf8(text, pos);
        if (is_alnum_cp(cp)) {
            append_utf8(current, cp);
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

}  // namespace fanrec::uni
