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

#ifndef FANREC_UNICODE_HPP
#define FANREC_UNICODE_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fanrec::uni {

constexpr char32_t kReplacementChar = 0xFFFD;

/// Decodes one UTF-8 codepoint starting at `pos`, advancing `pos`.
/// Invalid bytes decode to U+FFFD and advance by one byte.
char32_t decode_utf8(std::string_view text, std::size_t& pos);

void append_utf8(std::string& out, char32_t cp);

/// Unicode simple case folding (1:1 mapping); identity for unmapped
/// codepoints, so it is idempotent by construction.
char32_t fold_cp(char32_t cp);

/// True for general categories L* and Nd.
bool is_alnum_cp(char32_t cp);

/// Letters, digits or underscore: the lexical class of @handle and
/// #hashtag bodies.
inline bool is_word_cp(char32_t cp) { return cp == U'_' || is_alnum_cp(cp); }

std::string case_fold(std::string_view text);

/// Maximal runs of alphanumeric codepoints; everything else separates.
std::vector<std::string> tokenize(std::string_view text);

}  // namespace fanrec::uni

#endif  // FANREC_UNICODE_HPP
