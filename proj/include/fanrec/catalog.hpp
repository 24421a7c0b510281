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

#ifndef FANREC_CATALOG_HPP
#define FANREC_CATALOG_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fanrec/time_util.hpp"

namespace fanrec {

enum class Gender { Female, Male, Mixed };

const char* gender_name(Gender g);

using ArtistId = std::int32_t;

struct ArtistRecord {
    std::string name;  // display form, e.g. "(G)I-DLE"
    Gender gender = Gender::Mixed;
    Date debut;
    std::string agency;
    int size = 1;
    bool active = true;
    // Case-folded alias strings; aliases[0] is the canonical alias
    // derived from the name. Multi-word aliases keep single spaces
    // between their tokens.
    std::vector<std::string> aliases;

    bool operator==(const ArtistRecord&) const = default;
};

/// Case-fold and delete every non-alphanumeric codepoint:
/// "(G)I-DLE" -> "gidle", "15&" -> "15".
std::string canonical_alias(std::string_view name);

/// Immutable after load; freely shareable across threads.
class ArtistCatalog {
  public:
    ArtistCatalog() = default;
    explicit ArtistCatalog(std::vector<ArtistRecord> records);

    const std::vector<ArtistRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    const ArtistRecord& record(ArtistId id) const { return records_[static_cast<std::size_t>(id)]; }

    /// Artist ids whose alias token sequence occurs as a consecutive
    /// run of tokens in the case-folded raw text. Aliases shorter than
    /// 3 characters or purely numeric only match inside hashtag bodies.
    /// Result is sorted ascending.
    std::vector<ArtistId> match(std::string_view raw_text) const;

    std::vector<std::string> names() const;

    bool operator==(const ArtistCatalog& other) const { return records_ == other.records_; }

  private:
    struct AliasEntry {
        std::vector<std::string> tokens;
        ArtistId artist;
        bool hashtag_only;
    };

    std::vector<ArtistRecord> records_;
    std::vector<AliasEntry> alias_entries_;
    // first alias token -> indices into alias_entries_
    std::unordered_map<std::string, std::vector<std::size_t>> first_token_index_;
};

/// CSV with header `Name,Gender,Debut,Agency,Size,Active[,Aliases]`.
/// Debut dates are D/M/YY with pivot: YY >= 90 -> 19YY, else 20YY.
/// The optional Aliases column holds extra aliases, ';'-separated.
ArtistCatalog parse_artist_catalog(std::string_view csv_text);

/// Round-trips: parse_artist_catalog(serialize_artist_catalog(c)) == c.
std::string serialize_artist_catalog(const ArtistCatalog& catalog);

}  // namespace fanrec

#endif  // FANREC_CATALOG_HPP
