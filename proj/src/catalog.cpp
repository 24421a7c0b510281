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

#include "fanrec/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <set>
#include <sstream>

#include "fanrec/errors.hpp"
#include "fanrec/unicode.hpp"

namespace fanrec {

const char* gender_name(Gender g) {
    switch (g) {
        case Gender::Female: return "Female";
        case Gender::Male: return "Male";
        case Gender::Mixed: return "Mixed";
    }
    return "?";
}

std::string canonical_alias(std::string_view name) {
    std::string out;
    std::size_t pos = 0;
    while (pos < name.size()) {
        const char32_t cp = uni::fold_cp(uni::decode_utf8(name, pos));
        if (uni::is_alnum_cp(cp)) uni::append_utf8(out, cp);
    }
    return out;
}

namespace {

bool purely_numeric(std::string_view s) {
    if (s.empty()) return true;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

// Length in codepoints of the alias with spaces removed.
std::size_t alias_length(const std::string& alias) {
    std::size_t n = 0;
    std::size_t pos = 0;
    while (pos < alias.size()) {
        if (uni::decode_utf8(alias, pos) != U' ') ++n;
    }
    return n;
}

bool alias_is_hashtag_only(const std::string& alias) {
    std::string compact;
    for (char c : alias) {
        if (c != ' ') compact.push_back(c);
    }
    return alias_length(alias) < 3 || purely_numeric(compact);
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t end = text.find(sep, start);
        if (end == std::string_view::npos) {
            out.emplace_back(text.substr(start));
            return out;
        }
        out.emplace_back(text.substr(start, end - start));
        start = end + 1;
    }
}

std::string trim(std::string s) {
    std::size_t a = 0;
    while (a < s.size() && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    std::size_t b = s.size();
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// Minimal CSV field splitting with double-quote escaping.
std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

Date parse_debut(const std::string& field, std::size_t row) {
    auto parts = split(field, '/');
    auto fail = [&] {
        throw Error(ErrorCode::BadDate,
                    "row " + std::to_string(row) + ": bad debut date '" + field + "'");
    };
    if (parts.size() != 3) fail();
    int d = 0, m = 0, yy = 0;
    try {
        std::size_t used;
        d = std::stoi(parts[0], &used);
        if (used != parts[0].size()) fail();
        m = std::stoi(parts[1], &used);
        if (used != parts[1].size()) fail();
        yy = std::stoi(parts[2], &used);
        if (used != parts[2].size() || parts[2].size() > 2) fail();
    } catch (const std::logic_error&) {
        fail();
    }
    Date date{yy >= 90 ? 1900 + yy : 2000 + yy, m, d};
    if (!is_valid_date(date)) fail();
    return date;
}

std::string fold_simple(const std::string& s) { return uni::case_fold(s); }

}  // namespace

ArtistCatalog::ArtistCatalog(std::vector<ArtistRecord> records) : records_(std::move(records)) {
    std::set<std::string> names_folded;
    std::unordered_map<std::string, ArtistId> alias_owner;
    for (std::size_t i = 0; i < records_.size(); ++i) {
        const ArtistRecord& r = records_[i];
        const ArtistId id = static_cast<ArtistId>(i);
        if (r.size < 1) throw Error(ErrorCode::BadSize, "artist '" + r.name + "': size < 1");
        if (!is_valid_date(r.debut))
            throw Error(ErrorCode::BadDate, "artist '" + r.name + "': invalid debut");
        if (!names_folded.insert(fold_simple(r.name)).second)
            throw Error(ErrorCode::DuplicateArtist, "duplicate artist name '" + r.name + "'");
        if (r.aliases.empty())
            throw Error(ErrorCode::BadAlias, "artist '" + r.name + "': no aliases");
        for (const std::string& alias : r.aliases) {
            if (alias.empty())
                throw Error(ErrorCode::BadAlias, "artist '" + r.name + "': empty alias");
            auto [it, inserted] = alias_owner.emplace(alias, id);
            if (!inserted) {
                if (it->second != id)
                    throw Error(ErrorCode::AliasCollision,
                                "alias '" + alias + "' maps to both '" +
                                    records_[static_cast<std::size_t>(it->second)].name +
                                    "' and '" + r.name + "'");
                continue;  // same alias listed twice for one artist
            }
            AliasEntry entry;
            entry.tokens = uni::tokenize(alias);
            entry.artist = id;
            entry.hashtag_only = alias_is_hashtag_only(alias);
            if (entry.tokens.empty())
                throw Error(ErrorCode::BadAlias, "artist '" + r.name + "': alias '" + alias +
                                                     "' has no alphanumeric content");
            first_token_index_[entry.tokens.front()].push_back(alias_entries_.size());
            alias_entries_.push_back(std::move(entry));
        }
    }
}

namespace {

// True when entry.tokens occurs at position i of tokens.
bool run_matches(const std::vector<std::string>& tokens, std::size_t i,
                 const std::vector<std::string>& seq) {
    if (i + seq.size() > tokens.size()) return false;
    for (std::size_t j = 0; j < seq.size(); ++j) {
        if (tokens[i + j] != seq[j]) return false;
    }
    return true;
}

// Hashtag bodies of the case-folded text: '#' followed by a maximal run
// of word codepoints (letters, digits, underscore).
std::vector<std::string> hashtag_bodies(std::string_view folded) {
    std::vector<std::string> bodies;
    std::size_t pos = 0;
    while (pos < folded.size()) {
        const char32_t cp = uni::decode_utf8(folded, pos);
        if (cp != U'#') continue;
        std::string body;
        std::size_t look = pos;
        while (look < folded.size()) {
            std::size_t next = look;
            const char32_t wc = uni::decode_utf8(folded, next);
            if (!uni::is_word_cp(wc)) break;
            uni::append_utf8(body, wc);
            look = next;
        }
        if (!body.empty()) {
            bodies.push_back(std::move(body));
            pos = look;
        }
    }
    return bodies;
}

}  // namespace

std::vector<ArtistId> ArtistCatalog::match(std::string_view raw_text) const {
    std::vector<ArtistId> out;
    if (raw_text.empty() || alias_entries_.empty()) return out;
    const std::string folded = uni::case_fold(raw_text);
    const std::vector<std::string> tokens = uni::tokenize(folded);

    std::set<ArtistId> found;
    auto scan = [&](const std::vector<std::string>& stream, bool hashtag_context) {
        for (std::size_t i = 0; i < stream.size(); ++i) {
            auto it = first_token_index_.find(stream[i]);
            if (it == first_token_index_.end()) continue;
            for (std::size_t entry_idx : it->second) {
                const AliasEntry& e = alias_entries_[entry_idx];
                if (e.hashtag_only && !hashtag_context) continue;
                if (run_matches(stream, i, e.tokens)) found.insert(e.artist);
            }
        }
    };
    scan(tokens, false);
    for (const std::string& body : hashtag_bodies(folded)) {
        scan(uni::tokenize(body), true);
    }
    out.assign(found.begin(), found.end());
    return out;
}

std::vector<std::string> ArtistCatalog::names() const {
    std::vector<std::string> out;
    out.reserve(records_.size());
    for (const auto& r : records_) out.push_back(r.name);
    return out;
}

ArtistCatalog parse_artist_catalog(std::string_view csv_text) {
    std::vector<ArtistRecord> records;
    std::istringstream in{std::string(csv_text)};
    std::string line;
    std::size_t row = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_csv_row(line);
        if (!saw_header) {
            if (fields.size() < 6 || trim(fields[0]) != "Name" || trim(fields[1]) != "Gender" ||
                trim(fields[2]) != "Debut" || trim(fields[3]) != "Agency" ||
                trim(fields[4]) != "Size" || trim(fields[5]) != "Active")
                throw Error(ErrorCode::MalformedLine, "row 1: bad catalog header");
            saw_header = true;
            continue;
        }
        if (fields.size() < 6)
            throw Error(ErrorCode::MalformedLine,
                        "row " + std::to_string(row) + ": expected >= 6 fields");
        ArtistRecord r;
        r.name = trim(fields[0]);

        const std::string gender = fold_simple(trim(fields[1]));
        if (gender == "female") r.gender = Gender::Female;
        else if (gender == "male") r.gender = Gender::Male;
        else if (gender == "mixed") r.gender = Gender::Mixed;
        else
            throw Error(ErrorCode::BadEnum,
                        "row " + std::to_string(row) + ": bad gender '" + fields[1] + "'");

        r.debut = parse_debut(trim(fields[2]), row);
        r.agency = trim(fields[3]);

        const std::string size_field = trim(fields[4]);
        try {
            std::size_t used;
            r.size = std::stoi(size_field, &used);
            if (used != size_field.size()) throw std::invalid_argument(size_field);
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::BadSize,
                        "row " + std::to_string(row) + ": bad size '" + size_field + "'");
        }
        if (r.size < 1)
            throw Error(ErrorCode::BadSize,
                        "row " + std::to_string(row) + ": size must be >= 1");

        const std::string active = fold_simple(trim(fields[5]));
        if (active == "yes") r.active = true;
        else if (active == "no") r.active = false;
        else
            throw Error(ErrorCode::BadEnum,
                        "row " + std::to_string(row) + ": bad active flag '" + fields[5] + "'");

        const std::string canon = canonical_alias(r.name);
        if (canon.empty())
            throw Error(ErrorCode::BadAlias, "row " + std::to_string(row) +
                                                 ": name '" + r.name +
                                                 "' has no alphanumeric content");
        r.aliases.push_back(canon);
        if (fields.size() >= 7) {
            for (const std::string& raw_alias : split(fields[6], ';')) {
                std::string alias = trim(raw_alias);
                if (alias.empty()) continue;
                // canonicalize: case-fold, collapse to single-spaced tokens
                auto toks = uni::tokenize(uni::case_fold(alias));
                if (toks.empty())
                    throw Error(ErrorCode::BadAlias, "row " + std::to_string(row) +
                                                         ": alias '" + alias +
                                                         "' has no alphanumeric content");
                std::string joined;
                for (std::size_t i = 0; i < toks.size(); ++i) {
                    if (i) joined.push_back(' ');
                    joined += toks[i];
                }
                if (joined != canon &&
                    std::find(r.aliases.begin(), r.aliases.end(), joined) == r.aliases.end())
                    r.aliases.push_back(joined);
            }
        }
        records.push_back(std::move(r));
    }
    if (!saw_header) throw Error(ErrorCode::MalformedLine, "missing catalog header");
    return ArtistCatalog(std::move(records));
}

std::string serialize_artist_catalog(const ArtistCatalog& catalog) {
    std::string out = "Name,Gender,Debut,Agency,Size,Active,Aliases\n";
    for (const ArtistRecord& r : catalog.records()) {
        out += csv_escape(r.name);
        out.push_back(',');
        out += gender_name(r.gender);
        out.push_back(',');
        char date_buf[16];
        std::snprintf(date_buf, sizeof(date_buf), "%d/%02d/%02d", r.debut.day, r.debut.month,
                      r.debut.year % 100);
        out += date_buf;
        out.push_back(',');
        out += csv_escape(r.agency);
        out.push_back(',');
        out += std::to_string(r.size);
        out.push_back(',');
        out += r.active ? "Yes" : "No";
        out.push_back(',');
        std::string extras;
        for (std::size_t i = 1; i < r.aliases.size(); ++i) {
            if (i > 1) extras.push_back(';');
            extras += r.aliases[i];
        }
        out += csv_escape(extras);
        out.push_back('\n');
    }
    return out;
}

}  // namespace fanrec
