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

#include "fanrec/preprocess.hpp"

#include <cctype>

#include <json.hpp>

#include "fanrec/errors.hpp"
#include "fanrec/unicode.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace fanrec {

using nlohmann::json;

namespace {

bool is_ascii_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool starts_with(std::string_view text, std::size_t pos, std::string_view prefix) {
    return text.size() - pos >= prefix.size() && text.substr(pos, prefix.size()) == prefix;
}

// Length in bytes of the word (letters/digits/underscore) at `pos`.
std::size_t word_length(std::string_view text, std::size_t pos) {
    std::size_t end = pos;
    while (end < text.size()) {
        std::size_t next = end;
        if (!uni::is_word_cp(uni::decode_utf8(text, next))) break;
        end = next;
    }
    return end - pos;
}

}  // namespace

CleanText clean_text(std::string_view raw) {
    CleanText out;
    out.text.reserve(raw.size());
    std::size_t pos = 0;
    while (pos < raw.size()) {
        if (starts_with(raw, pos, "http://") || starts_with(raw, pos, "https://")) {
            while (pos < raw.size() && !is_ascii_space(raw[pos])) ++pos;
            if (pos < raw.size()) ++pos;  // the whitespace that ended the URL
            continue;
        }
        const char c = raw[pos];
        if (c == '@' || c == '#') {
            const std::size_t len = word_length(raw, pos + 1);
            if (len > 0) {
                if (c == '#')
                    out.hashtags.push_back(uni::case_fold(raw.substr(pos + 1, len)));
                pos += 1 + len;
                continue;
            }
        }
        std::size_t next = pos;
        uni::decode_utf8(raw, next);
        out.text.append(raw.substr(pos, next - pos));
        pos = next;
    }
    return out;
}

std::string case_fold(std::string_view text) { return uni::case_fold(text); }

std::vector<std::string> tokenize(std::string_view text) { return uni::tokenize(text); }

TokenizedDoc preprocess_tweet(const Tweet& tweet, const ArtistCatalog& catalog) {
    TokenizedDoc doc;
    doc.tweet_id = tweet.id;
    doc.author_id = tweet.author_id;
    doc.artists = catalog.match(tweet.text);  // raw text: hashtags still present
    CleanText cleaned = clean_text(tweet.text);
    doc.hashtags = std::move(cleaned.hashtags);
    doc.tokens = tokenize(case_fold(cleaned.text));
    return doc;
}

std::vector<TokenizedDoc> preprocess_corpus_serial(const std::vector<Tweet>& tweets,
                                                   const ArtistCatalog& catalog) {
    std::vector<TokenizedDoc> docs(tweets.size());
    for (std::size_t i = 0; i < tweets.size(); ++i) docs[i] = preprocess_tweet(tweets[i], catalog);
    return docs;
}

std::vector<TokenizedDoc> preprocess_corpus(const std::vector<Tweet>& tweets,
                                            const ArtistCatalog& catalog) {
    std::vector<TokenizedDoc> docs(tweets.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(tweets.size()); ++i) {
        docs[static_cast<std::size_t>(i)] =
            preprocess_tweet(tweets[static_cast<std::size_t>(i)], catalog);
    }
    return docs;
}

std::string doc_to_json_line(const TokenizedDoc& doc) {
    json obj;
    obj["tweet_id"] = doc.tweet_id;
    obj["author_id"] = doc.author_id;
    obj["tokens"] = doc.tokens;
    obj["hashtags"] = doc.hashtags;
    obj["artists"] = doc.artists;
    return obj.dump();
}

TokenizedDoc doc_from_json_line(const std::string& line) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::MalformedLine, std::string("tokenized doc: ") + e.what());
    }
    TokenizedDoc doc;
    doc.tweet_id = obj.at("tweet_id").get<std::string>();
    doc.author_id = obj.at("author_id").get<std::string>();
    doc.tokens = obj.at("tokens").get<std::vector<std::string>>();
    doc.hashtags = obj.at("hashtags").get<std::vector<std::string>>();
    doc.artists = obj.at("artists").get<std::vector<ArtistId>>();
    return doc;
}

}  // namespace fanrec
