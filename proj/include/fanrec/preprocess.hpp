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

#ifndef FANREC_PREPROCESS_HPP
#define FANREC_PREPROCESS_HPP

#include <string>
#include <string_view>
#include <vector>

#include "fanrec/catalog.hpp"
#include "fanrec/tweet.hpp"

namespace fanrec {

struct CleanText {
    std::string text;                   // URLs, @mentions and #hashtags removed
    std::vector<std::string> hashtags;  // captured bodies, case-folded, in order
};

/// Deletion rules, applied in one left-to-right scan:
///  - `http://` or `https://` up to the next whitespace; the single
///    whitespace character that terminates the URL is consumed with it
///  - `@` + word (letters/digits/underscore)
///  - `#` + word; the body is case-folded and captured
CleanText clean_text(std::string_view raw);

/// Unicode simple case folding, codepoint-wise. Idempotent.
std::string case_fold(std::string_view text);

/// Maximal runs of Unicode letters/digits; expects case-folded input.
std::vector<std::string> tokenize(std::string_view text);

struct TokenizedDoc {
    std::string tweet_id;
    std::string author_id;
    std::vector<std::string> tokens;
    std::vector<std::string> hashtags;
    std::vector<ArtistId> artists;  // sorted ascending

    bool operator==(const TokenizedDoc&) const = default;
};

/// Artist matching runs on the raw text (so hashtag-only mentions
/// count), then clean -> fold -> tokenize.
TokenizedDoc preprocess_tweet(const Tweet& tweet, const ArtistCatalog& catalog);

/// Order-preserving parallel map over the corpus.
std::vector<TokenizedDoc> preprocess_corpus(const std::vector<Tweet>& tweets,
                                            const ArtistCatalog& catalog);
std::vector<TokenizedDoc> preprocess_corpus_serial(const std::vector<Tweet>& tweets,
                                                   const ArtistCatalog& catalog);

/// JSON line with fields tweet_id, author_id, tokens, hashtags, artists.
std::string doc_to_json_line(const TokenizedDoc& doc);
TokenizedDoc doc_from_json_line(const std::string& line);

}  // namespace fanrec

#endif  // FANREC_PREPROCESS_HPP
