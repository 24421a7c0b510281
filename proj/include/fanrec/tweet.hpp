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

#ifndef FANREC_TWEET_HPP
#define FANREC_TWEET_HPP

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "fanrec/catalog.hpp"

namespace fanrec {

struct Tweet {
    std::string id;
    std::string author_id;
    std::int64_t created_at = 0;  // Unix seconds, UTC
    std::string text;
    std::optional<std::string> lang;

    bool operator==(const Tweet&) const = default;
};

/// Single-pass JSON Lines reader; one object per line with fields
/// id, author_id, created_at, text and optional lang. Not thread-safe:
/// consume from one thread at a time.
class TweetReader {
  public:
    explicit TweetReader(std::istream& in) : in_(in) {}

    /// Next tweet in file order, or nullopt at end of stream.
    /// Throws MalformedLine / DuplicateTweetId.
    std::optional<Tweet> next();

    std::size_t line_number() const { return line_number_; }

  private:
    std::istream& in_;
    std::size_t line_number_ = 0;
    std::unordered_set<std::string> seen_ids_;
};

std::vector<Tweet> parse_tweets(std::istream& in);
std::vector<Tweet> parse_tweets(const std::string& jsonl_text);

std::string tweet_to_json_line(const Tweet& tweet);

struct MatchedTweet {
    Tweet tweet;
    std::vector<ArtistId> artists;  // sorted, non-empty after filtering
};

/// Keeps only tweets mentioning at least one catalog artist; input
/// order is preserved.
std::vector<MatchedTweet> filter_corpus(const std::vector<Tweet>& tweets,
                                        const ArtistCatalog& catalog);

}  // namespace fanrec

#endif  // FANREC_TWEET_HPP
