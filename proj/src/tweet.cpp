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

#include "fanrec/tweet.hpp"

#include <sstream>

#include <json.hpp>

#include "fanrec/errors.hpp"
#include "fanrec/time_util.hpp"

namespace fanrec {

using nlohmann::json;

std::optional<Tweet> TweetReader::next() {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_number_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw Error(ErrorCode::MalformedLine,
                        "line " + std::to_string(line_number_) + ": " + e.what());
        }
        auto fail = [&](const std::string& what) -> Error {
            return Error(ErrorCode::MalformedLine,
                         "line " + std::to_string(line_number_) + ": " + what);
        };
        if (!obj.is_object()) throw fail("not a JSON object");
        for (const char* key : {"id", "author_id", "created_at", "text"}) {
            if (!obj.contains(key) || !obj[key].is_string())
                throw fail(std::string("missing or non-string field '") + key + "'");
        }
        Tweet t;
        t.id = obj["id"].get<std::string>();
        t.author_id = obj["author_id"].get<std::string>();
        t.text = obj["text"].get<std::string>();
        if (!parse_iso8601_utc(obj["created_at"].get<std::string>(), &t.created_at))
            throw fail("bad created_at '" + obj["created_at"].get<std::string>() + "'");
        if (obj.contains("lang")) {
            if (!obj["lang"].is_string()) throw fail("non-string lang");
            t.lang = obj["lang"].get<std::string>();
        }
        if (!seen_ids_.insert(t.id).second)
            throw Error(ErrorCode::DuplicateTweetId, "line " + std::to_string(line_number_) +
                                                         ": duplicate tweet id '" + t.id + "'");
        return t;
    }
    return std::nullopt;
}

std::vector<Tweet> parse_tweets(std::istream& in) {
    TweetReader reader(in);
    std::vector<Tweet> out;
    while (auto t = reader.next()) out.push_back(std::move(*t));
    return out;
}

std::vector<Tweet> parse_tweets(const std::string& jsonl_text) {
    std::istringstream in(jsonl_text);
    return parse_tweets(in);
}

std::string tweet_to_json_line(const Tweet& tweet) {
    json obj;
    obj["id"] = tweet.id;
    obj["author_id"] = tweet.author_id;
    obj["created_at"] = format_iso8601_utc(tweet.created_at);
    obj["text"] = tweet.text;
    if (tweet.lang) obj["lang"] = *tweet.lang;
    return obj.dump();
}

std::vector<MatchedTweet> filter_corpus(const std::vector<Tweet>& tweets,
                                        const ArtistCatalog& catalog) {
    std::vector<MatchedTweet> out;
    for (const Tweet& t : tweets) {
        auto matches = catalog.match(t.text);
        if (!matches.empty()) out.push_back(MatchedTweet{t, std::move(matches)});
    }
    return out;
}

}  // namespace fanrec
