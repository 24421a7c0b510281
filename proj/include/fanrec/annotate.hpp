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

#ifndef FANREC_ANNOTATE_HPP
#define FANREC_ANNOTATE_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fanrec/catalog.hpp"

namespace fanrec {

enum class Sentiment { Positive, Negative, Neutral };

/// Order defines the facet vector dimensions appended after the text
/// vocabulary; do not reorder.
enum class Facet { MusicListening, LiveEvents, FanContent, NewsDiscussion, Other };

constexpr std::size_t kFacetCount = 5;

const char* sentiment_name(Sentiment s);
const char* facet_name(Facet f);
bool sentiment_from_name(const std::string& name, Sentiment* out);
bool facet_from_name(const std::string& name, Facet* out);

struct AnnotationLabel {
    Sentiment sentiment = Sentiment::Neutral;
    Facet facet = Facet::Other;
    std::vector<std::string> artists;

    bool operator==(const AnnotationLabel&) const = default;
};

std::string label_to_json(const AnnotationLabel& label);

struct AnnotatorConfig {
    std::string endpoint_url;
    std::string model_name;
    std::string api_key_env_var = "FANREC_API_KEY";
    int max_in_flight = 4;
    int max_retries = 3;
    std::string cache_path;
    // Backoff before retry n is retry_base_ms << (n-1); tests set 0.
    int retry_base_ms = 250;
};

/// Fixed prompt template (see README "Annotation prompt"): the labeling
/// instruction, the enum lists, the catalog names and the tweet text in
/// a JSON-escaped quoted block.
std::string build_prompt(const std::string& tweet_text,
                         const std::vector<std::string>& catalog_names);

/// Extracts the first JSON object from a model response and validates
/// it against the label schema. Unknown keys are ignored.
/// Throws NoJsonFound / SchemaError / EnumError.
AnnotationLabel parse_annotation(const std::string& raw_response);

/// Deterministic offline annotator driven by the built-in keyword
/// lexicon; pure function of (text, lexicon, catalog).
AnnotationLabel stub_annotate(const std::string& text, const ArtistCatalog& catalog);

/// Transport abstraction so tests can fake the chat-completion service.
class ChatTransport {
  public:
    virtual ~ChatTransport() = default;

    struct Reply {
        bool transport_ok = false;  // false: connection-level failure
        int status = 0;
        std::string body;
    };

    /// POSTs a chat-completion request body; api_key goes into the
    /// Authorization header and must never be logged.
    virtual Reply post(const std::string& request_body, const std::string& api_key) = 0;
};

std::unique_ptr<ChatTransport> make_http_transport(const std::string& endpoint_url);

enum class AnnotationMode { Off, Stub, Online };

bool annotation_mode_from_name(const std::string& name, AnnotationMode* out);
const char* annotation_mode_name(AnnotationMode mode);

struct BatchStats {
    std::int64_t cache_hits = 0;
    std::int64_t requests_sent = 0;   // network posts, including retries
    std::int64_t failures = 0;        // tweets degraded to neutral/other
};

/// Annotates every (id, text) pair. Online mode posts at most
/// max_in_flight concurrent requests, retries transport/5xx failures
/// with exponential backoff, serves repeated prompts from the cache and
/// degrades to neutral/other after max_retries. Stub mode is pure and
/// touches neither network nor cache.
std::map<std::string, AnnotationLabel> annotate_batch(
    const std::vector<std::pair<std::string, std::string>>& tweets, const AnnotatorConfig& cfg,
    const ArtistCatalog& catalog, AnnotationMode mode, ChatTransport* transport = nullptr,
    BatchStats* stats = nullptr);

}  // namespace fanrec

#endif  // FANREC_ANNOTATE_HPP
