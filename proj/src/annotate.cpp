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

#include "fanrec/annotate.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "fanrec/errors.hpp"
#include "fanrec/rng.hpp"
#include "fanrec/unicode.hpp"

// httplib pulls in OpenSSL-dependent code only when asked; plain HTTP
// is enough here, TLS endpoints are expected to sit behind a local proxy.
#include <httplib.h>

namespace fanrec {

using nlohmann::json;

const char* sentiment_name(Sentiment s) {
    switch (s) {
        case Sentiment::Positive: return "positive";
        case Sentiment::Negative: return "negative";
        case Sentiment::Neutral: return "neutral";
    }
    return "?";
}

const char* facet_name(Facet f) {
    switch (f) {
        case Facet::MusicListening: return "music-listening";
        case Facet::LiveEvents: return "live-events";
        case Facet::FanContent: return "fan-content";
        case Facet::NewsDiscussion: return "news-discussion";
        case Facet::Other: return "other";
    }
    return "?";
}

bool sentiment_from_name(const std::string& name, Sentiment* out) {
    for (Sentiment s : {Sentiment::Positive, Sentiment::Negative, Sentiment::Neutral}) {
        if (name == sentiment_name(s)) {
            *out = s;
            return true;
        }
    }
    return false;
}

bool facet_from_name(const std::string& name, Facet* out) {
    for (Facet f : {Facet::MusicListening, Facet::LiveEvents, Facet::FanContent,
                    Facet::NewsDiscussion, Facet::Other}) {
        if (name == facet_name(f)) {
            *out = f;
            return true;
        }
    }
    return false;
}

std::string label_to_json(const AnnotationLabel& label) {
    json obj;
    obj["sentiment"] = sentiment_name(label.sentiment);
    obj["facet"] = facet_name(label.facet);
    obj["artists"] = label.artists;
    return obj.dump();
}

std::string build_prompt(const std::string& tweet_text,
                         const std::vector<std::string>& catalog_names) {
    // Template v1. Changing any character invalidates existing caches.
    std::string prompt =
        "You label K-pop tweets. Reply with only a JSON object with keys "
        "sentiment, facet, artists.\n";
    prompt += "sentiment is one of [\"positive\",\"negative\",\"neutral\"].\n";
    prompt +=
        "facet is one of [\"music-listening\",\"live-events\",\"fan-content\","
        "\"news-discussion\",\"other\"].\n";
    prompt += "artists lists names the tweet mentions, chosen from ";
    prompt += json(catalog_names).dump();
    prompt += ".\nTweet: ";
    prompt += json(tweet_text).dump();
    prompt.push_back('\n');
    return prompt;
}

AnnotationLabel parse_annotation(const std::string& raw_response) {
    // first balanced {...} span, string-aware
    std::size_t start = raw_response.find('{');
    json obj;
    bool parsed = false;
    while (start != std::string::npos && !parsed) {
        int depth = 0;
        bool in_string = false;
        for (std::size_t i = start; i < raw_response.size(); ++i) {
            const char c = raw_response[i];
            if (in_string) {
                if (c == '\\') ++i;
                else if (c == '"') in_string = false;
            } else if (c == '"') {
                in_string = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                if (--depth == 0) {
                    try {
                        obj = json::parse(raw_response.substr(start, i - start + 1));
                        parsed = true;
                    } catch (const json::parse_error&) {
                    }
                    break;
                }
            }
        }
        if (!parsed) start = raw_response.find('{', start + 1);
    }
    if (!parsed) throw Error(ErrorCode::NoJsonFound, "no JSON object in response");

    for (const char* key : {"sentiment", "facet", "artists"}) {
        if (!obj.contains(key))
            throw Error(ErrorCode::SchemaError, std::string("missing key '") + key + "'");
    }
    if (!obj["sentiment"].is_string() || !obj["facet"].is_string() || !obj["artists"].is_array())
        throw Error(ErrorCode::SchemaError, "wrong value type in annotation");

    AnnotationLabel label;
    if (!sentiment_from_name(obj["sentiment"].get<std::string>(), &label.sentiment))
        throw Error(ErrorCode::EnumError,
                    "bad sentiment '" + obj["sentiment"].get<std::string>() + "'");
    if (!facet_from_name(obj["facet"].get<std::string>(), &label.facet))
        throw Error(ErrorCode::EnumError, "bad facet '" + obj["facet"].get<std::string>() + "'");
    for (const auto& a : obj["artists"]) {
        if (!a.is_string()) throw Error(ErrorCode::SchemaError, "non-string artist entry");
        label.artists.push_back(a.get<std::string>());
    }
    return label;
}

namespace {

struct LexiconEntry {
    const char* keyword;
    int target;  // Sentiment or Facet, see tables below
};

// Checked-in stub lexicon; keep in sync with README "Stub annotator".
constexpr const char* kPositiveWords[] = {"love", "best", "stan"};
constexpr const char* kNegativeWords[] = {"hate", "worst", "flop"};

struct FacetKeywords {
    Facet facet;
    const char* words[3];
};

// Probed in facet enum order; first hit wins.
constexpr FacetKeywords kFacetLexicon[] = {
    {Facet::MusicListening, {"stream", "album", "song"}},
    {Facet::LiveEvents, {"concert", "tour", "stage"}},
    {Facet::FanContent, {"fancam", "fanart", "edit"}},
    {Facet::NewsDiscussion, {"news", "statement", "announce"}},
};

bool contains_token(const std::vector<std::string>& tokens, const char* word) {
    for (const std::string& t : tokens) {
        if (t == word) return true;
    }
    return false;
}

}  // namespace

AnnotationLabel stub_annotate(const std::string& text, const ArtistCatalog& catalog) {
    const std::vector<std::string> tokens = uni::tokenize(uni::case_fold(text));

    AnnotationLabel label;
    bool positive = false, negative = false;
    for (const char* w : kPositiveWords) positive = positive || contains_token(tokens, w);
    for (const char* w : kNegativeWords) negative = negative || contains_token(tokens, w);
    label.sentiment =
        negative ? Sentiment::Negative : (positive ? Sentiment::Positive : Sentiment::Neutral);

    label.facet = Facet::Other;
    for (const FacetKeywords& fk : kFacetLexicon) {
        bool hit = false;
        for (const char* w : fk.words) hit = hit || contains_token(tokens, w);
        if (hit) {
            label.facet = fk.facet;
            break;
        }
    }
    for (ArtistId id : catalog.match(text)) label.artists.push_back(catalog.record(id).name);
    return label;
}

namespace {

class HttpTransport : public ChatTransport {
  public:
    explicit HttpTransport(std::string url) {
        // split scheme://host[:port]/path
        std::string rest = url;
        auto scheme_end = rest.find("://");
        if (scheme_end != std::string::npos) rest = rest.substr(scheme_end + 3);
        auto path_start = rest.find('/');
        host_ = rest.substr(0, path_start);
        path_ = path_start == std::string::npos ? "/" : rest.substr(path_start);
        if (url.rfind("https://", 0) == 0) host_ = "https://" + host_;
        else host_ = "http://" + host_;
    }

    Reply post(const std::string& request_body, const std::string& api_key) override {
        httplib::Client client(host_);
        client.set_connection_timeout(10, 0);
        client.set_read_timeout(120, 0);
        httplib::Headers headers;
        if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);
        auto res = client.Post(path_, headers, request_body, "application/json");
        Reply reply;
        if (!res) {
            reply.transport_ok = false;
            return reply;
        }
        reply.transport_ok = true;
        reply.status = res->status;
        reply.body = res->body;
        return reply;
    }

  private:
    std::string host_;
    std::string path_;
};

std::string cache_key(const std::string& model_name, const std::string& prompt) {
    std::uint64_t h = fnv1a64(model_name);
    h = fnv1a64("\x1f", 1, h);
    h = fnv1a64(prompt.data(), prompt.size(), h);
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// Append-only JSON Lines cache of {key, label}; duplicate keys resolve
// to the last occurrence.
class AnnotationCache {
  public:
    explicit AnnotationCache(std::string path) : path_(std::move(path)) {
        if (path_.empty()) return;
        std::ifstream in(path_);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            try {
                json obj = json::parse(line);
                entries_[obj.at("key").get<std::string>()] =
                    parse_annotation(obj.at("label").dump());
            } catch (...) {
                // tolerate torn tail lines from interrupted runs
            }
        }
    }

    bool lookup(const std::string& key, AnnotationLabel* out) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return false;
        *out = it->second;
        return true;
    }

    void insert(const std::string& key, const AnnotationLabel& label) {
        entries_[key] = label;
        if (path_.empty()) return;
        std::ofstream out(path_, std::ios::app);
        out << "{\"key\":\"" << key << "\",\"label\":" << label_to_json(label) << "}\n";
    }

  private:
    std::string path_;
    std::map<std::string, AnnotationLabel> entries_;
};

std::string response_text(const std::string& body) {
    json obj = json::parse(body);
    if (obj.contains("choices") && obj["choices"].is_array() && !obj["choices"].empty()) {
        const json& first = obj["choices"][0];
        if (first.contains("message") && first["message"].contains("content"))
            return first["message"]["content"].get<std::string>();
        if (first.contains("text")) return first["text"].get<std::string>();
    }
    if (obj.contains("text")) return obj["text"].get<std::string>();
    throw Error(ErrorCode::SchemaError, "response carries no text field");
}

}  // namespace

std::unique_ptr<ChatTransport> make_http_transport(const std::string& endpoint_url) {
    return std::make_unique<HttpTransport>(endpoint_url);
}

bool annotation_mode_from_name(const std::string& name, AnnotationMode* out) {
    if (name == "off") *out = AnnotationMode::Off;
    else if (name == "stub") *out = AnnotationMode::Stub;
    else if (name == "online") *out = AnnotationMode::Online;
    else return false;
    return true;
}

const char* annotation_mode_name(AnnotationMode mode) {
    switch (mode) {
        case AnnotationMode::Off: return "off";
        case AnnotationMode::Stub: return "stub";
        case AnnotationMode::Online: return "online";
    }
    return "?";
}

std::map<std::string, AnnotationLabel> annotate_batch(
    const std::vector<std::pair<std::string, std::string>>& tweets, const AnnotatorConfig& cfg,
    const ArtistCatalog& catalog, AnnotationMode mode, ChatTransport* transport,
    BatchStats* stats) {
    std::map<std::string, AnnotationLabel> results;
    BatchStats local_stats;

    if (mode == AnnotationMode::Off) {
        if (stats) *stats = local_stats;
        return results;
    }
    if (mode == AnnotationMode::Stub) {
        for (const auto& [id, text] : tweets) results[id] = stub_annotate(text, catalog);
        if (stats) *stats = local_stats;
        return results;
    }

    if (cfg.endpoint_url.empty())
        throw Error(ErrorCode::ConfigError, "online annotation needs endpoint_url");
    if (cfg.max_in_flight < 1)
        throw Error(ErrorCode::ConfigError, "max_in_flight must be >= 1");
    const char* key_env = std::getenv(cfg.api_key_env_var.c_str());
    if (key_env == nullptr || *key_env == '\0')
        throw Error(ErrorCode::ConfigError,
                    "online annotation needs the API key in $" + cfg.api_key_env_var);
    const std::string api_key = key_env;

    std::unique_ptr<ChatTransport> owned;
    if (transport == nullptr) {
        owned = make_http_transport(cfg.endpoint_url);
        transport = owned.get();
    }

    const std::vector<std::string> names = catalog.names();

    // Collapse duplicate prompts so one request serves all of them.
    struct Job {
        std::string key;
        std::string prompt;
        std::vector<std::size_t> tweet_indices;
    };
    std::vector<Job> jobs;
    std::map<std::string, std::size_t> job_by_key;
    for (std::size_t i = 0; i < tweets.size(); ++i) {
        std::string prompt = build_prompt(tweets[i].second, names);
        std::string key = cache_key(cfg.model_name, prompt);
        auto [it, inserted] = job_by_key.emplace(key, jobs.size());
        if (inserted) jobs.push_back(Job{std::move(key), std::move(prompt), {i}});
        else jobs[it->second].tweet_indices.push_back(i);
    }

    AnnotationCache cache(cfg.cache_path);
    std::vector<AnnotationLabel> job_labels(jobs.size());
    std::vector<std::size_t> pending;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        if (cache.lookup(jobs[j].key, &job_labels[j])) ++local_stats.cache_hits;
        else pending.push_back(j);
    }

    std::mutex mu;  // guards cache writes, stats and the cursor
    std::size_t cursor = 0;

    auto worker = [&]() {
        while (true) {
            std::size_t j;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (cursor >= pending.size()) return;
                j = pending[cursor++];
            }
            Job& job = jobs[j];
            json request;
            request["model"] = cfg.model_name;
            request["messages"] = json::array({json{{"role", "user"}, {"content", job.prompt}}});
            const std::string body = request.dump();

            bool ok = false;
            AnnotationLabel label;  // neutral/other fallback
            for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
                if (attempt > 0 && cfg.retry_base_ms > 0) {
                    std::this_thread::sleep_for(
                        std::chrono::milliseconds(static_cast<std::int64_t>(cfg.retry_base_ms)
                                                  << (attempt - 1)));
                }
                {
                    std::lock_guard<std::mutex> lock(mu);
                    ++local_stats.requests_sent;
                }
                ChatTransport::Reply reply = transport->post(body, api_key);
                if (!reply.transport_ok || reply.status >= 500) continue;  // retryable
                if (reply.status != 200) break;  // 4xx: retrying cannot help
                try {
                    label = parse_annotation(response_text(reply.body));
                    ok = true;
                } catch (const Error&) {
                    // malformed model output; retries use the same prompt,
                    // so give up immediately
                }
                break;
            }
            if (!ok) {
                std::lock_guard<std::mutex> lock(mu);
                ++local_stats.failures;
                std::fprintf(stderr, "warning: annotation failed for prompt key %s, using %s/%s\n",
                             job.key.c_str(), facet_name(label.facet),
                             sentiment_name(label.sentiment));
            }
            job_labels[j] = label;
            {
                std::lock_guard<std::mutex> lock(mu);
                if (ok) cache.insert(job.key, label);
            }
        }
    };

    const int n_workers =
        static_cast<int>(std::min<std::size_t>(pending.size(), static_cast<std::size_t>(cfg.max_in_flight)));
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n_workers));
    for (int t = 0; t < n_workers; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();

    for (std::size_t j = 0; j < jobs.size(); ++j) {
        for (std::size_t i : jobs[j].tweet_indices) results[tweets[i].first] = job_labels[j];
    }
    if (stats) *stats = local_stats;
    return results;
}

}  // namespace fanrec
