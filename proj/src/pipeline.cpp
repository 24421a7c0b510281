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

#include "fanrec/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fanrec/cluster.hpp"
#include "fanrec/errors.hpp"
#include "fanrec/fanmodel.hpp"
#include "fanrec/metrics.hpp"
#include "fanrec/preprocess.hpp"
#include "fanrec/rng.hpp"
#include "fanrec/time_util.hpp"

namespace fanrec {

namespace fs = std::filesystem;
using nlohmann::json;

std::string PipelineConfig::resolved_catalog_path() const {
    return catalog_path.empty() ? work_dir + "/catalog.csv" : catalog_path;
}

std::string PipelineConfig::resolved_tweets_path() const {
    return tweets_path.empty() ? work_dir + "/tweets.jsonl" : tweets_path;
}

namespace {

[[noreturn]] void config_error(const std::string& what) {
    throw Error(ErrorCode::ConfigError, what);
}

template <typename T>
void take(const json& obj, const char* key, T* out) {
    if (!obj.contains(key)) return;
    try {
        *out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        config_error(std::string("bad value for '") + key + "'");
    }
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; }) == allowed.end())
            config_error("unknown key '" + key + "' in " + where);
    }
}

}  // namespace

PipelineConfig config_from_json(const std::string& text) {
    json obj;
    try {
        obj = json::parse(text);
    } catch (const json::parse_error& e) {
        config_error(std::string("config is not valid JSON: ") + e.what());
    }
    if (!obj.is_object()) config_error("config root must be a JSON object");
    check_keys(obj,
               {"seed", "paths", "vectorize", "profiles", "cluster", "annotate", "recommend",
                "eval", "synth"},
               "config root");

    PipelineConfig cfg;
    take(obj, "seed", &cfg.seed);
    if (obj.contains("paths")) {
        const json& p = obj["paths"];
        check_keys(p, {"catalog", "tweets", "work_dir"}, "paths");
        take(p, "catalog", &cfg.catalog_path);
        take(p, "tweets", &cfg.tweets_path);
        take(p, "work_dir", &cfg.work_dir);
    }
    if (obj.contains("vectorize")) {
        const json& v = obj["vectorize"];
        check_keys(v, {"min_df", "max_df_ratio", "weighting"}, "vectorize");
        take(v, "min_df", &cfg.min_df);
        take(v, "max_df_ratio", &cfg.max_df_ratio);
        std::string weighting = cfg.weighting == Weighting::Tf ? "tf" : "tfidf";
        take(v, "weighting", &weighting);
        if (weighting == "tf") cfg.weighting = Weighting::Tf;
        else if (weighting == "tfidf") cfg.weighting = Weighting::TfIdf;
        else config_error("weighting must be 'tfidf' or 'tf'");
    }
    if (obj.contains("profiles")) {
        const json& p = obj["profiles"];
        check_keys(p, {"min_tweets", "lambda"}, "profiles");
        take(p, "min_tweets", &cfg.min_tweets);
        take(p, "lambda", &cfg.lambda);
        if (cfg.lambda < 0.0 || cfg.lambda > 1.0) config_error("lambda must be in [0, 1]");
    }
    if (obj.contains("cluster")) {
        const json& c = obj["cluster"];
        check_keys(c, {"k", "k_min", "k_max", "max_iter", "tol"}, "cluster");
        take(c, "k", &cfg.k);
        take(c, "k_min", &cfg.k_min);
        take(c, "k_max", &cfg.k_max);
        take(c, "max_iter", &cfg.max_iter);
        take(c, "tol", &cfg.tol);
    }
    if (obj.contains("annotate")) {
        const json& a = obj["annotate"];
        check_keys(a,
                   {"mode", "endpoint_url", "model_name", "api_key_env_var", "max_in_flight",
                    "max_retries", "cache_path", "retry_base_ms"},
                   "annotate");
        std::string mode = annotation_mode_name(cfg.annotation_mode);
        take(a, "mode", &mode);
        if (!annotation_mode_from_name(mode, &cfg.annotation_mode))
            config_error("annotate.mode must be off, stub or online");
        take(a, "endpoint_url", &cfg.annotator.endpoint_url);
        take(a, "model_name", &cfg.annotator.model_name);
        take(a, "api_key_env_var", &cfg.annotator.api_key_env_var);
        take(a, "max_in_flight", &cfg.annotator.max_in_flight);
        take(a, "max_retries", &cfg.annotator.max_retries);
        take(a, "cache_path", &cfg.annotator.cache_path);
        take(a, "retry_base_ms", &cfg.annotator.retry_base_ms);
        if (cfg.annotator.max_in_flight < 1) config_error("max_in_flight must be >= 1");
    }
    if (obj.contains("recommend")) {
        const json& r = obj["recommend"];
        check_keys(r, {"alpha", "beta", "n", "exclude_mentioned"}, "recommend");
        take(r, "alpha", &cfg.recommend.alpha);
        take(r, "beta", &cfg.recommend.beta);
        take(r, "n", &cfg.recommend.top_n);
        take(r, "exclude_mentioned", &cfg.recommend.exclude_mentioned);
        if (cfg.recommend.alpha < 0.0 || cfg.recommend.alpha > 1.0)
            config_error("alpha must be in [0, 1]");
        if (cfg.recommend.beta < 0.0) config_error("beta must be >= 0");
        if (cfg.recommend.top_n < 1) config_error("n must be >= 1");
    }
    if (obj.contains("eval")) {
        const json& e = obj["eval"];
        check_keys(e, {"at_k"}, "eval");
        take(e, "at_k", &cfg.eval_at_k);
        if (cfg.eval_at_k < 1) config_error("eval.at_k must be >= 1");
    }
    if (obj.contains("synth")) {
        const json& s = obj["synth"];
        check_keys(s,
                   {"n_clusters", "fans_per_cluster", "tweets_per_fan", "vocab_per_cluster",
                    "shared_vocab", "noise", "artists_per_cluster", "mention_prob",
                    "tokens_per_tweet"},
                   "synth");
        take(s, "n_clusters", &cfg.synth.n_clusters);
        take(s, "fans_per_cluster", &cfg.synth.fans_per_cluster);
        take(s, "tweets_per_fan", &cfg.synth.tweets_per_fan);
        take(s, "vocab_per_cluster", &cfg.synth.vocab_per_cluster);
        take(s, "shared_vocab", &cfg.synth.shared_vocab);
        take(s, "noise", &cfg.synth.noise);
        take(s, "artists_per_cluster", &cfg.synth.artists_per_cluster);
        take(s, "mention_prob", &cfg.synth.mention_prob);
        take(s, "tokens_per_tweet", &cfg.synth.tokens_per_tweet);
    }
    return cfg;
}

namespace {

json config_params_json(const PipelineConfig& cfg) {
    // processing parameters only; paths stay out so the hash is stable
    // across working directories
    json obj;
    obj["seed"] = cfg.seed;
    obj["vectorize"] = {{"min_df", cfg.min_df},
                        {"max_df_ratio", cfg.max_df_ratio},
                        {"weighting", cfg.weighting == Weighting::Tf ? "tf" : "tfidf"}};
    obj["profiles"] = {{"min_tweets", cfg.min_tweets}, {"lambda", cfg.lambda}};
    obj["cluster"] = {{"k", cfg.k},
                      {"k_min", cfg.k_min},
                      {"k_max", cfg.k_max},
                      {"max_iter", cfg.max_iter},
                      {"tol", cfg.tol}};
    obj["annotate"] = {{"mode", annotation_mode_name(cfg.annotation_mode)},
                       {"model_name", cfg.annotator.model_name}};
    obj["recommend"] = {{"alpha", cfg.recommend.alpha},
                        {"beta", cfg.recommend.beta},
                        {"n", cfg.recommend.top_n},
                        {"exclude_mentioned", cfg.recommend.exclude_mentioned}};
    obj["eval"] = {{"at_k", cfg.eval_at_k}};
    obj["synth"] = {{"n_clusters", cfg.synth.n_clusters},
                    {"fans_per_cluster", cfg.synth.fans_per_cluster},
                    {"tweets_per_fan", cfg.synth.tweets_per_fan},
                    {"vocab_per_cluster", cfg.synth.vocab_per_cluster},
                    {"shared_vocab", cfg.synth.shared_vocab},
                    {"noise", cfg.synth.noise},
                    {"artists_per_cluster", cfg.synth.artists_per_cluster},
                    {"mention_prob", cfg.synth.mention_prob},
                    {"tokens_per_tweet", cfg.synth.tokens_per_tweet}};
    return obj;
}

}  // namespace

std::string config_to_json(const PipelineConfig& cfg) {
    json obj = config_params_json(cfg);
    obj["annotate"]["endpoint_url"] = cfg.annotator.endpoint_url;
    obj["annotate"]["api_key_env_var"] = cfg.annotator.api_key_env_var;
    obj["annotate"]["max_in_flight"] = cfg.annotator.max_in_flight;
    obj["annotate"]["max_retries"] = cfg.annotator.max_retries;
    obj["annotate"]["cache_path"] = cfg.annotator.cache_path;
    obj["annotate"]["retry_base_ms"] = cfg.annotator.retry_base_ms;
    obj["paths"] = {{"catalog", cfg.catalog_path},
                    {"tweets", cfg.tweets_path},
                    {"work_dir", cfg.work_dir}};
    return obj.dump(2);
}

std::string config_hash(const PipelineConfig& cfg) {
    const std::string canonical = config_params_json(cfg).dump();
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical)));
    return buf;
}

std::uint64_t stage_seed(const PipelineConfig& cfg, const std::string& stage_name) {
    return fnv1a64(stage_name) ^ cfg.seed;
}

const std::vector<std::string> kStageNames = {"synth",   "ingest",    "preprocess", "annotate",
                                              "vectorize", "profiles", "cluster",   "recommend",
                                              "eval",    "report"};

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    out << content;
    if (!out) throw Error(ErrorCode::IoError, "short write to " + path);
}

void require_file(const std::string& path, const std::string& produced_by) {
    if (!fs::exists(path))
        throw Error(ErrorCode::MissingPrerequisite,
                    path + " is missing; run the '" + produced_by + "' stage first");
}

json artifact_header(const PipelineConfig& cfg, const std::string& artifact) {
    json h;
    h["artifact"] = artifact;
    h["config_hash"] = config_hash(cfg);
    return h;
}

// JSONL artifacts carry a single header object on the first line.
struct JsonlArtifact {
    json header;
    std::vector<std::string> lines;
};

JsonlArtifact read_jsonl_artifact(const std::string& path, const std::string& expected_name) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
    JsonlArtifact artifact;
    std::string line;
    if (!std::getline(in, line))
        throw Error(ErrorCode::MalformedLine, path + ": empty artifact");
    try {
        artifact.header = json::parse(line);
    } catch (const json::parse_error&) {
        throw Error(ErrorCode::MalformedLine, path + ": bad artifact header");
    }
    if (artifact.header.value("artifact", "") != expected_name)
        throw Error(ErrorCode::MalformedLine,
                    path + ": expected artifact '" + expected_name + "'");
    while (std::getline(in, line)) {
        if (!line.empty()) artifact.lines.push_back(std::move(line));
    }
    return artifact;
}

json read_json_artifact(const std::string& path, const std::string& expected_name) {
    json obj;
    try {
        obj = json::parse(read_file(path));
    } catch (const json::parse_error&) {
        throw Error(ErrorCode::MalformedLine, path + ": not valid JSON");
    }
    if (obj.value("artifact", "") != expected_name)
        throw Error(ErrorCode::MalformedLine,
                    path + ": expected artifact '" + expected_name + "'");
    return obj;
}

ArtistCatalog catalog_from_artifact(const json& obj) {
    std::vector<ArtistRecord> records;
    for (const auto& r : obj.at("records")) {
        ArtistRecord rec;
        rec.name = r.at("name").get<std::string>();
        std::string gender = r.at("gender").get<std::string>();
        if (gender == "Female") rec.gender = Gender::Female;
        else if (gender == "Male") rec.gender = Gender::Male;
        else rec.gender = Gender::Mixed;
        if (!parse_date_iso(r.at("debut").get<std::string>(), &rec.debut))
            throw Error(ErrorCode::BadDate, "bad debut in catalog artifact");
        rec.agency = r.at("agency").get<std::string>();
        rec.size = r.at("size").get<int>();
        rec.active = r.at("active").get<bool>();
        rec.aliases = r.at("aliases").get<std::vector<std::string>>();
        records.push_back(std::move(rec));
    }
    return ArtistCatalog(std::move(records));
}

json catalog_to_artifact_payload(const ArtistCatalog& catalog) {
    json records = json::array();
    for (const ArtistRecord& r : catalog.records()) {
        json rec;
        rec["name"] = r.name;
        rec["gender"] = gender_name(r.gender);
        rec["debut"] = format_date_iso(r.debut);
        rec["agency"] = r.agency;
        rec["size"] = r.size;
        rec["active"] = r.active;
        rec["aliases"] = r.aliases;
        records.push_back(std::move(rec));
    }
    return records;
}

struct LoadedCatalog {
    ArtistCatalog catalog;
    std::int64_t max_created_at = 0;
    std::string hash;
};

LoadedCatalog load_catalog_artifact(const PipelineConfig& cfg) {
    const std::string path = cfg.work_dir + "/catalog.json";
    require_file(path, "ingest");
    json obj = read_json_artifact(path, "catalog");
    LoadedCatalog out{catalog_from_artifact(obj), obj.at("max_created_at").get<std::int64_t>(),
                      obj.value("config_hash", "")};
    return out;
}

std::vector<MatchedTweet> load_filtered(const PipelineConfig& cfg, const ArtistCatalog& catalog) {
    const std::string path = cfg.work_dir + "/filtered.jsonl";
    require_file(path, "ingest");
    JsonlArtifact artifact = read_jsonl_artifact(path, "filtered");
    std::map<std::string, ArtistId> by_name;
    for (std::size_t i = 0; i < catalog.size(); ++i)
        by_name[catalog.record(static_cast<ArtistId>(i)).name] = static_cast<ArtistId>(i);
    std::vector<MatchedTweet> out;
    for (const std::string& line : artifact.lines) {
        json obj = json::parse(line);
        MatchedTweet mt;
        mt.tweet.id = obj.at("id").get<std::string>();
        mt.tweet.author_id = obj.at("author_id").get<std::string>();
        if (!parse_iso8601_utc(obj.at("created_at").get<std::string>(), &mt.tweet.created_at))
            throw Error(ErrorCode::MalformedLine, "bad created_at in filtered.jsonl");
        mt.tweet.text = obj.at("text").get<std::string>();
        if (obj.contains("lang")) mt.tweet.lang = obj.at("lang").get<std::string>();
        for (const auto& name : obj.at("artists")) {
            auto it = by_name.find(name.get<std::string>());
            if (it == by_name.end())
                throw Error(ErrorCode::MalformedLine,
                            "filtered.jsonl names unknown artist '" +
                                name.get<std::string>() + "'");
            mt.artists.push_back(it->second);
        }
        out.push_back(std::move(mt));
    }
    return out;
}

std::vector<TokenizedDoc> load_docs(const PipelineConfig& cfg) {
    const std::string path = cfg.work_dir + "/docs.jsonl";
    require_file(path, "preprocess");
    JsonlArtifact artifact = read_jsonl_artifact(path, "docs");
    std::vector<TokenizedDoc> docs;
    docs.reserve(artifact.lines.size());
    for (const std::string& line : artifact.lines) docs.push_back(doc_from_json_line(line));
    return docs;
}

Vocabulary load_vocab(const PipelineConfig& cfg) {
    const std::string path = cfg.work_dir + "/vocab.json";
    require_file(path, "vectorize");
    json obj = read_json_artifact(path, "vocabulary");
    return vocabulary_from_json(obj.at("vocabulary").dump());
}

std::map<std::string, AnnotationLabel> load_annotations(const PipelineConfig& cfg) {
    const std::string path = cfg.work_dir + "/annotations.jsonl";
    require_file(path, "annotate");
    JsonlArtifact artifact = read_jsonl_artifact(path, "annotations");
    std::map<std::string, AnnotationLabel> out;
    for (const std::string& line : artifact.lines) {
        json obj = json::parse(line);
        out[obj.at("id").get<std::string>()] = parse_annotation(obj.at("label").dump());
    }
    return out;
}

std::vector<FanProfile> load_profiles(const PipelineConfig& cfg, const ArtistCatalog& catalog) {
    const std::string path = cfg.work_dir + "/profiles.jsonl";
    require_file(path, "profiles");
    JsonlArtifact artifact = read_jsonl_artifact(path, "profiles");
    std::vector<FanProfile> out;
    out.reserve(artifact.lines.size());
    for (const std::string& line : artifact.lines)
        out.push_back(profile_from_json_line(line, catalog));
    return out;
}

ClusterModel load_model(const PipelineConfig& cfg) {
    const std::string path = cfg.work_dir + "/model.json";
    require_file(path, "cluster");
    json obj = read_json_artifact(path, "model");
    return model_from_json(obj.at("model").dump());
}

// ---- stages ----

void stage_synth(const PipelineConfig& cfg) {
    SynthSpec spec = cfg.synth;
    spec.seed = stage_seed(cfg, "synth");
    SynthCorpus corpus = generate_synthetic_corpus(spec);

    write_file(cfg.resolved_catalog_path(), serialize_artist_catalog(corpus.catalog));
    std::string tweets;
    for (const Tweet& t : corpus.tweets) {
        tweets += tweet_to_json_line(t);
        tweets.push_back('\n');
    }
    write_file(cfg.resolved_tweets_path(), tweets);

    json truth = artifact_header(cfg, "truth");
    truth["fan_cluster"] = corpus.fan_cluster;
    truth["fan_heldout"] = corpus.fan_heldout;
    write_file(cfg.work_dir + "/truth.json", truth.dump(2) + "\n");
}

void stage_ingest(const PipelineConfig& cfg) {
    const std::string catalog_path = cfg.resolved_catalog_path();
    const std::string tweets_path = cfg.resolved_tweets_path();
    if (!fs::exists(catalog_path))
        throw Error(ErrorCode::MissingPrerequisite, catalog_path + " is missing");
    if (!fs::exists(tweets_path))
        throw Error(ErrorCode::MissingPrerequisite, tweets_path + " is missing");

    ArtistCatalog catalog = parse_artist_catalog(read_file(catalog_path));
    std::ifstream tweets_in(tweets_path, std::ios::binary);
    std::vector<Tweet> tweets = parse_tweets(tweets_in);
    std::vector<MatchedTweet> kept = filter_corpus(tweets, catalog);

    std::int64_t max_created_at = 0;
    for (const Tweet& t : tweets) max_created_at = std::max(max_created_at, t.created_at);

    json catalog_artifact = artifact_header(cfg, "catalog");
    catalog_artifact["records"] = catalog_to_artifact_payload(catalog);
    catalog_artifact["n_tweets_total"] = static_cast<std::int64_t>(tweets.size());
    catalog_artifact["n_tweets_kept"] = static_cast<std::int64_t>(kept.size());
    catalog_artifact["max_created_at"] = max_created_at;
    write_file(cfg.work_dir + "/catalog.json", catalog_artifact.dump(2) + "\n");

    std::string out = artifact_header(cfg, "filtered").dump() + "\n";
    for (const MatchedTweet& mt : kept) {
        json obj;
        obj["id"] = mt.tweet.id;
        obj["author_id"] = mt.tweet.author_id;
        obj["created_at"] = format_iso8601_utc(mt.tweet.created_at);
        obj["text"] = mt.tweet.text;
        if (mt.tweet.lang) obj["lang"] = *mt.tweet.lang;
        json artists = json::array();
        for (ArtistId id : mt.artists) artists.push_back(catalog.record(id).name);
        obj["artists"] = artists;
        out += obj.dump();
        out.push_back('\n');
    }
    write_file(cfg.work_dir + "/filtered.jsonl", out);
}

void stage_preprocess(const PipelineConfig& cfg) {
    LoadedCatalog loaded = load_catalog_artifact(cfg);
    std::vector<MatchedTweet> filtered = load_filtered(cfg, loaded.catalog);
    std::vector<Tweet> tweets;
    tweets.reserve(filtered.size());
    for (const MatchedTweet& mt : filtered) tweets.push_back(mt.tweet);
    std::vector<TokenizedDoc> docs = preprocess_corpus(tweets, loaded.catalog);

    std::string out = artifact_header(cfg, "docs").dump() + "\n";
    for (const TokenizedDoc& doc : docs) {
        out += doc_to_json_line(doc);
        out.push_back('\n');
    }
    write_file(cfg.work_dir + "/docs.jsonl", out);
}

void stage_annotate(const PipelineConfig& cfg) {
    LoadedCatalog loaded = load_catalog_artifact(cfg);
    std::vector<MatchedTweet> filtered = load_filtered(cfg, loaded.catalog);

    std::vector<std::pair<std::string, std::string>> inputs;
    inputs.reserve(filtered.size());
    for (const MatchedTweet& mt : filtered) inputs.emplace_back(mt.tweet.id, mt.tweet.text);

    AnnotatorConfig annotator = cfg.annotator;
    if (annotator.cache_path.empty() && cfg.annotation_mode == AnnotationMode::Online)
        annotator.cache_path = cfg.work_dir + "/annotation_cache.jsonl";

    BatchStats stats;
    std::map<std::string, AnnotationLabel> labels =
        annotate_batch(inputs, annotator, loaded.catalog, cfg.annotation_mode, nullptr, &stats);
    if (cfg.annotation_mode == AnnotationMode::Online && !inputs.empty() &&
        stats.failures == static_cast<std::int64_t>(inputs.size()))
        throw Error(ErrorCode::NetworkError, "every annotation request failed");

    std::string out = artifact_header(cfg, "annotations").dump() + "\n";
    for (const auto& [id, label] : labels) {
        out += "{\"id\":" + json(id).dump() + ",\"label\":" + label_to_json(label) + "}\n";
    }
    write_file(cfg.work_dir + "/annotations.jsonl", out);
}

void stage_vectorize(const PipelineConfig& cfg) {
    std::vector<TokenizedDoc> docs = load_docs(cfg);
    Vocabulary vocab = build_vocabulary(docs, cfg.min_df, cfg.max_df_ratio);

    json vocab_artifact = artifact_header(cfg, "vocabulary");
    vocab_artifact["vocabulary"] = json::parse(vocabulary_to_json(vocab));
    write_file(cfg.work_dir + "/vocab.json", vocab_artifact.dump(2) + "\n");

    std::vector<SparseVector> vectors = vectorize_corpus(docs, vocab, cfg.weighting);
    std::string out = artifact_header(cfg, "vectors").dump() + "\n";
    for (std::size_t i = 0; i < docs.size(); ++i) {
        out += vector_to_json_line(docs[i].tweet_id, vectors[i]);
        out.push_back('\n');
    }
    write_file(cfg.work_dir + "/vectors.jsonl", out);
}

void stage_profiles(const PipelineConfig& cfg) {
    LoadedCatalog loaded = load_catalog_artifact(cfg);
    std::vector<TokenizedDoc> docs = load_docs(cfg);
    Vocabulary vocab = load_vocab(cfg);
    std::map<std::string, AnnotationLabel> annotations = load_annotations(cfg);

    const double lambda = cfg.annotation_mode == AnnotationMode::Off ? 0.0 : cfg.lambda;
    std::vector<FanProfile> profiles = build_fan_profiles(
        docs, cfg.min_tweets, annotations.empty() ? nullptr : &annotations);
    attach_profile_vectors(profiles, vocab, lambda, cfg.weighting);

    std::string out = artifact_header(cfg, "profiles").dump() + "\n";
    for (const FanProfile& p : profiles) {
        out += profile_to_json_line(p, loaded.catalog);
        out.push_back('\n');
    }
    write_file(cfg.work_dir + "/profiles.jsonl", out);
}

void stage_cluster(const PipelineConfig& cfg) {
    LoadedCatalog loaded = load_catalog_artifact(cfg);
    Vocabulary vocab = load_vocab(cfg);
    std::vector<FanProfile> profiles = load_profiles(cfg, loaded.catalog);

    std::vector<std::string> ids;
    std::vector<SparseVector> points;
    for (const FanProfile& p : profiles) {
        if (p.vector.empty()) continue;  // flagged: no text/facet signal
        ids.push_back(p.author_id);
        points.push_back(p.vector);
    }
    if (ids.empty()) throw Error(ErrorCode::EmptyInput, "no profiles with non-empty vectors");
    const std::size_t dim = vocab.size() + kFacetCount;
    const std::uint64_t seed = stage_seed(cfg, "cluster");

    int k = cfg.k;
    if (k <= 0) {
        const int k_max = std::min<int>(cfg.k_max, static_cast<int>(ids.size()));
        const int k_min = std::min(cfg.k_min, k_max);
        if (k_min < 2)
            throw Error(ErrorCode::InvalidK, "need at least 2 clusterable profiles");
        k = select_k(ids, points, dim, k_min, k_max, seed, cfg.max_iter, cfg.tol);
    }

    KmeansOptions opt;
    opt.k = k;
    opt.seed = seed;
    opt.max_iter = cfg.max_iter;
    opt.tol = cfg.tol;
    ClusterModel model = kmeans_fit(ids, points, dim, opt);

    std::string out = "{\"artifact\":\"model\",\"config_hash\":\"" + config_hash(cfg) +
                      "\",\"model\":" + model_to_json(model) + "}\n";
    write_file(cfg.work_dir + "/model.json", out);
}

void stage_recommend(const PipelineConfig& cfg) {
    LoadedCatalog loaded = load_catalog_artifact(cfg);
    std::vector<FanProfile> profiles = load_profiles(cfg, loaded.catalog);
    ClusterModel model = load_model(cfg);

    std::vector<Recommendation> recs = recommend_all(profiles, model, loaded.catalog,
                                                     cfg.recommend, loaded.max_created_at);
    std::string out = artifact_header(cfg, "recommendations").dump() + "\n";
    for (const Recommendation& rec : recs) {
        out += recommendation_to_json_line(rec, loaded.catalog);
        out.push_back('\n');
    }
    write_file(cfg.work_dir + "/recommendations.jsonl", out);
}

void stage_eval(const PipelineConfig& cfg) {
    LoadedCatalog loaded = load_catalog_artifact(cfg);
    std::vector<FanProfile> profiles = load_profiles(cfg, loaded.catalog);
    ClusterModel model = load_model(cfg);
    require_file(cfg.work_dir + "/recommendations.jsonl", "recommend");
    JsonlArtifact rec_artifact =
        read_jsonl_artifact(cfg.work_dir + "/recommendations.jsonl", "recommendations");
    std::vector<Recommendation> recs;
    for (const std::string& line : rec_artifact.lines)
        recs.push_back(recommendation_from_json_line(line, loaded.catalog));
    require_file(cfg.work_dir + "/truth.json", "synth");
    json truth = read_json_artifact(cfg.work_dir + "/truth.json", "truth");

    const std::map<std::string, int> truth_full =
        truth.at("fan_cluster").get<std::map<std::string, int>>();
    std::map<std::string, int> pred_partition;
    for (const auto& [id, cluster] : model.assignments) pred_partition[id] = cluster;
    // fans that fell below min_tweets never reached the model; ARI is
    // scored over the fans that were actually clustered
    std::map<std::string, int> truth_partition;
    for (const auto& [id, cluster] : truth_full) {
        if (pred_partition.count(id)) truth_partition[id] = cluster;
    }
    const double ari = adjusted_rand_index(truth_partition, pred_partition);

    // silhouette of the fitted model over the clustered profiles
    std::map<std::string, const FanProfile*> by_id;
    for (const FanProfile& p : profiles) by_id[p.author_id] = &p;
    std::vector<SparseVector> points;
    std::vector<int> assignment;
    for (const auto& [id, cluster] : model.assignments) {
        auto it = by_id.find(id);
        if (it == by_id.end())
            throw Error(ErrorCode::PartitionMismatch, "model id '" + id + "' has no profile");
        points.push_back(it->second->vector);
        assignment.push_back(cluster);
    }
    const double sil = silhouette_from_matrix(pairwise_distances(points), points.size(),
                                              assignment, model.k);

    std::map<std::string, ArtistId> heldout;
    std::map<std::string, ArtistId> artist_by_name;
    for (std::size_t a = 0; a < loaded.catalog.size(); ++a)
        artist_by_name[loaded.catalog.record(static_cast<ArtistId>(a)).name] =
            static_cast<ArtistId>(a);
    for (const auto& [fan, name] : truth.at("fan_heldout").items()) {
        auto it = artist_by_name.find(name.get<std::string>());
        if (it == artist_by_name.end())
            throw Error(ErrorCode::PartitionMismatch,
                        "held-out artist '" + name.get<std::string>() + "' not in catalog");
        heldout[fan] = it->second;
    }
    HitRates rates = hit_rates_at_k(recs, profiles, heldout, loaded.catalog, cfg.eval_at_k,
                                    cfg.recommend.exclude_mentioned);

    json metrics = artifact_header(cfg, "metrics");
    metrics["ari"] = ari;
    metrics["silhouette"] = sil;
    metrics["hit_rate_at_k"] = rates.hybrid;
    metrics["baseline_hit_rate_at_k"] = rates.baseline;
    metrics["fans_scored"] = rates.fans_scored;
    metrics["params"] = {{"at_k", cfg.eval_at_k},
                         {"alpha", cfg.recommend.alpha},
                         {"beta", cfg.recommend.beta},
                         {"n", cfg.recommend.top_n},
                         {"k", model.k},
                         {"seed", cfg.seed}};
    write_file(cfg.work_dir + "/metrics.json", metrics.dump(2) + "\n");
}

void stage_report(const PipelineConfig& cfg) {
    LoadedCatalog loaded = load_catalog_artifact(cfg);
    Vocabulary vocab = load_vocab(cfg);
    ClusterModel model = load_model(cfg);
    std::vector<FanProfile> profiles = load_profiles(cfg, loaded.catalog);

    // every artifact consumed here must come from the same config
    const std::string expected = config_hash(cfg);
    auto check_hash = [&](const std::string& found, const std::string& name) {
        if (found != expected)
            throw Error(ErrorCode::ConfigError,
                        "artifact '" + name + "' was produced by config " + found +
                            ", current config is " + expected);
    };
    check_hash(loaded.hash, "catalog");
    check_hash(read_jsonl_artifact(cfg.work_dir + "/profiles.jsonl", "profiles")
                   .header.value("config_hash", ""),
               "profiles");
    check_hash(read_json_artifact(cfg.work_dir + "/vocab.json", "vocabulary")
                   .value("config_hash", ""),
               "vocabulary");
    check_hash(read_json_artifact(cfg.work_dir + "/model.json", "model")
                   .value("config_hash", ""),
               "model");

    std::vector<std::int64_t> sizes(static_cast<std::size_t>(model.k), 0);
    for (const auto& [id, cluster] : model.assignments)
        ++sizes[static_cast<std::size_t>(cluster)];

    std::ostringstream out;
    out << "fanrec report (config " << expected << ")\n";
    out << "=========================================\n\n";
    out << "profiles: " << profiles.size() << ", clustered: " << model.assignments.size()
        << ", k = " << model.k << ", inertia = " << model.inertia
        << ", iterations = " << model.iterations_run << "\n\n";
    for (int c = 0; c < model.k; ++c) {
        out << "cluster " << c << " (" << sizes[static_cast<std::size_t>(c)] << " fans)\n";
        // top centroid dimensions; text dimensions name vocabulary
        // terms, the tail dimensions are annotation facets
        const std::vector<double>& centroid = model.centroids[static_cast<std::size_t>(c)];
        std::vector<std::size_t> order(centroid.size());
        for (std::size_t d = 0; d < centroid.size(); ++d) order[d] = d;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return centroid[a] > centroid[b];
        });
        out << "  top terms:";
        int shown = 0;
        for (std::size_t d : order) {
            if (centroid[d] <= 0.0 || shown >= 10) break;
            out << " ";
            if (d < vocab.size()) out << vocab.terms[d];
            else out << "[" << facet_name(static_cast<Facet>(d - vocab.size())) << "]";
            ++shown;
        }
        out << "\n";
    }
    out << "\n";

    const std::string metrics_path = cfg.work_dir + "/metrics.json";
    if (fs::exists(metrics_path)) {
        json metrics = read_json_artifact(metrics_path, "metrics");
        check_hash(metrics.value("config_hash", ""), "metrics");
        out << "metrics\n";
        out << "  ari                    = " << metrics.at("ari").get<double>() << "\n";
        out << "  silhouette             = " << metrics.at("silhouette").get<double>() << "\n";
        out << "  hit_rate@" << metrics.at("params").at("at_k").get<int>() << "             = "
            << metrics.at("hit_rate_at_k").get<double>() << "\n";
        out << "  baseline_hit_rate@" << metrics.at("params").at("at_k").get<int>() << "    = "
            << metrics.at("baseline_hit_rate_at_k").get<double>() << "\n";
    } else {
        out << "metrics: not computed (run the eval stage on a synthetic corpus)\n";
    }
    write_file(cfg.work_dir + "/report.txt", out.str());
}

}  // namespace

void run_stage(const std::string& stage_name, const PipelineConfig& cfg) {
    if (stage_name == "synth") stage_synth(cfg);
    else if (stage_name == "ingest") stage_ingest(cfg);
    else if (stage_name == "preprocess") stage_preprocess(cfg);
    else if (stage_name == "annotate") stage_annotate(cfg);
    else if (stage_name == "vectorize") stage_vectorize(cfg);
    else if (stage_name == "profiles") stage_profiles(cfg);
    else if (stage_name == "cluster") stage_cluster(cfg);
    else if (stage_name == "recommend") stage_recommend(cfg);
    else if (stage_name == "eval") stage_eval(cfg);
    else if (stage_name == "report") stage_report(cfg);
    else
        throw Error(ErrorCode::ConfigError, "unknown stage '" + stage_name + "'");
}

}  // namespace fanrec
