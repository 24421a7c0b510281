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

#include "fanrec/vectorize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "fanrec/errors.hpp"

namespace fanrec {

using nlohmann::json;

double dot(const SparseVector& a, const SparseVector& b) {
    double sum = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.indices.size() && j < b.indices.size()) {
        if (a.indices[i] == b.indices[j]) {
            sum += a.weights[i] * b.weights[j];
            ++i;
            ++j;
        } else if (a.indices[i] < b.indices[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    return sum;
}

double cosine_similarity(const SparseVector& a, const SparseVector& b) {
    if (a.empty() || b.empty()) return 0.0;
    return dot(a, b) / (a.norm * b.norm);
}

double squared_distance_dense(const SparseVector& a, const std::vector<double>& dense,
                              double dense_sq_norm) {
    double cross = 0.0;
    for (std::size_t i = 0; i < a.indices.size(); ++i) {
        cross += a.weights[i] * dense[static_cast<std::size_t>(a.indices[i])];
    }
    const double d2 = a.norm * a.norm - 2.0 * cross + dense_sq_norm;
    return d2 > 0.0 ? d2 : 0.0;
}

double Vocabulary::idf(std::int32_t term_index) const {
    return std::log(static_cast<double>(1 + n_docs) /
                    static_cast<double>(1 + df[static_cast<std::size_t>(term_index)])) +
           1.0;
}

Vocabulary build_vocabulary(const std::vector<TokenizedDoc>& docs, std::int64_t min_df,
                            double max_df_ratio) {
    if (docs.empty()) throw Error(ErrorCode::EmptyCorpus, "no documents");
    if (min_df < 1) throw Error(ErrorCode::ConfigError, "min_df must be >= 1");
    if (!(max_df_ratio > 0.0) || max_df_ratio > 1.0)
        throw Error(ErrorCode::ConfigError, "max_df_ratio must be in (0, 1]");

    std::map<std::string, std::int64_t> df_all;
    for (const TokenizedDoc& doc : docs) {
        std::vector<std::string> uniq = doc.tokens;
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        for (std::string& t : uniq) ++df_all[std::move(t)];
    }

    Vocabulary vocab;
    vocab.n_docs = static_cast<std::int64_t>(docs.size());
    const std::int64_t max_df =
        static_cast<std::int64_t>(std::floor(max_df_ratio * static_cast<double>(vocab.n_docs)));
    for (const auto& [term, df] : df_all) {
        if (df < min_df || df > max_df) continue;
        vocab.index.emplace(term, static_cast<std::int32_t>(vocab.terms.size()));
        vocab.terms.push_back(term);
        vocab.df.push_back(df);
    }
    if (vocab.terms.empty())
        throw Error(ErrorCode::EmptyVocabulary,
                    "all " + std::to_string(df_all.size()) + " terms filtered by df bounds");
    return vocab;
}

namespace {

SparseVector weigh_counts(std::vector<std::pair<std::int32_t, std::int64_t>>& hits,
                          const Vocabulary& vocab, Weighting weighting) {
    SparseVector v;
    if (hits.empty()) return v;
    std::sort(hits.begin(), hits.end());
    std::int64_t in_vocab_len = 0;
    for (const auto& [idx, count] : hits) in_vocab_len += count;

    v.indices.reserve(hits.size());
    v.weights.reserve(hits.size());
    double sq = 0.0;
    for (const auto& [idx, count] : hits) {
        const double tf = static_cast<double>(count) / static_cast<double>(in_vocab_len);
        const double w = weighting == Weighting::TfIdf ? tf * vocab.idf(idx) : tf;
        v.indices.push_back(idx);
        v.weights.push_back(w);
        sq += w * w;
    }
    const double norm = std::sqrt(sq);
    for (double& w : v.weights) w /= norm;
    // recompute: the normalized norm is 1 by construction, but keep the
    // stored value consistent with the stored weights
    double sq2 = 0.0;
    for (double w : v.weights) sq2 += w * w;
    v.norm = std::sqrt(sq2);
    return v;
}

}  // namespace

SparseVector tfidf_vector(const TokenizedDoc& doc, const Vocabulary& vocab, Weighting weighting) {
    std::unordered_map<std::int32_t, std::int64_t> counts;
    for (const std::string& token : doc.tokens) {
        auto it = vocab.index.find(token);
        if (it != vocab.index.end()) ++counts[it->second];
    }
    std::vector<std::pair<std::int32_t, std::int64_t>> hits(counts.begin(), counts.end());
    return weigh_counts(hits, vocab, weighting);
}

SparseVector tfidf_from_counts(const std::map<std::string, std::int64_t>& counts,
                               const Vocabulary& vocab, Weighting weighting) {
    std::vector<std::pair<std::int32_t, std::int64_t>> hits;
    for (const auto& [term, count] : counts) {
        auto it = vocab.index.find(term);
        if (it != vocab.index.end() && count > 0) hits.emplace_back(it->second, count);
    }
    return weigh_counts(hits, vocab, weighting);
}

std::vector<SparseVector> vectorize_corpus_serial(const std::vector<TokenizedDoc>& docs,
                                                  const Vocabulary& vocab, Weighting weighting) {
    std::vector<SparseVector> out(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) out[i] = tfidf_vector(docs[i], vocab, weighting);
    return out;
}

std::vector<SparseVector> vectorize_corpus(const std::vector<TokenizedDoc>& docs,
                                           const Vocabulary& vocab, Weighting weighting) {
    std::vector<SparseVector> out(docs.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(docs.size()); ++i) {
        out[static_cast<std::size_t>(i)] =
            tfidf_vector(docs[static_cast<std::size_t>(i)], vocab, weighting);
    }
    return out;
}

std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::string vector_to_json_line(const std::string& id, const SparseVector& v) {
    std::string out = "{\"id\":";
    out += json(id).dump();
    out += ",\"entries\":[";
    for (std::size_t i = 0; i < v.indices.size(); ++i) {
        if (i) out.push_back(',');
        out.push_back('[');
        out += std::to_string(v.indices[i]);
        out.push_back(',');
        out += format_double(v.weights[i]);
        out.push_back(']');
    }
    out += "]}";
    return out;
}

std::pair<std::string, SparseVector> vector_from_json_line(const std::string& line) {
    json obj = json::parse(line);
    SparseVector v;
    double sq = 0.0;
    for (const auto& entry : obj.at("entries")) {
        v.indices.push_back(entry.at(0).get<std::int32_t>());
        const double w = entry.at(1).get<double>();
        v.weights.push_back(w);
        sq += w * w;
    }
    v.norm = std::sqrt(sq);
    return {obj.at("id").get<std::string>(), std::move(v)};
}

std::string vocabulary_to_json(const Vocabulary& vocab) {
    json obj;
    obj["n_docs"] = vocab.n_docs;
    obj["terms"] = vocab.terms;
    json df = json::object();
    for (std::size_t i = 0; i < vocab.terms.size(); ++i) df[vocab.terms[i]] = vocab.df[i];
    obj["df"] = df;
    return obj.dump();
}

Vocabulary vocabulary_from_json(const std::string& text) {
    json obj = json::parse(text);
    Vocabulary vocab;
    vocab.n_docs = obj.at("n_docs").get<std::int64_t>();
    vocab.terms = obj.at("terms").get<std::vector<std::string>>();
    const json& df = obj.at("df");
    vocab.df.reserve(vocab.terms.size());
    for (std::size_t i = 0; i < vocab.terms.size(); ++i) {
        vocab.df.push_back(df.at(vocab.terms[i]).get<std::int64_t>());
        vocab.index.emplace(vocab.terms[i], static_cast<std::int32_t>(i));
    }
    return vocab;
}

}  // namespace fanrec
