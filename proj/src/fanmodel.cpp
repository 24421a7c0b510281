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

#include "fanrec/fanmodel.hpp"

#include <cmath>

#include <json.hpp>

#include "fanrec/errors.hpp"

namespace fanrec {

using nlohmann::json;

std::vector<FanProfile> build_fan_profiles(
    const std::vector<TokenizedDoc>& docs, std::int64_t min_tweets,
    const std::map<std::string, AnnotationLabel>* annotations_by_tweet) {
    std::map<std::string, FanProfile> by_author;
    for (const TokenizedDoc& doc : docs) {
        FanProfile& p = by_author[doc.author_id];
        p.author_id = doc.author_id;
        ++p.n_tweets;
        for (const std::string& token : doc.tokens) ++p.token_counts[token];
        for (ArtistId artist : doc.artists) ++p.mention_counts[artist];
        if (annotations_by_tweet) {
            auto it = annotations_by_tweet->find(doc.tweet_id);
            if (it != annotations_by_tweet->end())
                ++p.facet_counts[static_cast<std::size_t>(it->second.facet)];
        }
    }
    std::vector<FanProfile> profiles;
    for (auto& [author, profile] : by_author) {
        if (profile.n_tweets >= min_tweets) profiles.push_back(std::move(profile));
    }
    return profiles;  // std::map iteration is already sorted by author_id
}

SparseVector profile_vector(const FanProfile& profile, const Vocabulary& vocab,
                            double facet_weight_lambda, Weighting weighting) {
    const double lambda = facet_weight_lambda;
    SparseVector text = tfidf_from_counts(profile.token_counts, vocab, weighting);
    if (lambda == 0.0) return text;  // exact: no rescaling round-trip

    SparseVector facets;
    double facet_sq = 0.0;
    for (std::size_t f = 0; f < kFacetCount; ++f) {
        const double c = static_cast<double>(profile.facet_counts[f]);
        facet_sq += c * c;
    }
    if (facet_sq > 0.0) {
        const double facet_norm = std::sqrt(facet_sq);
        for (std::size_t f = 0; f < kFacetCount; ++f) {
            if (profile.facet_counts[f] == 0) continue;
            facets.indices.push_back(static_cast<std::int32_t>(vocab.size() + f));
            facets.weights.push_back(static_cast<double>(profile.facet_counts[f]) / facet_norm);
        }
    }
    if (lambda == 1.0) {
        double sq = 0.0;
        for (double w : facets.weights) sq += w * w;
        facets.norm = std::sqrt(sq);
        return facets;
    }

    SparseVector blended;
    for (std::size_t i = 0; i < text.indices.size(); ++i) {
        blended.indices.push_back(text.indices[i]);
        blended.weights.push_back((1.0 - lambda) * text.weights[i]);
    }
    for (std::size_t i = 0; i < facets.indices.size(); ++i) {
        blended.indices.push_back(facets.indices[i]);
        blended.weights.push_back(lambda * facets.weights[i]);
    }
    double sq = 0.0;
    for (double w : blended.weights) sq += w * w;
    if (sq > 0.0) {
        const double norm = std::sqrt(sq);
        for (double& w : blended.weights) w /= norm;
        double sq2 = 0.0;
        for (double w : blended.weights) sq2 += w * w;
        blended.norm = std::sqrt(sq2);
    }
    return blended;
}

void attach_profile_vectors(std::vector<FanProfile>& profiles, const Vocabulary& vocab,
                            double facet_weight_lambda, Weighting weighting) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(profiles.size()); ++i) {
        FanProfile& p = profiles[static_cast<std::size_t>(i)];
        p.vector = profile_vector(p, vocab, facet_weight_lambda, weighting);
    }
}

std::string profile_to_json_line(const FanProfile& profile, const ArtistCatalog& catalog) {
    // nlohmann objects keep keys sorted, which the on-disk format relies on
    json obj;
    obj["author_id"] = profile.author_id;
    obj["n_tweets"] = profile.n_tweets;
    json tokens = json::object();
    for (const auto& [term, count] : profile.token_counts) tokens[term] = count;
    obj["token_counts"] = tokens;
    json mentions = json::object();
    for (const auto& [artist, count] : profile.mention_counts)
        mentions[catalog.record(artist).name] = count;
    obj["mention_counts"] = mentions;
    json facets = json::object();
    for (std::size_t f = 0; f < kFacetCount; ++f)
        facets[facet_name(static_cast<Facet>(f))] = profile.facet_counts[f];
    obj["facet_counts"] = facets;
    json entries = json::array();
    for (std::size_t i = 0; i < profile.vector.indices.size(); ++i) {
        // keep the exact bit pattern through JSON
        entries.push_back(json::array(
            {profile.vector.indices[i], profile.vector.weights[i]}));
    }
    obj["vector"] = entries;
    return obj.dump();
}

FanProfile profile_from_json_line(const std::string& line, const ArtistCatalog& catalog) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::MalformedLine, std::string("profile: ") + e.what());
    }
    FanProfile p;
    p.author_id = obj.at("author_id").get<std::string>();
    p.n_tweets = obj.at("n_tweets").get<std::int64_t>();
    for (const auto& [term, count] : obj.at("token_counts").items())
        p.token_counts[term] = count.get<std::int64_t>();

    std::map<std::string, ArtistId> by_name;
    for (std::size_t i = 0; i < catalog.size(); ++i)
        by_name[catalog.record(static_cast<ArtistId>(i)).name] = static_cast<ArtistId>(i);
    for (const auto& [name, count] : obj.at("mention_counts").items()) {
        auto it = by_name.find(name);
        if (it == by_name.end())
            throw Error(ErrorCode::MalformedLine, "profile mentions unknown artist '" + name + "'");
        p.mention_counts[it->second] = count.get<std::int64_t>();
    }
    for (std::size_t f = 0; f < kFacetCount; ++f) {
        p.facet_counts[f] =
            obj.at("facet_counts").at(facet_name(static_cast<Facet>(f))).get<std::int64_t>();
    }
    double sq = 0.0;
    for (const auto& entry : obj.at("vector")) {
        p.vector.indices.push_back(entry.at(0).get<std::int32_t>());
        const double w = entry.at(1).get<double>();
        p.vector.weights.push_back(w);
        sq += w * w;
    }
    p.vector.norm = std::sqrt(sq);
    return p;
}

}  // namespace fanrec
