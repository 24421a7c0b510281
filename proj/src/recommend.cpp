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

#include "fanrec/recommend.hpp"

#include <algorithm>

#include <json.hpp>

#include "fanrec/errors.hpp"
#include "fanrec/time_util.hpp"

namespace fanrec {

using nlohmann::json;

ClusterAffinity cluster_affinity(const std::vector<const FanProfile*>& members,
                                 const ArtistCatalog& catalog, double beta, int cluster_index) {
    if (members.empty())
        throw Error(ErrorCode::EmptyCluster,
                    "cluster " + std::to_string(cluster_index) + " has no members");
    ClusterAffinity out;
    out.cluster = cluster_index;
    out.affinity.assign(catalog.size(), 0.0);
    const double denom = static_cast<double>(members.size()) + 2.0 * beta;
    for (std::size_t a = 0; a < catalog.size(); ++a) {
        std::int64_t mentioning = 0;
        for (const FanProfile* member : members) {
            if (member->mentions(static_cast<ArtistId>(a))) ++mentioning;
        }
        out.affinity[a] = (static_cast<double>(mentioning) + beta) / denom;
    }
    return out;
}

std::vector<double> score_user(const FanProfile& fan, const ClusterAffinity& affinity,
                               const std::vector<const FanProfile*>& neighbors, double alpha,
                               std::size_t n_artists) {
    std::vector<double> cf_num(n_artists, 0.0);
    double cf_den = 0.0;
    for (const FanProfile* v : neighbors) {
        if (v->author_id == fan.author_id) continue;
        const double sim = cosine_similarity(fan.vector, v->vector);
        cf_den += sim;
        if (sim == 0.0) continue;
        for (const auto& [artist, count] : v->mention_counts) {
            if (count > 0) cf_num[static_cast<std::size_t>(artist)] += sim;
        }
    }
    std::vector<double> scores(n_artists, 0.0);
    for (std::size_t a = 0; a < n_artists; ++a) {
        const double cf = cf_den > 0.0 ? cf_num[a] / cf_den : 0.0;
        scores[a] = alpha * affinity.affinity[a] + (1.0 - alpha) * cf;
    }
    return scores;
}

Recommendation recommend_top_n(const FanProfile& fan, const std::vector<double>& scores,
                               const ArtistCatalog& catalog, const RecommendParams& params,
                               std::int64_t generated_at) {
    Recommendation rec;
    rec.author_id = fan.author_id;
    rec.generated_at = generated_at;
    rec.params = params;

    std::vector<ArtistId> candidates;
    candidates.reserve(scores.size());
    for (std::size_t a = 0; a < scores.size(); ++a) {
        const ArtistId id = static_cast<ArtistId>(a);
        if (params.exclude_mentioned && fan.mentions(id)) continue;
        candidates.push_back(id);
    }
    std::sort(candidates.begin(), candidates.end(), [&](ArtistId lhs, ArtistId rhs) {
        const double sl = scores[static_cast<std::size_t>(lhs)];
        const double sr = scores[static_cast<std::size_t>(rhs)];
        if (sl != sr) return sl > sr;
        return catalog.record(lhs).name < catalog.record(rhs).name;
    });
    const std::size_t n = std::min<std::size_t>(candidates.size(),
                                                static_cast<std::size_t>(params.top_n));
    rec.items.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        rec.items.emplace_back(candidates[i], scores[static_cast<std::size_t>(candidates[i])]);
    return rec;
}

namespace {

std::vector<Recommendation> recommend_impl(const std::vector<FanProfile>& profiles,
                                           const ClusterModel& model,
                                           const ArtistCatalog& catalog,
                                           const RecommendParams& params,
                                           std::int64_t generated_at, bool parallel) {
    // group members by cluster in author order
    std::vector<std::vector<const FanProfile*>> members(
        static_cast<std::size_t>(model.k));
    std::vector<int> cluster_of(profiles.size(), -1);
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        const auto it = std::lower_bound(
            model.assignments.begin(), model.assignments.end(), profiles[i].author_id,
            [](const auto& pair, const std::string& s) { return pair.first < s; });
        if (it != model.assignments.end() && it->first == profiles[i].author_id)
            cluster_of[i] = it->second;
        if (cluster_of[i] >= 0)
            members[static_cast<std::size_t>(cluster_of[i])].push_back(&profiles[i]);
    }

    std::vector<ClusterAffinity> affinities;
    affinities.reserve(members.size());
    for (std::size_t c = 0; c < members.size(); ++c) {
        if (members[c].empty()) {
            ClusterAffinity empty;
            empty.cluster = static_cast<int>(c);
            empty.affinity.assign(catalog.size(), 0.0);
            affinities.push_back(std::move(empty));
        } else {
            affinities.push_back(
                cluster_affinity(members[c], catalog, params.beta, static_cast<int>(c)));
        }
    }

    std::vector<Recommendation> recs(profiles.size());
    std::vector<char> keep(profiles.size(), 0);
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(profiles.size()); ++i) {
        const std::size_t ui = static_cast<std::size_t>(i);
        const int c = cluster_of[ui];
        if (c < 0) continue;  // not clustered (e.g. empty vector)
        const auto scores = score_user(profiles[ui], affinities[static_cast<std::size_t>(c)],
                                       members[static_cast<std::size_t>(c)], params.alpha,
                                       catalog.size());
        recs[ui] = recommend_top_n(profiles[ui], scores, catalog, params, generated_at);
        keep[ui] = 1;
    }
    std::vector<Recommendation> out;
    out.reserve(profiles.size());
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        if (keep[i]) out.push_back(std::move(recs[i]));
    }
    return out;
}

}  // namespace

std::vector<Recommendation> recommend_all(const std::vector<FanProfile>& profiles,
                                          const ClusterModel& model, const ArtistCatalog& catalog,
                                          const RecommendParams& params,
                                          std::int64_t generated_at) {
    return recommend_impl(profiles, model, catalog, params, generated_at, true);
}

std::vector<Recommendation> recommend_all_serial(const std::vector<FanProfile>& profiles,
                                                 const ClusterModel& model,
                                                 const ArtistCatalog& catalog,
                                                 const RecommendParams& params,
                                                 std::int64_t generated_at) {
    return recommend_impl(profiles, model, catalog, params, generated_at, false);
}

std::string recommendation_to_json_line(const Recommendation& rec, const ArtistCatalog& catalog) {
    std::string out = "{\"author_id\":" + json(rec.author_id).dump();
    out += ",\"generated_at\":" + json(format_iso8601_utc(rec.generated_at)).dump();
    out += ",\"items\":[";
    for (std::size_t i = 0; i < rec.items.size(); ++i) {
        if (i) out.push_back(',');
        out.push_back('[');
        out += json(catalog.record(rec.items[i].first).name).dump();
        out.push_back(',');
        out += format_double(rec.items[i].second);
        out.push_back(']');
    }
    out += "],\"params\":{\"alpha\":" + format_double(rec.params.alpha);
    out += ",\"beta\":" + format_double(rec.params.beta);
    out += ",\"n\":" + std::to_string(rec.params.top_n);
    out += ",\"exclude_mentioned\":";
    out += rec.params.exclude_mentioned ? "true" : "false";
    out += "}}";
    return out;
}

Recommendation recommendation_from_json_line(const std::string& line,
                                             const ArtistCatalog& catalog) {
    json obj = json::parse(line);
    Recommendation rec;
    rec.author_id = obj.at("author_id").get<std::string>();
    if (!parse_iso8601_utc(obj.at("generated_at").get<std::string>(), &rec.generated_at))
        throw Error(ErrorCode::MalformedLine, "bad generated_at in recommendation");
    std::map<std::string, ArtistId> by_name;
    for (std::size_t i = 0; i < catalog.size(); ++i)
        by_name[catalog.record(static_cast<ArtistId>(i)).name] = static_cast<ArtistId>(i);
    for (const auto& item : obj.at("items")) {
        auto it = by_name.find(item.at(0).get<std::string>());
        if (it == by_name.end())
            throw Error(ErrorCode::MalformedLine,
                        "unknown artist '" + item.at(0).get<std::string>() + "'");
        rec.items.emplace_back(it->second, item.at(1).get<double>());
    }
    const json& p = obj.at("params");
    rec.params.alpha = p.at("alpha").get<double>();
    rec.params.beta = p.at("beta").get<double>();
    rec.params.top_n = p.at("n").get<int>();
    rec.params.exclude_mentioned = p.at("exclude_mentioned").get<bool>();
    return rec;
}

}  // namespace fanrec
