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

#ifndef FANREC_RECOMMEND_HPP
#define FANREC_RECOMMEND_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fanrec/cluster.hpp"
#include "fanrec/fanmodel.hpp"

namespace fanrec {

struct RecommendParams {
    double alpha = 0.6;  // weight of the cluster-affinity term
    double beta = 1.0;   // affinity smoothing
    int top_n = 5;
    bool exclude_mentioned = true;
};

struct ClusterAffinity {
    int cluster = 0;
    std::vector<double> affinity;  // per artist id, (m_a + beta) / (|members| + 2 beta)
};

/// members must be non-empty. With beta > 0 every affinity lies
/// strictly inside (0, 1).
ClusterAffinity cluster_affinity(const std::vector<const FanProfile*>& members,
                                 const ArtistCatalog& catalog, double beta, int cluster_index);

/// alpha * affinity + (1 - alpha) * CF, where CF is the
/// similarity-weighted fraction of co-cluster neighbors mentioning the
/// artist; 0 when the similarity mass is 0. Neighbor sums run in the
/// given (author-sorted) order.
std::vector<double> score_user(const FanProfile& fan, const ClusterAffinity& affinity,
                               const std::vector<const FanProfile*>& neighbors, double alpha,
                               std::size_t n_artists);

struct Recommendation {
    std::string author_id;
    std::vector<std::pair<ArtistId, double>> items;  // scores non-increasing
    std::int64_t generated_at = 0;
    RecommendParams params;
};

/// Sorts by score descending, ties by artist name ascending, truncates
/// to top_n; artists the fan already mentions are dropped first when
/// exclude_mentioned is set.
Recommendation recommend_top_n(const FanProfile& fan, const std::vector<double>& scores,
                               const ArtistCatalog& catalog, const RecommendParams& params,
                               std::int64_t generated_at);

/// Full pipeline step: group profiles by cluster, compute affinities,
/// score each profile against its co-cluster neighbors (parallel over
/// fans) and rank. Profiles without an assignment are skipped.
std::vector<Recommendation> recommend_all(const std::vector<FanProfile>& profiles,
                                          const ClusterModel& model, const ArtistCatalog& catalog,
                                          const RecommendParams& params,
                                          std::int64_t generated_at);
std::vector<Recommendation> recommend_all_serial(const std::vector<FanProfile>& profiles,
                                                 const ClusterModel& model,
                                                 const ArtistCatalog& catalog,
                                                 const RecommendParams& params,
                                                 std::int64_t generated_at);

std::string recommendation_to_json_line(const Recommendation& rec, const ArtistCatalog& catalog);
Recommendation recommendation_from_json_line(const std::string& line,
                                             const ArtistCatalog& catalog);

}  // namespace fanrec

#endif  // FANREC_RECOMMEND_HPP
