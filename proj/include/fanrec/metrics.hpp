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

#ifndef FANREC_METRICS_HPP
#define FANREC_METRICS_HPP

#include <map>
#include <string>
#include <vector>

#include "fanrec/recommend.hpp"

namespace fanrec {

/// Chance-corrected pair-counting agreement between two labelings of
/// the same elements. Throws PartitionMismatch when the element sets
/// differ. 1 for identical partitions; 1 by convention when both
/// partitions are trivial.
double adjusted_rand_index(const std::map<std::string, int>& truth,
                           const std::map<std::string, int>& pred);

/// 1 when the held-out artist appears among the first k items, else 0.
double precision_at_k(const Recommendation& rec, ArtistId heldout, int k);

/// Global popularity ranking (total mention count, ties by name) with
/// the same exclusion rule as the recommender; used as the baseline in
/// every evaluation run.
std::vector<ArtistId> popularity_ranking(const std::vector<FanProfile>& profiles,
                                         const ArtistCatalog& catalog);

/// Top-k of the popularity ranking for one fan after exclusion.
std::vector<ArtistId> popularity_top_k(const std::vector<ArtistId>& ranking,
                                       const FanProfile& fan, int k, bool exclude_mentioned);

struct HitRates {
    double hybrid = 0.0;
    double baseline = 0.0;
    std::int64_t fans_scored = 0;
};

/// Mean hit-rate@k of the recommendations and of the popularity
/// baseline over every fan with a held-out artist.
HitRates hit_rates_at_k(const std::vector<Recommendation>& recs,
                        const std::vector<FanProfile>& profiles,
                        const std::map<std::string, ArtistId>& heldout,
                        const ArtistCatalog& catalog, int k, bool exclude_mentioned);

}  // namespace fanrec

#endif  // FANREC_METRICS_HPP
