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

#include "fanrec/metrics.hpp"

#include <algorithm>
#include <unordered_map>

#include "fanrec/errors.hpp"

namespace fanrec {

double adjusted_rand_index(const std::map<std::string, int>& truth,
                           const std::map<std::string, int>& pred) {
    if (truth.size() != pred.size())
        throw Error(ErrorCode::PartitionMismatch, "partitions cover different element counts");

    // contingency table
    std::map<std::pair<int, int>, std::int64_t> cells;
    std::map<int, std::int64_t> row_sums, col_sums;
    for (const auto& [element, t_label] : truth) {
        auto it = pred.find(element);
        if (it == pred.end())
            throw Error(ErrorCode::PartitionMismatch, "element '" + element + "' missing in pred");
        ++cells[{t_label, it->second}];
        ++row_sums[t_label];
        ++col_sums[it->second];
    }
    auto choose2 = [](std::int64_t m) {
        return static_cast<double>(m) * static_cast<double>(m - 1) / 2.0;
    };
    double sum_cells = 0.0, sum_rows = 0.0, sum_cols = 0.0;
    for (const auto& [key, count] : cells) sum_cells += choose2(count);
    for (const auto& [label, count] : row_sums) sum_rows += choose2(count);
    for (const auto& [label, count] : col_sums) sum_cols += choose2(count);
    const double total_pairs = choose2(static_cast<std::int64_t>(truth.size()));
    if (total_pairs == 0.0) return 1.0;  // 0 or 1 element
    const double expected = sum_rows * sum_cols / total_pairs;
    const double max_index = 0.5 * (sum_rows + sum_cols);
    if (max_index == expected) return 1.0;  // both partitions trivial
    return (sum_cells - expected) / (max_index - expected);
}

double precision_at_k(const Recommendation& rec, ArtistId heldout, int k) {
    const std::size_t limit = std::min<std::size_t>(rec.items.size(), static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < limit; ++i) {
        if (rec.items[i].first == heldout) return 1.0;
    }
    return 0.0;
}

std::vector<ArtistId> popularity_ranking(const std::vector<FanProfile>& profiles,
                                         const ArtistCatalog& catalog) {
    std::vector<std::int64_t> counts(catalog.size(), 0);
    for (const FanProfile& p : profiles) {
        for (const auto& [artist, count] : p.mention_counts)
            counts[static_cast<std::size_t>(artist)] += count;
    }
    std::vector<ArtistId> ranking(catalog.size());
    for (std::size_t a = 0; a < catalog.size(); ++a) ranking[a] = static_cast<ArtistId>(a);
    std::sort(ranking.begin(), ranking.end(), [&](ArtistId lhs, ArtistId rhs) {
        const std::int64_t cl = counts[static_cast<std::size_t>(lhs)];
        const std::int64_t cr = counts[static_cast<std::size_t>(rhs)];
        if (cl != cr) return cl > cr;
        return catalog.record(lhs).name < catalog.record(rhs).name;
    });
    return ranking;
}

std::vector<ArtistId> popularity_top_k(const std::vector<ArtistId>& ranking,
                                       const FanProfile& fan, int k, bool exclude_mentioned) {
    std::vector<ArtistId> out;
    for (ArtistId artist : ranking) {
        if (static_cast<int>(out.size()) >= k) break;
        if (exclude_mentioned && fan.mentions(artist)) continue;
        out.push_back(artist);
    }
    return out;
}

HitRates hit_rates_at_k(const std::vector<Recommendation>& recs,
                        const std::vector<FanProfile>& profiles,
                        const std::map<std::string, ArtistId>& heldout,
                        const ArtistCatalog& catalog, int k, bool exclude_mentioned) {
    std::unordered_map<std::string, const Recommendation*> rec_by_author;
    for (const Recommendation& r : recs) rec_by_author[r.author_id] = &r;
    const std::vector<ArtistId> ranking = popularity_ranking(profiles, catalog);

    HitRates rates;
    double hybrid_hits = 0.0, baseline_hits = 0.0;
    for (const FanProfile& fan : profiles) {
        auto held_it = heldout.find(fan.author_id);
        auto rec_it = rec_by_author.find(fan.author_id);
        if (held_it == heldout.end() || rec_it == rec_by_author.end()) continue;
        ++rates.fans_scored;
        hybrid_hits += precision_at_k(*rec_it->second, held_it->second, k);
        for (ArtistId artist : popularity_top_k(ranking, fan, k, exclude_mentioned)) {
            if (artist == held_it->second) {
                baseline_hits += 1.0;
                break;
            }
        }
    }
    if (rates.fans_scored > 0) {
        rates.hybrid = hybrid_hits / static_cast<double>(rates.fans_scored);
        rates.baseline = baseline_hits / static_cast<double>(rates.fans_scored);
    }
    return rates;
}

}  // namespace fanrec
