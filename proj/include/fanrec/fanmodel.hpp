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

#ifndef FANREC_FANMODEL_HPP
#define FANREC_FANMODEL_HPP

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fanrec/annotate.hpp"
#include "fanrec/vectorize.hpp"

namespace fanrec {

struct FanProfile {
    std::string author_id;
    std::int64_t n_tweets = 0;
    std::map<std::string, std::int64_t> token_counts;
    std::map<ArtistId, std::int64_t> mention_counts;  // tweets mentioning the artist
    std::array<std::int64_t, kFacetCount> facet_counts{};
    SparseVector vector;

    bool mentions(ArtistId artist) const {
        auto it = mention_counts.find(artist);
        return it != mention_counts.end() && it->second > 0;
    }
};

/// One profile per author with at least min_tweets documents, sorted by
/// author_id. Facet counts stay zero unless annotations are supplied.
std::vector<FanProfile> build_fan_profiles(
    const std::vector<TokenizedDoc>& docs, std::int64_t min_tweets,
    const std::map<std::string, AnnotationLabel>* annotations_by_tweet = nullptr);

/// Unit-norm blend of the text TF-IDF block with the facet block:
/// text scaled by (1 - lambda), facets (dimensions vocab_size..+4, in
/// facet enum order) scaled by lambda. lambda = 0 reproduces the plain
/// aggregate TF-IDF bit-for-bit.
SparseVector profile_vector(const FanProfile& profile, const Vocabulary& vocab,
                            double facet_weight_lambda,
                            Weighting weighting = Weighting::TfIdf);

void attach_profile_vectors(std::vector<FanProfile>& profiles, const Vocabulary& vocab,
                            double facet_weight_lambda,
                            Weighting weighting = Weighting::TfIdf);

std::string profile_to_json_line(const FanProfile& profile, const ArtistCatalog& catalog);
FanProfile profile_from_json_line(const std::string& line, const ArtistCatalog& catalog);

}  // namespace fanrec

#endif  // FANREC_FANMODEL_HPP
