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

#ifndef FANREC_SYNTH_HPP
#define FANREC_SYNTH_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fanrec/catalog.hpp"
#include "fanrec/tweet.hpp"

namespace fanrec {

/// Planted-partition corpus description. The generator is a pure
/// function of this struct (the draw order is documented in the README
/// so other implementations can reproduce it byte-for-byte).
struct SynthSpec {
    int n_clusters = 4;
    int fans_per_cluster = 200;
    int tweets_per_fan = 10;
    int vocab_per_cluster = 50;  // cluster-exclusive terms
    int shared_vocab = 50;
    double noise = 0.2;  // probability a token comes from the shared pool
    int artists_per_cluster = 3;
    double mention_prob = 0.6;
    int tokens_per_tweet = 8;
    std::uint64_t seed = 0;
};

struct SynthCorpus {
    std::vector<Tweet> tweets;
    ArtistCatalog catalog;
    std::map<std::string, int> fan_cluster;          // ground truth partition
    std::map<std::string, std::string> fan_heldout;  // fan -> withheld artist name
};

/// Generates fans with cluster-exclusive vocabularies and artist
/// mentions. Each fan's held-out artist never appears in their own
/// tweets but is mentioned by every cluster peer whose held-out artist
/// differs, which keeps it preferred by at least half of the peers.
/// Throws SpecError on counts that make the hold-out impossible.
SynthCorpus generate_synthetic_corpus(const SynthSpec& spec);

}  // namespace fanrec

#endif  // FANREC_SYNTH_HPP
