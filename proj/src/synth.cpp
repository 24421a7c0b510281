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

#include "fanrec/synth.hpp"

#include <cstdio>

#include "fanrec/errors.hpp"
#include "fanrec/rng.hpp"
#include "fanrec/time_util.hpp"

namespace fanrec {

namespace {

std::string artist_name(int cluster, int index) {
    return "C" + std::to_string(cluster) + "A" + std::to_string(index);
}

std::string padded(const char* prefix, std::int64_t value, int width) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%0*lld", prefix, width, static_cast<long long>(value));
    return buf;
}

void validate(const SynthSpec& spec) {
    auto positive = [](std::int64_t v, const char* what) {
        if (v <= 0) throw Error(ErrorCode::SpecError, std::string(what) + " must be positive");
    };
    if (spec.n_clusters < 2) throw Error(ErrorCode::SpecError, "n_clusters must be >= 2");
    positive(spec.fans_per_cluster, "fans_per_cluster");
    positive(spec.tweets_per_fan, "tweets_per_fan");
    positive(spec.vocab_per_cluster, "vocab_per_cluster");
    positive(spec.shared_vocab, "shared_vocab");
    positive(spec.tokens_per_tweet, "tokens_per_tweet");
    if (spec.artists_per_cluster < 2)
        throw Error(ErrorCode::SpecError,
                    "artists_per_cluster < 2 makes the hold-out impossible");
    if (!(spec.noise >= 0.0 && spec.noise < 1.0))
        throw Error(ErrorCode::SpecError, "noise must be in [0, 1)");
    if (!(spec.mention_prob > 0.0 && spec.mention_prob <= 1.0))
        throw Error(ErrorCode::SpecError, "mention_prob must be in (0, 1]");
    if (spec.tweets_per_fan < spec.artists_per_cluster - 1)
        throw Error(ErrorCode::SpecError,
                    "tweets_per_fan must cover the " +
                        std::to_string(spec.artists_per_cluster - 1) +
                        " non-held-out artists at least once");
}

}  // namespace

SynthCorpus generate_synthetic_corpus(const SynthSpec& spec) {
    validate(spec);

    SynthCorpus corpus;
    const int m = spec.artists_per_cluster;

    // catalog: gender/debut/size vary deterministically for texture
    std::vector<ArtistRecord> records;
    for (int c = 0; c < spec.n_clusters; ++c) {
        for (int j = 0; j < m; ++j) {
            ArtistRecord r;
            r.name = artist_name(c, j);
            r.gender = (c + j) % 2 == 0 ? Gender::Female : Gender::Male;
            r.debut = Date{2010 + (j % 10), 1 + (c % 12), 1 + (j % 28)};
            r.agency = "SynthEnt";
            r.size = 4 + (j % 3);
            r.active = true;
            r.aliases.push_back(canonical_alias(r.name));
            records.push_back(std::move(r));
        }
    }
    corpus.catalog = ArtistCatalog(std::move(records));

    // draws, in order per tweet: mention coin (skipped for the forced
    // coverage tweets), artist pick, then per token slot a source coin
    // and a token pick -- see README "Synthetic corpus"
    SplitMix64 rng(spec.seed);
    std::int64_t epoch = days_from_civil(Date{2023, 10, 10}) * 86400;
    std::int64_t tweet_counter = 0;

    for (int c = 0; c < spec.n_clusters; ++c) {
        for (int f = 0; f < spec.fans_per_cluster; ++f) {
            const std::int64_t fan_index =
                static_cast<std::int64_t>(c) * spec.fans_per_cluster + f;
            const std::string fan_id = padded("f", fan_index, 6);
            const int holdout = f % m;
            std::vector<int> non_holdout;
            for (int j = 0; j < m; ++j) {
                if (j != holdout) non_holdout.push_back(j);
            }
            corpus.fan_cluster[fan_id] = c;
            corpus.fan_heldout[fan_id] = artist_name(c, holdout);

            for (int t = 0; t < spec.tweets_per_fan; ++t) {
                bool mention;
                int artist_slot = 0;
                if (t < m - 1) {
                    mention = true;  // forced: cover every non-held-out artist
                    artist_slot = non_holdout[static_cast<std::size_t>(t)];
                } else {
                    mention = rng.next_double() < spec.mention_prob;
                    if (mention)
                        artist_slot = non_holdout[rng.next_index(non_holdout.size())];
                }

                std::string text;
                for (int slot = 0; slot < spec.tokens_per_tweet; ++slot) {
                    if (slot) text.push_back(' ');
                    if (rng.next_double() < spec.noise) {
                        text += "shared" + std::to_string(rng.next_index(
                                               static_cast<std::uint64_t>(spec.shared_vocab)));
                    } else {
                        text += "w" + std::to_string(c) + "t" +
                                std::to_string(rng.next_index(
                                    static_cast<std::uint64_t>(spec.vocab_per_cluster)));
                    }
                }
                if (mention) {
                    text.push_back(' ');
                    text += canonical_alias(artist_name(c, artist_slot));
                }

                Tweet tweet;
                tweet.id = padded("t", tweet_counter, 8);
                tweet.author_id = fan_id;
                tweet.created_at = epoch + tweet_counter * 60;
                tweet.text = std::move(text);
                corpus.tweets.push_back(std::move(tweet));
                ++tweet_counter;
            }
        }
    }
    return corpus;
}

}  // namespace fanrec
