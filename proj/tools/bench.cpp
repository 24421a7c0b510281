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

// Compares the OpenMP kernels against their serial reference lanes on a
// synthetic corpus and checks that both produce identical results.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#if defined(_OPENMP)
#include <omp.h>
#endif

#include "fanrec/cluster.hpp"
#include "fanrec/fanmodel.hpp"
#include "fanrec/preprocess.hpp"
#include "fanrec/recommend.hpp"
#include "fanrec/synth.hpp"
#include "fanrec/vectorize.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Lane {
    const char* name;
    double serial_s = 0.0;
    double parallel_s = 0.0;
    bool identical = false;
};

void print_lane(const Lane& lane) {
    std::printf("%-12s serial %8.3fs   openmp %8.3fs   speedup %5.2fx   identical: %s\n",
                lane.name, lane.serial_s, lane.parallel_s,
                lane.parallel_s > 0 ? lane.serial_s / lane.parallel_s : 0.0,
                lane.identical ? "yes" : "NO");
}

}  // namespace

int main(int argc, char** argv) {
    using namespace fanrec;

    SynthSpec spec;
    spec.n_clusters = 8;
    spec.fans_per_cluster = argc > 1 ? std::atoi(argv[1]) : 400;
    spec.tweets_per_fan = 10;
    spec.seed = 7;

#if defined(_OPENMP)
    std::printf("threads: %d, fans: %d, tweets: %d\n", omp_get_max_threads(),
                spec.n_clusters * spec.fans_per_cluster,
                spec.n_clusters * spec.fans_per_cluster * spec.tweets_per_fan);
#endif

    const SynthCorpus corpus = generate_synthetic_corpus(spec);

    // preprocess
    Lane prep{"preprocess"};
    auto t0 = Clock::now();
    const auto docs_serial = preprocess_corpus_serial(corpus.tweets, corpus.catalog);
    prep.serial_s = seconds_since(t0);
    t0 = Clock::now();
    const auto docs = preprocess_corpus(corpus.tweets, corpus.catalog);
    prep.parallel_s = seconds_since(t0);
    prep.identical = docs_serial == docs;
    print_lane(prep);

    // vectorize
    const Vocabulary vocab = build_vocabulary(docs, 2, 0.5);
    Lane vec{"vectorize"};
    t0 = Clock::now();
    const auto vectors_serial = vectorize_corpus_serial(docs, vocab);
    vec.serial_s = seconds_since(t0);
    t0 = Clock::now();
    const auto vectors = vectorize_corpus(docs, vocab);
    vec.parallel_s = seconds_since(t0);
    vec.identical = vectors_serial == vectors;
    print_lane(vec);

    // profiles feed the clustering lanes
    auto profiles = build_fan_profiles(docs, 1);
    attach_profile_vectors(profiles, vocab, 0.0);
    std::vector<std::string> ids;
    std::vector<SparseVector> points;
    for (const auto& p : profiles) {
        ids.push_back(p.author_id);
        points.push_back(p.vector);
    }
    const std::size_t dim = vocab.size() + kFacetCount;

    // kmeans
    KmeansOptions opt;
    opt.k = spec.n_clusters;
    opt.seed = 42;
    Lane km{"kmeans"};
    t0 = Clock::now();
    const ClusterModel model_serial = kmeans_fit_serial(ids, points, dim, opt);
    km.serial_s = seconds_since(t0);
    t0 = Clock::now();
    const ClusterModel model = kmeans_fit(ids, points, dim, opt);
    km.parallel_s = seconds_since(t0);
    km.identical = model_to_json(model_serial) == model_to_json(model);
    print_lane(km);

    // pairwise distances (silhouette kernel)
    Lane pw{"pairwise"};
    t0 = Clock::now();
    const auto dist_serial = pairwise_distances_serial(points);
    pw.serial_s = seconds_since(t0);
    t0 = Clock::now();
    const auto dist = pairwise_distances(points);
    pw.parallel_s = seconds_since(t0);
    pw.identical = dist_serial == dist;
    print_lane(pw);

    // recommendation scoring
    RecommendParams params;
    Lane rec{"recommend"};
    t0 = Clock::now();
    const auto recs_serial = recommend_all_serial(profiles, model, corpus.catalog, params, 0);
    rec.serial_s = seconds_since(t0);
    t0 = Clock::now();
    const auto recs = recommend_all(profiles, model, corpus.catalog, params, 0);
    rec.parallel_s = seconds_since(t0);
    bool same = recs_serial.size() == recs.size();
    for (std::size_t i = 0; same && i < recs.size(); ++i) {
        same = recommendation_to_json_line(recs_serial[i], corpus.catalog) ==
               recommendation_to_json_line(recs[i], corpus.catalog);
    }
    rec.identical = same;
    print_lane(rec);

    const bool all_ok =
        prep.identical && vec.identical && km.identical && pw.identical && rec.identical;
    if (!all_ok) {
        std::printf("MISMATCH between serial and parallel lanes\n");
        return 1;
    }
    return 0;
}
