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

#ifndef FANREC_PIPELINE_HPP
#define FANREC_PIPELINE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fanrec/annotate.hpp"
#include "fanrec/recommend.hpp"
#include "fanrec/synth.hpp"
#include "fanrec/vectorize.hpp"

namespace fanrec {

struct PipelineConfig {
    std::uint64_t seed = 42;

    // paths; catalog/tweets default to <work_dir>/catalog.csv and
    // <work_dir>/tweets.jsonl when left empty (which is what the synth
    // stage writes)
    std::string work_dir = "work";
    std::string catalog_path;
    std::string tweets_path;

    // vectorize
    std::int64_t min_df = 2;
    double max_df_ratio = 0.5;
    Weighting weighting = Weighting::TfIdf;

    // profiles
    std::int64_t min_tweets = 3;
    double lambda = 0.3;  // facet blend; forced to 0 when annotation is off

    // cluster
    int k = 0;  // 0: pick k by silhouette over [k_min, k_max]
    int k_min = 4;
    int k_max = 16;
    int max_iter = 100;
    double tol = 1e-6;

    // annotate
    AnnotationMode annotation_mode = AnnotationMode::Off;
    AnnotatorConfig annotator;

    // recommend
    RecommendParams recommend;

    // eval
    int eval_at_k = 5;

    // synth (spec.seed is ignored here; the stage derives its seed from
    // the top-level seed)
    SynthSpec synth;

    std::string resolved_catalog_path() const;
    std::string resolved_tweets_path() const;
};

/// Parses the JSON config, layering file values over defaults.
/// Unknown keys are ConfigErrors.
PipelineConfig config_from_json(const std::string& text);
std::string config_to_json(const PipelineConfig& config);

/// FNV-1a of the canonical dump of the processing parameters (paths
/// excluded, so identical runs in different directories produce
/// identical artifact bytes). 16 hex digits.
std::string config_hash(const PipelineConfig& config);

/// Per-stage seed: fnv1a64(stage_name) XOR the top-level seed.
std::uint64_t stage_seed(const PipelineConfig& config, const std::string& stage_name);

extern const std::vector<std::string> kStageNames;

/// Runs one stage, reading and writing artifacts under work_dir.
/// Throws Error; MissingPrerequisite names the absent file.
void run_stage(const std::string& stage_name, const PipelineConfig& config);

}  // namespace fanrec

#endif  // FANREC_PIPELINE_HPP
