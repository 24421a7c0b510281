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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fanrec/errors.hpp"
#include "fanrec/pipeline.hpp"

namespace {

using fanrec::Error;
using fanrec::ErrorCode;
using nlohmann::json;

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConfigError: return 2;
        case ErrorCode::MissingPrerequisite: return 3;
        case ErrorCode::NetworkError: return 5;
        default: return 4;  // data errors
    }
}

// "cluster.k=8" applied into the config JSON tree; the value is parsed
// as JSON when possible, else taken as a string.
void apply_set(json& tree, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw Error(ErrorCode::ConfigError, "--set wants key.path=value, got '" + assignment + "'");
    const std::string path = assignment.substr(0, eq);
    const std::string raw_value = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(raw_value);
    } catch (const json::parse_error&) {
        value = raw_value;
    }
    json* node = &tree;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = path.find('.', start);
        const std::string key = path.substr(start, dot - start);
        if (key.empty())
            throw Error(ErrorCode::ConfigError, "bad --set key '" + path + "'");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

struct CliArgs {
    std::string config_path;
    std::string work_dir;
    std::string catalog;
    std::string tweets;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::vector<std::string> sets;
};

fanrec::PipelineConfig build_config(const CliArgs& args) {
    json tree = json::object();
    if (!args.config_path.empty()) {
        std::ifstream in(args.config_path);
        if (!in) throw Error(ErrorCode::ConfigError, "cannot read config " + args.config_path);
        std::ostringstream ss;
        ss << in.rdbuf();
        try {
            tree = json::parse(ss.str());
        } catch (const json::parse_error& e) {
            throw Error(ErrorCode::ConfigError,
                        args.config_path + " is not valid JSON: " + e.what());
        }
    }
    for (const std::string& s : args.sets) apply_set(tree, s);
    fanrec::PipelineConfig cfg = fanrec::config_from_json(tree.dump());
    if (args.seed_given) cfg.seed = args.seed;
    if (!args.work_dir.empty()) cfg.work_dir = args.work_dir;
    if (!args.catalog.empty()) cfg.catalog_path = args.catalog;
    if (!args.tweets.empty()) cfg.tweets_path = args.tweets;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fanrec: tweet corpus -> fan clusters -> artist recommendations"};
    app.require_subcommand(1);

    CliArgs args;
    std::string stage_to_run;
    static const std::map<std::string, std::string> stage_help = {
        {"synth", "generate a synthetic corpus with known structure"},
        {"ingest", "parse the catalog and tweets, keep artist-mentioning tweets"},
        {"preprocess", "clean, case-fold and tokenize the filtered tweets"},
        {"annotate", "label tweets (mode: off | stub | online)"},
        {"vectorize", "build the vocabulary and per-tweet TF-IDF vectors"},
        {"profiles", "aggregate per-author profiles and profile vectors"},
        {"cluster", "k-means over profile vectors (fixed k or silhouette scan)"},
        {"recommend", "rank artists per fan (cluster affinity + CF blend)"},
        {"eval", "score against the synthetic ground truth"},
        {"report", "write a human-readable summary"},
    };
    for (const std::string& stage : fanrec::kStageNames) {
        CLI::App* sub = app.add_subcommand(stage, stage_help.at(stage));
        sub->add_option("--config", args.config_path, "JSON config file");
        sub->add_option("--seed", args.seed, "override the top-level seed")
            ->each([&](const std::string&) { args.seed_given = true; });
        sub->add_option("--work-dir", args.work_dir, "artifact directory");
        sub->add_option("--catalog", args.catalog, "artist catalog CSV");
        sub->add_option("--tweets", args.tweets, "tweet corpus JSONL");
        sub->add_option("--set", args.sets,
                        "override a config value, e.g. --set cluster.k=8");
        sub->callback([&, stage]() { stage_to_run = stage; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        fanrec::PipelineConfig cfg = build_config(args);
        fanrec::run_stage(stage_to_run, cfg);
    } catch (const Error& e) {
        std::fprintf(stderr, "fanrec %s: %s\n", stage_to_run.c_str(), e.what());
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "fanrec %s: %s\n", stage_to_run.c_str(), e.what());
        return 4;
    }
    return 0;
}
