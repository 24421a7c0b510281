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

#ifndef FANREC_ERRORS_HPP
#define FANREC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fanrec {

enum class ErrorCode {
    // catalog / tweet ingestion
    DuplicateArtist,
    AliasCollision,
    BadDate,
    BadSize,
    BadEnum,
    BadAlias,
    MalformedLine,
    DuplicateTweetId,
    // vectorizer
    EmptyCorpus,
    EmptyVocabulary,
    // clustering
    InvalidK,
    EmptyInput,
    NeedTwoClusters,
    // annotator
    NoJsonFound,
    SchemaError,
    EnumError,
    ConfigError,
    NetworkError,
    // recommendation / eval
    EmptyCluster,
    SpecError,
    PartitionMismatch,
    // pipeline
    MissingPrerequisite,
    IoError,
};

const char* error_code_name(ErrorCode code);

/// All library failures are reported as Error; code() identifies the
/// contract that was violated and maps onto CLI exit codes.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

  private:
    ErrorCode code_;
};

}  // namespace fanrec

#endif  // FANREC_ERRORS_HPP
