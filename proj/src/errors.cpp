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

#include "fanrec/errors.hpp"

namespace fanrec {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::DuplicateArtist: return "DuplicateArtist";
        case ErrorCode::AliasCollision: return "AliasCollision";
        case ErrorCode::BadDate: return "BadDate";
        case ErrorCode::BadSize: return "BadSize";
        case ErrorCode::BadEnum: return "BadEnum";
        case ErrorCode::BadAlias: return "BadAlias";
        case ErrorCode::MalformedLine: return "MalformedLine";
        case ErrorCode::DuplicateTweetId: return "DuplicateTweetId";
        case ErrorCode::EmptyCorpus: return "EmptyCorpus";
        case ErrorCode::EmptyVocabulary: return "EmptyVocabulary";
        case ErrorCode::InvalidK: return "InvalidK";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::NeedTwoClusters: return "NeedTwoClusters";
        case ErrorCode::NoJsonFound: return "NoJsonFound";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::EnumError: return "EnumError";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::NetworkError: return "NetworkError";
        case ErrorCode::EmptyCluster: return "EmptyCluster";
        case ErrorCode::SpecError: return "SpecError";
        case ErrorCode::PartitionMismatch: return "PartitionMismatch";
        case ErrorCode::MissingPrerequisite: return "MissingPrerequisite";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

}  // namespace fanrec
