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

#ifndef FANREC_VECTORIZE_HPP
#define FANREC_VECTORIZE_HPP

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "fanrec/preprocess.hpp"

namespace fanrec {

/// Sorted sparse vector. Indices strictly increasing, no stored zeros.
struct SparseVector {
    std::vector<std::int32_t> indices;
    std::vector<double> weights;
    double norm = 0.0;

    bool empty() const { return indices.empty(); }
    std::size_t nnz() const { return indices.size(); }

    bool operator==(const SparseVector&) const = default;
};

double dot(const SparseVector& a, const SparseVector& b);

/// dot(a,b) / (|a||b|); 0 when either vector is empty.
double cosine_similarity(const SparseVector& a, const SparseVector& b);

/// Squared Euclidean distance against a dense vector.
double squared_distance_dense(const SparseVector& a, const std::vector<double>& dense,
                              double dense_sq_norm);

enum class Weighting { TfIdf, Tf };

struct Vocabulary {
    std::vector<std::string> terms;       // sorted lexicographically
    std::vector<std::int64_t> df;         // per retained term
    std::int64_t n_docs = 0;
    std::unordered_map<std::string, std::int32_t> index;  // term -> position

    std::size_t size() const { return terms.size(); }

    /// ln((1 + n_docs) / (1 + df)) + 1; always > 0.
    double idf(std::int32_t term_index) const;
};

/// Document-frequency pruning: keep terms with
/// min_df <= df <= floor(max_df_ratio * n_docs).
Vocabulary build_vocabulary(const std::vector<TokenizedDoc>& docs, std::int64_t min_df,
                            double max_df_ratio);

/// Sub-linear-free TF (count / in-vocab doc length) times smoothed IDF,
/// L2-normalized. Out-of-vocabulary tokens are ignored; a document with
/// no in-vocabulary tokens maps to the empty vector.
SparseVector tfidf_vector(const TokenizedDoc& doc, const Vocabulary& vocab,
                          Weighting weighting = Weighting::TfIdf);

/// Same weighting applied to an aggregate bag of counts.
SparseVector tfidf_from_counts(const std::map<std::string, std::int64_t>& counts,
                               const Vocabulary& vocab, Weighting weighting = Weighting::TfIdf);

std::vector<SparseVector> vectorize_corpus(const std::vector<TokenizedDoc>& docs,
                                           const Vocabulary& vocab,
                                           Weighting weighting = Weighting::TfIdf);
std::vector<SparseVector> vectorize_corpus_serial(const std::vector<TokenizedDoc>& docs,
                                                  const Vocabulary& vocab,
                                                  Weighting weighting = Weighting::TfIdf);

/// `{"id":..., "entries":[[index,weight],...]}` with weights printed at
/// 17 significant digits (exact double round-trip).
std::string vector_to_json_line(const std::string& id, const SparseVector& v);
std::pair<std::string, SparseVector> vector_from_json_line(const std::string& line);

std::string vocabulary_to_json(const Vocabulary& vocab);
Vocabulary vocabulary_from_json(const std::string& text);

/// Shared formatting for every serialized floating-point value:
/// %.17g, which parses back to the identical double.
std::string format_double(double value);

}  // namespace fanrec

#endif  // FANREC_VECTORIZE_HPP
