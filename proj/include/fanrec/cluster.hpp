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

#ifndef FANREC_CLUSTER_HPP
#define FANREC_CLUSTER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fanrec/vectorize.hpp"

namespace fanrec {

struct KmeansOptions {
    int k = 8;
    std::uint64_t seed = 0;
    int max_iter = 100;
    double tol = 1e-6;
};

struct ClusterModel {
    int k = 0;
    std::uint64_t seed = 0;
    std::size_t dim = 0;
    int iterations_run = 0;
    double inertia = 0.0;
    std::vector<std::vector<double>> centroids;               // k x dim
    std::vector<std::pair<std::string, int>> assignments;     // sorted by id
    std::vector<double> inertia_trace;  // objective after each assignment pass

    int assignment_of(const std::string& id) const;
};

/// Lloyd's algorithm with k-means++ seeding. Fully deterministic:
/// initialization draws SplitMix64 over points ordered by id, and every
/// floating-point reduction follows the canonical slab summation
/// (see README "Determinism"), so the result is byte-identical for any
/// thread count. ids must be unique; vectors must be non-empty.
ClusterModel kmeans_fit(std::vector<std::string> ids, std::vector<SparseVector> points,
                        std::size_t dim, const KmeansOptions& opt);

/// Plain single-threaded implementation of the identical algorithm,
/// kept as the reference the OpenMP path is tested against (outputs are
/// byte-identical).
ClusterModel kmeans_fit_serial(std::vector<std::string> ids, std::vector<SparseVector> points,
                               std::size_t dim, const KmeansOptions& opt);

/// Nearest centroid by squared Euclidean distance; ties break to the
/// lowest index.
int assign(const ClusterModel& model, const SparseVector& point);

/// Mean silhouette over points with Euclidean distance; singleton
/// clusters contribute 0, as do points where both mean distances are 0.
/// Computes the full pairwise distance matrix (n^2 doubles).
double silhouette(const std::vector<SparseVector>& points, const std::vector<int>& assignment,
                  int k);

/// Row-parallel n x n Euclidean distance matrix.
std::vector<double> pairwise_distances(const std::vector<SparseVector>& points);
std::vector<double> pairwise_distances_serial(const std::vector<SparseVector>& points);

double silhouette_from_matrix(const std::vector<double>& dist, std::size_t n,
                              const std::vector<int>& assignment, int k);

/// Fits every k in [k_min, k_max] with the same seed and returns the k
/// with the best silhouette; ties go to the smallest k. The distance
/// matrix is computed once and shared across the scan.
int select_k(const std::vector<std::string>& ids, const std::vector<SparseVector>& points,
             std::size_t dim, int k_min, int k_max, std::uint64_t seed, int max_iter = 100,
             double tol = 1e-6);

std::string model_to_json(const ClusterModel& model);
ClusterModel model_from_json(const std::string& text);

}  // namespace fanrec

#endif  // FANREC_CLUSTER_HPP
