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

#include "fanrec/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "fanrec/errors.hpp"
#include "fanrec/rng.hpp"

namespace fanrec {

using nlohmann::json;

namespace {

// Canonical summation: points are split into fixed slabs of this many
// consecutive points; a slab's contribution is accumulated point by
// point, and slab partials fold into the global accumulator in slab
// order. Serial and parallel paths share this tree, which is what makes
// centroid updates byte-identical for any thread count.
constexpr std::size_t kSlabPoints = 2048;

std::vector<double> to_dense(const SparseVector& p, std::size_t dim) {
    std::vector<double> out(dim, 0.0);
    for (std::size_t e = 0; e < p.indices.size(); ++e)
        out[static_cast<std::size_t>(p.indices[e])] = p.weights[e];
    return out;
}

double sq_norm_dense(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

// argmin over centroids of squared distance; ties to lowest index.
int nearest_centroid(const SparseVector& p, const std::vector<std::vector<double>>& centroids,
                     const std::vector<double>& centroid_sq_norms, double* best_d2_out) {
    int best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double d2 = squared_distance_dense(p, centroids[c], centroid_sq_norms[c]);
        if (d2 < best_d2) {
            best_d2 = d2;
            best = static_cast<int>(c);
        }
    }
    *best_d2_out = best_d2;
    return best;
}

struct SortedInput {
    std::vector<std::string> ids;
    std::vector<SparseVector> points;
};

SortedInput sort_by_id(std::vector<std::string> ids, std::vector<SparseVector> points) {
    if (ids.size() != points.size())
        throw Error(ErrorCode::EmptyInput, "ids and points length mismatch");
    std::vector<std::size_t> order(ids.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
    SortedInput out;
    out.ids.reserve(ids.size());
    out.points.reserve(points.size());
    for (std::size_t i : order) {
        out.ids.push_back(std::move(ids[i]));
        out.points.push_back(std::move(points[i]));
    }
    for (std::size_t i = 1; i < out.ids.size(); ++i) {
        if (out.ids[i] == out.ids[i - 1])
            throw Error(ErrorCode::EmptyInput, "duplicate id '" + out.ids[i] + "'");
    }
    return out;
}

// k-means++ over points in canonical order. D^2 scans are per-point
// independent; the sampling walk is a serial prefix scan either way.
std::vector<std::vector<double>> kmeanspp_init(const std::vector<SparseVector>& points,
                                               std::size_t dim, int k, std::uint64_t seed,
                                               bool parallel) {
    const std::size_t n = points.size();
    SplitMix64 rng(seed);
    std::vector<std::vector<double>> centroids;
    centroids.reserve(static_cast<std::size_t>(k));
    centroids.push_back(to_dense(points[rng.next_index(n)], dim));

    std::vector<double> d2(n);
    double c_sq = sq_norm_dense(centroids[0]);
#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i)
        d2[static_cast<std::size_t>(i)] =
            squared_distance_dense(points[static_cast<std::size_t>(i)], centroids[0], c_sq);

    while (centroids.size() < static_cast<std::size_t>(k)) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += d2[i];
        std::size_t pick;
        if (total > 0.0) {
            const double target = rng.next_double() * total;
            double cum = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                cum += d2[i];
                if (cum > target) {
                    pick = i;
                    break;
                }
            }
        } else {
            // all mass on chosen centers (duplicate points): fall back
            // to a uniform draw so we still return k centroids
            pick = rng.next_index(n);
        }
        centroids.push_back(to_dense(points[pick], dim));
        const std::vector<double>& latest = centroids.back();
        const double latest_sq = sq_norm_dense(latest);
#pragma omp parallel for schedule(static) if (parallel)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
            const std::size_t ui = static_cast<std::size_t>(i);
            const double d = squared_distance_dense(points[ui], latest, latest_sq);
            if (d < d2[ui]) d2[ui] = d;
        }
    }
    return centroids;
}

struct Accumulator {
    std::vector<std::vector<double>> sums;  // k x dim
    std::vector<std::int64_t> counts;
};

void accumulate_slab(const std::vector<SparseVector>& points, const std::vector<int>& best,
                     std::size_t begin, std::size_t end, Accumulator& acc) {
    for (std::size_t i = begin; i < end; ++i) {
        const int c = best[i];
        ++acc.counts[static_cast<std::size_t>(c)];
        const SparseVector& p = points[i];
        std::vector<double>& row = acc.sums[static_cast<std::size_t>(c)];
        for (std::size_t e = 0; e < p.indices.size(); ++e)
            row[static_cast<std::size_t>(p.indices[e])] += p.weights[e];
    }
}

void fold_accumulator(const Accumulator& partial, Accumulator& total) {
    for (std::size_t c = 0; c < total.counts.size(); ++c) {
        total.counts[c] += partial.counts[c];
        const std::vector<double>& src = partial.sums[c];
        std::vector<double>& dst = total.sums[c];
        for (std::size_t d = 0; d < dst.size(); ++d) dst[d] += src[d];
    }
}

void zero_accumulator(Accumulator& acc, int k, std::size_t dim) {
    acc.counts.assign(static_cast<std::size_t>(k), 0);
    acc.sums.assign(static_cast<std::size_t>(k), std::vector<double>(dim, 0.0));
}

ClusterModel finish_model(const SortedInput& input, std::size_t dim, const KmeansOptions& opt,
                          std::vector<std::vector<double>> centroids,
                          std::vector<double> inertia_trace, int iterations_run,
                          const std::vector<int>& final_best, double final_inertia) {
    ClusterModel model;
    model.k = opt.k;
    model.seed = opt.seed;
    model.dim = dim;
    model.iterations_run = iterations_run;
    model.centroids = std::move(centroids);
    model.inertia_trace = std::move(inertia_trace);
    model.inertia = final_inertia;
    model.assignments.reserve(input.ids.size());
    for (std::size_t i = 0; i < input.ids.size(); ++i)
        model.assignments.emplace_back(input.ids[i], final_best[i]);
    return model;
}

}  // namespace

// The serial and OpenMP paths below implement the same canonical
// arithmetic; test_cluster asserts their serialized models are
// byte-identical on random instances.

ClusterModel kmeans_fit_serial(std::vector<std::string> ids, std::vector<SparseVector> points,
                               std::size_t dim, const KmeansOptions& opt) {
    SortedInput input = sort_by_id(std::move(ids), std::move(points));
    const std::size_t n = input.points.size();
    if (n == 0) throw Error(ErrorCode::EmptyInput, "no vectors to cluster");
    if (opt.k < 1 || static_cast<std::size_t>(opt.k) > n)
        throw Error(ErrorCode::InvalidK,
                    "k=" + std::to_string(opt.k) + " with n=" + std::to_string(n));

    std::vector<std::vector<double>> centroids =
        kmeanspp_init(input.points, dim, opt.k, opt.seed, /*parallel=*/false);

    std::vector<int> best(n, 0);
    std::vector<double> best_d2(n, 0.0);
    std::vector<double> trace;
    std::vector<double> c_sq(static_cast<std::size_t>(opt.k));
    Accumulator total, slab;
    int iterations = 0;

    for (int iter = 0; iter < opt.max_iter; ++iter) {
        for (std::size_t c = 0; c < centroids.size(); ++c) c_sq[c] = sq_norm_dense(centroids[c]);
        for (std::size_t i = 0; i < n; ++i)
            best[i] = nearest_centroid(input.points[i], centroids, c_sq, &best_d2[i]);
        double objective = 0.0;
        for (std::size_t i = 0; i < n; ++i) objective += best_d2[i];
        trace.push_back(objective);

        zero_accumulator(total, opt.k, dim);
        for (std::size_t s = 0; s * kSlabPoints < n; ++s) {
            zero_accumulator(slab, opt.k, dim);
            accumulate_slab(input.points, best, s * kSlabPoints,
                            std::min(n, (s + 1) * kSlabPoints), slab);
            fold_accumulator(slab, total);
        }

        std::vector<std::vector<double>> next(centroids.size());
        std::vector<bool> reseeded_point(n, false);
        for (std::size_t c = 0; c < centroids.size(); ++c) {
            if (total.counts[c] > 0) {
                next[c] = total.sums[c];
                const double inv = 1.0 / static_cast<double>(total.counts[c]);
                for (double& x : next[c]) x *= inv;
            } else {
                // farthest point from its assigned centroid, lowest
                // index on ties, each point used at most once
                std::size_t far = 0;
                double far_d2 = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (!reseeded_point[i] && best_d2[i] > far_d2) {
                        far_d2 = best_d2[i];
                        far = i;
                    }
                }
                reseeded_point[far] = true;
                next[c] = to_dense(input.points[far], dim);
            }
        }

        double shift = 0.0;
        for (std::size_t c = 0; c < centroids.size(); ++c) {
            double s = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                const double delta = next[c][d] - centroids[c][d];
                s += delta * delta;
            }
            shift = std::max(shift, std::sqrt(s));
        }
        centroids = std::move(next);
        ++iterations;
        if (shift < opt.tol) break;
    }

    for (std::size_t c = 0; c < centroids.size(); ++c) c_sq[c] = sq_norm_dense(centroids[c]);
    for (std::size_t i = 0; i < n; ++i)
        best[i] = nearest_centroid(input.points[i], centroids, c_sq, &best_d2[i]);
    double final_inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) final_inertia += best_d2[i];
    trace.push_back(final_inertia);

    return finish_model(input, dim, opt, std::move(centroids), std::move(trace), iterations, best,
                        final_inertia);
}

ClusterModel kmeans_fit(std::vector<std::string> ids, std::vector<SparseVector> points,
                        std::size_t dim, const KmeansOptions& opt) {
    SortedInput input = sort_by_id(std::move(ids), std::move(points));
    const std::size_t n = input.points.size();
    if (n == 0) throw Error(ErrorCode::EmptyInput, "no vectors to cluster");
    if (opt.k < 1 || static_cast<std::size_t>(opt.k) > n)
        throw Error(ErrorCode::InvalidK,
                    "k=" + std::to_string(opt.k) + " with n=" + std::to_string(n));

    std::vector<std::vector<double>> centroids =
        kmeanspp_init(input.points, dim, opt.k, opt.seed, /*parallel=*/true);

    std::vector<int> best(n, 0);
    std::vector<double> best_d2(n, 0.0);
    std::vector<double> trace;
    std::vector<double> c_sq(static_cast<std::size_t>(opt.k));
    Accumulator total;
    int iterations = 0;
    const std::size_t n_slabs = (n + kSlabPoints - 1) / kSlabPoints;

    for (int iter = 0; iter < opt.max_iter; ++iter) {
        for (std::size_t c = 0; c < centroids.size(); ++c) c_sq[c] = sq_norm_dense(centroids[c]);
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
            const std::size_t ui = static_cast<std::size_t>(i);
            best[ui] = nearest_centroid(input.points[ui], centroids, c_sq, &best_d2[ui]);
        }
        double objective = 0.0;
        for (std::size_t i = 0; i < n; ++i) objective += best_d2[i];
        trace.push_back(objective);

        zero_accumulator(total, opt.k, dim);
#pragma omp parallel
        {
            Accumulator slab;
            zero_accumulator(slab, opt.k, dim);
#pragma omp for ordered schedule(static, 1)
            for (std::int64_t s = 0; s < static_cast<std::int64_t>(n_slabs); ++s) {
                const std::size_t us = static_cast<std::size_t>(s);
                zero_accumulator(slab, opt.k, dim);
                accumulate_slab(input.points, best, us * kSlabPoints,
                                std::min(n, (us + 1) * kSlabPoints), slab);
#pragma omp ordered
                fold_accumulator(slab, total);
            }
        }

        std::vector<std::vector<double>> next(centroids.size());
        std::vector<bool> reseeded_point(n, false);
        for (std::size_t c = 0; c < centroids.size(); ++c) {
            if (total.counts[c] > 0) {
                next[c] = total.sums[c];
                const double inv = 1.0 / static_cast<double>(total.counts[c]);
                for (double& x : next[c]) x *= inv;
            } else {
                std::size_t far = 0;
                double far_d2 = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (!reseeded_point[i] && best_d2[i] > far_d2) {
                        far_d2 = best_d2[i];
                        far = i;
                    }
                }
                reseeded_point[far] = true;
                next[c] = to_dense(input.points[far], dim);
            }
        }

        double shift = 0.0;
        for (std::size_t c = 0; c < centroids.size(); ++c) {
            double s = 0.0;
            for (std::size_t d = 0; d < dim; ++d) {
                const double delta = next[c][d] - centroids[c][d];
                s += delta * delta;
            }
            shift = std::max(shift, std::sqrt(s));
        }
        centroids = std::move(next);
        ++iterations;
        if (shift < opt.tol) break;
    }

    for (std::size_t c = 0; c < centroids.size(); ++c) c_sq[c] = sq_norm_dense(centroids[c]);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        const std::size_t ui = static_cast<std::size_t>(i);
        best[ui] = nearest_centroid(input.points[ui], centroids, c_sq, &best_d2[ui]);
    }
    double final_inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) final_inertia += best_d2[i];
    trace.push_back(final_inertia);

    return finish_model(input, dim, opt, std::move(centroids), std::move(trace), iterations, best,
                        final_inertia);
}

int ClusterModel::assignment_of(const std::string& id) const {
    auto it = std::lower_bound(assignments.begin(), assignments.end(), id,
                               [](const auto& pair, const std::string& s) { return pair.first < s; });
    if (it == assignments.end() || it->first != id)
        throw Error(ErrorCode::EmptyInput, "id '" + id + "' not in model");
    return it->second;
}

int assign(const ClusterModel& model, const SparseVector& point) {
    std::vector<double> c_sq(model.centroids.size());
    for (std::size_t c = 0; c < model.centroids.size(); ++c)
        c_sq[c] = sq_norm_dense(model.centroids[c]);
    double d2;
    return nearest_centroid(point, model.centroids, c_sq, &d2);
}

std::vector<double> pairwise_distances_serial(const std::vector<SparseVector>& points) {
    const std::size_t n = points.size();
    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double sq = points[i].norm * points[i].norm +
                              points[j].norm * points[j].norm - 2.0 * dot(points[i], points[j]);
            const double d = std::sqrt(sq > 0.0 ? sq : 0.0);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    return dist;
}

std::vector<double> pairwise_distances(const std::vector<SparseVector>& points) {
    const std::size_t n = points.size();
    std::vector<double> dist(n * n, 0.0);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        const std::size_t ui = static_cast<std::size_t>(i);
        for (std::size_t j = ui + 1; j < n; ++j) {
            const double sq = points[ui].norm * points[ui].norm +
                              points[j].norm * points[j].norm - 2.0 * dot(points[ui], points[j]);
            const double d = std::sqrt(sq > 0.0 ? sq : 0.0);
            dist[ui * n + j] = d;
            dist[j * n + ui] = d;
        }
    }
    return dist;
}

double silhouette_from_matrix(const std::vector<double>& dist, std::size_t n,
                              const std::vector<int>& assignment, int k) {
    if (k < 2) throw Error(ErrorCode::NeedTwoClusters, "silhouette needs k >= 2");
    std::vector<std::int64_t> cluster_sizes(static_cast<std::size_t>(k), 0);
    for (int a : assignment) ++cluster_sizes[static_cast<std::size_t>(a)];

    std::vector<double> scores(n, 0.0);
#pragma omp parallel for schedule(static)
    for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(n); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        const int own = assignment[i];
        if (cluster_sizes[static_cast<std::size_t>(own)] <= 1) {
            scores[i] = 0.0;
            continue;
        }
        std::vector<double> sums(static_cast<std::size_t>(k), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) sums[static_cast<std::size_t>(assignment[j])] += dist[i * n + j];
        }
        const double a =
            sums[static_cast<std::size_t>(own)] /
            static_cast<double>(cluster_sizes[static_cast<std::size_t>(own)] - 1);
        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            if (c == own || cluster_sizes[static_cast<std::size_t>(c)] == 0) continue;
            b = std::min(b, sums[static_cast<std::size_t>(c)] /
                                static_cast<double>(cluster_sizes[static_cast<std::size_t>(c)]));
        }
        if (!std::isfinite(b)) {  // no other non-empty cluster
            scores[i] = 0.0;
            continue;
        }
        const double m = std::max(a, b);
        scores[i] = m > 0.0 ? (b - a) / m : 0.0;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += scores[i];
    return total / static_cast<double>(n);
}

double silhouette(const std::vector<SparseVector>& points, const std::vector<int>& assignment,
                  int k) {
    if (k < 2) throw Error(ErrorCode::NeedTwoClusters, "silhouette needs k >= 2");
    if (points.size() != assignment.size())
        throw Error(ErrorCode::EmptyInput, "assignment length mismatch");
    return silhouette_from_matrix(pairwise_distances(points), points.size(), assignment, k);
}

int select_k(const std::vector<std::string>& ids, const std::vector<SparseVector>& points,
             std::size_t dim, int k_min, int k_max, std::uint64_t seed, int max_iter, double tol) {
    if (k_min < 2 || k_min > k_max || static_cast<std::size_t>(k_max) > points.size())
        throw Error(ErrorCode::InvalidK, "need 2 <= k_min <= k_max <= n");

    // Distances do not depend on k; compute them once in canonical order.
    std::vector<std::size_t> order(ids.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
    std::vector<SparseVector> sorted_points;
    sorted_points.reserve(points.size());
    for (std::size_t i : order) sorted_points.push_back(points[i]);
    const std::vector<double> dist = pairwise_distances(sorted_points);

    int best_k = k_min;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int k = k_min; k <= k_max; ++k) {
        KmeansOptions opt;
        opt.k = k;
        opt.seed = seed;
        opt.max_iter = max_iter;
        opt.tol = tol;
        ClusterModel model = kmeans_fit(ids, points, dim, opt);
        std::vector<int> assignment(sorted_points.size());
        for (std::size_t i = 0; i < model.assignments.size(); ++i)
            assignment[i] = model.assignments[i].second;  // already id-sorted
        const double score = silhouette_from_matrix(dist, sorted_points.size(), assignment, k);
        if (score > best_score) {
            best_score = score;
            best_k = k;
        }
    }
    return best_k;
}

std::string model_to_json(const ClusterModel& model) {
    std::string out = "{\"k\":" + std::to_string(model.k);
    out += ",\"seed\":" + std::to_string(model.seed);
    out += ",\"dim\":" + std::to_string(model.dim);
    out += ",\"iterations_run\":" + std::to_string(model.iterations_run);
    out += ",\"inertia\":" + format_double(model.inertia);
    out += ",\"centroids\":[";
    for (std::size_t c = 0; c < model.centroids.size(); ++c) {
        if (c) out.push_back(',');
        out.push_back('[');
        for (std::size_t d = 0; d < model.centroids[c].size(); ++d) {
            if (d) out.push_back(',');
            out += format_double(model.centroids[c][d]);
        }
        out.push_back(']');
    }
    out += "],\"assignments\":[";
    for (std::size_t i = 0; i < model.assignments.size(); ++i) {
        if (i) out.push_back(',');
        out.push_back('[');
        out += json(model.assignments[i].first).dump();
        out.push_back(',');
        out += std::to_string(model.assignments[i].second);
        out.push_back(']');
    }
    out += "]}";
    return out;
}

ClusterModel model_from_json(const std::string& text) {
    json obj = json::parse(text);
    ClusterModel model;
    model.k = obj.at("k").get<int>();
    model.seed = obj.at("seed").get<std::uint64_t>();
    model.dim = obj.at("dim").get<std::size_t>();
    model.iterations_run = obj.at("iterations_run").get<int>();
    model.inertia = obj.at("inertia").get<double>();
    for (const auto& row : obj.at("centroids"))
        model.centroids.push_back(row.get<std::vector<double>>());
    for (const auto& pair : obj.at("assignments"))
        model.assignments.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<int>());
    return model;
}

}  // namespace fanrec
