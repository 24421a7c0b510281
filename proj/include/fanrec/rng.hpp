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

#ifndef FANREC_RNG_HPP
#define FANREC_RNG_HPP

#include <cstddef>
#include <cstdint>
#include <string>

namespace fanrec {

/// SplitMix64. The exact update constants are part of the project's
/// reproducibility contract (see README "Determinism"): every seeded
/// draw in the code base flows through this generator, so independent
/// implementations can agree bit-for-bit.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1), 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [0, n). n must be > 0. Plain modulo; the tiny bias is
    /// accepted in exchange for a trivially portable definition.
    std::uint64_t next_index(std::uint64_t n) { return next_u64() % n; }

  private:
    std::uint64_t state_;
};

/// FNV-1a 64-bit. Used for cache keys, config hashes and per-stage seed
/// derivation; constants are likewise documented in the README.
inline std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t h = 0xCBF29CE484222325ULL) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

}  // namespace fanrec

#endif  // FANREC_RNG_HPP
