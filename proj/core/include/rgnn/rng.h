// Copyright 2026 The rgnn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RGNN_RNG_H_
#define RGNN_RNG_H_

#include <cstdint>
#include <random>

namespace rgnn {

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x);

// Derives an independent stream seed from a master seed and a key tuple.
// Streams for distinct (n, trial, tag) never share a seed in practice, so
// trials can be sampled in any order or concurrently with identical results.
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t n,
                          std::uint64_t trial, std::uint64_t tag = 0);

inline Rng make_rng(std::uint64_t seed) { return Rng(mix64(seed)); }

}  // namespace rgnn

#endif  // RGNN_RNG_H_
