//
// Copyright 2026 The dpfl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef DPFL_RNG_HPP_
#define DPFL_RNG_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace dpfl {

using Rng = std::mt19937_64;

// Stream tags keep independently seeded generators apart even when they share
// the run seed.
enum class Stream : std::uint64_t {
  kInit = 1,
  kShuffle = 2,
  kNoise = 3,
  kSplit = 4,
  kPartition = 5,
  kSelect = 6,
  kClient = 7,
  kSynth = 8,
};

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives a child seed from a base seed, a stream tag and any number of
// indices (client id, round, epoch). Pure function of its inputs.
constexpr std::uint64_t derive_seed(std::uint64_t base, Stream stream,
                                    std::initializer_list<std::uint64_t> ids = {}) {
  std::uint64_t h = mix64(base ^ mix64(static_cast<std::uint64_t>(stream)));
  for (std::uint64_t id : ids) h = mix64(h ^ mix64(id + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng make_rng(std::uint64_t base, Stream stream,
                    std::initializer_list<std::uint64_t> ids = {}) {
  return Rng(derive_seed(base, stream, ids));
}

}  // namespace dpfl

#endif  // DPFL_RNG_HPP_
