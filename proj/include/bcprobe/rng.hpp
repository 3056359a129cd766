// Copyright 2026 The bcprobe Authors.
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

#ifndef BCPROBE_RNG_HPP_
#define BCPROBE_RNG_HPP_

#include <cstdint>
#include <string_view>

namespace bcprobe {

// Counter-based SplitMix64.
//
// The n-th output (n = 1, 2, ...) of a stream with key K is
//
//   z = K + n * 0x9E3779B97F4A7C15            (mod 2^64)
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   out = z ^ (z >> 31)
//
// Uniform doubles take the top 53 bits: (out >> 11) * 2^-53. Integer draws
// in [0, n) use out % n. Substreams are keyed by Mix(seed ^ Mix(FNV-1a-64
// of a label)), so outputs are reproducible in any language.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  // Stream for (seed, label), e.g. one per dialogue id.
  static CounterRng Substream(std::uint64_t seed, std::string_view label);
  static CounterRng Substream(std::uint64_t seed, std::uint64_t label);

  static std::uint64_t Mix(std::uint64_t z);
  static std::uint64_t Fnv1a64(std::string_view bytes);

  std::uint64_t NextU64() {
    ++counter_;
    return Mix(key_ + counter_ * kGolden);
  }

  // Uniform in [0, 1).
  double NextDouble() {
    return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n); n must be positive.
  std::uint64_t NextBelow(std::uint64_t n) { return NextU64() % n; }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

inline std::uint64_t CounterRng::Mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t CounterRng::Fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline CounterRng CounterRng::Substream(std::uint64_t seed,
                                        std::string_view label) {
  return CounterRng(Mix(seed ^ Mix(Fnv1a64(label))));
}

inline CounterRng CounterRng::Substream(std::uint64_t seed,
                                        std::uint64_t label) {
  return CounterRng(Mix(seed ^ Mix(label)));
}

}  // namespace bcprobe

#endif  // BCPROBE_RNG_HPP_
