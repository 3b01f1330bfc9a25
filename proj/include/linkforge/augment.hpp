// Copyright 2026 The Linkforge Authors.
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

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "linkforge/corpus_model.hpp"
#include "linkforge/rng.hpp"

// Dynamic context removal: rewrites the gold span of a training example so
// that an existing link looks like a missing-mention, missing-sentence or
// missing-span insertion.
namespace linkforge::augment {

inline constexpr std::size_t kMinSpanRemoval = 2;
inline constexpr std::size_t kMaxSpanRemoval = 5;

// Probabilities indexed by RemovalStrategy.
struct RemovalWeights {
  std::array<double, 4> p{0.4, 0.2, 0.3, 0.1};

  // Throws std::invalid_argument unless all weights are >= 0 and sum to
  // 1 within 1e-9.
  void check() const;
  // "0.4,0.2,0.3,0.1" in rm_nth, rm_mention, rm_sent, rm_span order.
  static RemovalWeights parse(std::string_view csv);
};

using Feasibility = std::array<bool, 4>;

// Draws a strategy; an infeasible draw falls back towards less aggressive
// strategies (rm_span, rm_sent, rm_mention, rm_nth) to the first feasible
// one. rm_nth must be feasible.
RemovalStrategy sample_strategy(Rng& rng, const RemovalWeights& weights, const Feasibility& feasible);

// Removal of `strategy` from the gold span, or nullopt when the gold text
// would be blank afterwards. `span_size` is the number of sentences rm_span
// removes, the mention's sentence included. The block position is drawn from
// `rng`. Golds without positions only support rm_nth.
std::optional<AugmentedExample> try_removal(const RankingExample& example, RemovalStrategy strategy,
                                            std::size_t span_size, Rng& rng);

// As try_removal, but an infeasible strategy is a contract violation
// (std::logic_error).
AugmentedExample apply_removal(const RankingExample& example, RemovalStrategy strategy, std::size_t span_size,
                               Rng& rng);

// One augmentation draw: span size k uniform in {2..5}, feasibility of
// every strategy for that k, strategy via sample_strategy, then removal.
AugmentedExample augment(const RankingExample& example, const RemovalWeights& weights, Rng& rng);

// Generator for one example in one epoch, so repeated visits draw afresh.
Rng epoch_rng(std::uint64_t seed, std::uint64_t epoch, std::string_view example_id);

}  // namespace linkforge::augment
