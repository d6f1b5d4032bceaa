#pragma once

#include <cstdint>
#include <vector>

#include "pacshift/concepts.hpp"
#include "pacshift/core.hpp"
#include "pacshift/distributions.hpp"

namespace pacshift {

/// `size` i.i.d. inputs from `dist` labeled by `target`.
inline TrainingSet sample_training_set(const Concept& target, const Distribution& dist, std::size_t size,
                                       const Seed& seed) {
  require(target.n() == dist.n(), "sample_training_set: target and distribution widths differ");
  const auto xs = dist.sample_values(size, seed);
  std::vector<std::uint8_t> ys(size);
  target.label(xs, ys);
  TrainingSet out(dist.n());
  out.reserve(size);
  for (std::size_t i = 0; i < size; ++i) out.add({Input(dist.n(), xs[i]), ys[i] != 0});
  return out;
}

}  // namespace pacshift
