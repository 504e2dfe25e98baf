#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "drfi/trainset.hpp"

namespace drfi {

/// Seeded generator of annotated scenes: a textured, shaded background with
/// distractor patches (some strongly colored, on the border) and one or two
/// salient blobs or rectangles whose footprint is the ground-truth mask. Each
/// scene separates its objects by one cue: color, texture, or lightness.
struct SyntheticOptions {
  int width = 128;
  int height = 96;
};

/// Image `index` of the corpus drawn from `seed`; independent of every other index.
AnnotatedImage synthesize(std::uint64_t seed, std::size_t index, const SyntheticOptions& options = {});

std::vector<AnnotatedImage> synthesize_corpus(std::size_t count, std::uint64_t seed,
                                              const SyntheticOptions& options = {}, int threads = 1);

}  // namespace drfi
