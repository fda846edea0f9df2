#pragma once
// Fixed-size training subsets that trade images for captions per image.
//
// Eligible images are the training images owning at least as many captions
// as the largest captions-per-image request, sorted by id. A spec with c
// captions per image takes the first total/c eligible images and, for each,
// its first c captions by caption id. Image sets are therefore nested
// (fewer captions per image -> superset of images) and, for a shared image,
// the smaller caption selection is a prefix of the larger one.

#include <span>
#include <vector>

#include "vgs/io/manifest.hpp"

namespace vgs::train {

struct SubsetSpec {
  std::size_t total_captions = 30000;
  std::size_t captions_per_image = 5;

  std::size_t image_count() const { return total_captions / captions_per_image; }
  void validate() const;
};

/// The five configurations with 30,000 captions: 5, 4, 3, 2, 1 per image.
std::vector<SubsetSpec> paraphrase_specs(std::size_t total_captions = 30000);

/// One train-split record list per spec, in spec order.
std::vector<std::vector<io::ManifestRecord>> make_paraphrase_subsets(const io::DatasetManifest& source,
                                                                     std::span<const SubsetSpec> specs);

}  // namespace vgs::train
