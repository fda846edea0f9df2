#include "vgs/train/subsets.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>

namespace vgs::train {

void SubsetSpec::validate() const {
  if (captions_per_image == 0) throw std::invalid_argument("subset spec: captions_per_image must be positive");
  if (total_captions == 0) throw std::invalid_argument("subset spec: total_captions must be positive");
  if (total_captions % captions_per_image != 0) {
    throw std::invalid_argument("subset spec: " + std::to_string(total_captions) + " captions are not divisible by " +
                                std::to_string(captions_per_image) + " captions per image");
  }
}

std::vector<SubsetSpec> paraphrase_specs(std::size_t total_captions) {
  std::vector<SubsetSpec> specs;
  for (std::size_t c = 5; c >= 1; --c) specs.push_back({total_captions, c});
  return specs;
}

std::vector<std::vector<io::ManifestRecord>> make_paraphrase_subsets(const io::DatasetManifest& source,
                                                                     std::span<const SubsetSpec> specs) {
  if (specs.empty()) return {};
  std::size_t max_per_image = 0;
  std::size_t max_images = 0;
  for (const auto& s : specs) {
    s.validate();
    max_per_image = std::max(max_per_image, s.captions_per_image);
    max_images = std::max(max_images, s.image_count());
  }

  std::map<std::string, std::vector<const io::ManifestRecord*>> by_image;
  for (const auto& r : source.records) {
    if (r.split == io::Split::kTrain) by_image[r.image_id].push_back(&r);
  }
  std::vector<std::pair<const std::string*, std::vector<const io::ManifestRecord*>*>> eligible;
  for (auto& [image, captions] : by_image) {
    if (captions.size() < max_per_image) continue;
    std::sort(captions.begin(), captions.end(),
              [](const auto* a, const auto* b) { return a->caption_id < b->caption_id; });
    eligible.emplace_back(&image, &captions);
  }
  if (eligible.size() < max_images) {
    throw std::invalid_argument("make_paraphrase_subsets: need " + std::to_string(max_images) + " training images with >= " +
                                std::to_string(max_per_image) + " captions each, source has " +
                                std::to_string(eligible.size()) + " (of " + std::to_string(by_image.size()) +
                                " training images)");
  }

  std::vector<std::vector<io::ManifestRecord>> subsets;
  for (const auto& s : specs) {
    std::vector<io::ManifestRecord> records;
    records.reserve(s.total_captions);
    for (std::size_t i = 0; i < s.image_count(); ++i) {
      const auto& captions = *eligible[i].second;
      for (std::size_t c = 0; c < s.captions_per_image; ++c) records.push_back(*captions[c]);
    }
    subsets.push_back(std::move(records));
  }
  return subsets;
}

}  // namespace vgs::train
