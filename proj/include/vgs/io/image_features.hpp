#pragma once
// Precomputed image feature vectors in one pack file.
//
// Layout (little-endian): magic "VGSIMGP1" | u64 count | u32 dim
// | count*dim f32 (row i belongs to id i) | id table: count * (u32 len + bytes)

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace vgs::io {

inline constexpr std::size_t kImageFeatureDim = 2048;

struct ImageFeatureVector {
  std::vector<float> values;
};

struct ImageFeatureEntry {
  std::string image_id;
  std::vector<float> values;
};

void write_image_feature_pack(const std::filesystem::path& path, std::size_t dim,
                              std::span<const ImageFeatureEntry> entries);

class ImageFeaturePack {
 public:
  static ImageFeaturePack open(const std::filesystem::path& path);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  bool contains(const std::string& image_id) const { return index_.contains(image_id); }

  /// Reads one vector; unknown ids and non-finite content throw.
  ImageFeatureVector load(const std::string& image_id) const;
  std::vector<ImageFeatureVector> load_many(std::span<const std::string> image_ids) const;

 private:
  std::filesystem::path path_;
  std::size_t dim_ = 0;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::size_t> index_;
  std::unique_ptr<std::ifstream> stream_;
  std::unique_ptr<std::mutex> mutex_;
};

/// Convenience wrapper matching load_image_features(index, image_id).
inline ImageFeatureVector load_image_features(const ImageFeaturePack& pack, const std::string& image_id) {
  return pack.load(image_id);
}

}  // namespace vgs::io
