#include "vgs/io/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "vgs/core/binary_io.hpp"
#include "vgs/io/tsv.hpp"

namespace vgs::io {

std::string to_string(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kDev:
      return "dev";
    case Split::kTest:
      return "test";
  }
  return "?";
}

Split parse_split(const std::string& text) {
  if (text == "train") return Split::kTrain;
  if (text == "dev") return Split::kDev;
  if (text == "test") return Split::kTest;
  throw std::invalid_argument("unknown split '" + text + "' (expected train, dev or test)");
}

SplitSpec SplitSpec::any() { return {}; }
SplitSpec SplitSpec::flickr8k() { return {"flickr8k", 6000, 1000, 1000}; }
SplitSpec SplitSpec::places() { return {"places", 400000, 1000, 1000}; }
SplitSpec SplitSpec::spokencoco() { return {"spokencoco", std::nullopt, 1000, 1000}; }

SplitSpec SplitSpec::named(const std::string& name) {
  if (name == "any") return any();
  if (name == "flickr8k") return flickr8k();
  if (name == "places") return places();
  if (name == "spokencoco") return spokencoco();
  throw std::invalid_argument("unknown split spec '" + name + "' (expected any, flickr8k, places or spokencoco)");
}

std::vector<ManifestRecord> DatasetManifest::records_in(Split split) const {
  std::vector<ManifestRecord> out;
  std::copy_if(records.begin(), records.end(), std::back_inserter(out),
               [split](const ManifestRecord& r) { return r.split == split; });
  return out;
}

std::vector<std::string> DatasetManifest::images_in(Split split) const {
  std::set<std::string> ids;
  for (const auto& r : records) {
    if (r.split == split) ids.insert(r.image_id);
  }
  return {ids.begin(), ids.end()};
}

std::filesystem::path DatasetManifest::audio_path(const ManifestRecord& record) const {
  return resolve_data_path(base_dir, record.audio_path);
}

void validate_manifest(const DatasetManifest& manifest, const SplitSpec& spec, const std::string& source,
                       const std::set<std::string>* known_images) {
  auto at = [&source](const ManifestRecord& r) { return source + ":" + std::to_string(r.line) + ": "; };
  std::unordered_map<std::string, std::size_t> caption_lines;
  std::unordered_map<std::string, std::pair<Split, std::size_t>> image_split;
  std::map<Split, std::set<std::string>> images;
  for (const auto& r : manifest.records) {
    if (r.caption_id.empty() || r.image_id.empty()) throw std::runtime_error(at(r) + "empty caption or image id");
    if (auto [it, fresh] = caption_lines.emplace(r.caption_id, r.line); !fresh) {
      throw std::runtime_error(at(r) + "duplicate caption id " + r.caption_id + " (first seen on line " +
                               std::to_string(it->second) + ")");
    }
    if (known_images != nullptr && !known_images->contains(r.image_id)) {
      throw std::runtime_error(at(r) + "caption " + r.caption_id + " references unknown image " + r.image_id);
    }
    if (auto [it, fresh] = image_split.emplace(r.image_id, std::make_pair(r.split, r.line)); !fresh &&
        it->second.first != r.split) {
      throw std::runtime_error(at(r) + "image " + r.image_id + " is in split " + to_string(r.split) +
                               " but was in split " + to_string(it->second.first) + " on line " +
                               std::to_string(it->second.second));
    }
    images[r.split].insert(r.image_id);
  }
  auto check = [&](Split split, const std::optional<std::size_t>& expected) {
    if (!expected) return;
    const std::size_t actual = images[split].size();
    if (actual != *expected) {
      throw std::runtime_error(source + ": split " + to_string(split) + " has " + std::to_string(actual) +
                               " images, split spec '" + spec.name + "' expects " + std::to_string(*expected));
    }
  };
  check(Split::kTrain, spec.train_images);
  check(Split::kDev, spec.dev_images);
  check(Split::kTest, spec.test_images);
}

DatasetManifest load_manifest(const std::filesystem::path& path, const SplitSpec& spec,
                              const std::set<std::string>* known_images) {
  const auto table = read_tsv(path);
  const std::size_t caption_col = table.column("caption_id");
  const std::size_t image_col = table.column("image_id");
  const std::size_t audio_col = table.column("audio_path");
  const std::size_t split_col = table.column("split");
  DatasetManifest manifest;
  manifest.base_dir = path.parent_path();
  manifest.records.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    ManifestRecord r;
    r.caption_id = row.fields[caption_col];
    r.image_id = row.fields[image_col];
    r.audio_path = row.fields[audio_col];
    r.line = row.line;
    try {
      r.split = parse_split(row.fields[split_col]);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(table.source + ":" + std::to_string(row.line) + ": " + e.what());
    }
    manifest.records.push_back(std::move(r));
  }
  validate_manifest(manifest, spec, table.source, known_images);
  return manifest;
}

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestRecord>& records) {
  std::ostringstream out;
  out << "caption_id\timage_id\taudio_path\tsplit\n";
  for (const auto& r : records) {
    out << r.caption_id << '\t' << r.image_id << '\t' << r.audio_path << '\t' << to_string(r.split) << '\n';
  }
  const std::string text = out.str();
  write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace vgs::io
