#pragma once
// Cross-modal retrieval metrics.
//
// Caption->image: each caption ranks all images by cosine similarity; its
// rank is the position of its own image. Image->caption: each image that
// owns at least one caption ranks all captions; its rank is the position of
// the best-placed caption it owns. Equal similarities are ordered by index.

#include <span>
#include <string>
#include <vector>

#include "vgs/core/matrix.hpp"

namespace vgs::eval {

enum class Direction { kCaptionToImage, kImageToCaption };

std::string to_string(Direction direction);

struct RetrievalReport {
  Direction direction = Direction::kCaptionToImage;
  double r1 = 0.0;  // percent
  double r5 = 0.0;
  double r10 = 0.0;
  std::size_t median_rank = 0;  // lower-middle for even counts
  std::size_t queries = 0;
};

struct RetrievalResult {
  RetrievalReport caption_to_image;
  RetrievalReport image_to_caption;
  std::vector<std::size_t> caption_ranks;  // 1-based, one per caption
  std::vector<std::size_t> image_ranks;    // 1-based, one per image with captions
};

/// Cosine similarity of every row of a with every row of b; zero-norm rows
/// are rejected.
template <typename T>
Matrix<double> cosine_similarity(const Matrix<T>& a, const Matrix<T>& b);

/// sims is captions x images; caption_image[i] is the image index of caption i.
std::vector<std::size_t> caption_to_image_ranks(const Matrix<double>& sims, std::span<const std::size_t> caption_image);
std::vector<std::size_t> image_to_caption_ranks(const Matrix<double>& sims, std::span<const std::size_t> caption_image);

RetrievalReport summarize_ranks(Direction direction, std::span<const std::size_t> ranks);

RetrievalResult retrieval_from_similarity(const Matrix<double>& sims, std::span<const std::size_t> caption_image);

template <typename T>
RetrievalResult retrieval_eval(const Matrix<T>& caption_embs, const Matrix<T>& image_embs,
                               std::span<const std::size_t> caption_image);

/// Same, with the ground truth given as image ids; a caption whose image id
/// is not among image_ids is rejected.
template <typename T>
RetrievalResult retrieval_eval(const Matrix<T>& caption_embs, const Matrix<T>& image_embs,
                               std::span<const std::string> caption_image_ids,
                               std::span<const std::string> image_ids);

/// 1 - (R@1 + R@5 + R@10, both directions, as fractions) / 6.
double dev_error(const RetrievalResult& result);

}  // namespace vgs::eval
