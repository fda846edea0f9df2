#include "vgs/eval/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "vgs/simd/kernels.hpp"

namespace vgs::eval {

namespace {

void check_ground_truth(const Matrix<double>& sims, std::span<const std::size_t> caption_image) {
  if (caption_image.size() != sims.rows()) {
    throw std::invalid_argument("retrieval: " + std::to_string(sims.rows()) + " captions but " +
                                std::to_string(caption_image.size()) + " ground-truth entries");
  }
  for (std::size_t i = 0; i < caption_image.size(); ++i) {
    if (caption_image[i] >= sims.cols()) {
      throw std::invalid_argument("retrieval: caption " + std::to_string(i) + " maps to image " +
                                  std::to_string(caption_image[i]) + ", which is not in the image set");
    }
  }
}

// Position of `target` when `scores` is sorted by descending score with
// ties broken by ascending index.
std::size_t rank_of(std::span<const double> scores, std::size_t target) {
  const double s = scores[target];
  std::size_t ahead = 0;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    if (scores[j] > s || (scores[j] == s && j < target)) ++ahead;
  }
  return ahead + 1;
}

}  // namespace

std::string to_string(Direction direction) {
  return direction == Direction::kCaptionToImage ? "caption_to_image" : "image_to_caption";
}

template <typename T>
Matrix<double> cosine_similarity(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("cosine_similarity: dimension mismatch");
  auto normalized = [](const Matrix<T>& m, const char* which) {
    Matrix<double> out(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) {
      double n2 = 0.0;
      for (T v : m.row(r)) n2 += static_cast<double>(v) * v;
      if (!(n2 > 0.0) || !std::isfinite(n2)) {
        throw std::invalid_argument(std::string("cosine_similarity: row ") + std::to_string(r) + " of " + which +
                                    " has zero or non-finite norm");
      }
      const double inv = 1.0 / std::sqrt(n2);
      for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(r, c) * inv;
    }
    return out;
  };
  const Matrix<double> an = normalized(a, "A");
  const Matrix<double> bn = normalized(b, "B");
  Matrix<double> sims(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    simd::gemv<double>(bn.data(), bn.rows(), bn.cols(), an.row(i), sims.row(i));
    for (double& v : sims.row(i)) v = std::clamp(v, -1.0, 1.0);
  }
  return sims;
}

std::vector<std::size_t> caption_to_image_ranks(const Matrix<double>& sims, std::span<const std::size_t> caption_image) {
  check_ground_truth(sims, caption_image);
  std::vector<std::size_t> ranks(sims.rows());
  for (std::size_t i = 0; i < sims.rows(); ++i) ranks[i] = rank_of(sims.row(i), caption_image[i]);
  return ranks;
}

std::vector<std::size_t> image_to_caption_ranks(const Matrix<double>& sims, std::span<const std::size_t> caption_image) {
  check_ground_truth(sims, caption_image);
  std::vector<std::vector<std::size_t>> owned(sims.cols());
  for (std::size_t i = 0; i < caption_image.size(); ++i) owned[caption_image[i]].push_back(i);
  std::vector<std::size_t> ranks;
  std::vector<double> column(sims.rows());
  for (std::size_t j = 0; j < sims.cols(); ++j) {
    if (owned[j].empty()) continue;
    for (std::size_t i = 0; i < sims.rows(); ++i) column[i] = sims(i, j);
    std::size_t best = std::numeric_limits<std::size_t>::max();
    for (std::size_t c : owned[j]) best = std::min(best, rank_of(column, c));
    ranks.push_back(best);
  }
  return ranks;
}

RetrievalReport summarize_ranks(Direction direction, std::span<const std::size_t> ranks) {
  RetrievalReport report;
  report.direction = direction;
  report.queries = ranks.size();
  if (ranks.empty()) return report;
  auto recall = [&ranks](std::size_t n) {
    const auto hits = std::count_if(ranks.begin(), ranks.end(), [n](std::size_t r) { return r <= n; });
    return 100.0 * static_cast<double>(hits) / static_cast<double>(ranks.size());
  };
  report.r1 = recall(1);
  report.r5 = recall(5);
  report.r10 = recall(10);
  std::vector<std::size_t> sorted(ranks.begin(), ranks.end());
  std::sort(sorted.begin(), sorted.end());
  report.median_rank = sorted[(sorted.size() - 1) / 2];
  return report;
}

RetrievalResult retrieval_from_similarity(const Matrix<double>& sims, std::span<const std::size_t> caption_image) {
  RetrievalResult result;
  result.caption_ranks = caption_to_image_ranks(sims, caption_image);
  result.image_ranks = image_to_caption_ranks(sims, caption_image);
  result.caption_to_image = summarize_ranks(Direction::kCaptionToImage, result.caption_ranks);
  result.image_to_caption = summarize_ranks(Direction::kImageToCaption, result.image_ranks);
  return result;
}

template <typename T>
RetrievalResult retrieval_eval(const Matrix<T>& caption_embs, const Matrix<T>& image_embs,
                               std::span<const std::size_t> caption_image) {
  return retrieval_from_similarity(cosine_similarity(caption_embs, image_embs), caption_image);
}

template <typename T>
RetrievalResult retrieval_eval(const Matrix<T>& caption_embs, const Matrix<T>& image_embs,
                               std::span<const std::string> caption_image_ids,
                               std::span<const std::string> image_ids) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < image_ids.size(); ++j) index.emplace(image_ids[j], j);
  std::vector<std::size_t> mapping(caption_image_ids.size());
  for (std::size_t i = 0; i < caption_image_ids.size(); ++i) {
    const auto it = index.find(caption_image_ids[i]);
    if (it == index.end()) {
      throw std::invalid_argument("retrieval: ground-truth image " + caption_image_ids[i] + " of caption " +
                                  std::to_string(i) + " is missing from the image set");
    }
    mapping[i] = it->second;
  }
  return retrieval_eval(caption_embs, image_embs, std::span<const std::size_t>(mapping));
}

double dev_error(const RetrievalResult& r) {
  const double total = r.caption_to_image.r1 + r.caption_to_image.r5 + r.caption_to_image.r10 +
                       r.image_to_caption.r1 + r.image_to_caption.r5 + r.image_to_caption.r10;
  return 1.0 - total / 600.0;
}

template Matrix<double> cosine_similarity<float>(const Matrix<float>&, const Matrix<float>&);
template Matrix<double> cosine_similarity<double>(const Matrix<double>&, const Matrix<double>&);
template RetrievalResult retrieval_eval<float>(const Matrix<float>&, const Matrix<float>&, std::span<const std::size_t>);
template RetrievalResult retrieval_eval<double>(const Matrix<double>&, const Matrix<double>&, std::span<const std::size_t>);
template RetrievalResult retrieval_eval<float>(const Matrix<float>&, const Matrix<float>&, std::span<const std::string>,
                                               std::span<const std::string>);
template RetrievalResult retrieval_eval<double>(const Matrix<double>&, const Matrix<double>&,
                                                std::span<const std::string>, std::span<const std::string>);

}  // namespace vgs::eval
