#include "vgs/train/batches.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

#include "vgs/core/random.hpp"

namespace vgs::train {

std::vector<std::vector<std::size_t>> make_batches(std::size_t num_items, std::size_t batch_size, std::uint64_t seed,
                                                   std::uint64_t epoch) {
  if (batch_size == 0) throw std::invalid_argument("make_batches: batch size must be positive");
  if (num_items < batch_size) {
    throw std::invalid_argument("make_batches: " + std::to_string(num_items) + " items cannot fill one batch of " +
                                std::to_string(batch_size));
  }
  std::vector<std::size_t> order(num_items);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, 0x62617463680000ULL + epoch));
  rng.shuffle(std::span<std::size_t>(order));

  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t start = 0; start + batch_size <= num_items; start += batch_size) {
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(start + batch_size));
  }
  return batches;
}

}  // namespace vgs::train
