#pragma once

#include <cstdint>
#include <vector>

namespace vgs::train {

/// Shuffles [0, num_items) with a seed derived from (seed, epoch) and cuts it
/// into full batches; a trailing partial batch is dropped.
std::vector<std::vector<std::size_t>> make_batches(std::size_t num_items, std::size_t batch_size, std::uint64_t seed,
                                                   std::uint64_t epoch);

}  // namespace vgs::train
