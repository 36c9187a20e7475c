#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace nutrieval::recall {

struct PartitionOptions {
  std::size_t n_subsets = 10;
  /// Give the whole remainder to the first subset instead of spreading it.
  bool first_subset_extra = true;
  /// Seeded Fisher-Yates shuffle before slicing; off keeps input order.
  bool shuffle = true;
  std::uint64_t seed = 20250101;
};

struct CohortPartition {
  std::vector<std::vector<std::string>> subsets;
  std::uint64_t seed = 0;
  bool shuffled = true;

  std::vector<std::size_t> sizes() const;
};

/// Shuffles `ids` with a mt19937_64 stream seeded by `seed` (platform
/// independent) and slices the result into contiguous subsets.
///
/// Sizes are floor(n/k) each, with the n mod k leftover either all added to
/// subset 0 (`first_subset_extra`) or one each to the leading subsets.
/// Throws ConfigError if n_subsets is 0 or exceeds ids.size(), or ids repeat.
CohortPartition partition_cohort(const std::vector<std::string>& ids, const PartitionOptions& options);

/// {"seed": ..., "shuffled": ..., "subsets": [[ids...], ...]}
nlohmann::json to_json(const CohortPartition& partition);
CohortPartition partition_from_json(const nlohmann::json& doc);

void write_partition(const CohortPartition& partition, const std::filesystem::path& path);
CohortPartition read_partition(const std::filesystem::path& path);

}  // namespace nutrieval::recall
