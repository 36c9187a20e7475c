#include "nutrieval/recall/partition.hpp"

#include <fstream>
#include <limits>
#include <random>
#include <set>

#include "nutrieval/error.hpp"

namespace nutrieval::recall {

namespace {

// Unbiased draw from [0, bound) by rejection. std::uniform_int_distribution is
// implementation-defined, which would make partitions differ across toolchains.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace

std::vector<std::size_t> CohortPartition::sizes() const {
  std::vector<std::size_t> out;
  out.reserve(subsets.size());
  for (const auto& s : subsets) out.push_back(s.size());
  return out;
}

CohortPartition partition_cohort(const std::vector<std::string>& ids, const PartitionOptions& options) {
  const std::size_t n = ids.size();
  const std::size_t k = options.n_subsets;
  if (k == 0) throw ConfigError("partition: n_subsets must be at least 1");
  if (k > n) {
    throw ConfigError("partition: " + std::to_string(k) + " subsets requested for only " + std::to_string(n) +
                      " participants");
  }
  if (std::set<std::string>(ids.begin(), ids.end()).size() != n) {
    throw ConfigError("partition: participant ids are not unique");
  }

  std::vector<std::string> order = ids;
  if (options.shuffle) {
    std::mt19937_64 rng(options.seed);
    for (std::size_t i = n - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(bounded(rng, i + 1));
      std::swap(order[i], order[j]);
    }
  }

  const std::size_t base = n / k;
  const std::size_t rem = n % k;
  CohortPartition out;
  out.seed = options.seed;
  out.shuffled = options.shuffle;
  out.subsets.reserve(k);
  std::size_t pos = 0;
  for (std::size_t s = 0; s < k; ++s) {
    std::size_t size = base;
    if (options.first_subset_extra) {
      if (s == 0) size += rem;
    } else if (s < rem) {
      size += 1;
    }
    out.subsets.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(pos),
                             order.begin() + static_cast<std::ptrdiff_t>(pos + size));
    pos += size;
  }
  return out;
}

nlohmann::json to_json(const CohortPartition& partition) {
  return {{"seed", partition.seed}, {"shuffled", partition.shuffled}, {"subsets", partition.subsets}};
}

CohortPartition partition_from_json(const nlohmann::json& doc) {
  CohortPartition p;
  try {
    p.seed = doc.at("seed").get<std::uint64_t>();
    p.shuffled = doc.value("shuffled", true);
    p.subsets = doc.at("subsets").get<std::vector<std::vector<std::string>>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("partition document: ") + e.what());
  }
  return p;
}

void write_partition(const CohortPartition& partition, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write partition file " + path.string());
  out << to_json(partition).dump(2) << '\n';
}

CohortPartition read_partition(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string(), 0, "", "cannot open partition file");
  try {
    return partition_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string(), 0, "", e.what());
  }
}

}  // namespace nutrieval::recall
