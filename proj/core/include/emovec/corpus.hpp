// SPDX-License-Identifier: Apache-2.0
#pragma once

// Review ingestion (JSONL), an on-disk vector cache, and batch scoring.

#include <cstddef>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "emovec/estimator.hpp"

namespace emovec {

struct ReviewRecord {
  std::string id;
  std::string product_id;
  std::string body;
  std::optional<int> rating;
  std::size_t line = 0;  // 1-based line in the source file
};

/// One entry of the failure manifest: `{id, line, error}`.
struct ManifestEntry {
  std::string id;
  std::size_t line = 0;
  std::string error;
};

struct IngestResult {
  std::vector<ReviewRecord> records;
  std::vector<ManifestEntry> issues;
};

/// Parses JSONL: one object per line with `id`, `product_id`, `body` and an
/// optional integer `rating` in 1..5. Blank lines are skipped. Bad lines
/// become issues; a stream with no valid record is a ValidationError.
IngestResult ingest(std::istream& in);
IngestResult ingest(const std::filesystem::path& path);

std::string manifest_json(std::span<const ManifestEntry> entries);

/// Directory of `<key>.json` files. Reads may run concurrently with writes;
/// each write lands atomically via rename.
class VectorCache {
 public:
  explicit VectorCache(std::filesystem::path dir);

  std::optional<EmotionVector> get(const std::string& key) const;
  void put(const std::string& key, const EmotionVector& vector) const;

  const std::filesystem::path& directory() const { return dir_; }

 private:
  std::filesystem::path path_for(const std::string& key) const;
  std::filesystem::path dir_;
};

struct CorpusScore {
  /// Parallel to the input records; empty where scoring failed.
  std::vector<std::optional<EmotionVector>> vectors;
  /// product_id -> vectors, in record order.
  std::map<std::string, std::vector<EmotionVector>> by_product;
  std::vector<ManifestEntry> failures;
  std::size_t cache_hits = 0;
};

/// Scores every record, serving hits from `cache` when given. A failing
/// record lands in `failures` and never stops the others.
CorpusScore score_corpus(std::span<const ReviewRecord> records, const Estimator& estimator,
                         const VectorCache* cache, std::size_t workers = 1);

}  // namespace emovec
