// SPDX-License-Identifier: Apache-2.0
#include "emovec/corpus.hpp"

#include <atomic>
#include <chrono>
#include <ctime>
#include <fstream>
#include <json.hpp>
#include <mutex>
#include <thread>

#include "emovec/errors.hpp"
#include "emovec/io.hpp"

namespace emovec {

using nlohmann::json;

namespace {

std::string required_string(const json& obj, const char* name) {
  if (!obj.contains(name)) {
    throw ValidationError(std::string("missing field '") + name + "'");
  }
  if (!obj.at(name).is_string()) {
    throw ValidationError(std::string("field '") + name + "' is not a string");
  }
  return obj.at(name).get<std::string>();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

IngestResult ingest(std::istream& in) {
  IngestResult out;
  std::map<std::string, std::size_t> seen;
  std::string line;
  std::size_t line_no = 0;
  std::size_t non_blank = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++non_blank;
    std::string id;
    try {
      const json obj = json::parse(line);
      if (!obj.is_object()) {
        throw ValidationError("line is not a JSON object");
      }
      if (obj.contains("id") && obj.at("id").is_string()) {
        id = obj.at("id").get<std::string>();
      }
      ReviewRecord rec;
      rec.id = required_string(obj, "id");
      rec.product_id = required_string(obj, "product_id");
      rec.body = required_string(obj, "body");
      rec.line = line_no;
      if (rec.id.empty()) {
        throw ValidationError("empty id");
      }
      if (trim(rec.body).empty()) {
        throw ValidationError("empty body");
      }
      if (obj.contains("rating") && !obj.at("rating").is_null()) {
        const auto& r = obj.at("rating");
        if (!r.is_number_integer() || r.get<long long>() < 1 || r.get<long long>() > 5) {
          throw ValidationError("rating must be an integer in 1..5");
        }
        rec.rating = r.get<int>();
      }
      if (auto it = seen.find(rec.id); it != seen.end()) {
        throw ValidationError("duplicate id (first seen on line " + std::to_string(it->second) + ")");
      }
      seen.emplace(rec.id, line_no);
      out.records.push_back(std::move(rec));
    } catch (const json::exception& e) {
      out.issues.push_back(ManifestEntry{id, line_no, std::string("invalid JSON: ") + e.what()});
    } catch (const ValidationError& e) {
      out.issues.push_back(ManifestEntry{id, line_no, e.what()});
    }
  }
  if (out.records.empty()) {
    throw ValidationError(non_blank == 0 ? "corpus has no records"
                                         : "corpus has no valid records (" +
                                               std::to_string(out.issues.size()) + " malformed)");
  }
  return out;
}

IngestResult ingest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot open corpus file: " + path.string());
  }
  try {
    return ingest(in);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string manifest_json(std::span<const ManifestEntry> entries) {
  json arr = json::array();
  for (const auto& e : entries) {
    arr.push_back({{"id", e.id}, {"line", e.line}, {"error", e.error}});
  }
  return arr.dump(2) + "\n";
}

VectorCache::VectorCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec || !std::filesystem::is_directory(dir_)) {
    throw ValidationError("cannot create cache directory: " + dir_.string());
  }
}

std::filesystem::path VectorCache::path_for(const std::string& key) const {
  if (key.empty() || key.find_first_not_of("0123456789abcdef") != std::string::npos) {
    throw ValidationError("cache key must be lowercase hex");
  }
  return dir_ / (key + ".json");
}

std::optional<EmotionVector> VectorCache::get(const std::string& key) const {
  const auto path = path_for(key);
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  try {
    const json entry = json::parse(read_file(path));
    if (!entry.is_object() || entry.value("key", std::string{}) != key ||
        !entry.contains("vector")) {
      return std::nullopt;
    }
    return emotion_vector_from_json(entry.at("vector").dump());
  } catch (const std::exception&) {
    // Unreadable entries are treated as misses and overwritten on the next put.
    return std::nullopt;
  }
}

void VectorCache::put(const std::string& key, const EmotionVector& vector) const {
  // The vector is spliced in verbatim to keep its 17-digit float text.
  std::string body = "{\"key\":\"" + key + "\",\"created_at\":\"" + utc_timestamp() +
                     "\",\"vector\":" + to_json(vector);
  body.pop_back();  // to_json's trailing newline
  body += "}\n";
  write_file_atomic(path_for(key), body);
}

CorpusScore score_corpus(std::span<const ReviewRecord> records, const Estimator& estimator,
                         const VectorCache* cache, std::size_t workers) {
  CorpusScore out;
  out.vectors.resize(records.size());
  std::vector<std::optional<std::string>> errors(records.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> hits{0};

  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < records.size(); i = next.fetch_add(1)) {
      const auto& rec = records[i];
      try {
        std::string key;
        if (cache) {
          key = estimator.cache_key(rec.body);
          if (auto hit = cache->get(key)) {
            out.vectors[i] = std::move(*hit);
            hits.fetch_add(1);
            continue;
          }
        }
        out.vectors[i] = estimator.score(rec.body);
        if (cache) cache->put(key, *out.vectors[i]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };

  workers = std::max<std::size_t>(1, std::min(workers, records.size()));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  for (std::size_t i = 0; i < records.size(); ++i) {
    if (out.vectors[i]) {
      out.by_product[records[i].product_id].push_back(*out.vectors[i]);
    } else {
      out.failures.push_back(ManifestEntry{records[i].id, records[i].line,
                                           errors[i].value_or("unknown error")});
    }
  }
  out.cache_hits = hits.load();
  return out;
}

}  // namespace emovec
