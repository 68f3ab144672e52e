#pragma once

#include <algorithm>
#include <string>
#include <unordered_map>
#include <vector>

#include "psig/config.hpp"
#include "psig/linker.hpp"
#include "psig/records.hpp"

namespace psig {

struct OriginalRecord {
  RecordId id = 0;
  Source source = Source::Single;
  std::string key;
};

// Loaded and deduplicated input. Deduplication runs per source, so a
// cross-source exact duplicate stays two records.
struct Dataset {
  std::vector<OriginalRecord> originals;  // sorted by id
  RecordTable canonical;
  std::unordered_map<RecordId, RecordId> alias;  // original -> canonical
  std::vector<RecordId> canonical_ids;           // sorted

  std::size_t record_count() const { return originals.size(); }
  std::size_t distinct_count() const { return canonical_ids.size(); }

  Source source_of(RecordId original) const {
    auto it = std::lower_bound(originals.begin(), originals.end(), original,
                               [](const OriginalRecord& r, RecordId v) { return r.id < v; });
    if (it == originals.end() || it->id != original)
      throw InvariantError("unknown original id " + std::to_string(original));
    return it->source;
  }
};

inline Dataset make_dataset(std::vector<std::vector<Record>> per_source) {
  Dataset ds;
  std::vector<Record> canonical;
  for (auto& records : per_source) {
    for (const auto& r : records) ds.originals.push_back({r.id, r.source, r.key});
    auto dedup = deduplicate(std::move(records));
    ds.alias.insert(dedup.alias_map.begin(), dedup.alias_map.end());
    std::move(dedup.canonical.begin(), dedup.canonical.end(), std::back_inserter(canonical));
  }
  std::sort(ds.originals.begin(), ds.originals.end(),
            [](const OriginalRecord& x, const OriginalRecord& y) { return x.id < y.id; });
  for (std::size_t i = 1; i < ds.originals.size(); ++i)
    if (ds.originals[i - 1].id == ds.originals[i].id)
      throw DataError("record id " + std::to_string(ds.originals[i].id) +
                      " is used by two sources; raise the id_base of source B");
  for (const auto& r : canonical) ds.canonical_ids.push_back(r.id);
  std::sort(ds.canonical_ids.begin(), ds.canonical_ids.end());
  ds.canonical = RecordTable(std::move(canonical));
  return ds;
}

inline Dataset load_dataset(const PipelineConfig& cfg) {
  std::vector<std::vector<Record>> per_source;
  for (const auto& s : cfg.sources) per_source.push_back(load_csv(s.path, cfg.schema, s.spec));
  return make_dataset(std::move(per_source));
}

}  // namespace psig
