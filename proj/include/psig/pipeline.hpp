#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "psig/cc.hpp"
#include "psig/config.hpp"
#include "psig/dataset.hpp"
#include "psig/eval.hpp"
#include "psig/indexer.hpp"
#include "psig/linker.hpp"

namespace psig {

// One row per pipeline stage; sizes and timings of intermediate outputs.
struct StageRow {
  std::string stage;
  std::size_t size = 0;
  std::optional<double> seconds;
};

struct RunReport {
  std::vector<StageRow> rows;
  double total_seconds = 0.0;
  IndexStats index;
  std::optional<Metrics> metrics;
  std::vector<std::string> warnings;

  void write_table(std::ostream& out) const {
    out << std::left << std::setw(24) << "Stage" << std::right << std::setw(16) << "Size" << std::setw(12)
        << "Time (s)" << '\n';
    for (const auto& r : rows) {
      out << std::left << std::setw(24) << r.stage << std::right << std::setw(16) << r.size << std::setw(12);
      if (r.seconds) out << std::fixed << std::setprecision(3) << *r.seconds << std::defaultfloat;
      else out << "";
      out << '\n';
    }
    out << std::left << std::setw(24) << "Overall" << std::right << std::setw(16) << "" << std::setw(12)
        << std::fixed << std::setprecision(3) << total_seconds << std::defaultfloat << '\n';
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    for (const auto& r : rows) {
      nlohmann::ordered_json row{{"stage", r.stage}, {"size", r.size}};
      if (r.seconds) row["seconds"] = *r.seconds;
      j["stages"].push_back(row);
    }
    j["overall_seconds"] = total_seconds;
    j["index"] = {{"candidate_signatures", index.candidate_signatures},
                  {"distinct_keys", index.total_keys_seen},
                  {"keys_pruned", index.keys_pruned_by_rho},
                  {"max_posting_len", index.max_posting_len},
                  {"skipped_record_templates", index.skipped_record_templates},
                  {"recurrence_cap", index.recurrence_cap},
                  {"hit_hard_cap", index.hit_hard_cap}};
    if (metrics) j["metrics"] = metrics_json(*metrics);
    j["warnings"] = warnings;
    return j;
  }

  static nlohmann::ordered_json metrics_json(const Metrics& m) {
    return {{"true_positives", m.true_positives}, {"false_positives", m.false_positives},
            {"false_negatives", m.false_negatives}, {"precision", m.precision},
            {"recall", m.recall}, {"f_measure", m.f_measure}};
  }
};

struct RunOptions {
  std::size_t threads = 1;
};

// Tracks files written by a command so a failed run leaves nothing behind.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {}
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;
  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& p : written_) std::filesystem::remove(p, ec);
  }

  std::ofstream open(const std::string& name) {
    std::filesystem::create_directories(dir_);
    auto path = dir_ / name;
    written_.push_back(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    return out;
  }

  void commit() { committed_ = true; }
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> written_;
  bool committed_ = false;
};

inline TemplateSet make_template_set(const PipelineConfig& cfg) {
  return TemplateSet(cfg.schema, cfg.templates, cfg.limits, cfg.key_format);
}

inline LinkOptions link_options(const PipelineConfig& cfg, const RunOptions& run) {
  return {cfg.link.cross_source_only, cfg.link.skip_elimination, std::max<std::size_t>(1, run.threads)};
}

struct ResolveResult {
  std::vector<Link> links;
  Labelling clusters;  // over original ids
  RunReport report;
};

// load -> dedup -> index -> link -> verify -> connected components.
inline ResolveResult resolve(const PipelineConfig& cfg, const RunOptions& run = {}) {
  using clock = std::chrono::steady_clock;
  auto secs = [](clock::time_point a, clock::time_point b) { return std::chrono::duration<double>(b - a).count(); };
  ResolveResult res;
  res.report.warnings = validate(cfg);
  const auto templates = make_template_set(cfg);
  const auto verifier = VerifierRegistry::instance().make(cfg.link.verifier);

  const auto t0 = clock::now();
  const Dataset ds = load_dataset(cfg);
  const auto t1 = clock::now();
  const auto index =
      build_index(ds.canonical.records(), templates, cfg.model, cfg.link.rho, run.threads, cfg.hard_k_cap);
  const auto t2 = clock::now();
  const auto scored = score_pairs(index, ds.canonical, templates, link_options(cfg, run));
  const auto t3 = clock::now();
  FinalizeCounts counts;
  res.links = finalize(scored, cfg.link.tau, verifier ? &*verifier : nullptr, &ds.canonical, &counts);
  const auto t4 = clock::now();
  res.clusters = cluster_links(res.links, ds);
  const auto t5 = clock::now();

  std::size_t components = 0;
  {
    std::vector<RecordId> labels;
    for (auto [id, label] : res.clusters.entries()) labels.push_back(label);
    std::sort(labels.begin(), labels.end());
    components = static_cast<std::size_t>(std::unique(labels.begin(), labels.end()) - labels.begin());
  }
  res.report.index = index.stats();
  res.report.rows = {
      {"Records", ds.record_count(), std::nullopt},
      {"Distinct records", ds.distinct_count(), secs(t0, t1)},
      {"Candidate signatures", index.stats().candidate_signatures, secs(t1, t2)},
      {"Pairwise links", counts.pairwise_links, secs(t2, t3)},
      {"Verified links", counts.verified_links, secs(t3, t4)},
      {"Connected components", components, secs(t4, t5)},
  };
  res.report.total_seconds = secs(t0, t5);

  if (cfg.truth) {
    const auto truth = load_truth(*cfg.truth, ds, cfg.two_source());
    res.report.metrics = evaluate(res.clusters, truth,
                                  cfg.link.cross_source_only ? PairScope::CrossSource : PairScope::All,
                                  [&](RecordId id) { return ds.source_of(id); });
  }
  return res;
}

inline void write_links(const std::vector<Link>& links, std::ostream& out) {
  out << "id_a,id_b,probability,evidence_count\n";
  for (const auto& l : links)
    out << l.r_i << ',' << l.r_j << ',' << format_probability(l.probability) << ',' << l.evidence_count << '\n';
}

inline void write_clusters(const Labelling& clusters, std::ostream& out) {
  out << "record_id,entity_id\n";
  for (auto [id, label] : clusters.entries()) out << id << ',' << label << '\n';
}

// `resolve` subcommand: clusters.csv, links.csv, report.txt, report.json.
inline RunReport cmd_resolve(const PipelineConfig& cfg, const std::filesystem::path& out_dir,
                             const RunOptions& run = {}) {
  OutputSet out(out_dir);
  auto res = resolve(cfg, run);
  {
    auto f = out.open("clusters.csv");
    write_clusters(res.clusters, f);
  }
  {
    auto f = out.open("links.csv");
    write_links(res.links, f);
  }
  {
    auto f = out.open("report.txt");
    res.report.write_table(f);
  }
  {
    auto f = out.open("report.json");
    f << res.report.to_json().dump(2) << '\n';
  }
  out.commit();
  return res.report;
}

inline nlohmann::json tuned_config(const PipelineConfig& cfg, const GridCell& best) {
  nlohmann::json j = cfg.raw;
  j.erase("grid");
  j["model"]["a"] = best.model.a;
  j["model"]["b"] = best.model.b;
  j["link"]["rho"] = best.rho;
  j["link"]["tau"] = best.tau;
  return j;
}

// `tune` subcommand: tune_results.csv plus best_config.json, a copy of the
// input config with the winning parameters. Relative paths in the emitted
// config are rewritten to absolute ones so it runs from any directory.
inline GridResult cmd_tune(const PipelineConfig& cfg, const std::filesystem::path& out_dir,
                           const RunOptions& run = {}) {
  if (!cfg.truth) throw ConfigError("tune needs a 'truth' section");
  if (!cfg.grid || cfg.grid->cells() == 0) throw ConfigError("tune needs a non-empty 'grid' section");
  (void)validate(cfg);
  const auto templates = make_template_set(cfg);
  const Dataset ds = load_dataset(cfg);
  const auto truth = load_truth(*cfg.truth, ds, cfg.two_source());
  GridOptions opt{link_options(cfg, run), cfg.link.verifier, cfg.hard_k_cap};
  auto result = grid_search(ds, templates, *cfg.grid, truth, opt);

  OutputSet out(out_dir);
  {
    auto f = out.open("tune_results.csv");
    f << "a,b,rho,tau,true_positives,false_positives,false_negatives,precision,recall,f_measure,links,seconds\n";
    for (const auto& c : result.cells) {
      f << format_probability(c.model.a) << ',' << format_probability(c.model.b) << ','
        << format_probability(c.rho) << ',' << format_probability(c.tau) << ',' << c.metrics.true_positives << ','
        << c.metrics.false_positives << ',' << c.metrics.false_negatives << ','
        << format_probability(c.metrics.precision) << ',' << format_probability(c.metrics.recall) << ','
        << format_probability(c.metrics.f_measure) << ',' << c.links << ',' << format_probability(c.seconds)
        << '\n';
    }
  }
  {
    auto j = tuned_config(cfg, result.best_cell());
    for (std::size_t i = 0; i < cfg.sources.size(); ++i)
      j["sources"][i]["path"] = std::filesystem::absolute(cfg.sources[i].path).string();
    j["truth"]["path"] = std::filesystem::absolute(cfg.truth->path).string();
    j.erase("output");
    auto f = out.open("best_config.json");
    f << j.dump(2) << '\n';
  }
  out.commit();
  return result;
}

// `index-dump` subcommand: index.tsv in the diagnostic format.
inline IndexStats cmd_index_dump(const PipelineConfig& cfg, const std::filesystem::path& out_dir,
                                 const RunOptions& run = {}) {
  (void)validate(cfg);
  const auto templates = make_template_set(cfg);
  const Dataset ds = load_dataset(cfg);
  const auto index =
      build_index(ds.canonical.records(), templates, cfg.model, cfg.link.rho, run.threads, cfg.hard_k_cap);
  OutputSet out(out_dir);
  {
    auto f = out.open("index.tsv");
    dump_index(index, f);
  }
  out.commit();
  return index.stats();
}

}  // namespace psig
