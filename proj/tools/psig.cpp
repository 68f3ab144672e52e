#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "psig/psig.hpp"

namespace {

enum Exit : int { kOk = 0, kConfig = 2, kData = 3, kInvariant = 4 };

std::filesystem::path output_dir(const std::string& flag, const psig::PipelineConfig& cfg) {
  if (!flag.empty()) return flag;
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  return "out";
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"psig: probabilistic-signature entity resolution"};
  app.require_subcommand(1);

  std::string config_path, out;
  std::size_t threads = psig::default_threads();
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Pipeline config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "Output directory");
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  };
  auto* resolve = app.add_subcommand("resolve", "Link and cluster records");
  common(resolve);
  auto* tune = app.add_subcommand("tune", "Grid search over a, b, rho, tau against ground truth");
  common(tune);
  auto* dump = app.add_subcommand("index-dump", "Write the pruned signature index");
  common(dump);

  psig::synth::Params sp;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset with ground truth");
  synth->add_option("--entities", sp.entities, "Number of entities")->check(CLI::PositiveNumber);
  synth->add_option("--per-entity", sp.records_per_entity, "Records per entity")->check(CLI::PositiveNumber);
  synth->add_option("--corruption", sp.corruption, "Per-attribute corruption probability")
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--seed", sp.seed, "Random seed");
  synth->add_flag("--two-source", sp.two_source, "Split records between sources A and B");
  synth->add_option("--out", out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  const char* stage = "config";
  try {
    psig::RunOptions run{threads};
    if (synth->parsed()) {
      stage = "synth";
      const auto rows = psig::synth::generate(sp);
      psig::synth::write(rows, sp, out);
      std::cout << "wrote " << rows.size() << " records to " << out << '\n';
      return kOk;
    }

    const auto cfg = psig::load_config(config_path);
    print_warnings(psig::validate(cfg));
    const auto dir = output_dir(out, cfg);
    if (resolve->parsed()) {
      stage = "resolve";
      const auto report = psig::cmd_resolve(cfg, dir, run);
      report.write_table(std::cout);
      if (report.metrics) {
        const auto& m = *report.metrics;
        std::printf("precision %.4f  recall %.4f  F %.4f\n", m.precision, m.recall, m.f_measure);
      }
    } else if (tune->parsed()) {
      stage = "tune";
      const auto result = psig::cmd_tune(cfg, dir, run);
      const auto& b = result.best_cell();
      std::printf("best of %zu cells: a=%g b=%g rho=%g tau=%g  precision %.4f  recall %.4f  F %.4f\n",
                  result.cells.size(), b.model.a, b.model.b, b.rho, b.tau, b.metrics.precision, b.metrics.recall,
                  b.metrics.f_measure);
    } else if (dump->parsed()) {
      stage = "index-dump";
      const auto stats = psig::cmd_index_dump(cfg, dir, run);
      std::printf("%zu candidate signatures (k_max %zu)\n", stats.candidate_signatures, stats.recurrence_cap);
    }
    return kOk;
  } catch (const psig::ConfigError& e) {
    std::cerr << "config error (" << stage << "): " << e.what() << '\n';
    return kConfig;
  } catch (const psig::DataError& e) {
    std::cerr << "data error (" << stage << "): " << e.what() << '\n';
    return kData;
  } catch (const psig::InvariantError& e) {
    std::cerr << "internal error (" << stage << "): " << e.what() << '\n';
    return kInvariant;
  } catch (const std::exception& e) {
    std::cerr << "data error (" << stage << "): " << e.what() << '\n';
    return kData;
  }
}
