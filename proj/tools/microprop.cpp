#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "microprop/cahn_hilliard.hpp"
#include "microprop/dataset.hpp"
#include "microprop/error.hpp"
#include "microprop/pipeline.hpp"
#include "microprop/rng.hpp"

namespace fs = std::filesystem;
using namespace microprop;

namespace {

struct Globals {
  fs::path out = ".";
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct GenerateOptions {
  std::string source;
  std::size_t count = 100;
  int runs = 2;
  int size = 64;
  std::int64_t attempts = 0;
  ch::ChParams ch;
  std::optional<double> stabilization;
};

struct SplitOptions {
  std::optional<std::string> protocol;
  std::size_t test_size = 1000;
  std::vector<std::int64_t> held_out_runs;
};

struct FeaturesOptions {
  fs::path data;
  std::vector<std::string> names;
  SplitOptions split;
};

struct HistogramOptions {
  fs::path data;
  std::size_t bins = 20;
};

void add_split_options(CLI::App* cmd, SplitOptions& s) {
  cmd->add_option("--protocol", s.protocol, "Split protocol (default: from the manifest source)")
      ->check(CLI::IsMember({"ising_random_holdout", "ch_leave_runs_out"}));
  cmd->add_option("--test-size", s.test_size, "Test records for ising_random_holdout")->capture_default_str();
  cmd->add_option("--holdout-runs", s.held_out_runs, "Run ids held out by ch_leave_runs_out")->delimiter(',');
}

std::optional<dataset::Protocol> parse_protocol(const std::optional<std::string>& text) {
  if (!text) return std::nullopt;
  return *text == "ising_random_holdout" ? dataset::Protocol::IsingRandomHoldout : dataset::Protocol::ChLeaveRunsOut;
}

fs::path data_dir(const fs::path& data, const Globals& g) { return data.empty() ? g.out : data; }

dataset::Manifest load_manifest(const fs::path& dir) {
  const auto file = dir / dataset::kManifestFile;
  if (!fs::exists(file)) throw Error(Errc::Config, "no manifest at " + file.string());
  return dataset::read_manifest(file);
}

int cmd_generate(const Globals& g, GenerateOptions& o) {
  fs::create_directories(g.out);
  dataset::Manifest m;
  if (o.source == "ising") {
    dataset::IsingGeneration cfg;
    cfg.count = o.count;
    cfg.seed = g.seed;
    cfg.size = o.size;
    cfg.attempts = o.attempts;
    cfg.jobs = g.jobs;
    m = dataset::generate_ising(g.out, cfg);
  } else {
    dataset::ChGeneration cfg;
    cfg.runs = o.runs;
    cfg.seed = g.seed;
    cfg.params = o.ch;
    cfg.params.size = o.size;
    cfg.params.stabilization = o.stabilization;
    cfg.jobs = g.jobs;
    try {
      cfg.params.validate();
    } catch (const Error& e) {
      throw Error(Errc::Config, e.what());
    }
    m = dataset::generate_ch(g.out, cfg);
  }
  std::cout << "wrote " << m.size() << " records to " << (g.out / dataset::kManifestFile).string() << '\n';
  return 0;
}

int cmd_features(const Globals& g, const FeaturesOptions& o) {
  for (const auto& name : o.names) pipeline::validate_feature_name(name);
  const auto dir = data_dir(o.data, g);
  auto manifest = load_manifest(dir);
  if (manifest.empty()) throw Error(Errc::EmptyManifest, "nothing to extract");
  dataset::SplitSpec plan;
  plan.protocol = parse_protocol(o.split.protocol)
                      .value_or(manifest.records.front().source == dataset::Source::Ising
                                    ? dataset::Protocol::IsingRandomHoldout
                                    : dataset::Protocol::ChLeaveRunsOut);
  plan.test_size = o.split.test_size;
  plan.held_out_runs = o.split.held_out_runs;
  plan.seed = Rng::derive(g.seed, 1);
  manifest = dataset::split(manifest, plan);
  fs::create_directories(g.out);
  for (const auto& name : o.names) {
    const auto table = pipeline::compute_features(dir, manifest, name, g.jobs);
    const auto file = g.out / ("features_" + name + ".csv");
    pipeline::write_features(file, manifest, table);
    std::cout << "wrote " << file.string() << " (" << table.rows.size() << " x " << table.dimension() << ")\n";
  }
  return 0;
}

int cmd_benchmark(const Globals& g, pipeline::BenchmarkConfig cfg, const SplitOptions& s) {
  cfg.data = data_dir(cfg.data, g);
  cfg.out = g.out;
  cfg.seed = g.seed;
  cfg.jobs = g.jobs;
  cfg.protocol = parse_protocol(s.protocol);
  cfg.test_size = s.test_size;
  cfg.held_out_runs = s.held_out_runs;
  const auto rows = pipeline::run_benchmark(cfg);
  std::cout << pipeline::kSummaryHeader << '\n';
  for (const auto& r : rows) {
    std::cout << r.feature << ',' << r.model << ',' << pipeline::format_pct(r.pct) << ',' << r.rmse << ',' << r.r2
              << ',' << r.train_seconds << ',' << r.feature_seconds << ',' << r.predict_seconds << ',' << r.n_train
              << ',' << r.n_test << ',' << (r.converged ? 1 : 0) << '\n';
  }
  return 0;
}

int cmd_histogram(const Globals& g, const HistogramOptions& o) {
  const auto manifest = load_manifest(data_dir(o.data, g));
  const auto h = pipeline::write_histogram(g.out, manifest, o.bins);
  for (std::size_t b = 0; b < h.counts.size(); ++b)
    std::cout << h.edges[b] << ',' << h.edges[b + 1] << ',' << h.counts[b] << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Microstructure simulation, features and structure-property regression"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI/TOML file; [section] keys mirror subcommand flags, flags win");

  Globals g;
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--seed", g.seed, "Global seed")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

  GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "Simulate a labelled image dataset")->configurable();
  generate->add_option("--source", gen.source, "ising or ch")->required()->check(CLI::IsMember({"ising", "ch"}));
  generate->add_option("--count", gen.count, "Ising images")->capture_default_str();
  generate->add_option("--runs", gen.runs, "Cahn-Hilliard runs")->check(CLI::NonNegativeNumber)->capture_default_str();
  generate->add_option("--size", gen.size, "Grid edge")->check(CLI::PositiveNumber)->capture_default_str();
  generate->add_option("--attempts", gen.attempts, "Ising attempts per image (0: size^3)")->capture_default_str();
  generate->add_option("--length", gen.ch.length, "CH domain edge")->capture_default_str();
  generate->add_option("--mobility", gen.ch.mobility, "CH mobility")->capture_default_str();
  generate->add_option("--c0", gen.ch.c0, "CH bulk energy density scale")->capture_default_str();
  generate->add_option("--kc", gen.ch.kc, "CH gradient energy coefficient")->capture_default_str();
  generate->add_option("--stabilization", gen.stabilization, "CH stabilization constant (default 2*c0)");
  generate->add_option("--n-log", gen.ch.schedule.n_log, "Log-spaced steps")->capture_default_str();
  generate->add_option("--dt-min", gen.ch.schedule.dt_min, "First log step")->capture_default_str();
  generate->add_option("--dt-max", gen.ch.schedule.dt_max, "Last log step")->capture_default_str();
  generate->add_option("--n-const", gen.ch.schedule.n_const, "Constant steps")->capture_default_str();
  generate->add_option("--dt-const", gen.ch.schedule.dt_const, "Constant step size")->capture_default_str();
  generate->add_option("--export-every", gen.ch.schedule.export_every, "Snapshot stride in the constant phase")
      ->capture_default_str();

  FeaturesOptions feat;
  auto* features = app.add_subcommand("features", "Extract feature CSVs for a dataset")->configurable();
  features->add_option("--data", feat.data, "Dataset directory (default: --out)");
  features->add_option("--feature", feat.names, "grad, physfeat1, physfeat2 or pca-<k>")->required()->delimiter(',');
  add_split_options(features, feat.split);

  pipeline::BenchmarkConfig bench;
  SplitOptions bench_split;
  std::optional<double> svr_c;
  std::optional<double> svr_gamma;
  std::optional<double> svr_epsilon;
  auto* benchmark = app.add_subcommand("benchmark", "Fit and evaluate the feature x model x pct grid")->configurable();
  benchmark->add_option("--data", bench.data, "Dataset directory (default: --out)");
  benchmark->add_option("--features", bench.features, "Feature names")->delimiter(',')->capture_default_str();
  benchmark->add_option("--models", bench.models, "pcr and/or svr")->delimiter(',')->capture_default_str();
  benchmark->add_option("--pct", bench.percentages, "Training percentages")->delimiter(',')->capture_default_str();
  benchmark->add_option("--bin-width", bench.bin_width, "PCR bin width")->capture_default_str();
  benchmark->add_option("--svr-c", svr_c, "Override SVR C");
  benchmark->add_option("--svr-gamma", svr_gamma, "Override SVR gamma");
  benchmark->add_option("--svr-epsilon", svr_epsilon, "Override SVR epsilon");
  benchmark->add_option("--svr-cache-mb", bench.svr_cache_megabytes, "SVR kernel cache")->capture_default_str();
  add_split_options(benchmark, bench_split);

  HistogramOptions hist;
  auto* histogram = app.add_subcommand("histogram", "Label distribution of a dataset")->configurable();
  histogram->add_option("--data", hist.data, "Dataset directory (default: --out)");
  histogram->add_option("--bins", hist.bins, "Bin count")->check(CLI::PositiveNumber)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  // Config sections also mark their subcommands as parsed. The command-line
  // subcommand is parsed before the config file, so it comes first.
  const auto* chosen = app.get_subcommands().front();
  try {
    if (chosen == generate) {
      gen.ch.seed = g.seed;
      return cmd_generate(g, gen);
    }
    if (chosen == features) return cmd_features(g, feat);
    if (chosen == benchmark) {
      bench.svr_c = svr_c;
      bench.svr_gamma = svr_gamma;
      bench.svr_epsilon = svr_epsilon;
      return cmd_benchmark(g, bench, bench_split);
    }
    if (chosen == histogram) return cmd_histogram(g, hist);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == Errc::Config ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
