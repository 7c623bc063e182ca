#include "microprop/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>

#include "microprop/csv.hpp"
#include "microprop/error.hpp"
#include "microprop/image.hpp"
#include "microprop/metrics.hpp"
#include "microprop/parallel.hpp"
#include "microprop/pca.hpp"
#include "microprop/pcr.hpp"
#include "microprop/rng.hpp"

namespace microprop::pipeline {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

GrayImage load_gray(const fs::path& root, const dataset::Record& record) {
  return GrayImage(read_png(root / record.path));
}

}  // namespace

std::optional<int> pca_components(std::string_view name) {
  constexpr std::string_view prefix = "pca-";
  if (name.substr(0, prefix.size()) != prefix) return std::nullopt;
  long long k = 0;
  try {
    k = csv::parse_int(name.substr(prefix.size()), "PCA component count");
  } catch (const Error&) {
    throw Error(Errc::Config, "bad PCA feature name '" + std::string(name) + "'");
  }
  if (k < 1 || k > 1'000'000) throw Error(Errc::Config, "PCA component count out of range in '" + std::string(name) + "'");
  return static_cast<int>(k);
}

void validate_feature_name(std::string_view name) {
  if (features::is_image_feature(name)) return;
  if (!pca_components(name)) throw Error(Errc::Config, "unknown feature '" + std::string(name) + "'");
}

FeatureTable compute_features(const fs::path& root, const dataset::Manifest& manifest, std::string_view name,
                              int jobs) {
  validate_feature_name(name);
  FeatureTable table;
  table.name = std::string(name);
  const std::size_t n = manifest.size();
  table.rows.resize(n);
  table.seconds.assign(n, 0.0);

  if (const auto k = pca_components(name)) {
    std::vector<std::size_t> train;
    for (std::size_t i = 0; i < n; ++i)
      if (manifest.records[i].split == dataset::SplitTag::Train) train.push_back(i);
    if (train.size() < 2) throw Error(Errc::EmptyTraining, "PCA needs at least two train records");
    std::vector<GrayImage> images(n);
    parallel_for(n, jobs, [&](std::size_t i) { images[i] = load_gray(root, manifest.records[i]); });
    const auto dim = static_cast<Eigen::Index>(images[train.front()].size());
    RowMatrix data(static_cast<Eigen::Index>(train.size()), dim);
    for (std::size_t r = 0; r < train.size(); ++r) {
      const auto& v = images[train[r]].values();
      if (static_cast<Eigen::Index>(v.size()) != dim) throw Error(Errc::InvalidArgument, "images differ in size");
      data.row(static_cast<Eigen::Index>(r)) = Eigen::Map<const Eigen::RowVectorXd>(v.data(), dim);
    }
    const auto fit_start = Clock::now();
    const auto model = features::pca_fit(data, *k);
    const double fit_share = seconds_since(fit_start) / static_cast<double>(train.size());
    parallel_for(n, jobs, [&](std::size_t i) {
      const auto start = Clock::now();
      table.rows[i] = features::pca_transform(model, images[i]);
      table.seconds[i] = seconds_since(start);
    });
    for (auto i : train) table.seconds[i] += fit_share;
    return table;
  }

  parallel_for(n, jobs, [&](std::size_t i) {
    const auto image = load_gray(root, manifest.records[i]);
    const auto start = Clock::now();
    try {
      table.rows[i] = features::extract(name, image);
    } catch (const Error& e) {
      throw Error(e.code(), manifest.records[i].path + ": " + e.detail());
    }
    table.seconds[i] = seconds_since(start);
  });
  return table;
}

void write_features(const fs::path& file, const dataset::Manifest& manifest, const FeatureTable& table) {
  if (table.rows.size() != manifest.size()) throw Error(Errc::InvalidArgument, "feature table does not match manifest");
  csv::Table out;
  out.header = {"path", "label", "feature_name"};
  for (std::size_t d = 0; d < table.dimension(); ++d) out.header.push_back("v" + std::to_string(d));
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    const auto& r = manifest.records[i];
    std::vector<std::string> row{r.path, csv::format_double(r.label), table.name};
    for (double v : table.rows[i]) row.push_back(csv::format_double(v));
    out.rows.push_back(std::move(row));
  }
  csv::write_table(file, out);
}

SvrSetup svr_setup(dataset::Source source, std::string_view feature) {
  SvrSetup setup;
  if (source == dataset::Source::Ising) {
    setup.params.C = 1e2;
    setup.params.epsilon = 0.12;
  } else {
    setup.params.C = 1e5;
    setup.params.epsilon = 0.4;
  }
  setup.params.gamma = 1.0 / 64.0;
  if (feature != "physfeat2") {
    setup.scale_features = true;
    setup.gamma_from_data = true;
  }
  // Picked by hand on a validation run carved from the CH training runs.
  if (source == dataset::Source::Ch && feature == "grad") setup.params.C = 1e4;
  return setup;
}

void BenchmarkConfig::validate() const {
  if (features.empty() || models.empty() || percentages.empty())
    throw Error(Errc::Config, "benchmark grid is empty");
  for (const auto& f : features) validate_feature_name(f);
  for (const auto& m : models)
    if (m != "pcr" && m != "svr") throw Error(Errc::Config, "unknown model '" + m + "'");
  for (double p : percentages)
    if (!(p > 0.0 && p <= 100.0)) throw Error(Errc::Config, "percentage " + format_pct(p) + " outside (0, 100]");
  if (!(bin_width > 0.0)) throw Error(Errc::Config, "bin width must be positive");
  if (jobs < 1) throw Error(Errc::Config, "jobs must be at least 1");
  if (svr_c && !(*svr_c > 0.0)) throw Error(Errc::Config, "C must be positive");
  if (svr_gamma && !(*svr_gamma > 0.0)) throw Error(Errc::Config, "gamma must be positive");
  if (svr_epsilon && !(*svr_epsilon >= 0.0)) throw Error(Errc::Config, "epsilon must be non-negative");
}

std::string format_pct(double pct) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", pct);
  return buf;
}

namespace {

/// Writes lines to a file in index order, whatever order they arrive in.
class OrderedAppender {
 public:
  explicit OrderedAppender(const fs::path& file) : out_(file, std::ios::binary | std::ios::trunc) {
    if (!out_) throw Error(Errc::Io, "cannot write " + file.string());
  }

  void put(std::size_t index, std::string line) {
    std::lock_guard lock(mutex_);
    pending_.emplace(index, std::move(line));
    while (!pending_.empty() && pending_.begin()->first == next_) {
      out_ << pending_.begin()->second << '\n';
      pending_.erase(pending_.begin());
      ++next_;
    }
    out_.flush();
  }

 private:
  std::mutex mutex_;
  std::ofstream out_;
  std::map<std::size_t, std::string> pending_;
  std::size_t next_ = 0;
};

struct Cell {
  std::string feature;
  std::string model;
  double pct;
};

RowMatrix gather(const FeatureTable& table, const std::vector<std::size_t>& rows) {
  const auto d = static_cast<Eigen::Index>(table.dimension());
  RowMatrix x(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& v = table.rows[rows[r]];
    if (static_cast<Eigen::Index>(v.size()) != d) throw Error(Errc::InvalidArgument, "ragged feature table");
    x.row(static_cast<Eigen::Index>(r)) = Eigen::Map<const Eigen::RowVectorXd>(v.data(), d);
  }
  return x;
}

/// Min-max scaling fitted on training rows; constant columns map to 0.
struct MinMax {
  Eigen::RowVectorXd lo;
  Eigen::RowVectorXd range;

  explicit MinMax(const RowMatrix& x) : lo(x.colwise().minCoeff()), range(x.colwise().maxCoeff() - lo) {}

  void apply(RowMatrix& x) const {
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      if (range[c] > 0.0) x.col(c) = (x.col(c).array() - lo[c]) / range[c];
      else x.col(c).setZero();
    }
  }
};

struct CellOutcome {
  std::vector<double> prediction;
  double train_seconds = 0.0;
  double predict_seconds = 0.0;
  bool converged = true;
};

CellOutcome fit_and_predict(const BenchmarkConfig& config, dataset::Source source, const Cell& cell, RowMatrix x_train,
                            const std::vector<double>& y_train, RowMatrix x_test) {
  CellOutcome out;
  out.prediction.resize(static_cast<std::size_t>(x_test.rows()));
  const auto d = static_cast<std::size_t>(x_test.cols());
  auto test_row = [&](Eigen::Index i) { return std::span<const double>(x_test.data() + i * x_test.cols(), d); };

  if (cell.model == "pcr") {
    const auto start = Clock::now();
    const auto model = regress::pcr_fit(x_train, y_train, config.bin_width);
    out.train_seconds = seconds_since(start);
    const auto pstart = Clock::now();
    for (Eigen::Index i = 0; i < x_test.rows(); ++i) out.prediction[static_cast<std::size_t>(i)] = model.predict(test_row(i));
    out.predict_seconds = seconds_since(pstart);
    return out;
  }

  auto setup = svr_setup(source, cell.feature);
  if (config.svr_c) setup.params.C = *config.svr_c;
  if (config.svr_epsilon) setup.params.epsilon = *config.svr_epsilon;
  setup.params.cache_megabytes = config.svr_cache_megabytes;

  const auto start = Clock::now();
  if (setup.scale_features) {
    const MinMax scaler(x_train);
    scaler.apply(x_train);
    scaler.apply(x_test);
  }
  if (config.svr_gamma) setup.params.gamma = *config.svr_gamma;
  else if (setup.gamma_from_data) setup.params.gamma = regress::gamma_scale(x_train);
  const auto fit = regress::svr_fit(x_train, y_train, setup.params);
  out.train_seconds = seconds_since(start);
  out.converged = fit.converged;

  const auto pstart = Clock::now();
  out.prediction = fit.model.predict(x_test);
  out.predict_seconds = seconds_since(pstart);
  return out;
}

}  // namespace

std::vector<SummaryRow> run_benchmark(const BenchmarkConfig& config) {
  config.validate();
  const auto manifest_file = config.data / dataset::kManifestFile;
  if (!fs::exists(manifest_file)) throw Error(Errc::Config, "no manifest at " + manifest_file.string());
  const auto full = dataset::read_manifest(manifest_file);
  if (full.empty()) throw Error(Errc::EmptyManifest, manifest_file.string());
  const auto source = full.records.front().source;

  dataset::SplitSpec plan;
  plan.protocol = config.protocol.value_or(source == dataset::Source::Ising ? dataset::Protocol::IsingRandomHoldout
                                                                            : dataset::Protocol::ChLeaveRunsOut);
  plan.test_size = config.test_size;
  plan.held_out_runs = config.held_out_runs;
  plan.seed = Rng::derive(config.seed, 1);
  const auto manifest = dataset::split(full, plan);

  std::vector<std::size_t> test_rows;
  std::map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    row_of.emplace(manifest.records[i].path, i);
    if (manifest.records[i].split == dataset::SplitTag::Test) test_rows.push_back(i);
  }
  if (test_rows.empty()) throw Error(Errc::Config, "test split is empty");

  fs::create_directories(config.out);
  dataset::write_manifest(config.out / "split_manifest.csv", manifest);

  std::map<std::string, FeatureTable> tables;
  for (const auto& name : config.features) {
    if (tables.count(name)) continue;
    auto table = compute_features(config.data, manifest, name, config.jobs);
    write_features(config.out / ("features_" + name + ".csv"), manifest, table);
    tables.emplace(name, std::move(table));
  }

  std::vector<Cell> cells;
  for (const auto& f : config.features)
    for (const auto& m : config.models)
      for (double p : config.percentages) cells.push_back({f, m, p});

  std::vector<double> y_test;
  for (auto i : test_rows) y_test.push_back(manifest.records[i].label);

  OrderedAppender summary(config.out / "summary.csv");
  summary.put(0, kSummaryHeader);
  std::vector<SummaryRow> rows(cells.size());

  const auto subset_seed = Rng::derive(config.seed, 2);
  parallel_for(cells.size(), config.jobs, [&](std::size_t c) {
    const auto& cell = cells[c];
    const auto& table = tables.at(cell.feature);
    try {
      const auto subset = dataset::subset_fraction(manifest, cell.pct, subset_seed);
      if (subset.empty()) throw Error(Errc::EmptyTraining, "no train records");
      std::vector<std::size_t> train_rows;
      std::vector<double> y_train;
      double feat_seconds = 0.0;
      for (const auto& r : subset.records) {
        const auto i = row_of.at(r.path);
        train_rows.push_back(i);
        y_train.push_back(r.label);
        feat_seconds += table.seconds[i];
      }
      auto outcome = fit_and_predict(config, source, cell, gather(table, train_rows), y_train, gather(table, test_rows));

      const std::string stem = cell.feature + "_" + cell.model + "_" + format_pct(cell.pct);
      csv::Table report;
      report.header = {"path", "truth", "prediction"};
      for (std::size_t k = 0; k < test_rows.size(); ++k)
        report.rows.push_back({manifest.records[test_rows[k]].path, csv::format_double(y_test[k]),
                               csv::format_double(outcome.prediction[k])});
      csv::write_table(config.out / ("report_" + stem + ".csv"), report);

      SummaryRow row;
      row.feature = cell.feature;
      row.model = cell.model;
      row.pct = cell.pct;
      row.rmse = regress::rmse(outcome.prediction, y_test);
      row.r2 = regress::r2(outcome.prediction, y_test);
      row.train_seconds = outcome.train_seconds;
      row.feature_seconds = feat_seconds;
      row.predict_seconds = outcome.predict_seconds;
      row.n_train = train_rows.size();
      row.n_test = test_rows.size();
      row.converged = outcome.converged;
      summary.put(c + 1, csv::join_line({row.feature, row.model, format_pct(row.pct), csv::format_double(row.rmse),
                                         csv::format_double(row.r2), csv::format_double(row.train_seconds),
                                         csv::format_double(row.feature_seconds),
                                         csv::format_double(row.predict_seconds), std::to_string(row.n_train),
                                         std::to_string(row.n_test), row.converged ? "1" : "0"}));
      rows[c] = std::move(row);
    } catch (const Error& e) {
      throw Error(e.code(), "[" + cell.feature + "/" + cell.model + "/" + format_pct(cell.pct) + "] " + e.detail());
    }
  });
  return rows;
}

dataset::Histogram write_histogram(const fs::path& out, const dataset::Manifest& manifest, std::size_t n_bins) {
  auto h = dataset::label_histogram(manifest, n_bins);
  fs::create_directories(out);
  csv::Table table;
  table.header = {"bin_lo", "bin_hi", "count"};
  for (std::size_t b = 0; b < h.counts.size(); ++b)
    table.rows.push_back({csv::format_double(h.edges[b]), csv::format_double(h.edges[b + 1]), std::to_string(h.counts[b])});
  csv::write_table(out / "histogram.csv", table);
  return h;
}

}  // namespace microprop::pipeline
