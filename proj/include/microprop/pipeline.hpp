#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "microprop/dataset.hpp"
#include "microprop/features.hpp"
#include "microprop/svr.hpp"

namespace microprop::pipeline {

/// "grad", "physfeat1", "physfeat2" or "pca-<k>" with k >= 1.
/// Throws Config on anything else.
void validate_feature_name(std::string_view name);
/// k for "pca-<k>", nullopt for image features.
std::optional<int> pca_components(std::string_view name);

struct FeatureTable {
  std::string name;
  std::vector<features::FeatureVector> rows;  ///< aligned with the manifest records
  std::vector<double> seconds;                ///< extraction wall time per record

  std::size_t dimension() const { return rows.empty() ? 0 : rows.front().size(); }
};

/// Reads every image (root / record.path) and extracts the named feature.
/// "pca-<k>" fits the projection on the records tagged train.
FeatureTable compute_features(const std::filesystem::path& root, const dataset::Manifest& manifest,
                              std::string_view name, int jobs);

/// Header path,label,feature_name,v0..v{d-1}; reals with 17 significant digits.
void write_features(const std::filesystem::path& file, const dataset::Manifest& manifest, const FeatureTable& table);

/// SVR setup for a (dataset, feature) pair. physfeat2 uses the tuned
/// constants as-is: Ising (C, gamma, eps) = (1e2, 1/64, 0.12), CH
/// (1e5, 1/64, 0.4). Other features reuse C and eps, are min-max scaled to
/// [0,1] on the training set, and take gamma = 1 / (d Var(X)).
struct SvrSetup {
  regress::SvrParams params;
  bool scale_features = false;
  bool gamma_from_data = false;
};
SvrSetup svr_setup(dataset::Source source, std::string_view feature);

struct BenchmarkConfig {
  std::filesystem::path data;  ///< dataset root holding manifest.csv
  std::filesystem::path out;
  std::vector<std::string> features{"grad", "physfeat1", "physfeat2"};
  std::vector<std::string> models{"pcr", "svr"};
  std::vector<double> percentages{100.0};
  /// Unset: chosen from the manifest's source.
  std::optional<dataset::Protocol> protocol;
  std::size_t test_size = 1000;
  std::vector<std::int64_t> held_out_runs;
  std::uint64_t seed = 0;
  int jobs = 1;
  double bin_width = 1.0;
  std::optional<double> svr_c;
  std::optional<double> svr_gamma;
  std::optional<double> svr_epsilon;
  std::size_t svr_cache_megabytes = 1024;

  /// Throws Config on unknown features or models, percentages outside
  /// (0, 100], or an empty grid.
  void validate() const;
};

struct SummaryRow {
  std::string feature;
  std::string model;
  double pct = 0.0;
  double rmse = 0.0;
  double r2 = 0.0;
  double train_seconds = 0.0;
  double feature_seconds = 0.0;
  double predict_seconds = 0.0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  bool converged = true;
};

/// Percentages are printed with %g in file names and the summary.
std::string format_pct(double pct);

/// Splits the manifest, computes each feature once (features_<name>.csv),
/// then for every (feature, model, pct) cell fits on the seeded train
/// subset and evaluates on the test split. Writes
/// report_<feature>_<model>_<pct>.csv (path,truth,prediction) per cell and
/// summary.csv, with rows in grid order. Cells run on up to `jobs` threads.
std::vector<SummaryRow> run_benchmark(const BenchmarkConfig& config);

inline constexpr const char* kSummaryHeader = "feature,model,pct,rmse,r2,train_s,feat_s,predict_s,n_train,n_test,converged";

/// Writes <out>/histogram.csv with columns bin_lo,bin_hi,count.
dataset::Histogram write_histogram(const std::filesystem::path& out, const dataset::Manifest& manifest,
                                   std::size_t n_bins);

}  // namespace microprop::pipeline
