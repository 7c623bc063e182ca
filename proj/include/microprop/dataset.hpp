#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "microprop/cahn_hilliard.hpp"

namespace microprop::dataset {

enum class Source { Ising, Ch };
enum class SplitTag { None, Train, Test };

std::string_view to_string(Source source);
std::string_view to_string(SplitTag tag);
/// Throw InvalidArgument on unknown names.
Source parse_source(std::string_view text);
SplitTag parse_split_tag(std::string_view text);

struct Record {
  std::string path;  ///< relative to the dataset root, '/'-separated
  double label = 0.0;
  Source source = Source::Ising;
  std::int64_t run_id = 0;
  std::uint64_t seed = 0;
  std::int64_t step = 0;
  SplitTag split = SplitTag::None;

  bool operator==(const Record&) const = default;
};

struct Manifest {
  std::vector<Record> records;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
  std::vector<Record> with_tag(SplitTag tag) const;

  /// Throws DuplicatePath or InvalidArgument (non-finite label).
  void validate() const;
};

inline constexpr const char* kManifestFile = "manifest.csv";
inline constexpr const char* kLabelLog = "labels.csv";
inline constexpr const char* kImageDir = "images";

/// Columns path,label,source,run_id,seed,step,split; LF line endings.
void write_manifest(const std::filesystem::path& file, const Manifest& manifest);
Manifest read_manifest(const std::filesystem::path& file);

/// Joins the PNG files in <root>/images with the generation log
/// <root>/labels.csv. Labels come only from the log. Records are ordered
/// lexicographically by path and untagged.
///
/// Errors: MissingLabel (image without log row), MissingImage (log row
/// without image), DuplicatePath (path logged twice).
Manifest build_manifest(const std::filesystem::path& root);

enum class Protocol { IsingRandomHoldout, ChLeaveRunsOut };

struct SplitSpec {
  Protocol protocol = Protocol::IsingRandomHoldout;
  std::size_t test_size = 1000;             ///< IsingRandomHoldout
  std::vector<std::int64_t> held_out_runs;  ///< ChLeaveRunsOut
  std::uint64_t seed = 0;
};

/// Tags every record train or test.
///
/// IsingRandomHoldout: records are sorted by (label, path); every
/// ceil(n / test_size)-th one from a seeded offset goes to test, and any
/// shortfall is filled by a seeded random draw from the rest.
/// ChLeaveRunsOut: all records of the held-out runs go to test.
///
/// Errors: TestLargerThanData, RunNotFound, InvalidArgument when the
/// protocol does not match the records' source.
Manifest split(const Manifest& manifest, const SplitSpec& plan);

/// Uniform sample without replacement of the train records, of size
/// max(1, round(pct / 100 * n_train)), returned in manifest order. Samples
/// for the same seed are nested: a smaller pct yields a prefix of the same
/// seeded permutation. Throws InvalidArgument unless 0 < pct <= 100.
Manifest subset_fraction(const Manifest& manifest, double pct, std::uint64_t seed);

struct Histogram {
  std::vector<double> edges;  ///< n_bins + 1 ascending edges
  std::vector<std::size_t> counts;
};

/// Equal-width bins over [min, max] of the labels; the top edge is
/// inclusive. With min == max every record lands in bin 0. Throws
/// EmptyManifest.
Histogram label_histogram(const Manifest& manifest, std::size_t n_bins);

struct IsingGeneration {
  std::size_t count = 100;
  std::uint64_t seed = 0;
  int size = 64;
  std::int64_t attempts = 0;  ///< 0 selects size^3
  int jobs = 1;
};

struct ChGeneration {
  int runs = 2;
  std::uint64_t seed = 0;
  ch::ChParams params;  ///< params.seed is replaced per run
  int jobs = 1;
};

/// Image i uses seed derive(seed, i); its temperature is uniform on
/// [0, 2 Tc]. Writes images/ising_<seed>_<label>.png, labels.csv and
/// manifest.csv under `root` and returns the manifest. Stale ising_*.png
/// files in images/ are removed first so reruns are idempotent.
Manifest generate_ising(const std::filesystem::path& root, const IsingGeneration& config);

/// Run r uses seed derive(seed, r) and exports every scheduled snapshot as
/// images/ch_<runseed>_<step>.png labelled with the free energy.
Manifest generate_ch(const std::filesystem::path& root, const ChGeneration& config);

}  // namespace microprop::dataset
