#include "microprop/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>

#include "microprop/csv.hpp"
#include "microprop/error.hpp"
#include "microprop/ising.hpp"
#include "microprop/parallel.hpp"
#include "microprop/rng.hpp"

namespace microprop::dataset {

namespace fs = std::filesystem;

std::string_view to_string(Source source) { return source == Source::Ising ? "ising" : "ch"; }

std::string_view to_string(SplitTag tag) {
  switch (tag) {
    case SplitTag::Train: return "train";
    case SplitTag::Test: return "test";
    case SplitTag::None: break;
  }
  return "none";
}

Source parse_source(std::string_view text) {
  if (text == "ising") return Source::Ising;
  if (text == "ch") return Source::Ch;
  throw Error(Errc::InvalidArgument, "unknown source '" + std::string(text) + "'");
}

SplitTag parse_split_tag(std::string_view text) {
  if (text == "none") return SplitTag::None;
  if (text == "train") return SplitTag::Train;
  if (text == "test") return SplitTag::Test;
  throw Error(Errc::InvalidArgument, "unknown split tag '" + std::string(text) + "'");
}

std::vector<Record> Manifest::with_tag(SplitTag tag) const {
  std::vector<Record> out;
  std::copy_if(records.begin(), records.end(), std::back_inserter(out), [tag](const Record& r) { return r.split == tag; });
  return out;
}

void Manifest::validate() const {
  std::set<std::string_view> seen;
  for (const auto& r : records) {
    if (!seen.insert(r.path).second) throw Error(Errc::DuplicatePath, r.path);
    if (!std::isfinite(r.label)) throw Error(Errc::InvalidArgument, "non-finite label for " + r.path);
  }
}

namespace {

const std::vector<std::string> kLogColumns{"path", "label", "source", "run_id", "seed", "step"};

std::vector<std::string> log_fields(const Record& r) {
  return {r.path, csv::format_double(r.label), std::string(to_string(r.source)), std::to_string(r.run_id),
          std::to_string(r.seed), std::to_string(r.step)};
}

Record parse_record(const csv::Table& table, const std::vector<std::string>& row) {
  Record r;
  r.path = row[table.column("path")];
  r.label = csv::parse_double(row[table.column("label")], "label");
  r.source = parse_source(row[table.column("source")]);
  r.run_id = csv::parse_int(row[table.column("run_id")], "run_id");
  r.seed = csv::parse_uint(row[table.column("seed")], "seed");
  r.step = csv::parse_int(row[table.column("step")], "step");
  return r;
}

void sort_by_path(std::vector<Record>& records) {
  std::sort(records.begin(), records.end(), [](const Record& a, const Record& b) { return a.path < b.path; });
}

}  // namespace

void write_manifest(const fs::path& file, const Manifest& manifest) {
  csv::Table table;
  table.header = kLogColumns;
  table.header.emplace_back("split");
  for (const auto& r : manifest.records) {
    auto fields = log_fields(r);
    fields.emplace_back(to_string(r.split));
    table.rows.push_back(std::move(fields));
  }
  csv::write_table(file, table);
}

Manifest read_manifest(const fs::path& file) {
  const auto table = csv::read_table(file);
  Manifest m;
  for (const auto& row : table.rows) {
    auto r = parse_record(table, row);
    r.split = parse_split_tag(row[table.column("split")]);
    m.records.push_back(std::move(r));
  }
  m.validate();
  return m;
}

Manifest build_manifest(const fs::path& root) {
  if (!fs::is_directory(root)) throw Error(Errc::Io, "not a directory: " + root.string());

  std::set<std::string> images;
  const fs::path image_dir = root / kImageDir;
  if (fs::is_directory(image_dir)) {
    for (const auto& entry : fs::directory_iterator(image_dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".png")
        images.insert(std::string(kImageDir) + "/" + entry.path().filename().string());
    }
  }

  Manifest m;
  const fs::path log = root / kLabelLog;
  if (fs::exists(log)) {
    const auto table = csv::read_table(log);
    std::set<std::string> logged;
    for (const auto& row : table.rows) {
      auto r = parse_record(table, row);
      if (!logged.insert(r.path).second) throw Error(Errc::DuplicatePath, r.path);
      if (!std::isfinite(r.label)) throw Error(Errc::InvalidArgument, "non-finite label for " + r.path);
      if (!images.count(r.path)) throw Error(Errc::MissingImage, r.path);
      m.records.push_back(std::move(r));
    }
    for (const auto& path : images)
      if (!logged.count(path)) throw Error(Errc::MissingLabel, path);
  } else if (!images.empty()) {
    throw Error(Errc::MissingLabel, *images.begin() + " (no " + kLabelLog + ")");
  }
  sort_by_path(m.records);
  return m;
}

Manifest split(const Manifest& manifest, const SplitSpec& plan) {
  const Source expected = plan.protocol == Protocol::IsingRandomHoldout ? Source::Ising : Source::Ch;
  for (const auto& r : manifest.records)
    if (r.source != expected)
      throw Error(Errc::InvalidArgument, "split protocol does not match source of " + r.path);

  Manifest out = manifest;
  for (auto& r : out.records) r.split = SplitTag::Train;
  const std::size_t n = out.size();

  if (plan.protocol == Protocol::ChLeaveRunsOut) {
    std::set<std::int64_t> runs;
    for (const auto& r : out.records) runs.insert(r.run_id);
    for (auto id : plan.held_out_runs)
      if (!runs.count(id)) throw Error(Errc::RunNotFound, "run " + std::to_string(id));
    const std::set<std::int64_t> held(plan.held_out_runs.begin(), plan.held_out_runs.end());
    for (auto& r : out.records)
      if (held.count(r.run_id)) r.split = SplitTag::Test;
    return out;
  }

  if (plan.test_size > n)
    throw Error(Errc::TestLargerThanData,
                "test size " + std::to_string(plan.test_size) + " exceeds " + std::to_string(n) + " records");
  if (plan.test_size == 0) return out;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ra = out.records[a];
    const auto& rb = out.records[b];
    return ra.label != rb.label ? ra.label < rb.label : ra.path < rb.path;
  });

  Rng rng(plan.seed);
  const std::size_t stride = (n + plan.test_size - 1) / plan.test_size;
  std::size_t taken = 0;
  std::vector<bool> chosen(n, false);
  for (std::size_t k = static_cast<std::size_t>(rng.below(stride)); k < n && taken < plan.test_size; k += stride) {
    chosen[k] = true;
    ++taken;
  }
  if (taken < plan.test_size) {
    std::vector<std::size_t> rest;
    for (std::size_t k = 0; k < n; ++k)
      if (!chosen[k]) rest.push_back(k);
    rng.shuffle(std::span<std::size_t>(rest));
    for (std::size_t k = 0; taken < plan.test_size; ++k, ++taken) chosen[rest[k]] = true;
  }
  for (std::size_t k = 0; k < n; ++k)
    if (chosen[k]) out.records[order[k]].split = SplitTag::Test;
  return out;
}

Manifest subset_fraction(const Manifest& manifest, double pct, std::uint64_t seed) {
  if (!(pct > 0.0 && pct <= 100.0)) throw Error(Errc::InvalidArgument, "percentage must lie in (0, 100]");
  std::vector<std::size_t> train;
  for (std::size_t i = 0; i < manifest.size(); ++i)
    if (manifest.records[i].split == SplitTag::Train) train.push_back(i);
  Manifest out;
  if (train.empty()) return out;

  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(train));
  const auto want = static_cast<std::size_t>(std::llround(pct / 100.0 * static_cast<double>(train.size())));
  train.resize(std::clamp<std::size_t>(want, 1, train.size()));
  std::sort(train.begin(), train.end());
  for (auto i : train) out.records.push_back(manifest.records[i]);
  return out;
}

Histogram label_histogram(const Manifest& manifest, std::size_t n_bins) {
  if (manifest.empty()) throw Error(Errc::EmptyManifest, "cannot histogram an empty manifest");
  if (n_bins == 0) throw Error(Errc::InvalidArgument, "histogram needs at least one bin");
  double lo = manifest.records.front().label;
  double hi = lo;
  for (const auto& r : manifest.records) {
    lo = std::min(lo, r.label);
    hi = std::max(hi, r.label);
  }
  Histogram h;
  h.edges.resize(n_bins + 1);
  const double width = (hi - lo) / static_cast<double>(n_bins);
  for (std::size_t i = 0; i < n_bins; ++i) h.edges[i] = lo + width * static_cast<double>(i);
  h.edges[n_bins] = hi;
  h.counts.assign(n_bins, 0);
  for (const auto& r : manifest.records) {
    std::size_t bin = 0;
    if (width > 0.0) {
      const double pos = std::floor((r.label - lo) / width);
      bin = std::min(static_cast<std::size_t>(std::max(pos, 0.0)), n_bins - 1);
    }
    ++h.counts[bin];
  }
  return h;
}

namespace {

void prepare_image_dir(const fs::path& root, std::string_view prefix) {
  const fs::path dir = root / kImageDir;
  fs::create_directories(dir);
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && entry.path().extension() == ".png" && name.rfind(prefix, 0) == 0)
      fs::remove(entry.path());
  }
}

Manifest finish_generation(const fs::path& root, std::vector<Record> log) {
  csv::Table table;
  table.header = kLogColumns;
  for (const auto& r : log) table.rows.push_back(log_fields(r));
  csv::write_table(root / kLabelLog, table);
  Manifest m = build_manifest(root);
  write_manifest(root / kManifestFile, m);
  return m;
}

std::string ising_name(std::uint64_t seed, double encoded) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "ising_%llu_%07.3f.png", static_cast<unsigned long long>(seed), encoded);
  return buf;
}

}  // namespace

Manifest generate_ising(const fs::path& root, const IsingGeneration& config) {
  if (config.size <= 0) throw Error(Errc::InvalidArgument, "lattice size must be positive");
  prepare_image_dir(root, "ising_");
  const double t_max = 2.0 * ising::critical_temperature();
  std::vector<Record> log(config.count);
  parallel_for(config.count, config.jobs, [&](std::size_t i) {
    const std::uint64_t seed = Rng::derive(config.seed, i);
    Rng temperature_rng(Rng::derive(seed, 0));
    ising::IsingParams params;
    params.size = config.size;
    params.temperature = temperature_rng.uniform() * t_max;
    params.seed = seed;
    params.attempts = config.attempts;
    const auto run = ising::run_ising(params);
    Record r;
    r.label = run.label.encoded();
    r.path = std::string(kImageDir) + "/" + ising_name(seed, r.label);
    r.source = Source::Ising;
    r.run_id = static_cast<std::int64_t>(i);
    r.seed = seed;
    r.step = params.attempt_count();
    write_png(ising::lattice_to_image(run.lattice), root / r.path);
    log[i] = std::move(r);
  });
  return finish_generation(root, std::move(log));
}

Manifest generate_ch(const fs::path& root, const ChGeneration& config) {
  if (config.runs < 0) throw Error(Errc::InvalidArgument, "run count must be non-negative");
  config.params.validate();
  prepare_image_dir(root, "ch_");
  std::vector<std::vector<Record>> per_run(static_cast<std::size_t>(config.runs));
  parallel_for(per_run.size(), config.jobs, [&](std::size_t run) {
    ch::ChParams params = config.params;
    params.seed = Rng::derive(config.seed, run);
    auto& records = per_run[run];
    ch::run_ch(params, [&](const ch::ChSnapshot& snap) {
      char name[96];
      std::snprintf(name, sizeof name, "ch_%llu_%05lld.png", static_cast<unsigned long long>(params.seed),
                    static_cast<long long>(snap.step));
      Record r;
      r.path = std::string(kImageDir) + "/" + name;
      r.label = snap.energy;
      r.source = Source::Ch;
      r.run_id = static_cast<std::int64_t>(run);
      r.seed = params.seed;
      r.step = snap.step;
      write_png(snap.image, root / r.path);
      records.push_back(std::move(r));
    });
  });
  std::vector<Record> log;
  for (auto& run : per_run) std::move(run.begin(), run.end(), std::back_inserter(log));
  return finish_generation(root, std::move(log));
}

}  // namespace microprop::dataset
