#include "microprop/model_io.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "microprop/csv.hpp"
#include "microprop/error.hpp"

namespace microprop::regress {

namespace {

constexpr const char* kMagic = "microprop-model";
constexpr int kVersion = 1;

void put(std::ostream& out, const char* name, double value) { out << name << ' ' << csv::format_double(value) << '\n'; }

void put_row(std::ostream& out, const char* name, std::span<const double> values) {
  out << name;
  for (double v : values) out << ' ' << csv::format_double(v);
  out << '\n';
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Next line split on spaces; the first token must equal `name`.
  std::vector<std::string> expect(std::string_view name) {
    std::string line;
    if (!std::getline(in_, line)) fail("unexpected end of model, wanted '" + std::string(name) + "'");
    std::istringstream ss(line);
    std::vector<std::string> tokens;
    for (std::string t; ss >> t;) tokens.push_back(t);
    if (tokens.empty() || tokens.front() != name) fail("expected '" + std::string(name) + "', got '" + line + "'");
    tokens.erase(tokens.begin());
    return tokens;
  }

  double real(std::string_view name) {
    auto t = expect(name);
    if (t.size() != 1) fail("field '" + std::string(name) + "' wants one value");
    return number(t[0]);
  }

  long long integer(std::string_view name) {
    auto t = expect(name);
    if (t.size() != 1) fail("field '" + std::string(name) + "' wants one value");
    try {
      return csv::parse_int(t[0]);
    } catch (const Error& e) {
      fail(e.what());
    }
  }

  static double number(const std::string& text) {
    try {
      return csv::parse_double(text);
    } catch (const Error& e) {
      fail(e.what());
    }
  }

  [[noreturn]] static void fail(const std::string& message) { throw Error(Errc::ModelFormat, message); }

 private:
  std::istream& in_;
};

std::vector<double> numbers(const std::vector<std::string>& tokens, std::size_t offset, std::size_t count) {
  if (tokens.size() != offset + count) Reader::fail("wrong number of values in model row");
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = offset; i < tokens.size(); ++i) out.push_back(Reader::number(tokens[i]));
  return out;
}

}  // namespace

void save_model(std::ostream& out, const SvrModel& model) {
  const auto& p = model.params();
  out << kMagic << ' ' << kVersion << "\nkind svr\n";
  put(out, "C", p.C);
  put(out, "gamma", p.gamma);
  put(out, "epsilon", p.epsilon);
  put(out, "tolerance", p.tolerance);
  put(out, "bias", model.bias());
  out << "dimension " << model.dimension() << "\nsupport_count " << model.support_count() << '\n';
  const auto d = model.dimension();
  for (std::size_t j = 0; j < model.support_count(); ++j) {
    std::vector<double> row{model.coefficients()[j]};
    const double* sv = model.support_vectors().data() + j * d;
    row.insert(row.end(), sv, sv + d);
    put_row(out, "sv", row);
  }
  out << "end\n";
}

void save_model(std::ostream& out, const PcrModel& model) {
  out << kMagic << ' ' << kVersion << "\nkind pcr\n";
  put(out, "bin_width", model.bin_width());
  out << "dimension " << model.dimension() << '\n';
  put_row(out, "scale_min", model.scale_min());
  put_row(out, "scale_max", model.scale_max());
  out << "bin_count " << model.bins().size() << '\n';
  for (const auto& [index, bin] : model.bins()) {
    out << "bin " << index << ' ' << csv::format_double(bin.property);
    for (double v : bin.mean) out << ' ' << csv::format_double(v);
    out << '\n';
  }
  out << "end\n";
}

AnyModel load_model(std::istream& in) {
  Reader r(in);
  auto version = r.expect(kMagic);
  if (version.size() != 1 || version[0] != std::to_string(kVersion))
    Reader::fail("unsupported model version");
  auto kind = r.expect("kind");
  if (kind.size() != 1) Reader::fail("bad kind line");

  if (kind[0] == "svr") {
    SvrParams p;
    p.C = r.real("C");
    p.gamma = r.real("gamma");
    p.epsilon = r.real("epsilon");
    p.tolerance = r.real("tolerance");
    const double bias = r.real("bias");
    const long long d = r.integer("dimension");
    const long long m = r.integer("support_count");
    if (d < 0 || m < 0) Reader::fail("negative size");
    RowMatrix sv(m, d);
    std::vector<double> coef(static_cast<std::size_t>(m));
    for (long long j = 0; j < m; ++j) {
      auto row = numbers(r.expect("sv"), 0, static_cast<std::size_t>(d) + 1);
      coef[static_cast<std::size_t>(j)] = row[0];
      for (long long k = 0; k < d; ++k) sv(j, k) = row[static_cast<std::size_t>(k) + 1];
    }
    r.expect("end");
    try {
      p.validate();
    } catch (const Error& e) {
      Reader::fail(e.what());
    }
    return SvrModel(std::move(sv), std::move(coef), bias, p);
  }

  if (kind[0] == "pcr") {
    const double width = r.real("bin_width");
    const long long d = r.integer("dimension");
    if (d < 0) Reader::fail("negative dimension");
    const auto dim = static_cast<std::size_t>(d);
    auto lo = numbers(r.expect("scale_min"), 0, dim);
    auto hi = numbers(r.expect("scale_max"), 0, dim);
    const long long count = r.integer("bin_count");
    std::map<std::int64_t, PcrModel::Bin> bins;
    for (long long b = 0; b < count; ++b) {
      auto tokens = r.expect("bin");
      if (tokens.empty()) Reader::fail("bin row without index");
      long long index = 0;
      try {
        index = csv::parse_int(tokens[0]);
      } catch (const Error& e) {
        Reader::fail(e.what());
      }
      auto values = numbers(tokens, 1, dim + 1);
      PcrModel::Bin bin;
      bin.property = values[0];
      bin.mean.assign(values.begin() + 1, values.end());
      if (!bins.emplace(index, std::move(bin)).second) Reader::fail("duplicate bin index");
    }
    r.expect("end");
    try {
      return PcrModel(width, std::move(lo), std::move(hi), std::move(bins));
    } catch (const Error& e) {
      Reader::fail(e.what());
    }
  }

  Reader::fail("unknown model kind '" + kind[0] + "'");
}

}  // namespace microprop::regress
