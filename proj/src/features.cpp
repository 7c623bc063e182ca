#include "microprop/features.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>

#include "microprop/error.hpp"
#include "microprop/fft.hpp"

namespace microprop::features {

GrayImage gradient_magnitude(const GrayImage& image) {
  GrayImage out(image.rows(), image.cols());
  for (int r = 0; r < image.rows(); ++r) {
    for (int c = 0; c < image.cols(); ++c) {
      const double dx = 0.5 * (image.wrapped(r, c + 1) - image.wrapped(r, c - 1));
      const double dy = 0.5 * (image.wrapped(r + 1, c) - image.wrapped(r - 1, c));
      out.at(r, c) = std::sqrt(dx * dx + dy * dy);
    }
  }
  return out;
}

double grad_feature(const GrayImage& image) {
  auto values = gradient_magnitude(image).values();
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

namespace {

// Raw unitary power binned by radius, without the degeneracy check.
PsdCurve raw_radial_power(const GrayImage& image) {
  if (!image.square() || image.rows() % 2 != 0)
    throw Error(Errc::InvalidArgument, "radial PSD needs a square image with even edge");
  const int n = image.rows();
  const int nbins = n / 2;
  thread_local std::vector<std::complex<double>> spectrum;
  spectrum.resize(static_cast<std::size_t>(n) * n);
  thread_local std::map<int, Fft2d> plans;
  auto it = plans.find(n);
  if (it == plans.end()) it = plans.emplace(n, Fft2d(n)).first;
  it->second.forward_full(image.values(), spectrum);

  PsdCurve curve;
  curve.power.assign(nbins, 0.0);
  curve.counts.assign(nbins, 0);
  const double scale = 1.0 / (static_cast<double>(n) * n);  // |F/N|^2
  for (int u = 0; u < n; ++u) {
    const int ku = u < n / 2 ? u : u - n;
    for (int v = 0; v < n; ++v) {
      const int kv = v < n / 2 ? v : v - n;
      const long bin = std::lround(std::sqrt(static_cast<double>(ku * ku + kv * kv)));
      if (bin < 1 || bin > nbins) continue;
      curve.power[bin - 1] += std::norm(spectrum[static_cast<std::size_t>(u) * n + v]) * scale;
      curve.counts[bin - 1] += 1;
    }
  }
  for (int b = 0; b < nbins; ++b) curve.power[b] /= curve.counts[b];
  return curve;
}

double ac_power(const GrayImage& image) {
  // Parseval: sum over non-DC frequencies of |F/N|^2 = sum (u - mean)^2.
  double mean = 0.0;
  for (double v : image.values()) mean += v;
  mean /= static_cast<double>(image.size());
  double total = 0.0;
  for (double v : image.values()) total += (v - mean) * (v - mean);
  return total;
}

}  // namespace

PsdCurve radial_psd(const GrayImage& image, PsdNormalization normalization) {
  if (image.is_constant()) throw Error(Errc::DegenerateImage, "constant image has no AC power");
  PsdCurve curve = raw_radial_power(image);
  if (normalization == PsdNormalization::TotalAcPower) {
    const double total = ac_power(image);
    for (double& p : curve.power) p /= total;
  }
  return curve;
}

PowerLawFit fit_power_law(const PsdCurve& curve) {
  const double peak = curve.power.empty() ? 0.0 : *std::max_element(curve.power.begin(), curve.power.end());
  const double floor = peak * 1e-20;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < curve.bins(); ++i) {
    if (curve.power[i] > floor && curve.power[i] > 0.0) {
      xs.push_back(std::log10(static_cast<double>(curve.wavenumber(i))));
      ys.push_back(std::log10(curve.power[i]));
    }
  }
  if (xs.size() < 2) throw Error(Errc::FitUnderdetermined, "fewer than two bins with positive power");

  const auto n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  return PowerLawFit{std::pow(10.0, intercept), slope};
}

PowerLawFit physfeat1(const GrayImage& image) { return fit_power_law(radial_psd(image)); }

FeatureVector physfeat2(const GrayImage& image) {
  const PsdCurve original = radial_psd(image, PsdNormalization::Raw);
  const GrayImage gradient = gradient_magnitude(image);
  FeatureVector out;
  out.reserve(2 * original.bins());
  for (double p : original.power) out.push_back(std::log10(p + 1.0));
  if (gradient.is_constant()) {
    out.insert(out.end(), original.bins(), 0.0);
  } else {
    for (double p : raw_radial_power(gradient).power) out.push_back(std::log10(p + 1.0));
  }
  return out;
}

bool is_image_feature(std::string_view name) { return name == "grad" || name == "physfeat1" || name == "physfeat2"; }

FeatureVector extract(std::string_view name, const GrayImage& image) {
  if (name == "grad") return {grad_feature(image)};
  if (name == "physfeat1") return physfeat1(image).as_vector();
  if (name == "physfeat2") return physfeat2(image);
  throw Error(Errc::InvalidArgument, "unknown feature '" + std::string(name) + "'");
}

}  // namespace microprop::features
