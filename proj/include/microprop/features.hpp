#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "microprop/image.hpp"

namespace microprop::features {

using FeatureVector = std::vector<double>;

/// Per-pixel |grad u| from periodic central differences,
/// du/dx = (u[i][j+1] - u[i][j-1]) / 2 and du/dy likewise along rows.
GrayImage gradient_magnitude(const GrayImage& image);

/// Mean gradient magnitude. Pixel values are summed in ascending order, so
/// the result is bit-identical under any permutation of equal per-pixel values
/// (flips, 90 degree rotations, cyclic shifts).
double grad_feature(const GrayImage& image);

enum class PsdNormalization {
  TotalAcPower,  ///< bin means divided by the summed power of all non-DC frequencies
  Raw,           ///< unitary-DFT power |F|^2, F = (1/N) sum u exp(-2 pi i k.x / N)
};

/// Radially averaged power spectrum. Entry k-1 holds bin k = 1..N/2.
///
/// Frequencies are taken on the centred grid [-N/2, N/2); a frequency joins
/// bin round(|k|). Radius 0 (DC) and radii beyond N/2 are dropped. Each bin
/// stores the mean power of its members.
struct PsdCurve {
  std::vector<double> power;
  std::vector<int> counts;  ///< number of frequencies per bin

  std::size_t bins() const { return power.size(); }
  int wavenumber(std::size_t i) const { return static_cast<int>(i) + 1; }
};

/// Requires a square image with even edge. Throws DegenerateImage when the
/// image is constant (zero AC power).
PsdCurve radial_psd(const GrayImage& image, PsdNormalization normalization = PsdNormalization::TotalAcPower);

/// P(k) ~ amplitude * k^slope.
struct PowerLawFit {
  double amplitude = 0.0;
  double slope = 0.0;

  FeatureVector as_vector() const { return {amplitude, slope}; }
};

/// Ordinary least squares of log10 P against log10 k over bins with
/// positive power. Bins below 1e-20 of the peak count as empty (FFT
/// round-off of an exactly zero bin). Throws FitUnderdetermined with fewer
/// than two usable bins.
PowerLawFit fit_power_law(const PsdCurve& curve);

/// Power-law fit of the normalized PSD.
PowerLawFit physfeat1(const GrayImage& image);

/// log10(1 + raw PSD) of the image, followed by the same for its gradient
/// magnitude; length N for an N x N image. A constant gradient channel yields
/// zeros; a constant image throws DegenerateImage.
FeatureVector physfeat2(const GrayImage& image);

/// Feature pipelines addressable by name: "grad", "physfeat1", "physfeat2".
/// Raw-pixel PCA needs a fitted model and lives in pca.hpp.
FeatureVector extract(std::string_view name, const GrayImage& image);
bool is_image_feature(std::string_view name);

}  // namespace microprop::features
