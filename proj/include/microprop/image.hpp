#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace microprop {

/// 8-bit grayscale raster, row-major.
struct Image8 {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> pixels;

  Image8() = default;
  Image8(int r, int c, std::uint8_t fill = 0);

  std::uint8_t at(int r, int c) const { return pixels[static_cast<std::size_t>(r) * cols + c]; }
  std::uint8_t& at(int r, int c) { return pixels[static_cast<std::size_t>(r) * cols + c]; }
  bool operator==(const Image8&) const = default;
};

/// Real-valued grayscale image, row-major. Feature pipelines treat it as
/// periodic in both directions.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int rows, int cols, double fill = 0.0);
  GrayImage(int rows, int cols, std::vector<double> values);
  explicit GrayImage(const Image8& image);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }
  bool square() const { return rows_ == cols_; }

  double at(int r, int c) const { return values_[static_cast<std::size_t>(r) * cols_ + c]; }
  double& at(int r, int c) { return values_[static_cast<std::size_t>(r) * cols_ + c]; }
  /// Periodic access; any integer index is wrapped onto the grid.
  double wrapped(int r, int c) const;

  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  bool is_constant() const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> values_;
};

// Symmetry operations used by the invariance tests and exposed for callers.
GrayImage flip_horizontal(const GrayImage& image);
GrayImage flip_vertical(const GrayImage& image);
/// Rotate by 90 degrees counter-clockwise.
GrayImage rotate90(const GrayImage& image);
GrayImage cyclic_shift(const GrayImage& image, int dr, int dc);

void write_png(const Image8& image, const std::filesystem::path& path);
Image8 read_png(const std::filesystem::path& path);

}  // namespace microprop
