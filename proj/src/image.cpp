#include "microprop/image.hpp"

#include <algorithm>
#include <png.h>

#include "microprop/error.hpp"

namespace microprop {

Image8::Image8(int r, int c, std::uint8_t fill)
    : rows(r), cols(c), pixels(static_cast<std::size_t>(r) * c, fill) {}

GrayImage::GrayImage(int rows, int cols, double fill)
    : rows_(rows), cols_(cols), values_(static_cast<std::size_t>(rows) * cols, fill) {
  if (rows <= 0 || cols <= 0) throw Error(Errc::InvalidArgument, "image dimensions must be positive");
}

GrayImage::GrayImage(int rows, int cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (rows <= 0 || cols <= 0) throw Error(Errc::InvalidArgument, "image dimensions must be positive");
  if (values_.size() != static_cast<std::size_t>(rows) * cols)
    throw Error(Errc::InvalidArgument, "pixel count does not match dimensions");
}

GrayImage::GrayImage(const Image8& image)
    : GrayImage(image.rows, image.cols, std::vector<double>(image.pixels.begin(), image.pixels.end())) {}

double GrayImage::wrapped(int r, int c) const {
  r %= rows_;
  c %= cols_;
  if (r < 0) r += rows_;
  if (c < 0) c += cols_;
  return at(r, c);
}

bool GrayImage::is_constant() const {
  return std::all_of(values_.begin(), values_.end(), [&](double v) { return v == values_.front(); });
}

GrayImage flip_horizontal(const GrayImage& image) {
  GrayImage out(image.rows(), image.cols());
  for (int r = 0; r < image.rows(); ++r)
    for (int c = 0; c < image.cols(); ++c) out.at(r, c) = image.at(r, image.cols() - 1 - c);
  return out;
}

GrayImage flip_vertical(const GrayImage& image) {
  GrayImage out(image.rows(), image.cols());
  for (int r = 0; r < image.rows(); ++r)
    for (int c = 0; c < image.cols(); ++c) out.at(r, c) = image.at(image.rows() - 1 - r, c);
  return out;
}

GrayImage rotate90(const GrayImage& image) {
  GrayImage out(image.cols(), image.rows());
  for (int r = 0; r < image.rows(); ++r)
    for (int c = 0; c < image.cols(); ++c) out.at(image.cols() - 1 - c, r) = image.at(r, c);
  return out;
}

GrayImage cyclic_shift(const GrayImage& image, int dr, int dc) {
  GrayImage out(image.rows(), image.cols());
  for (int r = 0; r < image.rows(); ++r)
    for (int c = 0; c < image.cols(); ++c) out.at(r, c) = image.wrapped(r - dr, c - dc);
  return out;
}

void write_png(const Image8& image, const std::filesystem::path& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.cols);
  png.height = static_cast<png_uint_32>(image.rows);
  png.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&png, path.c_str(), 0, image.pixels.data(), image.cols, nullptr)) {
    std::string message = png.message;
    png_image_free(&png);
    throw Error(Errc::Io, "cannot write " + path.string() + ": " + message);
  }
}

Image8 read_png(const std::filesystem::path& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str()))
    throw Error(Errc::Io, "cannot read " + path.string() + ": " + png.message);
  png.format = PNG_FORMAT_GRAY;
  Image8 image(static_cast<int>(png.height), static_cast<int>(png.width));
  if (!png_image_finish_read(&png, nullptr, image.pixels.data(), image.cols, nullptr)) {
    std::string message = png.message;
    png_image_free(&png);
    throw Error(Errc::Io, "cannot decode " + path.string() + ": " + message);
  }
  return image;
}

}  // namespace microprop
