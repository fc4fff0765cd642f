#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace adavu {

// Row-major 8-bit grayscale image.
class GrayFrame {
 public:
  GrayFrame() = default;
  GrayFrame(int width, int height, std::uint8_t fill = 0);
  GrayFrame(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return pixels_.size(); }

  std::uint8_t at(int x, int y) const { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }
  std::uint8_t& at(int x, int y) { return pixels_[static_cast<std::size_t>(y) * width_ + x]; }

  std::span<const std::uint8_t> pixels() const { return pixels_; }
  std::span<std::uint8_t> pixels() { return pixels_; }

  friend bool operator==(const GrayFrame&, const GrayFrame&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> pixels_;
};

// Row-major interleaved RGB image.
class ColorFrame {
 public:
  ColorFrame() = default;
  ColorFrame(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }

  std::array<std::uint8_t, 3> at(int x, int y) const;
  void set(int x, int y, std::array<std::uint8_t, 3> rgb);

  std::span<const std::uint8_t> data() const { return data_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

// Rec. 601 luma, rounded to nearest.
std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b);
GrayFrame to_gray(const ColorFrame& rgb);

// Bilinear resampling with pixel-centre alignment; equal sizes copy exactly.
GrayFrame resize_bilinear(const GrayFrame& src, int width, int height);

// Binary portable graymap / pixmap (P5 / P6, maxval 255).
GrayFrame read_pgm(const std::string& path);
void write_pgm(const std::string& path, const GrayFrame& frame);
ColorFrame read_ppm(const std::string& path);
void write_ppm(const std::string& path, const ColorFrame& frame);

// Packed stream: `<stem>.raw` holds width*height bytes per frame back to back,
// `<stem>.desc` holds `width=`, `height=`, `count=` lines.
void write_raw_stream(const std::string& raw_path, std::span<const GrayFrame> frames);
std::vector<GrayFrame> read_raw_stream(const std::string& raw_path);
std::string descriptor_path(const std::string& raw_path);

// Every `*.pgm` file of a directory in lexicographic name order.
std::vector<GrayFrame> read_pgm_directory(const std::string& dir);

// Dispatches on the path: a directory is read as PGM files, anything else as
// a packed raw stream.
std::vector<GrayFrame> read_frame_stream(const std::string& path);

}  // namespace adavu
