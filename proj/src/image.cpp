#include "adavu/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "adavu/csv.hpp"
#include "adavu/error.hpp"

namespace adavu {

namespace fs = std::filesystem;

namespace {

void check_dims(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw DomainError("image dimensions must be positive, got " + std::to_string(width) + "x" +
                      std::to_string(height));
  }
}

// Reads the next header token of a PNM file, skipping comments.
std::string pnm_token(std::istream& in) {
  std::string token;
  char c = 0;
  while (in.get(c)) {
    if (c == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(c);
  }
  return token;
}

struct PnmHeader {
  int width = 0;
  int height = 0;
};

PnmHeader read_pnm_header(std::istream& in, const std::string& magic, const std::string& path) {
  if (pnm_token(in) != magic) throw DomainError(path + ": expected " + magic + " image");
  PnmHeader h;
  try {
    h.width = std::stoi(pnm_token(in));
    h.height = std::stoi(pnm_token(in));
    if (std::stoi(pnm_token(in)) != 255) throw DomainError(path + ": only maxval 255 is supported");
  } catch (const std::logic_error&) {
    throw DomainError(path + ": malformed image header");
  }
  check_dims(h.width, h.height);
  return h;
}

}  // namespace

GrayFrame::GrayFrame(int width, int height, std::uint8_t fill) : width_(width), height_(height) {
  check_dims(width, height);
  pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayFrame::GrayFrame(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_dims(width, height);
  if (pixels_.size() != static_cast<std::size_t>(width) * height) {
    throw DomainError("pixel buffer size does not match " + std::to_string(width) + "x" +
                      std::to_string(height));
  }
}

ColorFrame::ColorFrame(int width, int height) : width_(width), height_(height) {
  check_dims(width, height);
  data_.assign(static_cast<std::size_t>(width) * height * 3, 0);
}

std::array<std::uint8_t, 3> ColorFrame::at(int x, int y) const {
  const auto i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  return {data_[i], data_[i + 1], data_[i + 2]};
}

void ColorFrame::set(int x, int y, std::array<std::uint8_t, 3> rgb) {
  const auto i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  data_[i] = rgb[0];
  data_[i + 1] = rgb[1];
  data_[i + 2] = rgb[2];
}

std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const double y = 0.299 * r + 0.587 * g + 0.114 * b;
  return static_cast<std::uint8_t>(std::clamp(std::lround(y), 0L, 255L));
}

GrayFrame to_gray(const ColorFrame& rgb) {
  GrayFrame out(rgb.width(), rgb.height());
  for (int y = 0; y < rgb.height(); ++y) {
    for (int x = 0; x < rgb.width(); ++x) {
      const auto p = rgb.at(x, y);
      out.at(x, y) = luminance(p[0], p[1], p[2]);
    }
  }
  return out;
}

GrayFrame resize_bilinear(const GrayFrame& src, int width, int height) {
  check_dims(width, height);
  if (src.width() == width && src.height() == height) return src;
  GrayFrame out(width, height);
  const double sx = static_cast<double>(src.width()) / width;
  const double sy = static_cast<double>(src.height()) / height;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, src.height() - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, src.height() - 1);
    const double wy = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, src.width() - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, src.width() - 1);
      const double wx = fx - x0;
      const double top = (1 - wx) * src.at(x0, y0) + wx * src.at(x1, y0);
      const double bottom = (1 - wx) * src.at(x0, y1) + wx * src.at(x1, y1);
      const double v = (1 - wy) * top + wy * bottom;
      out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  }
  return out;
}

GrayFrame read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path + " for reading");
  const auto h = read_pnm_header(in, "P5", path);
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(h.width) * h.height);
  in.read(reinterpret_cast<char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(pixels.size())) {
    throw DomainError(path + ": truncated pixel data");
  }
  return GrayFrame(h.width, h.height, std::move(pixels));
}

void write_pgm(const std::string& path, const GrayFrame& frame) {
  auto out = csv::open_for_write(path);
  out << "P5\n" << frame.width() << ' ' << frame.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.pixels().data()),
            static_cast<std::streamsize>(frame.size()));
  if (!out) throw IoError("write failed for " + path);
}

ColorFrame read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path + " for reading");
  const auto h = read_pnm_header(in, "P6", path);
  ColorFrame frame(h.width, h.height);
  std::vector<char> buf(static_cast<std::size_t>(h.width) * h.height * 3);
  in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (in.gcount() != static_cast<std::streamsize>(buf.size())) {
    throw DomainError(path + ": truncated pixel data");
  }
  for (int y = 0; y < h.height; ++y) {
    for (int x = 0; x < h.width; ++x) {
      const auto i = (static_cast<std::size_t>(y) * h.width + x) * 3;
      frame.set(x, y,
                {static_cast<std::uint8_t>(buf[i]), static_cast<std::uint8_t>(buf[i + 1]),
                 static_cast<std::uint8_t>(buf[i + 2])});
    }
  }
  return frame;
}

void write_ppm(const std::string& path, const ColorFrame& frame) {
  auto out = csv::open_for_write(path);
  out << "P6\n" << frame.width() << ' ' << frame.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.data().data()),
            static_cast<std::streamsize>(frame.data().size()));
  if (!out) throw IoError("write failed for " + path);
}

std::string descriptor_path(const std::string& raw_path) {
  return fs::path(raw_path).replace_extension(".desc").string();
}

void write_raw_stream(const std::string& raw_path, std::span<const GrayFrame> frames) {
  if (frames.empty()) throw DomainError("cannot write an empty frame stream");
  const int w = frames.front().width();
  const int h = frames.front().height();
  auto out = csv::open_for_write(raw_path);
  for (const auto& f : frames) {
    if (f.width() != w || f.height() != h) throw DomainError("frames of a stream must share dimensions");
    out.write(reinterpret_cast<const char*>(f.pixels().data()), static_cast<std::streamsize>(f.size()));
  }
  if (!out) throw IoError("write failed for " + raw_path);
  auto desc = csv::open_for_write(descriptor_path(raw_path));
  desc << "width=" << w << "\nheight=" << h << "\ncount=" << frames.size() << '\n';
  if (!desc) throw IoError("write failed for " + descriptor_path(raw_path));
}

std::vector<GrayFrame> read_raw_stream(const std::string& raw_path) {
  const auto desc_path = descriptor_path(raw_path);
  std::ifstream desc(desc_path);
  if (!desc) throw IoError("cannot open descriptor " + desc_path);
  long width = -1, height = -1, count = -1;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(desc, line)) {
    ++lineno;
    const auto text = csv::trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ParseError(desc_path, lineno, "expected key=value");
    const std::string key(csv::trim(text.substr(0, eq)));
    long value = 0;
    try {
      value = std::stol(std::string(csv::trim(text.substr(eq + 1))));
    } catch (const std::logic_error&) {
      throw ParseError(desc_path, lineno, "invalid integer for " + key);
    }
    if (key == "width") width = value;
    else if (key == "height") height = value;
    else if (key == "count") count = value;
    else throw ParseError(desc_path, lineno, "unknown key `" + key + "`");
  }
  if (width <= 0 || height <= 0 || count < 0) {
    throw DomainError(desc_path + ": descriptor needs positive width, height and a count");
  }
  std::ifstream in(raw_path, std::ios::binary);
  if (!in) throw IoError("cannot open " + raw_path + " for reading");
  std::vector<GrayFrame> frames;
  frames.reserve(static_cast<std::size_t>(count));
  const auto frame_bytes = static_cast<std::size_t>(width * height);
  for (long i = 0; i < count; ++i) {
    std::vector<std::uint8_t> px(frame_bytes);
    in.read(reinterpret_cast<char*>(px.data()), static_cast<std::streamsize>(frame_bytes));
    if (in.gcount() != static_cast<std::streamsize>(frame_bytes)) {
      throw DomainError(raw_path + ": truncated at frame " + std::to_string(i));
    }
    frames.emplace_back(static_cast<int>(width), static_cast<int>(height), std::move(px));
  }
  return frames;
}

std::vector<GrayFrame> read_pgm_directory(const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<GrayFrame> frames;
  frames.reserve(files.size());
  for (const auto& p : files) frames.push_back(read_pgm(p.string()));
  return frames;
}

std::vector<GrayFrame> read_frame_stream(const std::string& path) {
  if (fs::is_directory(path)) return read_pgm_directory(path);
  if (!fs::exists(path)) throw IoError("frame stream " + path + " does not exist");
  return read_raw_stream(path);
}

}  // namespace adavu
