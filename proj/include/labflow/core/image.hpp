#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace labflow {

// Interleaved 8-bit RGB pixmap, row-major.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  Image() = default;
  Image(int w, int h, std::uint8_t fill = 0);

  std::size_t index(int x, int y) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) * 3;
  }
  void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b);
  bool valid() const {
    return width >= 1 && height >= 1 && rgb.size() == static_cast<std::size_t>(width) * height * 3;
  }

  friend bool operator==(const Image&, const Image&) = default;
};

// Binary P6 portable pixmap, maxval 255.
std::string encode_ppm(const Image& image);
Image decode_ppm(std::span<const std::uint8_t> bytes);
Image read_ppm(const std::filesystem::path& path);
void write_ppm(const Image& image, const std::filesystem::path& path);

// Truecolor, non-interlaced PNG (zlib-compressed scanlines, filter type 0).
std::string encode_png(const Image& image);

std::string base64_encode(std::span<const std::uint8_t> bytes);
inline std::string base64_encode(const std::string& bytes) {
  return base64_encode(std::span(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

}  // namespace labflow
