#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <png.h>

#include "unfoldir/errors.hpp"
#include "unfoldir/image.hpp"

namespace unfoldir {

namespace detail {

inline std::vector<unsigned char> read_file_bytes(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(f)),
                                 std::istreambuf_iterator<char>());
  return buf;
}

inline bool is_ppm_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n';
}

// Whitespace and #-comments are legal between header tokens.
inline void ppm_skip_separators(const std::vector<unsigned char>& buf, std::size_t& pos) {
  while (pos < buf.size()) {
    if (is_ppm_space(buf[pos])) {
      ++pos;
    } else if (buf[pos] == '#') {
      while (pos < buf.size() && buf[pos] != '\n') ++pos;
    } else {
      return;
    }
  }
}

inline unsigned ppm_parse_uint(const std::vector<unsigned char>& buf, std::size_t& pos,
                               const char* what) {
  ppm_skip_separators(buf, pos);
  if (pos >= buf.size() || buf[pos] < '0' || buf[pos] > '9')
    throw IoError(std::string("ppm: expected ") + what + " (at byte " +
                      std::to_string(pos) + ")",
                  pos);
  unsigned long v = 0;
  while (pos < buf.size() && buf[pos] >= '0' && buf[pos] <= '9') {
    v = v * 10 + (buf[pos] - '0');
    if (v > 1000000000UL)
      throw IoError(std::string("ppm: ") + what + " out of range (at byte " +
                        std::to_string(pos) + ")",
                    pos);
    ++pos;
  }
  return static_cast<unsigned>(v);
}

inline Image read_ppm(const std::vector<unsigned char>& buf) {
  const int channels = buf[1] == '6' ? 3 : 1;
  std::size_t pos = 2;
  const unsigned w = ppm_parse_uint(buf, pos, "width");
  const unsigned h = ppm_parse_uint(buf, pos, "height");
  const unsigned maxval = ppm_parse_uint(buf, pos, "maxval");
  if (w == 0 || h == 0)
    throw IoError("ppm: zero dimension (at byte " + std::to_string(pos) + ")", pos);
  if (maxval != 255)
    throw IoError("ppm: only maxval 255 supported (at byte " + std::to_string(pos) + ")",
                  pos);
  if (pos >= buf.size() || !is_ppm_space(buf[pos]))
    throw IoError("ppm: expected whitespace before pixel data (at byte " +
                      std::to_string(pos) + ")",
                  pos);
  ++pos;  // exactly one separator byte, then binary payload

  const std::size_t need = static_cast<std::size_t>(w) * h * channels;
  if (buf.size() - pos < need)
    throw IoError("ppm: truncated pixel data (at byte " + std::to_string(buf.size()) + ")",
                  buf.size());

  Image img(static_cast<int>(h), static_cast<int>(w), channels);
  for (unsigned y = 0; y < h; ++y)
    for (unsigned x = 0; x < w; ++x)
      for (int c = 0; c < channels; ++c)
        img.channel(c).at(y, x) = buf[pos + (static_cast<std::size_t>(y) * w + x) * channels + c] / 255.0;
  return img;
}

inline unsigned char to_byte(double v) {
  const long q = std::lround(v * 255.0);
  return static_cast<unsigned char>(std::clamp(q, 0L, 255L));
}

inline void write_ppm(const Image& img, const std::string& path) {
  const int ch = img.channels();
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  f << (ch == 3 ? "P6" : "P5") << "\n" << img.width() << " " << img.height() << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(img.width()) * ch);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < ch; ++c)
        row[static_cast<std::size_t>(x) * ch + c] = to_byte(img.channel(c).at(y, x));
    f.write(reinterpret_cast<const char*>(row.data()), row.size());
  }
  if (!f) throw IoError("write failed for " + path);
}

inline Image read_png(const std::string& path) {
  png_image pim;
  std::memset(&pim, 0, sizeof pim);
  pim.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&pim, path.c_str()))
    throw IoError("png: " + std::string(pim.message));
  if (pim.format & PNG_FORMAT_FLAG_ALPHA) {
    png_image_free(&pim);
    throw IoError("png: alpha channels not supported");
  }
  const bool color = (pim.format & PNG_FORMAT_FLAG_COLOR) != 0;
  pim.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const int ch = color ? 3 : 1;
  std::vector<unsigned char> buf(PNG_IMAGE_SIZE(pim));
  if (!png_image_finish_read(&pim, nullptr, buf.data(), 0, nullptr))
    throw IoError("png: " + std::string(pim.message));
  const int h = static_cast<int>(pim.height), w = static_cast<int>(pim.width);
  Image img(h, w, ch);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < ch; ++c)
        img.channel(c).at(y, x) = buf[(static_cast<std::size_t>(y) * w + x) * ch + c] / 255.0;
  return img;
}

inline void write_png(const Image& img, const std::string& path) {
  const int ch = img.channels();
  png_image pim;
  std::memset(&pim, 0, sizeof pim);
  pim.version = PNG_IMAGE_VERSION;
  pim.width = static_cast<png_uint_32>(img.width());
  pim.height = static_cast<png_uint_32>(img.height());
  pim.format = ch == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<unsigned char> buf(static_cast<std::size_t>(img.height()) * img.width() * ch);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < ch; ++c)
        buf[(static_cast<std::size_t>(y) * img.width() + x) * ch + c] =
            to_byte(img.channel(c).at(y, x));
  if (!png_image_write_to_file(&pim, path.c_str(), 0, buf.data(), 0, nullptr))
    throw IoError("png: " + std::string(pim.message));
}

}  // namespace detail

// Format is decided by content, not extension: binary PPM/PGM magic or the
// PNG signature. Intensities map v/255 onto [0,1].
inline Image read_image(const std::string& path) {
  std::vector<unsigned char> buf = detail::read_file_bytes(path);
  if (buf.size() >= 2 && buf[0] == 'P' && (buf[1] == '6' || buf[1] == '5'))
    return detail::read_ppm(buf);
  static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (buf.size() >= 8 && std::memcmp(buf.data(), png_sig, 8) == 0)
    return detail::read_png(path);
  throw IoError("unrecognized image format (at byte 0)", 0);
}

// Output format follows the extension; round(v*255) clamped, so an 8-bit
// read/write/read loop is the identity.
inline void write_image(const Image& img, const std::string& path) {
  auto ends_with = [&path](const char* suf) {
    const std::size_t n = std::strlen(suf);
    if (path.size() < n) return false;
    for (std::size_t i = 0; i < n; ++i) {
      char a = path[path.size() - n + i];
      if (a >= 'A' && a <= 'Z') a = static_cast<char>(a - 'A' + 'a');
      if (a != suf[i]) return false;
    }
    return true;
  };
  if (ends_with(".ppm") || ends_with(".pgm"))
    detail::write_ppm(img, path);
  else if (ends_with(".png"))
    detail::write_png(img, path);
  else
    throw IoError("unsupported output format for " + path + " (use .ppm, .pgm or .png)");
}

}  // namespace unfoldir
