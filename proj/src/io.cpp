#include "mfp/io.hpp"

#include <png.h>

#include <bit>
#include <boost/beast/core/detail/base64.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

namespace mfp::io {

namespace {

constexpr std::string_view kGridMagic = "MFPGRID";

void append_u32_le(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xffu));
}

std::uint32_t read_u32_le(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

// Parses a non-negative decimal token, advancing `pos` past it.
long long parse_int(std::string_view s, std::size_t& pos) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + s.size(), v);
  if (ec != std::errc() || ptr == s.data() + pos) throw FormatError("MFPGRID header: expected integer");
  pos = static_cast<std::size_t>(ptr - s.data());
  return v;
}

void expect_char(std::string_view s, std::size_t& pos, char c) {
  if (pos >= s.size() || s[pos] != c) throw FormatError("MFPGRID header: malformed");
  ++pos;
}

struct PngImage {
  png_image img{};
  PngImage() { img.version = PNG_IMAGE_VERSION; }
  ~PngImage() { png_image_free(&img); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

Bytes read_png_pixels(std::span<const std::uint8_t> bytes, png_uint_32 format, Size& size) {
  PngImage png;
  if (!png_image_begin_read_from_memory(&png.img, bytes.data(), bytes.size())) {
    throw FormatError(std::string("PNG decode failed: ") + png.img.message);
  }
  png.img.format = format;
  if (png.img.width == 0 || png.img.height == 0 || png.img.width > (1u << 15) || png.img.height > (1u << 15)) {
    throw FormatError("PNG dimensions out of range");
  }
  Bytes pixels(PNG_IMAGE_SIZE(png.img));
  if (!png_image_finish_read(&png.img, nullptr, pixels.data(), 0, nullptr)) {
    throw FormatError(std::string("PNG decode failed: ") + png.img.message);
  }
  size = Size{static_cast<int>(png.img.width), static_cast<int>(png.img.height)};
  return pixels;
}

Bytes write_png_pixels(const Bytes& pixels, Size size, png_uint_32 format) {
  PngImage png;
  png.img.width = static_cast<png_uint_32>(size.width);
  png.img.height = static_cast<png_uint_32>(size.height);
  png.img.format = format;
  png_alloc_size_t len = 0;
  if (!png_image_write_to_memory(&png.img, nullptr, &len, 0, pixels.data(), 0, nullptr)) {
    throw Error(std::string("PNG encode failed: ") + png.img.message);
  }
  Bytes out(len);
  if (!png_image_write_to_memory(&png.img, out.data(), &len, 0, pixels.data(), 0, nullptr)) {
    throw Error(std::string("PNG encode failed: ") + png.img.message);
  }
  out.resize(len);
  return out;
}

}  // namespace

Bytes encode_grid(const Grid<double>& grid) {
  const std::string header =
      std::string(kGridMagic) + " 1 " + std::to_string(grid.width()) + " " + std::to_string(grid.height()) + "\n";
  Bytes out(header.begin(), header.end());
  out.reserve(out.size() + 4 * grid.size().area());
  for (double v : grid.values()) append_u32_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  return out;
}

Grid<double> decode_grid(std::span<const std::uint8_t> bytes) {
  const std::size_t nl_limit = std::min<std::size_t>(bytes.size(), 64);
  std::size_t nl = 0;
  while (nl < nl_limit && bytes[nl] != '\n') ++nl;
  if (nl == nl_limit) throw FormatError("MFPGRID header: missing newline");
  const std::string_view header(reinterpret_cast<const char*>(bytes.data()), nl);

  if (header.substr(0, kGridMagic.size()) != kGridMagic) throw FormatError("not an MFPGRID file");
  std::size_t pos = kGridMagic.size();
  expect_char(header, pos, ' ');
  if (parse_int(header, pos) != 1) throw FormatError("unsupported MFPGRID version");
  expect_char(header, pos, ' ');
  const long long w = parse_int(header, pos);
  expect_char(header, pos, ' ');
  const long long h = parse_int(header, pos);
  if (pos != header.size()) throw FormatError("MFPGRID header: trailing characters");
  if (w < 1 || h < 1 || w > (1 << 15) || h > (1 << 15)) throw FormatError("MFPGRID dimensions out of range");

  const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  const auto payload = bytes.subspan(nl + 1);
  if (payload.size() != 4 * count) throw FormatError("MFPGRID payload size does not match dimensions");
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    values[i] = static_cast<double>(std::bit_cast<float>(read_u32_le(payload.data() + 4 * i)));
  }
  return Grid<double>(Size{static_cast<int>(w), static_cast<int>(h)}, std::move(values));
}

ProbabilityGrid decode_probability_grid(std::span<const std::uint8_t> bytes) {
  Grid<double> g = decode_grid(bytes);
  std::vector<double> v(g.values().begin(), g.values().end());
  try {
    return ProbabilityGrid(g.size(), std::move(v));
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("MFPGRID is not a probability map: ") + e.what());
  }
}

void write_grid(const std::filesystem::path& path, const Grid<double>& grid) { write_file(path, encode_grid(grid)); }

ProbabilityGrid read_probability_grid(const std::filesystem::path& path) {
  return decode_probability_grid(read_file(path));
}

Bytes encode_mask_png(const BinaryMask& mask) {
  Bytes px(mask.size().area());
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = mask[i] ? 255 : 0;
  return write_png_pixels(px, mask.size(), PNG_FORMAT_GRAY);
}

BinaryMask decode_mask_png(std::span<const std::uint8_t> bytes) {
  Size size;
  Bytes px = read_png_pixels(bytes, PNG_FORMAT_GRAY, size);
  for (auto& v : px) v = v != 0 ? 1 : 0;
  return BinaryMask(size, std::move(px));
}

void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask) {
  write_file(path, encode_mask_png(mask));
}

BinaryMask read_mask_png(const std::filesystem::path& path) { return decode_mask_png(read_file(path)); }

Bytes encode_image_png(const ImageRGB& image) {
  Bytes px;
  px.reserve(3 * image.size().area());
  for (const auto& p : image.pixels()) {
    for (double v : p) px.push_back(static_cast<std::uint8_t>(std::lround(v * 255.0)));
  }
  return write_png_pixels(px, image.size(), PNG_FORMAT_RGB);
}

ImageRGB decode_image_png(std::span<const std::uint8_t> bytes) {
  Size size;
  const Bytes px = read_png_pixels(bytes, PNG_FORMAT_RGB, size);
  std::vector<ImageRGB::Pixel> pixels(size.area());
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    pixels[i] = {px[3 * i] / 255.0, px[3 * i + 1] / 255.0, px[3 * i + 2] / 255.0};
  }
  return ImageRGB(size, std::move(pixels));
}

void write_image_png(const std::filesystem::path& path, const ImageRGB& image) {
  write_file(path, encode_image_png(image));
}

ImageRGB read_image_png(const std::filesystem::path& path) { return decode_image_png(read_file(path)); }

ClickHistory parse_clicks(std::string_view text) {
  ClickHistory history;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    Click c;
    std::string label;
    std::string extra;
    if (!(ls >> c.pos.row >> c.pos.col >> label >> c.index) || (ls >> extra)) {
      throw FormatError("clicks line " + std::to_string(lineno) + ": expected 'row col fg|bg index'");
    }
    if (label == "fg") {
      c.label = Label::foreground;
    } else if (label == "bg") {
      c.label = Label::background;
    } else {
      throw FormatError("clicks line " + std::to_string(lineno) + ": label must be fg or bg");
    }
    if (c.pos.row < 0 || c.pos.col < 0) throw FormatError("clicks line " + std::to_string(lineno) + ": negative coordinate");
    try {
      history.add(c);
    } catch (const InvalidArgument& e) {
      throw FormatError("clicks line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return history;
}

std::string format_clicks(const ClickHistory& history) {
  std::string out;
  for (const Click& c : history) {
    out += std::to_string(c.pos.row) + " " + std::to_string(c.pos.col) + " " +
           (c.label == Label::foreground ? "fg" : "bg") + " " + std::to_string(c.index) + "\n";
  }
  return out;
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  namespace b64 = boost::beast::detail::base64;
  std::string out(b64::encoded_size(bytes.size()), '\0');
  out.resize(b64::encode(out.data(), bytes.data(), bytes.size()));
  return out;
}

Bytes base64_decode(std::string_view text) {
  namespace b64 = boost::beast::detail::base64;
  if (text.size() % 4 != 0) throw FormatError("base64 length is not a multiple of 4");
  Bytes out(b64::decoded_size(text.size()));
  const auto [written, read] = b64::decode(out.data(), text.data(), text.size());
  // The decoder stops at the first character outside the alphabet; only padding may follow.
  for (std::size_t i = read; i < text.size(); ++i) {
    if (text[i] != '=' || text.size() - i > 2) throw FormatError("invalid base64 payload");
  }
  out.resize(written);
  return out;
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for " + path.string());
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace mfp::io
