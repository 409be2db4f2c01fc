#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mfp/grid.hpp"
#include "mfp/segmenter.hpp"

namespace mfp::io {

using Bytes = std::vector<std::uint8_t>;

// MFPGRID v1: "MFPGRID 1 <width> <height>\n" followed by width*height
// little-endian float32 values, row-major. Values are narrowed to float on
// write; reading widens them back to double exactly.
Bytes encode_grid(const Grid<double>& grid);
Grid<double> decode_grid(std::span<const std::uint8_t> bytes);
ProbabilityGrid decode_probability_grid(std::span<const std::uint8_t> bytes);

void write_grid(const std::filesystem::path& path, const Grid<double>& grid);
ProbabilityGrid read_probability_grid(const std::filesystem::path& path);

// 8-bit grayscale PNG, 0 or 255 per pixel. Reading accepts any PNG and maps
// nonzero luminance to 1.
Bytes encode_mask_png(const BinaryMask& mask);
BinaryMask decode_mask_png(std::span<const std::uint8_t> bytes);
void write_mask_png(const std::filesystem::path& path, const BinaryMask& mask);
BinaryMask read_mask_png(const std::filesystem::path& path);

// Any PNG color type is converted to 8-bit RGB, then scaled to [0,1].
Bytes encode_image_png(const ImageRGB& image);
ImageRGB decode_image_png(std::span<const std::uint8_t> bytes);
void write_image_png(const std::filesystem::path& path, const ImageRGB& image);
ImageRGB read_image_png(const std::filesystem::path& path);

// Click descriptor: one click per line, "row col fg|bg index". Blank lines and
// lines starting with '#' are ignored.
ClickHistory parse_clicks(std::string_view text);
std::string format_clicks(const ClickHistory& history);

std::string base64_encode(std::span<const std::uint8_t> bytes);
Bytes base64_decode(std::string_view text);

Bytes read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace mfp::io
