#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mfp/error.hpp"

namespace mfp {

struct PixelCoord {
  int row = 0;
  int col = 0;

  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

// Squared Euclidean distance between pixel centers.
inline double squared_distance(PixelCoord a, PixelCoord b) {
  const double dr = static_cast<double>(a.row) - b.row;
  const double dc = static_cast<double>(a.col) - b.col;
  return dr * dr + dc * dc;
}

double distance(PixelCoord a, PixelCoord b);

struct Size {
  int width = 0;
  int height = 0;

  std::size_t area() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
  bool contains(PixelCoord p) const { return p.row >= 0 && p.col >= 0 && p.row < height && p.col < width; }
  friend bool operator==(const Size&, const Size&) = default;
};

// Row-major 2-D storage. Concrete grid types layer value invariants on top.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(Size size, T fill) : size_(check_size(size)), values_(size_.area(), fill) {}
  Grid(Size size, std::vector<T> values) : size_(check_size(size)), values_(std::move(values)) {
    if (values_.size() != size_.area()) throw DimensionMismatch("grid value count does not match width*height");
  }

  Size size() const { return size_; }
  int width() const { return size_.width; }
  int height() const { return size_.height; }
  bool contains(PixelCoord p) const { return size_.contains(p); }

  const T& at(PixelCoord p) const { return values_[index(p)]; }
  const T& at(int row, int col) const { return at(PixelCoord{row, col}); }
  const T& operator[](std::size_t i) const { return values_[i]; }
  std::span<const T> values() const { return values_; }
  std::size_t index(PixelCoord p) const {
    return static_cast<std::size_t>(p.row) * static_cast<std::size_t>(size_.width) + static_cast<std::size_t>(p.col);
  }
  PixelCoord coord(std::size_t i) const {
    return {static_cast<int>(i / static_cast<std::size_t>(size_.width)),
            static_cast<int>(i % static_cast<std::size_t>(size_.width))};
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 protected:
  T& mutable_at(std::size_t i) { return values_[i]; }

 private:
  static Size check_size(Size s) {
    if (s.width < 1 || s.height < 1) throw InvalidArgument("grid dimensions must be at least 1x1");
    return s;
  }

  Size size_{};
  std::vector<T> values_;
};

// Per-pixel foreground probabilities, each in [0, 1].
class ProbabilityGrid : public Grid<double> {
 public:
  ProbabilityGrid() = default;
  ProbabilityGrid(Size size, double fill);
  ProbabilityGrid(Size size, std::vector<double> values);

  void set(PixelCoord p, double v);
  static ProbabilityGrid zeros(Size size) { return ProbabilityGrid(size, 0.0); }
};

// Binary labels, each exactly 0 or 1.
class BinaryMask : public Grid<std::uint8_t> {
 public:
  BinaryMask() = default;
  explicit BinaryMask(Size size, bool fill = false);
  BinaryMask(Size size, std::vector<std::uint8_t> values);

  void set(PixelCoord p, bool v) { mutable_at(index(p)) = v ? 1 : 0; }
  bool test(PixelCoord p) const { return at(p) != 0; }
  std::size_t count() const;
  bool empty() const { return count() == 0; }
};

using DistanceGrid = Grid<double>;

enum class Label { background, foreground };

struct Click {
  PixelCoord pos;
  Label label = Label::foreground;
  int index = 1;

  friend bool operator==(const Click&, const Click&) = default;
};

// Clicks in round order; indices are always 1..n.
class ClickHistory {
 public:
  ClickHistory() = default;
  explicit ClickHistory(std::vector<Click> clicks);

  // Appends a click at position/label with index size()+1.
  const Click& add(PixelCoord pos, Label label);
  void add(const Click& click);
  void pop_back();

  std::size_t size() const { return clicks_.size(); }
  bool empty() const { return clicks_.empty(); }
  const Click& back() const { return clicks_.back(); }
  const Click& operator[](std::size_t i) const { return clicks_[i]; }
  std::span<const Click> clicks() const { return clicks_; }
  auto begin() const { return clicks_.begin(); }
  auto end() const { return clicks_.end(); }

  // The first n clicks.
  ClickHistory prefix(std::size_t n) const;

  friend bool operator==(const ClickHistory&, const ClickHistory&) = default;

 private:
  std::vector<Click> clicks_;
};

struct Component {
  std::vector<PixelCoord> pixels;  // row-major order
  std::size_t area() const { return pixels.size(); }
};

// |a ∩ b| / |a ∪ b|; two empty masks score 1.
double iou(const BinaryMask& a, const BinaryMask& b);

// Pixel is 1 iff p >= tau.
BinaryMask threshold(const ProbabilityGrid& p, double tau = 0.5);

// Exact Euclidean distance from each pixel to the nearest 0-pixel, with
// everything outside the grid counted as 0.
DistanceGrid distance_to_zero(const BinaryMask& m);

// 4-connected components of the 1-pixels, ordered by area descending and
// then by first row-major pixel.
std::vector<Component> connected_components(const BinaryMask& m);

}  // namespace mfp
