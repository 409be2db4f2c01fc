#include "mfp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mfp {

double distance(PixelCoord a, PixelCoord b) { return std::sqrt(squared_distance(a, b)); }

ProbabilityGrid::ProbabilityGrid(Size size, double fill) : Grid<double>(size, fill) {
  if (!(fill >= 0.0 && fill <= 1.0)) throw InvalidArgument("probability fill value outside [0,1]");
}

ProbabilityGrid::ProbabilityGrid(Size size, std::vector<double> values) : Grid<double>(size, std::move(values)) {
  for (double v : this->values()) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("probability value outside [0,1]: " + std::to_string(v));
  }
}

void ProbabilityGrid::set(PixelCoord p, double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("probability value outside [0,1]");
  mutable_at(index(p)) = v;
}

BinaryMask::BinaryMask(Size size, bool fill) : Grid<std::uint8_t>(size, fill ? 1 : 0) {}

BinaryMask::BinaryMask(Size size, std::vector<std::uint8_t> values) : Grid<std::uint8_t>(size, std::move(values)) {
  for (auto v : this->values()) {
    if (v > 1) throw InvalidArgument("mask values must be 0 or 1");
  }
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(values().begin(), values().end(), std::uint8_t{1}));
}

ClickHistory::ClickHistory(std::vector<Click> clicks) {
  for (const auto& c : clicks) add(c);
}

const Click& ClickHistory::add(PixelCoord pos, Label label) {
  clicks_.push_back(Click{pos, label, static_cast<int>(clicks_.size()) + 1});
  return clicks_.back();
}

void ClickHistory::add(const Click& click) {
  if (click.index != static_cast<int>(clicks_.size()) + 1) {
    throw InvalidArgument("click index " + std::to_string(click.index) + " breaks the 1..n sequence");
  }
  clicks_.push_back(click);
}

void ClickHistory::pop_back() {
  if (clicks_.empty()) throw InvalidArgument("pop_back on empty click history");
  clicks_.pop_back();
}

ClickHistory ClickHistory::prefix(std::size_t n) const {
  ClickHistory out;
  out.clicks_.assign(clicks_.begin(), clicks_.begin() + static_cast<std::ptrdiff_t>(std::min(n, clicks_.size())));
  return out;
}

double iou(const BinaryMask& a, const BinaryMask& b) {
  if (a.size() != b.size()) throw DimensionMismatch("iou: mask dimensions differ");
  std::size_t inter = 0;
  std::size_t uni = 0;
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) {
    inter += static_cast<std::size_t>(av[i] & bv[i]);
    uni += static_cast<std::size_t>(av[i] | bv[i]);
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

BinaryMask threshold(const ProbabilityGrid& p, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw InvalidArgument("threshold must lie strictly inside (0,1)");
  std::vector<std::uint8_t> out(p.size().area());
  const auto v = p.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = v[i] >= tau ? 1 : 0;
  return BinaryMask(p.size(), std::move(out));
}

namespace {

// 1-D squared distance transform of a sampled function (lower envelope of
// parabolas). f holds 0 at sites and +inf elsewhere.
void squared_edt_1d(std::span<const double> f, std::span<double> out, std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  constexpr double inf = std::numeric_limits<double>::infinity();
  v.assign(static_cast<std::size_t>(n), 0);
  z.assign(static_cast<std::size_t>(n) + 1, 0.0);
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[static_cast<std::size_t>(q)] == inf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -inf;
      z[1] = inf;
      continue;
    }
    double s = 0.0;
    while (true) {
      const int p = v[static_cast<std::size_t>(k)];
      s = ((f[static_cast<std::size_t>(q)] + double(q) * q) - (f[static_cast<std::size_t>(p)] + double(p) * p)) /
          (2.0 * (q - p));
      if (s <= z[static_cast<std::size_t>(k)] && k > 0) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[static_cast<std::size_t>(k)] = q;
    z[static_cast<std::size_t>(k)] = s;
    z[static_cast<std::size_t>(k) + 1] = inf;
  }
  if (k < 0) {
    std::fill(out.begin(), out.end(), inf);
    return;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[static_cast<std::size_t>(k) + 1] < q) ++k;
    const int p = v[static_cast<std::size_t>(k)];
    const double d = double(q - p);
    out[static_cast<std::size_t>(q)] = d * d + f[static_cast<std::size_t>(p)];
  }
}

}  // namespace

DistanceGrid distance_to_zero(const BinaryMask& m) {
  // Work on a grid padded by one ring of zeros so out-of-bounds acts as background.
  const int w = m.width() + 2;
  const int h = m.height() + 2;
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> g(static_cast<std::size_t>(w) * h, 0.0);
  for (int r = 0; r < m.height(); ++r) {
    for (int c = 0; c < m.width(); ++c) {
      if (m.at(r, c)) g[static_cast<std::size_t>(r + 1) * w + (c + 1)] = inf;
    }
  }

  std::vector<int> v;
  std::vector<double> z;
  std::vector<double> line(static_cast<std::size_t>(std::max(w, h)));
  std::vector<double> res(line.size());

  for (int c = 0; c < w; ++c) {
    for (int r = 0; r < h; ++r) line[static_cast<std::size_t>(r)] = g[static_cast<std::size_t>(r) * w + c];
    squared_edt_1d(std::span<const double>(line.data(), static_cast<std::size_t>(h)),
                   std::span<double>(res.data(), static_cast<std::size_t>(h)), v, z);
    for (int r = 0; r < h; ++r) g[static_cast<std::size_t>(r) * w + c] = res[static_cast<std::size_t>(r)];
  }
  for (int r = 0; r < h; ++r) {
    std::span<double> row(g.data() + static_cast<std::size_t>(r) * w, static_cast<std::size_t>(w));
    std::copy(row.begin(), row.end(), line.begin());
    squared_edt_1d(std::span<const double>(line.data(), static_cast<std::size_t>(w)), row, v, z);
  }

  std::vector<double> out(m.size().area());
  for (int r = 0; r < m.height(); ++r) {
    for (int c = 0; c < m.width(); ++c) {
      out[static_cast<std::size_t>(r) * m.width() + c] = std::sqrt(g[static_cast<std::size_t>(r + 1) * w + (c + 1)]);
    }
  }
  return DistanceGrid(m.size(), std::move(out));
}

std::vector<Component> connected_components(const BinaryMask& m) {
  const std::size_t n = m.size().area();
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<Component> comps;
  std::vector<std::size_t> stack;
  constexpr int dr[4] = {-1, 1, 0, 0};
  constexpr int dc[4] = {0, 0, -1, 1};

  for (std::size_t start = 0; start < n; ++start) {
    if (!m[start] || seen[start]) continue;
    Component comp;
    seen[start] = 1;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      const PixelCoord p = m.coord(i);
      comp.pixels.push_back(p);
      for (int k = 0; k < 4; ++k) {
        const PixelCoord q{p.row + dr[k], p.col + dc[k]};
        if (!m.contains(q)) continue;
        const std::size_t j = m.index(q);
        if (m[j] && !seen[j]) {
          seen[j] = 1;
          stack.push_back(j);
        }
      }
    }
    std::sort(comp.pixels.begin(), comp.pixels.end(), [&](PixelCoord a, PixelCoord b) {
      return m.index(a) < m.index(b);
    });
    comps.push_back(std::move(comp));
  }
  // Discovery order is already by first pixel, so a stable sort on area suffices.
  std::stable_sort(comps.begin(), comps.end(), [](const Component& a, const Component& b) {
    return a.area() > b.area();
  });
  return comps;
}

}  // namespace mfp
