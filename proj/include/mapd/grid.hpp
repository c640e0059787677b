#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <functional>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mapd {

struct Cell {
  int x = 0;
  int y = 0;

  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;
};

/// Row-major order (y first), used wherever cells must be enumerated deterministically.
struct RowMajorLess {
  constexpr bool operator()(const Cell& a, const Cell& b) const {
    return a.y != b.y ? a.y < b.y : a.x < b.x;
  }
};

inline int manhattan(Cell a, Cell b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

inline std::string to_string(Cell c) {
  return "(" + std::to_string(c.x) + ", " + std::to_string(c.y) + ")";
}

class MapParseError : public std::runtime_error {
 public:
  MapParseError(const std::string& what, int line, int column)
      : std::runtime_error("map:" + std::to_string(line) + ":" + std::to_string(column) + ": " +
                           what),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Four-connected grid with obstacle cells and intermediate transfer cells.
/// Intermediate cells are ordinary free cells for motion purposes.
class Workspace {
 public:
  enum class Glyph : std::uint8_t { Free, Obstacle, Intermediate };

  Workspace() = default;

  Workspace(int width, int height) : width_(width), height_(height) {
    if (width <= 0 || height <= 0) throw std::invalid_argument("workspace must have positive area");
    cells_.assign(static_cast<std::size_t>(width) * height, Glyph::Free);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t area() const { return cells_.size(); }

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  bool is_obstacle(Cell c) const { return glyph(c) == Glyph::Obstacle; }
  bool is_free(Cell c) const { return in_bounds(c) && glyph(c) != Glyph::Obstacle; }
  bool is_intermediate(Cell c) const { return in_bounds(c) && glyph(c) == Glyph::Intermediate; }

  Glyph glyph(Cell c) const { return cells_[index(c)]; }

  void set_obstacle(Cell c) { cells_.at(index(c)) = Glyph::Obstacle; }
  void set_free(Cell c) { cells_.at(index(c)) = Glyph::Free; }
  void set_intermediate(Cell c) { cells_.at(index(c)) = Glyph::Intermediate; }

  std::size_t index(Cell c) const { return static_cast<std::size_t>(c.y) * width_ + c.x; }
  Cell cell_at(std::size_t idx) const {
    return {static_cast<int>(idx % width_), static_cast<int>(idx / width_)};
  }

  /// Intermediate cells in row-major order.
  std::vector<Cell> intermediates() const {
    std::vector<Cell> out;
    for (std::size_t i = 0; i < cells_.size(); ++i)
      if (cells_[i] == Glyph::Intermediate) out.push_back(cell_at(i));
    return out;
  }

  std::vector<Cell> obstacles() const {
    std::vector<Cell> out;
    for (std::size_t i = 0; i < cells_.size(); ++i)
      if (cells_[i] == Glyph::Obstacle) out.push_back(cell_at(i));
    return out;
  }

  /// Copy with every intermediate cell turned into a plain free cell.
  Workspace without_intermediates() const {
    Workspace copy = *this;
    for (auto& g : copy.cells_)
      if (g == Glyph::Intermediate) g = Glyph::Free;
    return copy;
  }

  /// Free 4-neighbours of `c`, in the fixed order up, down, left, right.
  template <typename Fn>
  void for_each_neighbour(Cell c, Fn&& fn) const {
    static constexpr int dx[] = {0, 0, -1, 1};
    static constexpr int dy[] = {-1, 1, 0, 0};
    for (int k = 0; k < 4; ++k) {
      Cell n{c.x + dx[k], c.y + dy[k]};
      if (is_free(n)) fn(n);
    }
  }

  /// Serialises in the grid map text format (`.`, `#`, `I`, one row per line).
  std::string to_text() const {
    std::string out;
    out.reserve(cells_.size() + height_);
    for (int y = 0; y < height_; ++y) {
      for (int x = 0; x < width_; ++x) {
        switch (glyph({x, y})) {
          case Glyph::Free: out += '.'; break;
          case Glyph::Obstacle: out += '#'; break;
          case Glyph::Intermediate: out += 'I'; break;
        }
      }
      out += '\n';
    }
    return out;
  }

  friend bool operator==(const Workspace&, const Workspace&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Glyph> cells_;
};

/// Parses the grid map format. Row 0 is y = 0. A single trailing newline is
/// accepted; CR before LF is tolerated.
inline Workspace parse_map(std::string_view text) {
  std::vector<std::string_view> rows;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view row = text.substr(start, end - start);
    if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
    rows.push_back(row);
    if (end == text.size()) break;
    start = end + 1;
  }
  if (!rows.empty() && rows.back().empty()) rows.pop_back();
  if (rows.empty() || rows.front().empty()) throw MapParseError("zero-area map", 1, 1);

  const int width = static_cast<int>(rows.front().size());
  const int height = static_cast<int>(rows.size());
  Workspace ws(width, height);
  for (int y = 0; y < height; ++y) {
    if (static_cast<int>(rows[y].size()) != width)
      throw MapParseError("ragged row: expected " + std::to_string(width) + " columns, found " +
                              std::to_string(rows[y].size()),
                          y + 1, static_cast<int>(std::min(rows[y].size(), rows.front().size())) + 1);
    for (int x = 0; x < width; ++x) {
      switch (rows[y][x]) {
        case '.': break;
        case '#': ws.set_obstacle({x, y}); break;
        case 'I': ws.set_intermediate({x, y}); break;
        default:
          throw MapParseError(std::string("unknown glyph '") + rows[y][x] + "'", y + 1, x + 1);
      }
    }
  }
  return ws;
}

inline void require_free(const Workspace& ws, Cell c, const char* what) {
  if (!ws.in_bounds(c))
    throw std::invalid_argument(std::string(what) + " " + to_string(c) + " is out of bounds");
  if (ws.is_obstacle(c))
    throw std::invalid_argument(std::string(what) + " " + to_string(c) + " is an obstacle");
}

/// Length of a shortest obstacle-avoiding 4-connected path, or nullopt when
/// `to` cannot be reached. A* with the Manhattan heuristic.
inline std::optional<int> shortest_dist(const Workspace& ws, Cell from, Cell to) {
  require_free(ws, from, "source");
  require_free(ws, to, "target");
  if (from == to) return 0;

  struct Entry {
    int f;
    int g;
    std::size_t idx;
    bool operator>(const Entry& o) const { return f != o.f ? f > o.f : g < o.g; }
  };
  std::vector<int> best(ws.area(), -1);
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  best[ws.index(from)] = 0;
  open.push({manhattan(from, to), 0, ws.index(from)});
  const std::size_t goal = ws.index(to);
  while (!open.empty()) {
    Entry e = open.top();
    open.pop();
    if (e.g != best[e.idx]) continue;
    if (e.idx == goal) return e.g;
    ws.for_each_neighbour(ws.cell_at(e.idx), [&](Cell n) {
      std::size_t ni = ws.index(n);
      int g = e.g + 1;
      if (best[ni] < 0 || g < best[ni]) {
        best[ni] = g;
        open.push({g + manhattan(n, to), g, ni});
      }
    });
  }
  return std::nullopt;
}

/// Breadth-first distances from `source` to every cell (-1 for unreachable or obstacle).
inline std::vector<int> distance_field(const Workspace& ws, Cell source) {
  require_free(ws, source, "source");
  std::vector<int> dist(ws.area(), -1);
  std::deque<Cell> queue{source};
  dist[ws.index(source)] = 0;
  while (!queue.empty()) {
    Cell c = queue.front();
    queue.pop_front();
    const int d = dist[ws.index(c)];
    ws.for_each_neighbour(c, [&](Cell n) {
      int& slot = dist[ws.index(n)];
      if (slot < 0) {
        slot = d + 1;
        queue.push_back(n);
      }
    });
  }
  return dist;
}

/// Pairwise shortest distances over a fixed set of points of interest.
class DistanceOracle {
 public:
  DistanceOracle() = default;

  DistanceOracle(const Workspace& ws, std::span<const Cell> pois) : width_(ws.width()) {
    for (Cell c : pois) {
      require_free(ws, c, "point of interest");
      if (!slot_.contains(key(c))) {
        slot_.emplace(key(c), static_cast<int>(cells_.size()));
        cells_.push_back(c);
      }
    }
    const std::size_t n = cells_.size();
    table_.assign(n * n, kUnreachable);
    for (std::size_t a = 0; a < n; ++a) {
      table_[a * n + a] = 0;
      for (std::size_t b = a + 1; b < n; ++b) {
        auto d = shortest_dist(ws, cells_[a], cells_[b]);
        const int v = d ? *d : kUnreachable;
        table_[a * n + b] = v;
        table_[b * n + a] = v;
      }
    }
  }

  bool contains(Cell c) const { return slot_.contains(key(c)); }
  std::span<const Cell> points() const { return cells_; }
  std::size_t size() const { return cells_.size() * cells_.size(); }

  std::optional<int> operator()(Cell a, Cell b) const {
    const int v = raw(a, b);
    if (v == kUnreachable) return std::nullopt;
    return v;
  }

  /// Distance with unreachable mapped to a negative value, for hot loops.
  int raw(Cell a, Cell b) const {
    auto ia = slot_.find(key(a));
    auto ib = slot_.find(key(b));
    if (ia == slot_.end() || ib == slot_.end())
      throw std::out_of_range("distance oracle has no entry for " + to_string(a) + " -> " +
                              to_string(b));
    return table_[static_cast<std::size_t>(ia->second) * cells_.size() + ib->second];
  }

  /// Dense index of a point of interest; -1 when absent.
  int slot(Cell c) const {
    auto it = slot_.find(key(c));
    return it == slot_.end() ? -1 : it->second;
  }
  int at(int slot_a, int slot_b) const {
    return table_[static_cast<std::size_t>(slot_a) * cells_.size() + slot_b];
  }

  static constexpr int kUnreachable = -1;

 private:
  long long key(Cell c) const { return static_cast<long long>(c.y) * width_ + c.x; }

  int width_ = 0;
  std::vector<Cell> cells_;
  std::unordered_map<long long, int> slot_;
  std::vector<int> table_;
};

inline DistanceOracle build_distance_oracle(const Workspace& ws, std::span<const Cell> pois) {
  return DistanceOracle(ws, pois);
}

}  // namespace mapd
