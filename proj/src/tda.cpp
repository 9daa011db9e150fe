#include "latentlab/tda.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <optional>
#include <unordered_map>

#include "latentlab/format.hpp"

namespace latentlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t choose2(std::uint64_t n) { return n * (n - 1) / 2; }

// Filtration order: diameter ascending, ties broken by larger combinatorial
// index first.
struct Key {
  double diam;
  std::uint64_t index;

  friend bool operator<(const Key& a, const Key& b) {
    return a.diam < b.diam || (a.diam == b.diam && a.index > b.index);
  }
  friend bool operator>(const Key& a, const Key& b) { return b < a; }
};

struct EdgeEntry {
  Key key;
  int i;  // i < j
  int j;
};

class UnionFind {
public:
  explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)), rank_(static_cast<std::size_t>(n), 0) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

private:
  std::vector<int> parent_;
  std::vector<std::uint8_t> rank_;
};

template <typename T, typename Less>
std::vector<T> symmetric_difference(const std::vector<T>& a, const std::vector<T>& b, Less less) {
  std::vector<T> out;
  out.reserve(a.size() + b.size());
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out), less);
  return out;
}

// Binary min-heap of (key, payload) with an in-place replace of the top.
class MinHeap {
public:
  struct Item {
    std::uint64_t key;
    std::uint32_t id;
  };

  bool empty() const { return items_.empty(); }
  void clear() { items_.clear(); }
  const Item& top() const { return items_.front(); }

  void push(Item item) {
    std::size_t pos = items_.size();
    items_.push_back(item);
    while (pos > 0) {
      const std::size_t parent = (pos - 1) / 2;
      if (items_[parent].key <= item.key) break;
      items_[pos] = items_[parent];
      pos = parent;
    }
    items_[pos] = item;
  }

  void pop() {
    const Item last = items_.back();
    items_.pop_back();
    if (!items_.empty()) sift_down(last);
  }

  void replace_top(Item item) { sift_down(item); }

private:
  void sift_down(Item item) {
    const std::size_t n = items_.size();
    std::size_t pos = 0;
    while (true) {
      std::size_t child = 2 * pos + 1;
      if (child >= n) break;
      if (child + 1 < n && items_[child + 1].key < items_[child].key) ++child;
      if (item.key <= items_[child].key) break;
      items_[pos] = items_[child];
      pos = child;
    }
    items_[pos] = item;
  }

  std::vector<Item> items_;
};

// Triangles are keyed by the filtration rank of their longest edge, then by
// the third vertex in descending order. This refines the diameter order and
// names each triangle uniquely, so keys compare as plain integers.
class H1Reducer {
public:
  H1Reducer(const DistanceMatrix& dmat, const std::vector<EdgeEntry>& edges)
      : m_(static_cast<int>(dmat.rows())), edges_(edges), rank_(static_cast<std::size_t>(m_) * m_, 0) {
    for (std::size_t pos = 0; pos < edges_.size(); ++pos) {
      const auto& e = edges_[pos];
      rank_[static_cast<std::size_t>(e.i) * m_ + e.j] = static_cast<std::uint32_t>(pos);
      rank_[static_cast<std::size_t>(e.j) * m_ + e.i] = static_cast<std::uint32_t>(pos);
    }
    sorted_.reserve(static_cast<std::size_t>(m_) * static_cast<std::size_t>(std::max(m_ - 1, 0)));
    for (int v = 0; v < m_; ++v) {
      const auto begin = sorted_.size();
      const std::uint32_t* row = rank_row(v);
      for (int k = 0; k < m_; ++k) {
        if (k != v) sorted_.push_back({row[k], k});
      }
      std::sort(sorted_.begin() + static_cast<std::ptrdiff_t>(begin), sorted_.end(),
                [](const Neighbour& a, const Neighbour& b) { return a.rank < b.rank; });
    }
  }

  void run(const std::vector<std::uint8_t>& cleared, PersistenceDiagram& out) {
    for (std::size_t pos = edges_.size(); pos-- > 0;) {
      if (cleared[pos]) continue;
      const TriKey pivot = min_coface(pos);
      if (pivot == kNone) {
        out.push_back({1, edges_[pos].key.diam, kInf});
        continue;
      }
      if (owner_.find(pivot) == owner_.end()) {
        owner_.emplace(pivot, columns_.size());
        columns_.push_back({static_cast<std::uint32_t>(pos), 0, 0});
        out.push_back({1, edges_[pos].key.diam, death(pivot)});
        continue;
      }
      reduce_slow(pos, out);
    }
  }

private:
  using TriKey = std::uint64_t;
  static constexpr TriKey kNone = ~TriKey{0};

  struct Column {
    std::uint32_t edge;
    std::uint32_t v_begin;  // into pool_; v_len == 0 means V = {edge}
    std::uint32_t v_len;
  };

  static TriKey make_key(std::uint32_t rank, int opposite) {
    return (TriKey{rank} << 32) | (0xFFFFFFFFu - static_cast<std::uint32_t>(opposite));
  }

  // Key of the triangle {e.i, e.j, k} given the ranks of its three edges.
  static TriKey coface_key(const EdgeEntry& e, std::uint32_t r, std::uint32_t rik, std::uint32_t rjk, int k) {
    if (r > rik && r > rjk) return make_key(r, k);
    return rik > rjk ? make_key(rik, e.j) : make_key(rjk, e.i);
  }

  double death(TriKey key) const { return edges_[key >> 32].key.diam; }

  const std::uint32_t* rank_row(int v) const { return rank_.data() + static_cast<std::size_t>(v) * m_; }

  // A descending scan over the third vertex meets cofaces whose longest edge
  // is the edge itself in key order, so the first such coface is the minimum.
  TriKey min_coface(std::size_t pos) const {
    const auto& e = edges_[pos];
    const auto r = static_cast<std::uint32_t>(pos);
    const std::uint32_t* ri = rank_row(e.i);
    const std::uint32_t* rj = rank_row(e.j);
    TriKey best = kNone;
    for (int k = m_ - 1; k >= 0; --k) {
      if (k == e.i || k == e.j) continue;
      const TriKey key = coface_key(e, r, ri[k], rj[k], k);
      if (key < best) {
        best = key;
        if ((key >> 32) == r) break;
      }
    }
    return best;
  }

  void column_v(const Column& col, std::vector<std::uint32_t>& out) const {
    out.clear();
    if (col.v_len == 0) {
      out.push_back(col.edge);
    } else {
      out.assign(pool_.begin() + col.v_begin, pool_.begin() + col.v_begin + col.v_len);
    }
  }

  // The coboundary of an edge of rank r splits into three streams, each
  // already in key order: cofaces whose longest edge is the edge itself
  // (third vertex descending), and cofaces whose longest edge is incident to
  // one endpoint (walked through that endpoint's neighbours by rank). The
  // working column merges lazily generated streams, so cofaces that never
  // reach the pivot are never produced.
  struct Cursor {
    TriKey key;
    std::uint32_t r;
    int from;   // block: unused; list: endpoint whose neighbours are walked
    int other;  // the remaining endpoint
    int pos;
    bool block;
  };

  struct Neighbour {
    std::uint32_t rank;
    int vertex;
  };

  const Neighbour* neighbours(int v) const {
    return sorted_.data() + static_cast<std::size_t>(v) * static_cast<std::size_t>(m_ - 1);
  }

  bool settle(Cursor& c) const {
    if (c.block) {
      const std::uint32_t* ri = rank_row(c.from);
      const std::uint32_t* rj = rank_row(c.other);
      for (int k = c.pos; k >= 0; --k) {
        if (k == c.from || k == c.other || ri[k] > c.r || rj[k] > c.r) continue;
        c.pos = k;
        c.key = make_key(c.r, k);
        return true;
      }
      return false;
    }
    const Neighbour* list = neighbours(c.from);
    const std::uint32_t* ro = rank_row(c.other);
    for (int p = c.pos; p < m_ - 1; ++p) {
      const Neighbour& n = list[p];
      if (n.vertex == c.other || n.rank < ro[n.vertex]) continue;
      c.pos = p;
      c.key = make_key(n.rank, c.other);
      return true;
    }
    return false;
  }

  bool step(Cursor& c) const {
    c.pos += c.block ? -1 : 1;
    return settle(c);
  }

  void push_cursor(Cursor c, std::optional<TriKey> floor) {
    if (!settle(c)) return;
    while (floor && c.key <= *floor) {
      if (!step(c)) return;
    }
    cursors_.push_back(c);
    heap_.push({c.key, static_cast<std::uint32_t>(cursors_.size() - 1)});
  }

  // Adds the cofaces of edge `q` that come strictly after `floor`. Entries
  // at or before the current pivot occur an even number of times in an
  // added reduced column (its pivot is its minimum), so dropping them keeps
  // the Z/2 sum intact.
  void add_coboundary(std::uint32_t q, std::optional<TriKey> floor) {
    const auto& e = edges_[q];
    const std::uint32_t floor_rank = floor ? static_cast<std::uint32_t>(*floor >> 32) : 0;
    if (!floor || q >= floor_rank) {
      int start = m_ - 1;
      if (floor && q == floor_rank) start = static_cast<int>(0xFFFFFFFFu - static_cast<std::uint32_t>(*floor)) - 1;
      push_cursor({0, q, e.i, e.j, start, true}, floor);
    }
    const std::uint32_t lowest = std::max(q + 1, floor_rank);
    for (const auto& [from, other] : {std::pair{e.i, e.j}, std::pair{e.j, e.i}}) {
      const Neighbour* list = neighbours(from);
      const auto start = std::lower_bound(list, list + (m_ - 1), lowest,
                                          [](const Neighbour& n, std::uint32_t r) { return n.rank < r; });
      push_cursor({0, q, from, other, static_cast<int>(start - list), false}, floor);
    }
  }

  TriKey pop_pivot() {
    TriKey pivot = kNone;
    while (!heap_.empty()) {
      const auto [top, id] = heap_.top();
      if (pivot == kNone) {
        pivot = top;
      } else if (top != pivot) {
        return pivot;
      } else {
        pivot = kNone;
      }
      Cursor& c = cursors_[id];
      if (step(c)) {
        heap_.replace_top({c.key, id});
      } else {
        heap_.pop();
      }
    }
    return pivot;
  }

  void reduce_slow(std::size_t pos, PersistenceDiagram& out) {
    std::vector<std::uint32_t> v{static_cast<std::uint32_t>(pos)};
    std::vector<std::uint32_t> other;
    heap_.clear();
    cursors_.clear();
    add_coboundary(static_cast<std::uint32_t>(pos), std::nullopt);
    while (true) {
      const TriKey pivot = pop_pivot();
      if (pivot == kNone) {
        out.push_back({1, edges_[pos].key.diam, kInf});
        return;
      }
      const auto it = owner_.find(pivot);
      if (it == owner_.end()) {
        const auto begin = static_cast<std::uint32_t>(pool_.size());
        pool_.insert(pool_.end(), v.begin(), v.end());
        owner_.emplace(pivot, columns_.size());
        columns_.push_back({static_cast<std::uint32_t>(pos), begin, static_cast<std::uint32_t>(v.size())});
        out.push_back({1, edges_[pos].key.diam, death(pivot)});
        return;
      }
      // The owner's column also carries the current pivot, which cancels.
      column_v(columns_[it->second], other);
      for (const auto q : other) add_coboundary(q, pivot);
      // Both chains are kept sorted.
      v = symmetric_difference(v, other, std::less<std::uint32_t>{});
    }
  }

  int m_;
  const std::vector<EdgeEntry>& edges_;
  std::vector<std::uint32_t> rank_;
  std::unordered_map<TriKey, std::size_t> owner_;
  std::vector<Column> columns_;
  std::vector<std::uint32_t> pool_;
  std::vector<Neighbour> sorted_;
  std::vector<Cursor> cursors_;
  MinHeap heap_;
};

}  // namespace

void validate_distance_matrix(const DistanceMatrix& dmat) {
  if (dmat.rows() != dmat.cols()) throw MatrixError("distance matrix must be square");
  for (Eigen::Index i = 0; i < dmat.rows(); ++i) {
    if (dmat(i, i) != 0.0) throw MatrixError("distance matrix diagonal must be zero");
    for (Eigen::Index j = i + 1; j < dmat.cols(); ++j) {
      const double v = dmat(i, j);
      if (!std::isfinite(v) || v < 0.0) throw MatrixError("distances must be finite and non-negative");
      if (v != dmat(j, i)) throw MatrixError("distance matrix must be symmetric");
    }
  }
}

PersistenceDiagram rips_persistence(const DistanceMatrix& dmat, int max_dim) {
  if (max_dim < 0 || max_dim > 1) throw RangeError("max_dim must be 0 or 1");
  validate_distance_matrix(dmat);
  const int m = static_cast<int>(dmat.rows());
  PersistenceDiagram diagram;
  if (m == 0) return diagram;

  std::vector<EdgeEntry> edges;
  edges.reserve(static_cast<std::size_t>(choose2(static_cast<std::uint64_t>(m))));
  for (int j = 1; j < m; ++j) {
    for (int i = 0; i < j; ++i) {
      edges.push_back({{dmat(i, j), choose2(static_cast<std::uint64_t>(j)) + static_cast<std::uint64_t>(i)}, i, j});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const EdgeEntry& a, const EdgeEntry& b) { return a.key < b.key; });

  // Every vertex is born at 0, so each merge kills a class born at 0.
  UnionFind components(m);
  std::vector<std::uint8_t> merging(edges.size(), 0);
  int alive = m;
  for (std::size_t pos = 0; pos < edges.size(); ++pos) {
    if (components.unite(edges[pos].i, edges[pos].j)) {
      merging[pos] = 1;
      if (edges[pos].key.diam > 0.0) diagram.push_back({0, 0.0, edges[pos].key.diam});
      --alive;
    }
  }
  for (int c = 0; c < alive; ++c) diagram.push_back({0, 0.0, kInf});

  // H0 pairs are already in order; only the H1 block needs sorting.
  if (max_dim >= 1) {
    const auto h1_begin = static_cast<std::ptrdiff_t>(diagram.size());
    H1Reducer(dmat, edges).run(merging, diagram);
    diagram.erase(std::remove_if(diagram.begin() + h1_begin, diagram.end(),
                                 [](const PersistencePair& p) { return p.death == p.birth; }),
                  diagram.end());
    std::sort(diagram.begin() + h1_begin, diagram.end(), [](const PersistencePair& a, const PersistencePair& b) {
      return a.birth < b.birth || (a.birth == b.birth && a.death < b.death);
    });
  }
  return diagram;
}

BettiSignature persistent_betti(const PersistenceDiagram& diagram, double thresh) {
  if (!(thresh >= 0.0)) throw DomainError("thresh must be >= 0");
  BettiSignature sig{0, 0, thresh};
  for (const auto& pair : diagram) {
    if (!(pair.essential() || pair.persistence() > thresh)) continue;
    if (pair.dim == 0) ++sig.b0;
    if (pair.dim == 1) ++sig.b1;
  }
  return sig;
}

std::string to_string(Behaviour kind) {
  switch (kind) {
    case Behaviour::FixedPoint:
      return "fixed_point";
    case Behaviour::TwoPointCycle:
      return "two_point_cycle";
    case Behaviour::TwoLoopCycle:
      return "two_loop_cycle";
    case Behaviour::Other:
      return "other";
  }
  return "other";
}

BehaviourClass behaviour_from_signature(int b0, int b1) {
  Behaviour kind = Behaviour::Other;
  if (b0 == 1 && b1 == 0) kind = Behaviour::FixedPoint;
  if (b0 == 2 && b1 == 0) kind = Behaviour::TwoPointCycle;
  if (b0 == 2 && b1 == 2) kind = Behaviour::TwoLoopCycle;
  return {kind, b0, b1};
}

Classification classify_cloud(const PointCloud& cloud, const ClassifyParams& params) {
  if (cloud.rows() < 2) throw RangeError("classification needs at least two points");
  if (!(params.alpha >= 0.0) || !(params.ball_radius >= 0.0)) {
    throw DomainError("alpha and ball radius must be non-negative");
  }
  Classification result;
  result.diameter = cloud_diameter(cloud);
  if (result.diameter <= 2.0 * params.ball_radius) {
    result.ball_rule = true;
    result.signature = {1, 0, params.thresh.value_or(params.alpha * result.diameter)};
    result.behaviour = behaviour_from_signature(1, 0);
    return result;
  }
  const Eigen::Index k = std::min(cloud.rows(), cloud.cols());
  const DistanceMatrix dmat = distance_matrix(svd_project(cloud, k));
  const double diam = dmat.maxCoeff();
  const double thresh = params.thresh.value_or(params.alpha * diam);
  result.signature = persistent_betti(rips_persistence(dmat, 1), thresh);
  result.behaviour = behaviour_from_signature(result.signature.b0, result.signature.b1);
  return result;
}

Classification classify(const Trajectory& traj, const ClassifyParams& params) {
  return classify_cloud(PointCloud(traj.points()), params);
}

void write_diagram_csv(std::ostream& out, const PersistenceDiagram& diagram) {
  out << "dim,birth,death\n";
  for (const auto& p : diagram) out << p.dim << ',' << format_real(p.birth) << ',' << format_real(p.death) << '\n';
}

PersistenceDiagram read_diagram_csv(std::istream& in) {
  PersistenceDiagram diagram;
  std::string line;
  if (!std::getline(in, line) || line != "dim,birth,death") throw FormatError(0, "missing diagram header");
  std::size_t offset = line.size() + 1;
  while (std::getline(in, line)) {
    if (line.empty()) {
      offset += 1;
      continue;
    }
    std::istringstream row(line);
    std::string dim;
    std::string birth;
    std::string death;
    if (!std::getline(row, dim, ',') || !std::getline(row, birth, ',') || !std::getline(row, death)) {
      throw FormatError(offset, "diagram rows need three fields");
    }
    try {
      diagram.push_back({std::stoi(dim), std::stod(birth), death == "inf" ? kInf : std::stod(death)});
    } catch (const std::exception&) {
      throw FormatError(offset, "unparseable diagram row");
    }
    offset += line.size() + 1;
  }
  return diagram;
}

}  // namespace latentlab
