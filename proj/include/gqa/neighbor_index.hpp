// Spatial index over a point cloud: exact k-nearest-neighbor and
// fixed-radius queries.
//
// Results are defined to match a brute-force scan: candidates are ordered by
// (squared distance, point index), radius membership is strict (< r). The
// tree is immutable after construction and safe to share across threads.

#pragma once

#include <algorithm>
#include <vector>

#include "gqa/core.hpp"

namespace gqa {

template <typename Scalar>
class NeighborIndex {
 public:
  using Matrix = PointMatrix<Scalar>;

  explicit NeighborIndex(Matrix points, int leaf_size = 16)
      : pts_(std::move(points)), leaf_size_(leaf_size) {
    require(pts_.rows() >= 1, "NeighborIndex: empty cloud");
    require(leaf_size_ >= 1, "NeighborIndex: bad leaf size");
    order_.resize(static_cast<std::size_t>(pts_.rows()));
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = static_cast<Index>(i);
    nodes_.reserve(2 * order_.size() / static_cast<std::size_t>(leaf_size_) + 2);
    root_ = build(0, pts_.rows());
  }

  Index size() const { return pts_.rows(); }
  const Matrix& points() const { return pts_; }

  /// Indices of the k nearest points, ascending by (distance, index).
  std::vector<Index> knn(const RowVec3<Scalar>& query, Index k) const {
    require(k >= 1 && k <= pts_.rows(), "knn: k exceeds cloud size");
    std::vector<Cand> heap;
    heap.reserve(static_cast<std::size_t>(k));
    search_knn(root_, query, k, heap);
    std::sort(heap.begin(), heap.end(),
              [](const Cand& a, const Cand& b) {
                return a.d2 < b.d2 || (a.d2 == b.d2 && a.idx < b.idx);
              });
    std::vector<Index> out(heap.size());
    for (std::size_t i = 0; i < heap.size(); ++i) out[i] = heap[i].idx;
    return out;
  }

  Index nearest(const RowVec3<Scalar>& query) const { return knn(query, 1)[0]; }

  /// All indices with ||p - query|| < radius, ascending by index.
  std::vector<Index> radius(const RowVec3<Scalar>& query, Scalar r) const {
    require(r > Scalar(0), "radius: r must be positive");
    std::vector<Index> out;
    search_radius(root_, query, r * r, out);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  struct Cand {
    Scalar d2;
    Index idx;
  };
  // heap orders by "worse": larger distance, then larger index
  static bool less_worse(const Cand& a, const Cand& b) {
    return a.d2 < b.d2 || (a.d2 == b.d2 && a.idx < b.idx);
  }

  struct Node {
    Scalar split = 0;
    int dim = -1;          // -1 marks a leaf
    int left = -1, right = -1;
    Index begin = 0, end = 0;
  };

  int build(Index begin, Index end) {
    Node node;
    node.begin = begin;
    node.end = end;
    if (end - begin <= leaf_size_) {
      nodes_.push_back(node);
      return static_cast<int>(nodes_.size() - 1);
    }
    RowVec3<Scalar> lo = pts_.row(order_[static_cast<std::size_t>(begin)]);
    RowVec3<Scalar> hi = lo;
    for (Index i = begin + 1; i < end; ++i) {
      const auto p = pts_.row(order_[static_cast<std::size_t>(i)]);
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    int dim = 0;
    (hi - lo).maxCoeff(&dim);
    Index mid = begin + (end - begin) / 2;
    auto first = order_.begin() + begin;
    std::nth_element(first, order_.begin() + mid, order_.begin() + end,
                     [&](Index a, Index b) { return pts_(a, dim) < pts_(b, dim); });
    node.dim = dim;
    node.split = pts_(order_[static_cast<std::size_t>(mid)], dim);
    int self = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    int left = build(begin, mid);
    int right = build(mid, end);
    nodes_[static_cast<std::size_t>(self)].left = left;
    nodes_[static_cast<std::size_t>(self)].right = right;
    return self;
  }

  void consider(const RowVec3<Scalar>& query, Index idx, Index k,
                std::vector<Cand>& heap) const {
    Cand cand{(pts_.row(idx) - query).squaredNorm(), idx};
    if (static_cast<Index>(heap.size()) < k) {
      heap.push_back(cand);
      std::push_heap(heap.begin(), heap.end(), less_worse);
    } else if (less_worse(cand, heap.front())) {
      std::pop_heap(heap.begin(), heap.end(), less_worse);
      heap.back() = cand;
      std::push_heap(heap.begin(), heap.end(), less_worse);
    }
  }

  void search_knn(int node_id, const RowVec3<Scalar>& query, Index k,
                  std::vector<Cand>& heap) const {
    const Node& node = nodes_[static_cast<std::size_t>(node_id)];
    if (node.dim < 0) {
      for (Index i = node.begin; i < node.end; ++i)
        consider(query, order_[static_cast<std::size_t>(i)], k, heap);
      return;
    }
    Scalar axial = query[node.dim] - node.split;
    int near = axial < Scalar(0) ? node.left : node.right;
    int far = axial < Scalar(0) ? node.right : node.left;
    search_knn(near, query, k, heap);
    // Equal axial distance must still be explored: a far point tied on
    // distance can win on index.
    if (static_cast<Index>(heap.size()) < k || axial * axial <= heap.front().d2)
      search_knn(far, query, k, heap);
  }

  void search_radius(int node_id, const RowVec3<Scalar>& query, Scalar r2,
                     std::vector<Index>& out) const {
    const Node& node = nodes_[static_cast<std::size_t>(node_id)];
    if (node.dim < 0) {
      for (Index i = node.begin; i < node.end; ++i) {
        Index idx = order_[static_cast<std::size_t>(i)];
        if ((pts_.row(idx) - query).squaredNorm() < r2) out.push_back(idx);
      }
      return;
    }
    Scalar axial = query[node.dim] - node.split;
    int near = axial < Scalar(0) ? node.left : node.right;
    int far = axial < Scalar(0) ? node.right : node.left;
    search_radius(near, query, r2, out);
    if (axial * axial < r2) search_radius(far, query, r2, out);
  }

  Matrix pts_;
  int leaf_size_;
  std::vector<Index> order_;
  std::vector<Node> nodes_;
  int root_ = 0;
};

}  // namespace gqa
