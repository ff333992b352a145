// Geometric operations on point clouds: normalization, mean nearest-neighbor
// edge length, PCA normal estimation, farthest point sampling, and voxel-grid
// downsampling. All functions are pure.

#pragma once

#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "gqa/core.hpp"
#include "gqa/neighbor_index.hpp"
#include "gqa/rng.hpp"

namespace gqa {

/// Translate the centroid to the origin and scale so the farthest point sits
/// exactly on the unit sphere. A single-point cloud maps to the origin.
/// Idempotent. Normals are unaffected.
template <typename Scalar>
PointCloud<Scalar> normalize_unit_sphere(PointCloud<Scalar> cloud) {
  require(cloud.size() >= 1, "normalize_unit_sphere: empty cloud");
  RowVec3<Scalar> centroid = cloud.points.colwise().mean();
  cloud.points.rowwise() -= centroid;
  Scalar max_radius = cloud.points.rowwise().norm().maxCoeff();
  if (max_radius > Scalar(0)) cloud.points /= max_radius;
  return cloud;
}

/// Index of the nearest point with a different index (coincident points are
/// legal neighbors).
template <typename Scalar>
Index nearest_distinct(const NeighborIndex<Scalar>& index, Index i) {
  auto two = index.knn(index.points().row(i), 2);
  return two[0] == i ? two[1] : two[0];
}

/// Mean over all points of the distance to the nearest distinct neighbor.
/// This is the reference unit l_r for all distortion magnitudes.
template <typename Scalar>
Scalar avg_nn_edge_length(const PointCloud<Scalar>& cloud) {
  require(cloud.size() >= 2, "avg_nn_edge_length: needs at least 2 points");
  NeighborIndex<Scalar> index(cloud.points);
  Scalar total = 0;
  for (Index i = 0; i < cloud.size(); ++i) {
    Index j = nearest_distinct(index, i);
    total += (cloud.points.row(i) - cloud.points.row(j)).norm();
  }
  return total / static_cast<Scalar>(cloud.size());
}

template <typename Scalar>
struct NormalEstimate {
  PointMatrix<Scalar> normals;
  std::vector<std::uint8_t> degenerate;  // 1 where the neighborhood had rank < 2
};

/// PCA normals: for each point, the unit eigenvector of the covariance of
/// {point + its k nearest neighbors} with the smallest eigenvalue.
/// Orientation is unconstrained. Rank-deficient neighborhoods (collinear or
/// coincident) get the fallback normal (0,0,1) and a degeneracy flag.
template <typename Scalar>
NormalEstimate<Scalar> estimate_normals(const PointMatrix<Scalar>& points, int k) {
  require(k >= 3, "estimate_normals: k must be >= 3");
  require(points.rows() >= k + 1, "estimate_normals: cloud smaller than k+1");
  NeighborIndex<Scalar> index(points);
  NormalEstimate<Scalar> out;
  out.normals.resize(points.rows(), 3);
  out.degenerate.assign(static_cast<std::size_t>(points.rows()), 0);
  for (Index i = 0; i < points.rows(); ++i) {
    auto nbrs = index.knn(points.row(i), k + 1);  // self included
    RowVec3<Scalar> mean = RowVec3<Scalar>::Zero();
    for (Index j : nbrs) mean += points.row(j);
    mean /= static_cast<Scalar>(nbrs.size());
    Eigen::Matrix<Scalar, 3, 3> cov = Eigen::Matrix<Scalar, 3, 3>::Zero();
    for (Index j : nbrs) {
      RowVec3<Scalar> d = points.row(j) - mean;
      cov += d.transpose() * d;
    }
    cov /= static_cast<Scalar>(nbrs.size());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, 3, 3>> solver(cov);
    const auto& evals = solver.eigenvalues();  // ascending
    if (evals[1] <= Scalar(1e-9) * std::max(evals[2], Scalar(0)) || evals[2] <= Scalar(0)) {
      out.normals.row(i) = RowVec3<Scalar>(0, 0, 1);
      out.degenerate[static_cast<std::size_t>(i)] = 1;
    } else {
      out.normals.row(i) = solver.eigenvectors().col(0).transpose().normalized();
    }
  }
  return out;
}

/// Convenience wrapper returning a cloud that carries the estimated normals.
template <typename Scalar>
PointCloud<Scalar> with_estimated_normals(PointCloud<Scalar> cloud, int k = 16) {
  cloud.normals = estimate_normals<Scalar>(cloud.points, k).normals;
  return cloud;
}

/// Farthest point sampling. The first anchor is drawn uniformly from the
/// seed; each following anchor maximizes the minimum distance to the chosen
/// set, ties broken by ascending index. Returns indices in selection order.
template <typename Scalar>
std::vector<Index> fps(const PointMatrix<Scalar>& points, Index count, std::uint64_t seed) {
  const Index n = points.rows();
  require(count >= 1 && count <= n, "fps: count exceeds cloud size");
  CounterRng rng(seed, fnv1a("fps"));
  std::vector<Index> anchors;
  anchors.reserve(static_cast<std::size_t>(count));
  Index first = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
  anchors.push_back(first);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> min_d2 =
      (points.rowwise() - points.row(first)).rowwise().squaredNorm();
  while (static_cast<Index>(anchors.size()) < count) {
    Index best = 0;
    Scalar best_d2 = -std::numeric_limits<Scalar>::infinity();
    for (Index i = 0; i < n; ++i) {
      if (min_d2[i] > best_d2) {
        best_d2 = min_d2[i];
        best = i;
      }
    }
    anchors.push_back(best);
    min_d2 = min_d2.cwiseMin(
        (points.rowwise() - points.row(best)).rowwise().squaredNorm());
  }
  return anchors;
}

namespace detail {

struct VoxelKey {
  std::int64_t x, y, z;
  bool operator==(const VoxelKey&) const = default;
};

struct VoxelKeyHash {
  std::size_t operator()(const VoxelKey& k) const {
    std::uint64_t h = hash_combine(static_cast<std::uint64_t>(k.x),
                                   static_cast<std::uint64_t>(k.y));
    return static_cast<std::size_t>(hash_combine(h, static_cast<std::uint64_t>(k.z)));
  }
};

template <typename Scalar>
VoxelKey voxel_of(const RowVec3<Scalar>& p, const RowVec3<Scalar>& min_corner,
                  Scalar edge) {
  return VoxelKey{
      static_cast<std::int64_t>(std::floor((p[0] - min_corner[0]) / edge)),
      static_cast<std::int64_t>(std::floor((p[1] - min_corner[1]) / edge)),
      static_cast<std::int64_t>(std::floor((p[2] - min_corner[2]) / edge))};
}

}  // namespace detail

/// Voxel-grid filter: one output point per occupied voxel at the centroid of
/// the contained points. The grid is anchored at the cloud's min corner.
/// Output order follows first occupancy; normals are dropped.
template <typename Scalar>
PointCloud<Scalar> voxel_downsample(const PointCloud<Scalar>& cloud, Scalar edge) {
  require(edge > Scalar(0), "voxel_downsample: edge must be positive");
  require(cloud.size() >= 1, "voxel_downsample: empty cloud");
  RowVec3<Scalar> min_corner = cloud.points.colwise().minCoeff();
  struct Acc {
    RowVec3<Scalar> sum = RowVec3<Scalar>::Zero();
    Index count = 0;
    Index order = 0;
  };
  std::unordered_map<detail::VoxelKey, Acc, detail::VoxelKeyHash> cells;
  cells.reserve(static_cast<std::size_t>(cloud.size()));
  Index next_order = 0;
  for (Index i = 0; i < cloud.size(); ++i) {
    RowVec3<Scalar> p = cloud.points.row(i);
    Acc& acc = cells[detail::voxel_of(p, min_corner, edge)];
    if (acc.count == 0) acc.order = next_order++;
    acc.sum += p;
    acc.count += 1;
  }
  PointCloud<Scalar> out;
  out.points.resize(next_order, 3);
  for (const auto& [key, acc] : cells)
    out.points.row(acc.order) = acc.sum / static_cast<Scalar>(acc.count);
  return out;
}

}  // namespace gqa
