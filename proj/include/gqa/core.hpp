// Core point-cloud types and error taxonomy.
//
// Points are stored as dense row-major n×3 matrices so a row is one point
// and free functions can take any scalar type.

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gqa {

using Index = Eigen::Index;

template <typename Scalar>
using PointMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, 3, Eigen::RowMajor>;

template <typename Scalar>
using RowVec3 = Eigen::Matrix<Scalar, 1, 3>;

/// A cloud is an ordered list of points with optional unit normals.
/// `normals` has either 0 rows (absent) or exactly as many rows as `points`.
template <typename Scalar>
struct PointCloud {
  PointMatrix<Scalar> points;
  PointMatrix<Scalar> normals;

  PointCloud() : points(0, 3), normals(0, 3) {}
  explicit PointCloud(PointMatrix<Scalar> pts)
      : points(std::move(pts)), normals(0, 3) {}
  PointCloud(PointMatrix<Scalar> pts, PointMatrix<Scalar> nrm)
      : points(std::move(pts)), normals(std::move(nrm)) {}

  Index size() const { return points.rows(); }
  bool empty() const { return points.rows() == 0; }
  bool has_normals() const { return normals.rows() == points.rows() && points.rows() > 0; }

  void drop_normals() { normals.resize(0, 3); }
};

using Cloud = PointCloud<double>;

// Error taxonomy. CLI exit codes: usage 1, data 2, staging 3.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct StagingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

}  // namespace gqa
