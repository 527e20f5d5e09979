#include "hyrelax/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hyrelax {

std::string format_vec(const Vec& v) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) os << ", ";
    os << v[i];
  }
  os << ')';
  return os.str();
}

double Polytope::max_violation(const Vec& x) const {
  if (normals.rows() == 0) return -std::numeric_limits<double>::infinity();
  return (normals * x - offsets).maxCoeff();
}

bool Polytope::contains(const Vec& x, double tol) const {
  for (Eigen::Index i = 0; i < normals.rows(); ++i) {
    if (normals.row(i).dot(x) - offsets[i] > tol * (1.0 + std::abs(offsets[i]))) return false;
  }
  return true;
}

Polytope Polytope::box(const Vec& lo, const Vec& hi) {
  const Eigen::Index n = lo.size();
  Polytope p;
  p.normals = Mat::Zero(2 * n, n);
  p.offsets = Vec::Zero(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    p.normals(2 * i, i) = -1.0;
    p.offsets[2 * i] = -lo[i];
    p.normals(2 * i + 1, i) = 1.0;
    p.offsets[2 * i + 1] = hi[i];
  }
  return p;
}

namespace {

// Calls fn(indices) for every k-subset of {0..m-1} in lexicographic order.
template <typename Fn>
void for_each_subset(std::size_t m, std::size_t k, Fn&& fn) {
  if (k > m) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == m - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

VertexEnumeration enumerate_vertices(const Polytope& p, double bounding, double tol) {
  const auto n = p.dim();
  Mat H = p.normals;
  Vec h = p.offsets;
  const auto base_rows = static_cast<Eigen::Index>(H.rows());
  if (bounding > 0.0) {
    const Polytope b = Polytope::box(Vec::Constant(n, -bounding), Vec::Constant(n, bounding));
    Mat H2(H.rows() + b.normals.rows(), n);
    H2 << H, b.normals;
    Vec h2(h.size() + b.offsets.size());
    h2 << h, b.offsets;
    H = std::move(H2);
    h = std::move(h2);
  }
  VertexEnumeration out;
  const auto m = static_cast<std::size_t>(H.rows());
  Mat A(n, n);
  Vec rhs(n);
  for_each_subset(m, n, [&](const std::vector<std::size_t>& rows) {
    for (std::size_t r = 0; r < n; ++r) {
      A.row(r) = H.row(rows[r]);
      rhs[r] = h[rows[r]];
    }
    Eigen::FullPivLU<Mat> lu(A);
    if (lu.rank() < static_cast<Eigen::Index>(n)) return;
    const Vec v = lu.solve(rhs);
    for (Eigen::Index i = 0; i < H.rows(); ++i) {
      if (H.row(i).dot(v) - h[i] > tol * (1.0 + std::abs(h[i]))) return;
    }
    for (const auto& w : out.vertices) {
      if ((w - v).lpNorm<Eigen::Infinity>() <= tol * (1.0 + v.lpNorm<Eigen::Infinity>())) return;
    }
    if (bounding > 0.0) {
      for (Eigen::Index i = base_rows; i < H.rows(); ++i) {
        if (std::abs(H.row(i).dot(v) - h[i]) <= tol * (1.0 + std::abs(h[i]))) out.touches_bound = true;
      }
    }
    out.vertices.push_back(v);
  });
  return out;
}

}  // namespace hyrelax
