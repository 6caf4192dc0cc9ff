#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "loccsim/ket.hpp"
#include "loccsim/layout.hpp"

namespace loccsim {

constexpr double kRankTol = 1e-8;

// Index bookkeeping for viewing a state over a two-party layout as a
// matrix: rows enumerate the left party's subsystems (in layout order),
// columns the right party's.
struct BipartiteShape {
  std::string left_party, right_party;
  std::vector<int> left_positions, right_positions;
  int rows = 1, cols = 1;
  std::vector<int> row_of, col_of;    // global index -> row/col
  std::vector<int> global_of;        // row * cols + col -> global index
};

inline BipartiteShape bipartite_shape(const SystemLayout& layout,
                                      const std::string& left_party,
                                      const std::string& right_party) {
  BipartiteShape s;
  s.left_party = left_party;
  s.right_party = right_party;
  s.left_positions = layout.party_positions(left_party);
  s.right_positions = layout.party_positions(right_party);
  if (s.left_positions.size() + s.right_positions.size() != layout.size())
    throw LayoutError("bipartite_shape: parties do not cover the layout");
  s.rows = layout.slice_dim(s.left_positions);
  s.cols = layout.slice_dim(s.right_positions);
  const int D = layout.total_dim();
  s.row_of.resize(static_cast<std::size_t>(D));
  s.col_of.resize(static_cast<std::size_t>(D));
  s.global_of.resize(static_cast<std::size_t>(D));
  std::vector<int> dg(layout.size());
  for (int g = 0; g < D; ++g) {
    layout.digits_of(g, dg);
    int r = 0, c = 0;
    for (int p : s.left_positions)
      r = r * layout.subsystems()[static_cast<std::size_t>(p)].dim +
          dg[static_cast<std::size_t>(p)];
    for (int p : s.right_positions)
      c = c * layout.subsystems()[static_cast<std::size_t>(p)].dim +
          dg[static_cast<std::size_t>(p)];
    s.row_of[static_cast<std::size_t>(g)] = r;
    s.col_of[static_cast<std::size_t>(g)] = c;
    s.global_of[static_cast<std::size_t>(r * s.cols + c)] = g;
  }
  return s;
}

inline BipartiteShape bipartite_shape(const SystemLayout& layout) {
  auto parties = layout.parties();
  if (parties.size() != 2)
    throw LayoutError("bipartite_shape: layout must have exactly two parties");
  return bipartite_shape(layout, parties[0], parties[1]);
}

inline Mat as_bipartite_matrix(const Ket& k, const BipartiteShape& s) {
  Mat m(s.rows, s.cols);
  for (int g = 0; g < k.amplitudes.size(); ++g)
    m(s.row_of[static_cast<std::size_t>(g)],
      s.col_of[static_cast<std::size_t>(g)]) = k.amplitudes[g];
  return m;
}

inline Ket from_bipartite_matrix(const Mat& m, const SystemLayout& layout,
                                 const BipartiteShape& s, std::string label = {}) {
  Vec amps(layout.total_dim());
  for (int r = 0; r < s.rows; ++r)
    for (int c = 0; c < s.cols; ++c)
      amps[s.global_of[static_cast<std::size_t>(r * s.cols + c)]] = m(r, c);
  return Ket(layout, std::move(amps), std::move(label));
}

struct SchmidtDecomposition {
  std::vector<double> coefficients;  // descending, scaled so sum of squares
                                     // equals the squared norm of the input
  std::vector<Vec> left, right;      // orthonormal vectors on the party slices
  BipartiteShape shape;
};

inline SchmidtDecomposition schmidt_decompose(const Ket& k,
                                              const BipartiteShape& shape) {
  Mat m = as_bipartite_matrix(k, shape);
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SchmidtDecomposition out;
  out.shape = shape;
  const auto& sv = svd.singularValues();
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    out.coefficients.push_back(sv[i]);
    out.left.push_back(svd.matrixU().col(i));
    out.right.push_back(svd.matrixV().col(i).conjugate());
  }
  return out;
}

inline SchmidtDecomposition schmidt_decompose(const Ket& k) {
  return schmidt_decompose(k, bipartite_shape(k.layout));
}

// Number of Schmidt coefficients above tol relative to the largest.
inline int schmidt_rank(const Ket& k, const BipartiteShape& shape,
                        double tol = kRankTol) {
  auto d = schmidt_decompose(k, shape);
  if (d.coefficients.empty()) return 0;
  double top = d.coefficients.front();
  if (top <= 0.0) return 0;
  int r = 0;
  for (double c : d.coefficients)
    if (c > tol * top) ++r;
  return r;
}

inline int schmidt_rank(const Ket& k, double tol = kRankTol) {
  return schmidt_rank(k, bipartite_shape(k.layout), tol);
}

// Entanglement measured in ebits for a rank-r resource: log2(r).
inline double ebits_for_rank(int rank) {
  return std::log2(static_cast<double>(rank));
}

}  // namespace loccsim
