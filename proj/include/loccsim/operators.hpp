#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "loccsim/ket.hpp"
#include "loccsim/layout.hpp"

namespace loccsim {

// Orthogonal projector acting on a slice of a layout.  The slice is a list
// of subsystem ids in layout order; the matrix indexes the product of their
// dims.  range_basis keeps the orthonormal vectors the projector was built
// from (empty for projectors defined as a remainder I - sum of others).
struct Projector {
  std::vector<std::string> ids;
  std::vector<int> dims;
  Mat matrix;
  std::vector<Vec> range_basis;
  bool remainder = false;

  int slice_dim() const {
    int d = 1;
    for (int x : dims) d *= x;
    return d;
  }
};

// Builds a projector from spanning vectors.  The vectors must be mutually
// orthogonal (they are normalized here); this keeps construction exact and
// the serialized form faithful.
inline Projector projector_from_span(const SystemLayout& layout,
                                     const std::vector<std::string>& ids,
                                     const std::vector<Vec>& span,
                                     double tol = kDefaultTol) {
  Projector p;
  p.ids = ids;
  for (int pos : layout.positions_of(ids))
    p.dims.push_back(layout.subsystems()[static_cast<std::size_t>(pos)].dim);
  const int d = p.slice_dim();
  for (const auto& v : span)
    if (v.size() != d)
      throw LayoutError("projector_from_span: vector dim mismatch");
  for (std::size_t i = 0; i < span.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(span[i].dot(span[j])) > tol * span[i].norm() * span[j].norm())
        throw LayoutError("projector_from_span: span vectors not orthogonal");
  p.matrix = Mat::Zero(d, d);
  for (const auto& v : span) {
    double n = v.norm();
    if (n <= tol) throw LayoutError("projector_from_span: zero span vector");
    Vec u = v / n;
    p.matrix += u * u.adjoint();
    p.range_basis.push_back(std::move(u));
  }
  return p;
}

inline Projector identity_projector(const SystemLayout& layout,
                                    const std::vector<std::string>& ids) {
  Projector p;
  p.ids = ids;
  for (int pos : layout.positions_of(ids))
    p.dims.push_back(layout.subsystems()[static_cast<std::size_t>(pos)].dim);
  p.matrix = Mat::Identity(p.slice_dim(), p.slice_dim());
  return p;
}

// Remainder projector I - sum(others); used to complete a measurement whose
// listed outcomes span only part of the slice.
inline Projector remainder_projector(const std::vector<Projector>& others) {
  if (others.empty()) throw LayoutError("remainder_projector: empty input");
  Projector p;
  p.ids = others.front().ids;
  p.dims = others.front().dims;
  p.matrix = Mat::Identity(others.front().slice_dim(), others.front().slice_dim());
  for (const auto& o : others) {
    if (o.ids != p.ids) throw LayoutError("remainder_projector: slice mismatch");
    p.matrix -= o.matrix;
  }
  p.remainder = true;
  return p;
}

// Embeds a slice operator into the full layout (identity elsewhere).
inline Mat embed_matrix(const SystemLayout& layout,
                        const std::vector<std::string>& ids, const Mat& op) {
  const std::vector<int> pos = layout.positions_of(ids);
  int sd = 1;
  for (int p : pos) sd *= layout.subsystems()[static_cast<std::size_t>(p)].dim;
  if (op.rows() != sd || op.cols() != sd)
    throw LayoutError("embed: operator dim does not match slice");
  const int D = layout.total_dim();
  Mat out = Mat::Zero(D, D);
  std::vector<int> dg(layout.size()), dh(layout.size());
  std::vector<char> in_slice(layout.size(), 0);
  for (int p : pos) in_slice[static_cast<std::size_t>(p)] = 1;
  for (int g = 0; g < D; ++g) {
    layout.digits_of(g, dg);
    for (int h = 0; h < D; ++h) {
      layout.digits_of(h, dh);
      bool diag = true;
      for (std::size_t k = 0; k < layout.size(); ++k)
        if (!in_slice[k] && dg[k] != dh[k]) { diag = false; break; }
      if (!diag) continue;
      int r = 0, c = 0;
      for (int p : pos) {
        const auto& s = layout.subsystems()[static_cast<std::size_t>(p)];
        r = r * s.dim + dg[static_cast<std::size_t>(p)];
        c = c * s.dim + dh[static_cast<std::size_t>(p)];
      }
      out(g, h) = op(r, c);
    }
  }
  return out;
}

inline Projector embed(const SystemLayout& layout, const Projector& p) {
  Projector out;
  for (const auto& s : layout.subsystems()) {
    out.ids.push_back(s.id);
    out.dims.push_back(s.dim);
  }
  out.matrix = embed_matrix(layout, p.ids, p.matrix);
  out.remainder = p.remainder;
  return out;
}

// Applies a slice projector to a ket.  The result may be zero; a zero result
// is an elimination outcome.
inline Ket project(const Ket& k, const Projector& p) {
  return Ket(k.layout, embed_matrix(k.layout, p.ids, p.matrix) * k.amplitudes,
             k.label);
}

struct MeasurementCheck {
  bool ok = true;
  std::string failure;  // which invariant broke, empty when ok
};

// Projective measurement test: every operator Hermitian and idempotent,
// pairwise products vanish, and the sum is the identity on the slice.
inline MeasurementCheck is_projective_measurement(
    const std::vector<Projector>& ops, double tol = 1e-12) {
  MeasurementCheck r;
  if (ops.empty()) return {false, "no operators"};
  const int d = ops.front().slice_dim();
  Mat sum = Mat::Zero(d, d);
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const Mat& m = ops[i].matrix;
    if (ops[i].ids != ops.front().ids)
      return {false, "operator " + std::to_string(i) + ": slice mismatch"};
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol)
      return {false, "operator " + std::to_string(i) + ": not hermitian"};
    if ((m * m - m).cwiseAbs().maxCoeff() > tol)
      return {false, "operator " + std::to_string(i) + ": not idempotent"};
    for (std::size_t j = 0; j < i; ++j)
      if ((m * ops[j].matrix).cwiseAbs().maxCoeff() > tol)
        return {false, "operators " + std::to_string(j) + "," +
                           std::to_string(i) + ": not orthogonal"};
    sum += m;
  }
  if ((sum - Mat::Identity(d, d)).cwiseAbs().maxCoeff() > tol)
    return {false, "incomplete: operators do not sum to identity"};
  return r;
}

// Partial trace of a matrix over the subsystems NOT in keep_positions.
inline Mat partial_trace_matrix(const SystemLayout& layout, const Mat& m,
                                const std::vector<int>& keep_positions) {
  const int D = layout.total_dim();
  if (m.rows() != D || m.cols() != D)
    throw LayoutError("partial_trace: matrix dim mismatch");
  std::vector<char> keep(layout.size(), 0);
  for (int p : keep_positions) keep[static_cast<std::size_t>(p)] = 1;
  int kd = 1;
  for (std::size_t i = 0; i < layout.size(); ++i)
    if (keep[i]) kd *= layout.subsystems()[i].dim;
  Mat out = Mat::Zero(kd, kd);
  std::vector<int> dg(layout.size()), dh(layout.size());
  for (int g = 0; g < D; ++g) {
    layout.digits_of(g, dg);
    for (int h = 0; h < D; ++h) {
      layout.digits_of(h, dh);
      bool traced_diag = true;
      for (std::size_t k = 0; k < layout.size(); ++k)
        if (!keep[k] && dg[k] != dh[k]) { traced_diag = false; break; }
      if (!traced_diag) continue;
      int r = 0, c = 0;
      for (std::size_t k = 0; k < layout.size(); ++k) {
        if (!keep[k]) continue;
        const int dim = layout.subsystems()[k].dim;
        r = r * dim + dg[k];
        c = c * dim + dh[k];
      }
      out(r, c) += m(g, h);
    }
  }
  return out;
}

struct DensityOperator {
  SystemLayout layout;
  Mat matrix;

  DensityOperator() = default;
  DensityOperator(SystemLayout l, Mat m) : layout(std::move(l)), matrix(std::move(m)) {
    if (matrix.rows() != layout.total_dim() || matrix.cols() != layout.total_dim())
      throw LayoutError("density: matrix dim does not match layout");
  }

  // Hermitian, positive semidefinite, unit trace.
  MeasurementCheck validate(double tol = kDefaultTol) const {
    if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > tol)
      return {false, "not hermitian"};
    Eigen::SelfAdjointEigenSolver<Mat> es(matrix);
    if (es.eigenvalues().minCoeff() < -tol) return {false, "not positive"};
    if (std::abs(matrix.trace().real() - 1.0) > tol) return {false, "trace not 1"};
    return {true, {}};
  }
};

inline DensityOperator density_from_ket(const Ket& k) {
  Vec u = k.amplitudes / k.norm();
  return DensityOperator(k.layout, u * u.adjoint());
}

// Reduced state on the listed subsystems (order must follow the layout).
// An empty discard set returns the input unchanged.
inline DensityOperator partial_trace(const DensityOperator& d,
                                     const std::vector<std::string>& keep_ids) {
  const std::vector<int> pos = d.layout.positions_of(keep_ids);
  std::vector<Subsystem> subs;
  for (int p : pos) subs.push_back(d.layout.subsystems()[static_cast<std::size_t>(p)]);
  return DensityOperator(SystemLayout(std::move(subs)),
                         partial_trace_matrix(d.layout, d.matrix, pos));
}

}  // namespace loccsim
