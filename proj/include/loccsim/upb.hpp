#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "loccsim/catalog.hpp"
#include "loccsim/ket.hpp"
#include "loccsim/layout.hpp"
#include "loccsim/operators.hpp"
#include "loccsim/schmidt.hpp"

namespace loccsim {

struct SeesawConfig {
  int restarts = 50;
  int iters = 500;
  double tol = 1e-12;            // stop when the overlap gain drops below this
  double theta = 1.0 - 1e-6;     // declare a product state found at or above this
  std::uint64_t seed = 0;

  void validate() const {
    if (restarts < 1 || iters < 1 || tol <= 0.0 || theta <= 0.0 || theta > 1.0)
      throw LayoutError("seesaw config: invalid field");
  }
};

struct UpbVerdict {
  bool extendible = false;
  bool degenerate = false;       // complement has rank zero
  int complement_rank = 0;
  double max_overlap = 0.0;
  Vec witness_a, witness_b;
  std::vector<std::vector<double>> traces;  // per restart, per iteration
  std::uint64_t seed = 0;

  std::string verdict() const {
    if (degenerate) return "degenerate(empty-complement)";
    return extendible ? "extendible" : "unextendible-candidate";
  }
};

// I minus the sum of rank-1 projectors onto the normalized states.
inline Projector complement_projector(const std::vector<Ket>& states,
                                      double tol = kDefaultTol) {
  if (states.empty()) throw LayoutError("complement_projector: no states");
  const SystemLayout& L = states.front().layout;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (!states[i].layout.same_structure(L))
      throw LayoutError("complement_projector: mixed layouts");
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(inner(states[i], states[j])) >
          tol * states[i].norm() * states[j].norm())
        throw LayoutError("complement_projector: states '" + states[i].label +
                          "' and '" + states[j].label + "' not orthogonal");
  }
  Projector p;
  for (const auto& s : L.subsystems()) {
    p.ids.push_back(s.id);
    p.dims.push_back(s.dim);
  }
  p.matrix = Mat::Identity(L.total_dim(), L.total_dim());
  for (const auto& k : states) {
    Vec u = k.amplitudes / k.norm();
    p.matrix -= u * u.adjoint();
  }
  p.remainder = true;
  return p;
}

namespace detail {

inline Vec random_unit(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = cd(g(rng), g(rng));
  v.normalize();
  return v;
}

inline Vec top_eigenvector(const Mat& h, double* value) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (h + h.adjoint()));
  const Eigen::Index last = es.eigenvalues().size() - 1;
  *value = es.eigenvalues()[last];
  return es.eigenvectors().col(last);
}

}  // namespace detail

// Alternating eigenvector ascent of <ab|Q|ab> over product vectors.  Each
// half step conditions Q on one side via a partial trace and lifts the other
// side to the top eigenvector, so the overlap never decreases.
inline UpbVerdict seesaw_max_product_overlap(const Mat& q, int da, int db,
                                             SeesawConfig cfg = {}) {
  cfg.validate();
  if (q.rows() != da * db || q.cols() != da * db)
    throw LayoutError("seesaw: operator dim mismatch");
  UpbVerdict out;
  out.seed = cfg.seed;
  out.complement_rank = static_cast<int>(std::lround(q.trace().real()));
  const SystemLayout wl({{"L", da, "left"}, {"R", db, "right"}});
  if (q.cwiseAbs().maxCoeff() < 1e-14) {
    out.degenerate = true;
    out.witness_a = Vec::Zero(da);
    out.witness_b = Vec::Zero(db);
    return out;
  }

  for (int r = 0; r < cfg.restarts; ++r) {
    std::mt19937_64 rng(cfg.seed + static_cast<std::uint64_t>(r));
    Vec a = detail::random_unit(da, rng);
    Vec b = detail::random_unit(db, rng);
    std::vector<double> trace;
    double prev = -1.0;
    for (int it = 0; it < cfg.iters; ++it) {
      double val = 0.0;
      // condition on |a>, lift |b>
      Mat aa = Mat::Zero(da, da);
      aa += a * a.adjoint();
      Mat rb = partial_trace_matrix(wl, embed_matrix(wl, {"L"}, aa) * q, {1});
      b = detail::top_eigenvector(rb, &val);
      // condition on |b>, lift |a>
      Mat bb = Mat::Zero(db, db);
      bb += b * b.adjoint();
      Mat ra = partial_trace_matrix(wl, embed_matrix(wl, {"R"}, bb) * q, {0});
      a = detail::top_eigenvector(ra, &val);
      trace.push_back(val);
      if (val - prev < cfg.tol && it > 0) break;
      prev = val;
    }
    const double best = trace.empty() ? 0.0 : trace.back();
    if (best > out.max_overlap) {
      out.max_overlap = best;
      out.witness_a = a;
      out.witness_b = b;
    }
    out.traces.push_back(std::move(trace));
  }

  // report the overlap the stored witness actually achieves
  if (out.witness_a.size() > 0) {
    Vec ab(da * db);
    for (int i = 0; i < da; ++i)
      for (int j = 0; j < db; ++j) ab[i * db + j] = out.witness_a[i] * out.witness_b[j];
    out.max_overlap = std::real((ab.adjoint() * q * ab)(0, 0));
  }
  out.extendible = out.max_overlap >= cfg.theta;
  return out;
}

// Certifies a product set's complement: every member must be a pure product
// state, and the verdict reports the best product overlap found inside the
// leftover subspace.  "Unextendible-candidate" is a heuristic certificate,
// not a proof.
inline UpbVerdict check_upb(const CatalogSet& set, SeesawConfig cfg = {}) {
  std::vector<Ket> states;
  for (const auto& c : set.candidates) {
    if (c.mixed)
      throw LayoutError("check_upb: candidate '" + c.label + "' is mixed");
    states.push_back(c.constituents.front().state);
  }
  const BipartiteShape shape = bipartite_shape(set.layout);
  for (const auto& s : states)
    if (schmidt_rank(s, shape) != 1)
      throw LayoutError("check_upb: state '" + s.label + "' is not a product");
  const Projector q = complement_projector(states);
  return seesaw_max_product_overlap(q.matrix, shape.rows, shape.cols, cfg);
}

}  // namespace loccsim
