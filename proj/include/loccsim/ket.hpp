#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "loccsim/layout.hpp"

namespace loccsim {

using cd = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

constexpr double kDefaultTol = 1e-10;

// Pure state over a layout.  Amplitudes are deliberately unnormalized;
// normalization factors are applied only where probabilities are computed.
// A zero vector is legal only as the outcome of an elimination.
struct Ket {
  SystemLayout layout;
  Vec amplitudes;
  std::string label;

  Ket() = default;
  Ket(SystemLayout l, Vec a, std::string lab = {})
      : layout(std::move(l)), amplitudes(std::move(a)), label(std::move(lab)) {
    if (amplitudes.size() != layout.total_dim())
      throw LayoutError("ket: amplitude length does not match layout");
  }

  double norm2() const { return amplitudes.squaredNorm(); }
  double norm() const { return amplitudes.norm(); }
  bool is_zero(double tol = kDefaultTol) const { return norm() <= tol; }

  Ket normalized() const {
    double n = norm();
    if (n <= 0.0) throw LayoutError("ket: cannot normalize zero vector");
    return Ket(layout, amplitudes / n, label);
  }
};

inline Ket operator+(const Ket& a, const Ket& b) {
  if (!a.layout.same_structure(b.layout))
    throw LayoutError("ket +: layout mismatch");
  return Ket(a.layout, a.amplitudes + b.amplitudes, a.label);
}

inline Ket operator-(const Ket& a, const Ket& b) {
  if (!a.layout.same_structure(b.layout))
    throw LayoutError("ket -: layout mismatch");
  return Ket(a.layout, a.amplitudes - b.amplitudes, a.label);
}

inline Ket operator*(cd c, const Ket& k) {
  return Ket(k.layout, c * k.amplitudes, k.label);
}

// <a|b>, unnormalized.
inline cd inner(const Ket& a, const Ket& b) {
  if (!a.layout.same_structure(b.layout))
    throw LayoutError("inner: layout mismatch");
  return a.amplitudes.dot(b.amplitudes);
}

// Tensor product; layouts must have disjoint subsystem ids.
inline Ket tensor(const Ket& a, const Ket& b, std::string label = {}) {
  SystemLayout l = concat(a.layout, b.layout);
  Vec amps(l.total_dim());
  const int db = b.layout.total_dim();
  for (int i = 0; i < a.amplitudes.size(); ++i)
    for (int j = 0; j < db; ++j) amps[i * db + j] = a.amplitudes[i] * b.amplitudes[j];
  if (label.empty()) label = a.label;
  return Ket(std::move(l), std::move(amps), std::move(label));
}

// Local vector literal, e.g. lv({1, 0, -1}) for |0> - |2>.
inline Vec lv(std::initializer_list<cd> coeffs) {
  Vec v(static_cast<Eigen::Index>(coeffs.size()));
  Eigen::Index i = 0;
  for (cd c : coeffs) v[i++] = c;
  return v;
}

inline Vec basis_vec(int dim, int k) {
  Vec v = Vec::Zero(dim);
  v[k] = 1.0;
  return v;
}

// Product ket from one local vector per subsystem, in layout order.
inline Ket product_ket(const SystemLayout& layout, const std::vector<Vec>& locals,
                       std::string label = {}) {
  if (locals.size() != layout.size())
    throw LayoutError("product_ket: need one local vector per subsystem");
  for (std::size_t i = 0; i < locals.size(); ++i)
    if (locals[i].size() != layout.subsystems()[i].dim)
      throw LayoutError("product_ket: local dim mismatch at '" +
                        layout.subsystems()[i].id + "'");
  const int d = layout.total_dim();
  Vec amps(d);
  std::vector<int> digits;
  for (int g = 0; g < d; ++g) {
    layout.digits_of(g, digits);
    cd v = 1.0;
    for (std::size_t i = 0; i < locals.size(); ++i) v *= locals[i][digits[i]];
    amps[g] = v;
  }
  return Ket(layout, std::move(amps), std::move(label));
}

// Gram matrix of normalized states: G_ij = <s_i|s_j> / (|s_i||s_j|).
inline Mat gram_matrix(const std::vector<Ket>& states) {
  const auto n = static_cast<Eigen::Index>(states.size());
  std::vector<double> norms(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    norms[i] = states[i].norm();
    if (norms[i] <= 0.0)
      throw LayoutError("gram_matrix: zero-norm state at index " +
                        std::to_string(i));
  }
  Mat g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      g(i, j) = inner(states[static_cast<std::size_t>(i)],
                      states[static_cast<std::size_t>(j)]) /
                (norms[static_cast<std::size_t>(i)] *
                 norms[static_cast<std::size_t>(j)]);
  return g;
}

}  // namespace loccsim
