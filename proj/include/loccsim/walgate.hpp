#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "loccsim/ket.hpp"
#include "loccsim/layout.hpp"
#include "loccsim/schmidt.hpp"

namespace loccsim {

namespace detail {

// Solves for a unit vector x = cos(t) e1 + e^{i theta} sin(t) e2 whose
// quadratic form x' C x equals alpha*C00 + (1-alpha)*C11 for a 2x2
// compression C and alpha in [0,1].  Always solvable: the value set of the
// form over that family covers the segment between the diagonal entries.
inline std::pair<double, double> mix_to_diagonal_target(const Mat& C,
                                                        double alpha) {
  const cd g = C(0, 0) - C(1, 1);
  const double scale = C.cwiseAbs().maxCoeff();
  if (std::abs(g) <= 1e-15 * std::max(1.0, scale)) return {0.0, 0.0};
  const double p = std::abs(C(0, 1)), q = std::abs(C(1, 0));
  const double a01 = std::arg(C(0, 1) == cd(0) ? cd(1) : C(0, 1));
  const double a10 = std::arg(C(1, 0) == cd(0) ? cd(1) : C(1, 0));
  const double gamma = 0.5 * (a01 + a10);
  const double rel = gamma - std::arg(g);
  // pick phi so s(phi) = C01 e^{i theta} + C10 e^{-i theta} is parallel to g
  const double A = (p + q) * std::sin(rel);
  const double B = (p - q) * std::cos(rel);
  const double phi = (A == 0.0 && B == 0.0) ? 0.0 : std::atan2(-A, B);
  const double theta = phi - 0.5 * (a01 - a10);
  const cd s = C(0, 1) * std::polar(1.0, theta) + C(1, 0) * std::polar(1.0, -theta);
  const double c = (s * std::conj(g)).real() / std::norm(g);
  // (c/2) sin 2t + (1/2) cos 2t = alpha - 1/2
  const double R = 0.5 * std::sqrt(c * c + 1.0);
  const double delta = std::atan2(1.0, c);
  double arg = (alpha - 0.5) / R;
  arg = std::clamp(arg, -1.0, 1.0);
  const double t = 0.5 * (std::asin(arg) - delta);
  return {t, theta};
}

}  // namespace detail

// Returns a unitary U with diag(U M U') = 0 for a traceless square M.
// Construction: take the orthonormal eigenbasis of the Hermitian part of M
// for a deterministic vector order, fold the basis vectors together one at a
// time so the folded vector's quadratic form tracks the running mean of the
// diagonal contributions (each fold is an exact 2x2 solve), ending at a unit
// vector v with v' M v = tr(M)/n = 0.  A Householder frame maps v to the
// first row; the trailing principal block is traceless again and recursion
// finishes the diagonal.
inline Mat zero_diagonal_unitary(const Mat& M, double tol = kDefaultTol) {
  const Eigen::Index n = M.rows();
  if (M.cols() != n) throw LayoutError("zero_diagonal_unitary: not square");
  const double scale = std::max(1.0, M.norm());
  if (std::abs(M.trace()) > tol * scale)
    throw LayoutError("zero_diagonal_unitary: matrix is not traceless");
  if (n == 0) return Mat(0, 0);
  double maxdiag = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    maxdiag = std::max(maxdiag, std::abs(M(i, i)));
  if (maxdiag <= 1e-14 * scale) return Mat::Identity(n, n);
  if (n == 1) return Mat::Identity(1, 1);

  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (M + M.adjoint()));
  const Mat& basis = es.eigenvectors();
  Vec v = basis.col(0);
  for (Eigen::Index k = 1; k < n; ++k) {
    const Vec u = basis.col(k);
    Mat C(2, 2);
    C(0, 0) = v.dot(M * v);
    C(0, 1) = v.dot(M * u);
    C(1, 0) = u.dot(M * v);
    C(1, 1) = u.dot(M * u);
    const double alpha =
        static_cast<double>(k) / static_cast<double>(k + 1);
    auto [t, theta] = detail::mix_to_diagonal_target(C, alpha);
    v = std::cos(t) * v + std::polar(1.0, theta) * std::sin(t) * u;
    v.normalize();
  }

  // unitary frame with v as its first column, via QR of the single column
  Eigen::HouseholderQR<Mat> qr(v);
  Mat W = qr.householderQ();
  // keep the exact phase so W e1 == v
  const cd r = W.col(0).dot(v);
  W.col(0) *= r;

  Mat B = W.adjoint() * M * W;
  Mat U = Mat::Identity(n, n);
  U.bottomRightCorner(n - 1, n - 1) =
      zero_diagonal_unitary(B.bottomRightCorner(n - 1, n - 1), 10 * tol);
  return U * W.adjoint();
}

// One round of local discrimination of two orthogonal pure states on a
// two-party layout: the first party measures in a rotated basis chosen so
// both states' conditional remainders on the other side stay orthogonal,
// then the second party projects onto the first state's conditional vector.
struct TwoStateProtocol {
  std::string label_first, label_second;
  SystemLayout layout;
  BipartiteShape shape;
  Mat alice_basis;  // columns are the measurement basis on the left slice

  enum class BranchRule { measure, always_first, always_second, dead };
  struct Branch {
    BranchRule rule = BranchRule::dead;
    Vec bob_first;  // unit conditional vector of the first state (measure)
  };
  std::vector<Branch> branches;
};

inline TwoStateProtocol walgate_protocol(const Ket& psi, const Ket& phi,
                                         double tol = kDefaultTol) {
  if (!psi.layout.same_structure(phi.layout))
    throw LayoutError("walgate_protocol: layout mismatch");
  TwoStateProtocol p;
  p.label_first = psi.label;
  p.label_second = phi.label;
  p.layout = psi.layout;
  p.shape = bipartite_shape(psi.layout);
  const Mat mpsi = as_bipartite_matrix(psi.normalized(), p.shape);
  const Mat mphi = as_bipartite_matrix(phi.normalized(), p.shape);
  // D(i,j) = <eta_j|nu_i> where eta/nu are the conditional right-side
  // vectors of psi/phi per left basis row; tr D = <psi|phi> = 0
  const Mat D = mphi * mpsi.adjoint();
  if (std::abs(D.trace()) > tol)
    throw LayoutError("walgate_protocol: states are not orthogonal");
  const Mat U = zero_diagonal_unitary(D, tol);
  p.alice_basis = U.adjoint();
  const Mat tpsi = U * mpsi;
  const Mat tphi = U * mphi;
  const double elim = 1e-12;
  for (Eigen::Index k = 0; k < U.rows(); ++k) {
    TwoStateProtocol::Branch b;
    const double npsi = tpsi.row(k).squaredNorm();
    const double nphi = tphi.row(k).squaredNorm();
    if (npsi > elim && nphi > elim) {
      b.rule = TwoStateProtocol::BranchRule::measure;
      b.bob_first = tpsi.row(k).transpose() / std::sqrt(npsi);
    } else if (npsi > elim) {
      b.rule = TwoStateProtocol::BranchRule::always_first;
    } else if (nphi > elim) {
      b.rule = TwoStateProtocol::BranchRule::always_second;
    }
    p.branches.push_back(std::move(b));
  }
  return p;
}

struct TwoStateOutcome {
  std::string winner;
  double p_first = 0.0, p_second = 0.0;
  double ambiguity = 0.0;  // 1 - max probability; 0 for a clean resolution
};

// Runs the protocol on an input over the same layout.  Foreign inputs are
// legal; they simply split their mass between the two verdicts.
inline TwoStateOutcome run_two_state(const TwoStateProtocol& p, const Ket& input) {
  if (!input.layout.same_structure(p.layout))
    throw LayoutError("run_two_state: layout mismatch");
  const Mat m = as_bipartite_matrix(input.normalized(), p.shape);
  const Mat rotated = p.alice_basis.adjoint() * m;
  TwoStateOutcome out;
  for (Eigen::Index k = 0; k < rotated.rows(); ++k) {
    const double pk = rotated.row(k).squaredNorm();
    if (pk <= 0.0) continue;
    const auto& b = p.branches[static_cast<std::size_t>(k)];
    switch (b.rule) {
      case TwoStateProtocol::BranchRule::measure: {
        const cd ov = b.bob_first.dot(rotated.row(k).transpose());
        const double hit = std::norm(ov);
        out.p_first += hit;
        out.p_second += pk - hit;
        break;
      }
      case TwoStateProtocol::BranchRule::always_first:
        out.p_first += pk;
        break;
      case TwoStateProtocol::BranchRule::always_second:
        out.p_second += pk;
        break;
      case TwoStateProtocol::BranchRule::dead:
        break;
    }
  }
  out.winner = out.p_first >= out.p_second ? p.label_first : p.label_second;
  out.ambiguity = 1.0 - std::max(out.p_first, out.p_second);
  return out;
}

}  // namespace loccsim
