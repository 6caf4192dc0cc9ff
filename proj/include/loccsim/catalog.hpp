#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "loccsim/ket.hpp"
#include "loccsim/layout.hpp"
#include "loccsim/operators.hpp"
#include "loccsim/schmidt.hpp"

namespace loccsim {

// One pure component of a candidate, with the label used at protocol leaves.
struct Constituent {
  std::string label;
  double weight = 1.0;
  Ket state;
};

// A state to be discriminated: pure (one constituent) or a mixture of
// orthogonal pure constituents with positive weights summing to one.
struct Candidate {
  std::string label;
  bool mixed = false;
  std::vector<Constituent> constituents;

  DensityOperator density() const {
    const SystemLayout& L = constituents.front().state.layout;
    Mat m = Mat::Zero(L.total_dim(), L.total_dim());
    for (const auto& c : constituents) {
      Vec u = c.state.amplitudes / c.state.norm();
      m += c.weight * (u * u.adjoint());
    }
    return DensityOperator(L, std::move(m));
  }
};

inline Candidate pure_candidate(std::string label, Ket state) {
  Candidate c;
  c.label = label;
  state.label = label;
  c.constituents.push_back({std::move(label), 1.0, std::move(state)});
  return c;
}

inline Candidate mixed_candidate(std::string label,
                                 std::vector<Constituent> parts,
                                 double tol = kDefaultTol) {
  if (parts.size() < 2) throw LayoutError("mixed_candidate: need >= 2 parts");
  double wsum = 0.0;
  for (auto& p : parts) {
    if (p.weight <= 0.0) throw LayoutError("mixed_candidate: weight <= 0");
    p.state.label = p.label;
    wsum += p.weight;
  }
  if (std::abs(wsum - 1.0) > tol)
    throw LayoutError("mixed_candidate: weights do not sum to 1");
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(inner(parts[i].state, parts[j].state)) >
          tol * parts[i].state.norm() * parts[j].state.norm())
        throw LayoutError("mixed_candidate: constituents not orthogonal");
  Candidate c;
  c.label = std::move(label);
  c.mixed = true;
  c.constituents = std::move(parts);
  return c;
}

struct CatalogSet {
  std::string name;
  SystemLayout layout;
  std::vector<Candidate> candidates;
  std::map<std::string, std::string> metadata;

  std::vector<Ket> pure_states() const {
    std::vector<Ket> out;
    for (const auto& c : candidates)
      for (const auto& p : c.constituents) out.push_back(p.state);
    return out;
  }
};

// Candidates must be pairwise distinguishable in principle: trace inner
// product of their densities must vanish.
inline void check_set_orthogonality(const CatalogSet& s, double tol = kDefaultTol) {
  for (std::size_t i = 0; i < s.candidates.size(); ++i) {
    Mat di = s.candidates[i].density().matrix;
    for (std::size_t j = 0; j < i; ++j) {
      Mat dj = s.candidates[j].density().matrix;
      if (std::abs((di * dj).trace()) > tol)
        throw LayoutError("catalog set '" + s.name + "': candidates '" +
                          s.candidates[i].label + "' and '" +
                          s.candidates[j].label + "' not orthogonal");
    }
  }
}

inline SystemLayout qutrit_pair_layout() {
  return SystemLayout({{"A", 3, "Alice"}, {"B", 3, "Bob"}});
}

inline SystemLayout ququad_pair_layout() {
  return SystemLayout({{"A", 4, "Alice"}, {"B", 4, "Bob"}});
}

inline SystemLayout resource_layout() {
  return SystemLayout({{"a", 2, "Alice"}, {"b", 2, "Bob"}});
}

// Two-qubit maximally entangled resource |00> + |11> on ancillas a, b.
inline Ket resource_phi() {
  return product_ket(resource_layout(), {lv({1, 0}), lv({1, 0})}, "phi") +
         product_ket(resource_layout(), {lv({0, 1}), lv({0, 1})});
}

namespace detail {

inline Ket q3(const Vec& va, const Vec& vb, std::string label = {}) {
  return product_ket(qutrit_pair_layout(), {va, vb}, std::move(label));
}

inline Ket q4(const Vec& va, const Vec& vb, std::string label = {}) {
  return product_ket(ququad_pair_layout(), {va, vb}, std::move(label));
}

inline cd omega() {
  using std::numbers::pi;
  return std::polar(1.0, 2.0 * pi / 3.0);
}

// The six tile states on 3x3; the first five are products, the sixth is the
// entangled stopper-like state orthogonal to all of them.
inline std::vector<Ket> tiles_states() {
  const Vec e0 = lv({1, 0, 0}), e1 = lv({0, 1, 0}), e2 = lv({0, 0, 1});
  std::vector<Ket> s;
  s.push_back(q3(e0, lv({1, -1, 0}), "Psi1"));
  s.push_back(q3(lv({1, -1, 0}), e2, "Psi2"));
  s.push_back(q3(e2, lv({0, 1, -1}), "Psi3"));
  s.push_back(q3(lv({0, 1, -1}), e0, "Psi4"));
  s.push_back(q3(lv({1, 1, 1}), lv({1, 1, 1}), "Psi5"));
  Ket psi6 = q3(e0, lv({1, 1, 0})) - q3(lv({1, 1, 0}), e2);
  psi6.label = "Psi6";
  s.push_back(std::move(psi6));
  return s;
}

// Sixteen product states on 4x4 built from thirds-of-unity phase rows plus
// the +/- pair block and the all-ones state.
inline std::vector<Ket> quad_states16() {
  const cd w = omega(), w2 = w * w;
  const Vec e0 = lv({1, 0, 0, 0}), e3 = lv({0, 0, 0, 1});
  const Vec low1 = lv({1, 1, 1, 0}), low2 = lv({1, w, w2, 0}), low3 = lv({1, w2, w, 0});
  const Vec hi1 = lv({0, 1, 1, 1}), hi2 = lv({0, 1, w, w2}), hi3 = lv({0, 1, w2, w});
  const Vec p12 = lv({0, 1, 1, 0}), m12 = lv({0, 1, -1, 0});
  const Vec all = lv({1, 1, 1, 1});
  std::vector<Ket> s;
  auto add = [&](const Vec& a, const Vec& b, std::string label) {
    s.push_back(q4(a, b, std::move(label)));
  };
  add(e0, low1, "Psi1^(1)");
  add(e0, low2, "Psi1^(2)");
  add(e0, low3, "Psi1^(3)");
  add(low1, e3, "Psi2^(1)");
  add(low2, e3, "Psi2^(2)");
  add(low3, e3, "Psi2^(3)");
  add(e3, hi1, "Psi3^(1)");
  add(e3, hi2, "Psi3^(2)");
  add(e3, hi3, "Psi3^(3)");
  add(hi1, e0, "Psi4^(1)");
  add(hi2, e0, "Psi4^(2)");
  add(hi3, e0, "Psi4^(3)");
  add(p12, p12, "Psi5^(1)");
  add(p12, m12, "Psi5^(2)");
  add(m12, p12, "Psi5^(3)");
  add(m12, m12, "Psi5^(4)");
  add(all, all, "Psi6");
  // 17 entries built; the full product basis drops the all-ones state
  return s;
}

inline Ket quad_psi7() {
  Ket k = q4(lv({1, 0, 0, 0}), lv({1, 1, 1, 0})) -
          q4(lv({1, 1, 1, 0}), lv({0, 0, 0, 1}));
  k.label = "Psi7";
  return k;
}

inline CatalogSet pure_set(std::string name, SystemLayout layout,
                           std::vector<Ket> states,
                           std::map<std::string, std::string> metadata = {}) {
  CatalogSet s;
  s.name = std::move(name);
  s.layout = std::move(layout);
  for (auto& k : states) {
    std::string label = k.label;
    s.candidates.push_back(pure_candidate(std::move(label), std::move(k)));
  }
  s.metadata = std::move(metadata);
  check_set_orthogonality(s);
  return s;
}

}  // namespace detail

// ---- 3x3 families ----------------------------------------------------------

inline CatalogSet tiles6() {
  return detail::pure_set("tiles6", qutrit_pair_layout(), detail::tiles_states());
}

inline CatalogSet tiles5() {
  auto all = detail::tiles_states();
  all.pop_back();
  return detail::pure_set("tiles5", qutrit_pair_layout(), std::move(all),
                          {{"unextendible", "true"}});
}

// Dropping the all-ones tile leaves |1>|1> in the complement: the seesaw
// positive control.
inline CatalogSet tiles4_no_stopper() {
  auto all = detail::tiles_states();
  all.resize(4);
  return detail::pure_set("tiles4-no-stopper", qutrit_pair_layout(), std::move(all),
                          {{"unextendible", "false"}});
}

// Mixture of the five product tiles versus the entangled sixth state.
inline CatalogSet tiles_rho_psi(std::vector<double> weights = {}) {
  auto states = detail::tiles_states();
  if (weights.empty()) weights.assign(5, 0.2);
  if (weights.size() != 5)
    throw LayoutError("tiles_rho_psi: need 5 weights");
  std::vector<Constituent> parts;
  for (int i = 0; i < 5; ++i)
    parts.push_back({states[static_cast<std::size_t>(i)].label, weights[static_cast<std::size_t>(i)],
                     states[static_cast<std::size_t>(i)]});
  CatalogSet s;
  s.name = "tiles-rho-psi";
  s.layout = qutrit_pair_layout();
  s.candidates.push_back(mixed_candidate("rho", std::move(parts)));
  // candidate label "psi", but the constituent keeps the leaf vocabulary
  Candidate psi;
  psi.label = "psi";
  psi.constituents.push_back({"Psi6", 1.0, states[5]});
  s.candidates.push_back(std::move(psi));
  check_set_orthogonality(s);
  return s;
}

// Maximally entangled state of two qudits versus the normalized projector
// onto its orthogonal complement.  The resource rank needed to break these
// apart is known externally and recorded as metadata, never verified here.
inline CatalogSet yu_duan(int d) {
  if (d != 3 && d != 4) throw LayoutError("yu_duan: d must be 3 or 4");
  SystemLayout L({{"A", d, "Alice"}, {"B", d, "Bob"}});
  Vec mes = Vec::Zero(d * d);
  for (int i = 0; i < d; ++i) mes[i * d + i] = 1.0;
  Ket phi(L, mes, "phi");
  Vec u = mes / mes.norm();
  Mat comp = Mat::Identity(d * d, d * d) - u * u.adjoint();
  Eigen::SelfAdjointEigenSolver<Mat> es(comp);
  std::vector<Constituent> parts;
  const double w = 1.0 / static_cast<double>(d * d - 1);
  int idx = 0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()[i] < 0.5) continue;
    parts.push_back({"sigma[" + std::to_string(idx++) + "]", w,
                     Ket(L, es.eigenvectors().col(i))});
  }
  CatalogSet s;
  s.name = "yu-duan-" + std::to_string(d);
  s.layout = L;
  s.candidates.push_back(pure_candidate("phi", std::move(phi)));
  s.candidates.push_back(mixed_candidate("sigma", std::move(parts)));
  s.metadata = {{"necessary_schmidt_rank", std::to_string(d)},
                {"provenance", "cited"},
                {"citation", "Yu & Duan (2014)"}};
  check_set_orthogonality(s);
  return s;
}

// ---- 4x4 families -----------------------------------------------------------

inline CatalogSet quad_product_basis() {
  auto s16 = detail::quad_states16();
  s16.pop_back();  // keep the sixteen basis members only
  return detail::pure_set("quad-basis16", ququad_pair_layout(), std::move(s16));
}

// Twelve-product subfamily: drop the five phase-free members, add the
// all-ones state.
inline CatalogSet quad_upb() {
  auto s17 = detail::quad_states16();
  std::vector<Ket> keep;
  for (auto& k : s17)
    if (k.label.find("^(1)") == std::string::npos) keep.push_back(std::move(k));
  return detail::pure_set("quad-upb12", ququad_pair_layout(), std::move(keep),
                          {{"unextendible", "true"}});
}

inline CatalogSet quad13() {
  auto s = quad_upb();
  s.name = "quad13";
  s.metadata.clear();
  s.candidates.push_back(pure_candidate("Psi7", detail::quad_psi7()));
  check_set_orthogonality(s);
  return s;
}

// Uniform mixture of the twelve products versus the entangled thirteenth.
inline CatalogSet quad_S() {
  auto u = quad_upb();
  std::vector<Constituent> parts;
  for (auto& c : u.candidates)
    parts.push_back({c.label, 1.0 / 12.0, c.constituents.front().state});
  CatalogSet s;
  s.name = "quad-S";
  s.layout = ququad_pair_layout();
  s.candidates.push_back(mixed_candidate("rho_U", std::move(parts)));
  s.candidates.push_back(pure_candidate("Psi7", detail::quad_psi7()));
  check_set_orthogonality(s);
  return s;
}

// Entangled replacement for the sixth tile discussed alongside the first
// protocol; still orthogonal to the five product tiles.
inline Ket variant_entangled() {
  Ket k = detail::q3(lv({0, 1, 1}), lv({1, 0, 0})) -
          detail::q3(lv({0, 0, 1}), lv({0, 1, 1}));
  k.label = "variant";
  return k;
}

// ---- registries -------------------------------------------------------------

inline CatalogSet set_by_name(const std::string& name) {
  static const std::map<std::string, std::function<CatalogSet()>> reg = {
      {"tiles6", [] { return tiles6(); }},
      {"tiles5", [] { return tiles5(); }},
      {"tiles4-no-stopper", [] { return tiles4_no_stopper(); }},
      {"tiles-rho-psi", [] { return tiles_rho_psi(); }},
      {"yu-duan-3", [] { return yu_duan(3); }},
      {"yu-duan-4", [] { return yu_duan(4); }},
      {"quad-basis16", [] { return quad_product_basis(); }},
      {"quad-upb12", [] { return quad_upb(); }},
      {"quad13", [] { return quad13(); }},
      {"quad-S", [] { return quad_S(); }},
  };
  auto it = reg.find(name);
  if (it == reg.end()) throw LayoutError("unknown set '" + name + "'");
  return it->second();
}

inline std::vector<std::string> set_names() {
  return {"tiles6",       "tiles5",   "tiles4-no-stopper", "tiles-rho-psi",
          "yu-duan-3",    "yu-duan-4", "quad-basis16",      "quad-upb12",
          "quad13",       "quad-S"};
}

inline Ket state_by_name(const std::string& name) {
  if (name == "psi6") return detail::tiles_states()[5];
  if (name == "psi7") return detail::quad_psi7();
  if (name == "variant") return variant_entangled();
  if (name == "phi-ab" || name == "mes2") {
    Ket k = resource_phi();
    k.label = name;
    return k;
  }
  if (name == "mes3" || name == "mes4") {
    int d = name == "mes3" ? 3 : 4;
    SystemLayout L({{"A", d, "Alice"}, {"B", d, "Bob"}});
    Vec v = Vec::Zero(d * d);
    for (int i = 0; i < d; ++i) v[i * d + i] = 1.0;
    return Ket(L, v, name);
  }
  if (name.rfind("psi", 0) == 0 && name.size() == 4) {
    int i = name[3] - '1';
    if (i >= 0 && i < 6) return detail::tiles_states()[static_cast<std::size_t>(i)];
  }
  throw LayoutError("unknown state '" + name + "'");
}

inline std::vector<std::string> state_names() {
  return {"psi1", "psi2", "psi3", "psi4", "psi5", "psi6",
          "psi7", "variant", "phi-ab", "mes2", "mes3", "mes4"};
}

}  // namespace loccsim
