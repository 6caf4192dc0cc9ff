#pragma once

#include <string>
#include <utility>
#include <vector>

#include "loccsim/catalog.hpp"
#include "loccsim/protocol.hpp"

namespace loccsim {

namespace detail {

inline Vec kron2(const Vec& u, const Vec& v) {
  Vec out(u.size() * v.size());
  for (Eigen::Index i = 0; i < u.size(); ++i)
    for (Eigen::Index j = 0; j < v.size(); ++j) out[i * v.size() + j] = u[i] * v[j];
  return out;
}

// Conjugates a slice projector by the bit flip on every two-level ancilla
// subsystem it touches; pure index relabeling, so matrices stay exact.
inline Projector mirror_ancilla(const Projector& p) {
  std::vector<char> flip(p.ids.size(), 0);
  bool any = false;
  for (std::size_t k = 0; k < p.ids.size(); ++k)
    if (p.ids[k] == "a" || p.ids[k] == "b") {
      if (p.dims[k] != 2)
        throw LayoutError("mirror_ancilla: ancilla '" + p.ids[k] + "' not two-level");
      flip[k] = 1;
      any = true;
    }
  if (!any) return p;
  const int d = p.slice_dim();
  std::vector<int> perm(static_cast<std::size_t>(d));
  std::vector<int> dg(p.ids.size());
  for (int i = 0; i < d; ++i) {
    int rem = i;
    for (std::size_t k = p.ids.size(); k-- > 0;) {
      dg[k] = rem % p.dims[k];
      rem /= p.dims[k];
    }
    int j = 0;
    for (std::size_t k = 0; k < p.ids.size(); ++k)
      j = j * p.dims[k] + (flip[k] ? 1 - dg[k] : dg[k]);
    perm[static_cast<std::size_t>(i)] = j;
  }
  Projector q = p;
  q.matrix = Mat::Zero(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c)
      q.matrix(perm[static_cast<std::size_t>(r)], perm[static_cast<std::size_t>(c)]) =
          p.matrix(r, c);
  q.range_basis.clear();
  for (const auto& v : p.range_basis) {
    Vec w = Vec::Zero(d);
    for (int r = 0; r < d; ++r) w[perm[static_cast<std::size_t>(r)]] = v[r];
    q.range_basis.push_back(std::move(w));
  }
  return q;
}

inline ProtocolNode mirror_subtree(const ProtocolNode& n) {
  if (n.leaf) return n;
  ProtocolNode out = n;
  for (auto& p : out.measurement.projectors) p = mirror_ancilla(p);
  for (std::size_t i = 0; i < out.children.size(); ++i)
    out.children[i] = mirror_subtree(n.children[i]);
  return out;
}

inline LocalMeasurement local_measurement(std::string name, std::string party,
                                          std::vector<std::string> outcome_names,
                                          std::vector<Projector> ps) {
  LocalMeasurement m;
  m.name = std::move(name);
  m.party = std::move(party);
  m.outcome_names = std::move(outcome_names);
  m.projectors = std::move(ps);
  return m;
}

}  // namespace detail

// Tree that identifies all six tile states on 3x3 with the two-qubit
// resource: one ancilla-correlated round each side, then tile splits that
// terminate in direct identifications or orthogonal two-state endgames.
inline ProtocolTree prop1_protocol() {
  using detail::kron2;
  const SystemLayout full = concat(qutrit_pair_layout(), resource_layout());
  const Vec e0 = lv({1, 0, 0}), e1 = lv({0, 1, 0}), e2 = lv({0, 0, 1});
  const Vec f0 = lv({1, 0}), f1 = lv({0, 1});

  auto span_proj = [&](const std::vector<std::string>& ids,
                       const std::vector<Vec>& span) {
    return projector_from_span(full, ids, span);
  };

  // Bob-side split under the b=0 correlation branch.
  std::vector<Projector> w;
  w.push_back(span_proj({"B", "b"}, {kron2(e0 - e1, f0)}));
  w.push_back(span_proj({"B", "b"}, {kron2(e0 + e1, f0), kron2(e2, f1)}));
  w.push_back(remainder_projector(w));
  ProtocolNode w_node = measure_node(
      detail::local_measurement("stopper-split", "Bob", {"W1", "W2", "rest"}, w),
      {identify_leaf("Psi1"), two_state_leaf("Psi5", "Psi6"), eliminated_leaf()});

  std::vector<Projector> s;
  s.push_back(span_proj({"A", "a"}, {kron2(e0 - e1, f1)}));
  s.push_back(span_proj({"A", "a"}, {kron2(e0, f0), kron2(e0 + e1, f1)}));
  s.push_back(remainder_projector(s));
  ProtocolNode s_node = measure_node(
      detail::local_measurement("left-tiles", "Alice", {"S1", "S2", "rest"}, s),
      {identify_leaf("Psi2"), std::move(w_node), eliminated_leaf()});

  std::vector<Projector> v;
  v.push_back(span_proj({"B", "b"}, {kron2(e0, f0)}));
  v.push_back(span_proj({"B", "b"}, {kron2(e1, f0), kron2(e2, f1)}));
  v.push_back(remainder_projector(v));
  ProtocolNode v_node = measure_node(
      detail::local_measurement("right-tiles", "Bob", {"V1", "V2", "rest"}, v),
      {two_state_leaf("Psi4", "Psi5"), two_state_leaf("Psi3", "Psi5"),
       eliminated_leaf()});

  std::vector<Projector> a;
  a.push_back(span_proj({"A", "a"}, {kron2(e0, f0), kron2(e0, f1), kron2(e1, f1)}));
  a.push_back(span_proj({"A", "a"}, {kron2(e1, f0), kron2(e2, f0), kron2(e2, f1)}));
  ProtocolNode alice_node = measure_node(
      detail::local_measurement("alice-halves", "Alice", {"A1", "A2"}, a),
      {std::move(s_node), std::move(v_node)});

  std::vector<Projector> root;
  root.push_back(
      span_proj({"B", "b"}, {kron2(e0, f0), kron2(e1, f0), kron2(e2, f1)}));
  root.push_back(
      span_proj({"B", "b"}, {kron2(e0, f1), kron2(e1, f1), kron2(e2, f0)}));
  ProtocolNode mirrored = detail::mirror_subtree(alice_node);
  ProtocolNode root_node = measure_node(
      detail::local_measurement("bob-correlate", "Bob", {"B1", "B2"}, root),
      {std::move(alice_node), std::move(mirrored)});

  return make_tree("prop1", qutrit_pair_layout(), resource_phi(),
                   std::move(root_node));
}

// Tree for the thirteen-state 4x4 family with the same two-qubit resource.
inline ProtocolTree prop3_protocol() {
  using detail::kron2;
  const SystemLayout full = concat(ququad_pair_layout(), resource_layout());
  const cd w = detail::omega(), w2 = w * w;
  const Vec E0 = lv({1, 0, 0, 0}), E1 = lv({0, 1, 0, 0}), E2 = lv({0, 0, 1, 0}),
            E3 = lv({0, 0, 0, 1});
  const Vec low1 = lv({1, 1, 1, 0}), low2 = lv({1, w, w2, 0}),
            low3 = lv({1, w2, w, 0});
  const Vec hi1 = lv({0, 1, 1, 1}), hi2 = lv({0, 1, w, w2}), hi3 = lv({0, 1, w2, w});
  const Vec p12 = lv({0, 1, 1, 0}), m12 = lv({0, 1, -1, 0});
  const Vec f0 = lv({1, 0}), f1 = lv({0, 1});

  auto span_proj = [&](const std::vector<std::string>& ids,
                       const std::vector<Vec>& span) {
    return projector_from_span(full, ids, span);
  };

  // Phase-row identifications on Alice's side.
  std::vector<Projector> a1;
  a1.push_back(span_proj({"A", "a"}, {kron2(low2, f0)}));
  a1.push_back(span_proj({"A", "a"}, {kron2(low3, f0)}));
  a1.push_back(remainder_projector(a1));
  ProtocolNode a1_node = measure_node(
      detail::local_measurement("low-rows", "Alice", {"L2", "L3", "rest"}, a1),
      {identify_leaf("Psi2^(2)"), identify_leaf("Psi2^(3)"), eliminated_leaf()});

  std::vector<Projector> x;
  x.push_back(span_proj({"B", "b"}, {kron2(low2, f1), kron2(low3, f1)}));
  x.push_back(span_proj({"B", "b"}, {kron2(low1, f1), kron2(E3, f0)}));
  x.push_back(remainder_projector(x));
  ProtocolNode x_node = measure_node(
      detail::local_measurement("phase-vs-flat", "Bob", {"X1", "X2", "rest"}, x),
      {two_state_leaf("Psi1^(2)", "Psi1^(3)"), two_state_leaf("Psi6", "Psi7"),
       eliminated_leaf()});

  std::vector<Projector> y1;
  y1.push_back(span_proj({"A", "a"}, {kron2(hi2, f1)}));
  y1.push_back(span_proj({"A", "a"}, {kron2(hi3, f1)}));
  y1.push_back(span_proj({"A", "a"}, {kron2(hi1, f1)}));
  y1.push_back(remainder_projector(y1));
  ProtocolNode y1_node = measure_node(
      detail::local_measurement("high-rows", "Alice", {"H2", "H3", "H1", "rest"}, y1),
      {identify_leaf("Psi4^(2)"), identify_leaf("Psi4^(3)"), identify_leaf("Psi6"),
       eliminated_leaf()});

  // After the ancilla interference round, Bob separates the three phase rows.
  auto z3_branch = [&](double sign) {
    std::vector<Projector> vrows;
    vrows.push_back(span_proj(
        {"B", "b"}, {kron2(E1 + w * E2, f1) + sign * w2 * kron2(E3, f0)}));
    vrows.push_back(span_proj(
        {"B", "b"}, {kron2(E1 + w2 * E2, f1) + sign * w * kron2(E3, f0)}));
    vrows.push_back(
        span_proj({"B", "b"}, {kron2(E1 + E2, f1) + sign * kron2(E3, f0)}));
    vrows.push_back(remainder_projector(vrows));
    return measure_node(
        detail::local_measurement("phase-rows", "Bob", {"P2", "P3", "P1", "rest"},
                                  vrows),
        {identify_leaf("Psi3^(2)"), identify_leaf("Psi3^(3)"),
         identify_leaf("Psi6"), eliminated_leaf()});
  };
  std::vector<Projector> zint;
  zint.push_back(span_proj({"a"}, {f0 + f1}));
  zint.push_back(span_proj({"a"}, {f0 - f1}));
  ProtocolNode z3_node = measure_node(
      detail::local_measurement("ancilla-interfere", "Alice", {"aplus", "aminus"},
                                zint),
      {z3_branch(1.0), z3_branch(-1.0)});

  std::vector<Projector> z;
  z.push_back(span_proj({"A", "a"}, {kron2(p12, f1)}));
  z.push_back(span_proj({"A", "a"}, {kron2(m12, f1)}));
  z.push_back(span_proj({"A", "a"}, {kron2(E3, f0), kron2(E3, f1)}));
  z.push_back(remainder_projector(z));
  ProtocolNode z_node = measure_node(
      detail::local_measurement("pair-block", "Alice", {"Z1", "Z2", "Z3", "rest"}, z),
      {two_state_leaf("Psi5^(2)", "Psi6"), two_state_leaf("Psi5^(3)", "Psi5^(4)"),
       std::move(z3_node), eliminated_leaf()});

  std::vector<Projector> y;
  y.push_back(span_proj({"B", "b"}, {kron2(E0, f1)}));
  y.push_back(
      span_proj({"B", "b"}, {kron2(E1, f1), kron2(E2, f1), kron2(E3, f0)}));
  y.push_back(remainder_projector(y));
  ProtocolNode y_node = measure_node(
      detail::local_measurement("corner-vs-bulk", "Bob", {"Y1", "Y2", "rest"}, y),
      {std::move(y1_node), std::move(z_node), eliminated_leaf()});

  std::vector<Projector> a;
  a.push_back(span_proj({"A", "a"}, {kron2(low2, f0), kron2(low3, f0)}));
  a.push_back(span_proj({"A", "a"}, {kron2(low1, f0), kron2(E0, f1)}));
  a.push_back(span_proj({"A", "a"}, {kron2(E3, f0), kron2(E3, f1), kron2(E1, f1),
                                     kron2(E2, f1)}));
  ProtocolNode alice_node = measure_node(
      detail::local_measurement("alice-thirds", "Alice", {"A1", "A2", "A3"}, a),
      {std::move(a1_node), std::move(x_node), std::move(y_node)});

  std::vector<Projector> root;
  root.push_back(span_proj({"B", "b"}, {kron2(E0, f1), kron2(E1, f1), kron2(E2, f1),
                                        kron2(E3, f0)}));
  root.push_back(span_proj({"B", "b"}, {kron2(E0, f0), kron2(E1, f0), kron2(E2, f0),
                                        kron2(E3, f1)}));
  ProtocolNode mirrored = detail::mirror_subtree(alice_node);
  ProtocolNode root_node = measure_node(
      detail::local_measurement("bob-correlate", "Bob", {"B1", "B2"}, root),
      {std::move(alice_node), std::move(mirrored)});

  return make_tree("prop3", ququad_pair_layout(), resource_phi(),
                   std::move(root_node));
}

inline ProtocolTree protocol_by_name(const std::string& name) {
  if (name == "prop1") return prop1_protocol();
  if (name == "prop3") return prop3_protocol();
  throw LayoutError("unknown protocol '" + name + "'");
}

inline std::vector<std::string> protocol_names() { return {"prop1", "prop3"}; }

struct FirstRoundReport {
  bool measurement_ok = false;
  bool survivors_orthogonal = true;
  std::string detail;
  std::vector<std::string> overlaps;  // offending pairs, humanized
};

// Runs only the opening correlation round against the five product tiles
// plus a chosen sixth state and reports whether orthogonality survives it.
inline FirstRoundReport variant_first_round(const Ket& sixth) {
  const SystemLayout full = concat(qutrit_pair_layout(), resource_layout());
  const Vec e0 = lv({1, 0, 0}), e1 = lv({0, 1, 0}), e2 = lv({0, 0, 1});
  const Vec f0 = lv({1, 0}), f1 = lv({0, 1});
  std::vector<Projector> root;
  root.push_back(projector_from_span(
      full, {"B", "b"},
      {detail::kron2(e0, f0), detail::kron2(e1, f1), detail::kron2(e2, f1)}));
  root.push_back(projector_from_span(
      full, {"B", "b"},
      {detail::kron2(e0, f1), detail::kron2(e1, f0), detail::kron2(e2, f0)}));
  LocalMeasurement m = detail::local_measurement("variant-correlate", "Bob",
                                                 {"B1", "B2"}, std::move(root));

  auto states = tiles5().pure_states();
  states.push_back(sixth);
  std::vector<BranchState> in;
  for (const auto& s : states) {
    BranchState bs;
    bs.candidate = bs.constituent = s.label;
    bs.state = tensor(s.normalized(), resource_phi().normalized(), s.label);
    in.push_back(std::move(bs));
  }

  FirstRoundReport rep;
  const MeasurementCheck mc = is_projective_measurement(m.projectors);
  rep.measurement_ok = mc.ok;
  rep.detail = mc.failure;
  auto branches = apply_local_measurement(in, m, full);
  for (std::size_t o = 0; o < branches.size(); ++o) {
    std::vector<BranchState> surv;
    for (auto& bs : branches[o])
      if (bs.survivor) surv.push_back(std::move(bs));
    for (std::size_t i = 0; i < surv.size(); ++i)
      for (std::size_t j = 0; j < i; ++j) {
        const double ov = std::abs(inner(surv[i].state, surv[j].state)) /
                          (surv[i].state.norm() * surv[j].state.norm());
        if (ov > kDefaultTol) {
          rep.survivors_orthogonal = false;
          rep.overlaps.push_back(m.outcome_names[o] + ": " + surv[i].constituent +
                                 " vs " + surv[j].constituent + " overlap " +
                                 std::to_string(ov));
        }
      }
  }
  return rep;
}

}  // namespace loccsim
