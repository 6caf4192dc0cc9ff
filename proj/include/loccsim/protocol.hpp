#pragma once

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "loccsim/catalog.hpp"
#include "loccsim/ket.hpp"
#include "loccsim/layout.hpp"
#include "loccsim/operators.hpp"
#include "loccsim/schmidt.hpp"
#include "loccsim/walgate.hpp"

namespace loccsim {

constexpr double kElimTol = 1e-12;       // squared-norm ratio under this is gone
constexpr double kCompletenessTol = 1e-12;

// One party's projective measurement on a slice of the full layout.
struct LocalMeasurement {
  std::string name;
  std::string party;
  std::vector<std::string> outcome_names;
  std::vector<Projector> projectors;
};

struct Decision {
  enum class Kind { identify, two_state, eliminated };
  Kind kind = Kind::eliminated;
  std::string label;                 // identify
  std::array<std::string, 2> pair;   // two_state
};

struct ProtocolNode {
  bool leaf = true;
  Decision decision;
  LocalMeasurement measurement;
  std::vector<ProtocolNode> children;
};

inline ProtocolNode identify_leaf(std::string label) {
  ProtocolNode n;
  n.decision = {Decision::Kind::identify, std::move(label), {}};
  return n;
}

inline ProtocolNode two_state_leaf(std::string a, std::string b) {
  ProtocolNode n;
  n.decision = {Decision::Kind::two_state, {}, {std::move(a), std::move(b)}};
  return n;
}

inline ProtocolNode eliminated_leaf() { return ProtocolNode{}; }

inline ProtocolNode measure_node(LocalMeasurement m, std::vector<ProtocolNode> children) {
  if (m.projectors.size() != children.size() ||
      m.outcome_names.size() != children.size())
    throw LayoutError("measure_node: outcome/child count mismatch");
  ProtocolNode n;
  n.leaf = false;
  n.measurement = std::move(m);
  n.children = std::move(children);
  return n;
}

// A measurement tree: candidates live on candidate_layout, the entangled
// resource on its own ancilla layout, and every measurement acts on slices
// of the concatenated layout.
struct ProtocolTree {
  std::string name;
  SystemLayout candidate_layout;
  Ket resource;
  SystemLayout full_layout;
  ProtocolNode root;
};

inline ProtocolTree make_tree(std::string name, SystemLayout candidate_layout,
                              Ket resource, ProtocolNode root) {
  ProtocolTree t;
  t.name = std::move(name);
  t.candidate_layout = std::move(candidate_layout);
  t.full_layout = concat(t.candidate_layout, resource.layout);
  t.resource = std::move(resource);
  t.root = std::move(root);
  return t;
}

// ---- single-step semantics --------------------------------------------------

struct BranchState {
  std::string candidate, constituent;
  Ket state;            // unnormalized; squared norm = cumulative probability
  bool survivor = true;
  double probability = 0.0;  // this step's squared-norm ratio
};

// Applies one measurement to a list of labeled states and splits them per
// outcome.  Survivorship uses the squared-norm ratio against elim_tol.
inline std::vector<std::vector<BranchState>> apply_local_measurement(
    const std::vector<BranchState>& in, const LocalMeasurement& m,
    const SystemLayout& layout, double elim_tol = kElimTol) {
  std::vector<std::vector<BranchState>> out(m.projectors.size());
  for (std::size_t o = 0; o < m.projectors.size(); ++o) {
    const Mat g = embed_matrix(layout, m.projectors[o].ids, m.projectors[o].matrix);
    for (const auto& bs : in) {
      BranchState nxt = bs;
      nxt.state.amplitudes = g * bs.state.amplitudes;
      const double before = bs.state.norm2();
      const double after = nxt.state.norm2();
      nxt.probability = before > 0.0 ? after / before : 0.0;
      nxt.survivor = nxt.probability > elim_tol;
      out[o].push_back(std::move(nxt));
    }
  }
  return out;
}

// ---- verification ------------------------------------------------------------

struct NodeCheck {
  std::string path;        // outcome-name chain from the root; "(root)" at top
  bool measurement_ok = true;
  std::string measurement_detail;
  bool survivors_orthogonal = true;
  std::string orthogonality_detail;
};

struct LeafMass {
  std::string path;
  std::string leaf;         // printable leaf description
  std::string candidate, constituent;
  double mass = 0.0;        // probability of reaching this leaf
  bool counted = false;     // credited toward the constituent's success
};

struct ConstituentResult {
  std::string candidate, constituent;
  double weight = 1.0;
  double success = 0.0;
};

struct VerificationReport {
  bool pass = false;
  std::string protocol, set;
  double tol = kDefaultTol;
  double elim_tol = kElimTol;
  int resource_rank = 0;
  double resource_ebits = 0.0;
  std::vector<NodeCheck> nodes;
  std::vector<LeafMass> leaf_masses;
  std::vector<ConstituentResult> results;
  std::vector<std::string> diagnostics;

  const ConstituentResult* result_for(const std::string& constituent) const {
    for (const auto& r : results)
      if (r.constituent == constituent) return &r;
    return nullptr;
  }
};

namespace detail {

struct Engine {
  explicit Engine(const ProtocolTree& t) : tree(t) {}

  const ProtocolTree& tree;
  const std::map<std::string, std::string>* grouping = nullptr;
  double tol = kDefaultTol;
  double elim_tol = kElimTol;
  bool build_povm = false;

  VerificationReport report;
  std::map<std::string, Mat> povm;
  std::map<std::pair<std::string, std::string>, double> success;

  void fail(std::string what) {
    report.pass = false;
    report.diagnostics.push_back(std::move(what));
  }

  std::string target_group(const BranchState& s) const {
    return grouping ? s.candidate : s.constituent;
  }

  // Group of an identified label: with a grouping map, labels collapse to
  // their group; otherwise the label stands for itself.
  std::string group_of_label(const std::string& label, const std::string& path) {
    if (!grouping) return label;
    auto it = grouping->find(label);
    if (it == grouping->end())
      throw LayoutError("grouping: no entry for label '" + label + "' (leaf at " +
                        path + ")");
    return it->second;
  }

  void credit(const BranchState& s, const std::string& identified,
              const std::string& path, const std::string& leaf_desc, double mass) {
    LeafMass lm;
    lm.path = path;
    lm.leaf = leaf_desc;
    lm.candidate = s.candidate;
    lm.constituent = s.constituent;
    lm.mass = mass;
    lm.counted = group_of_label(identified, path) == target_group(s);
    if (lm.counted) success[{s.candidate, s.constituent}] += mass;
    report.leaf_masses.push_back(std::move(lm));
  }

  void add_povm(const std::string& key, const Mat& k) {
    if (!build_povm) return;
    auto it = povm.find(key);
    if (it == povm.end())
      povm.emplace(key, k.adjoint() * k);
    else
      it->second += k.adjoint() * k;
  }

  void check_survivor_orthogonality(const std::vector<BranchState>& states,
                                    NodeCheck& nc) {
    for (std::size_t i = 0; i < states.size(); ++i)
      for (std::size_t j = 0; j < i; ++j) {
        const double ov = std::abs(inner(states[i].state, states[j].state)) /
                          (states[i].state.norm() * states[j].state.norm());
        if (ov > tol) {
          nc.survivors_orthogonal = false;
          nc.orthogonality_detail = "survivors '" + states[i].constituent +
                                    "' and '" + states[j].constituent +
                                    "' overlap " + std::to_string(ov);
          fail("node " + nc.path + ": " + nc.orthogonality_detail);
          return;
        }
      }
  }

  void leaf_two_state(const ProtocolNode& node, const std::string& path,
                      const std::vector<BranchState>& states, const Mat& K) {
    const auto& pair = node.decision.pair;
    const std::string desc = "TwoState(" + pair[0] + "," + pair[1] + ")";
    const BranchState* first = nullptr;
    const BranchState* second = nullptr;
    for (const auto& s : states) {
      if (s.constituent == pair[0] && !first) first = &s;
      else if (s.constituent == pair[1] && !second) second = &s;
      else {
        fail("leaf " + path + " " + desc + ": foreign survivor '" +
             s.constituent + "'");
        return;
      }
    }
    if (!first || !second) {
      fail("leaf " + path + " " + desc + ": named pair does not both survive");
      return;
    }
    const double ov = std::abs(inner(first->state, second->state)) /
                      (first->state.norm() * second->state.norm());
    if (ov > tol) {
      fail("leaf " + path + " " + desc + ": pair not orthogonal (overlap " +
           std::to_string(ov) + ")");
      return;
    }
    Ket a = first->state.normalized();
    a.label = pair[0];
    Ket b = second->state.normalized();
    b.label = pair[1];
    const TwoStateProtocol tsp = walgate_protocol(a, b, tol);
    const TwoStateOutcome ra = run_two_state(tsp, a);
    const TwoStateOutcome rb = run_two_state(tsp, b);
    if (std::abs(ra.p_first - 1.0) > tol || std::abs(rb.p_second - 1.0) > tol) {
      fail("leaf " + path + " " + desc + ": imperfect two-state resolution");
      return;
    }
    credit(*first, pair[0], path, desc, first->state.norm2() * ra.p_first);
    credit(*second, pair[1], path, desc, second->state.norm2() * rb.p_second);

    if (build_povm) {
      const Mat fullI = Mat::Identity(K.rows(), K.cols());
      for (std::size_t k = 0; k < tsp.branches.size(); ++k) {
        Vec f = tsp.alice_basis.col(static_cast<Eigen::Index>(k));
        Mat fproj = Mat::Zero(tsp.shape.rows, tsp.shape.rows);
        fproj += f * f.adjoint();
        Mat fglob = Mat::Zero(K.rows(), K.cols());
        for (int g = 0; g < K.rows(); ++g)
          for (int h = 0; h < K.cols(); ++h)
            if (tsp.shape.col_of[static_cast<std::size_t>(g)] ==
                tsp.shape.col_of[static_cast<std::size_t>(h)])
              fglob(g, h) = fproj(tsp.shape.row_of[static_cast<std::size_t>(g)],
                                  tsp.shape.row_of[static_cast<std::size_t>(h)]);
        const auto& br = tsp.branches[k];
        switch (br.rule) {
          case TwoStateProtocol::BranchRule::measure: {
            Mat pproj = br.bob_first * br.bob_first.adjoint();
            Mat pglob = Mat::Zero(K.rows(), K.cols());
            for (int g = 0; g < K.rows(); ++g)
              for (int h = 0; h < K.cols(); ++h)
                if (tsp.shape.row_of[static_cast<std::size_t>(g)] ==
                    tsp.shape.row_of[static_cast<std::size_t>(h)])
                  pglob(g, h) = pproj(tsp.shape.col_of[static_cast<std::size_t>(g)],
                                      tsp.shape.col_of[static_cast<std::size_t>(h)]);
            add_povm(pair[0], pglob * (fglob * K));
            add_povm(pair[1], (fullI - pglob) * (fglob * K));
            break;
          }
          case TwoStateProtocol::BranchRule::always_first:
            add_povm(pair[0], fglob * K);
            break;
          case TwoStateProtocol::BranchRule::always_second:
            add_povm(pair[1], fglob * K);
            break;
          case TwoStateProtocol::BranchRule::dead:
            add_povm("(eliminated)", fglob * K);
            break;
        }
      }
    }
  }

  void walk(const ProtocolNode& node, const std::string& path,
            const std::vector<BranchState>& states, const Mat& K) {
    if (node.leaf) {
      switch (node.decision.kind) {
        case Decision::Kind::identify:
          for (const auto& s : states) {
            const std::string identified = node.decision.label;
            const double mass = s.state.norm2();
            if (group_of_label(identified, path) != target_group(s))
              fail("leaf " + path + " Identify(" + identified + "): survivor '" +
                   s.constituent + "' of candidate '" + s.candidate +
                   "' arrives with mass " + std::to_string(mass));
            credit(s, identified, path, "Identify(" + identified + ")", mass);
          }
          add_povm(node.decision.label, K);
          break;
        case Decision::Kind::eliminated:
          for (const auto& s : states)
            fail("leaf " + path + " Eliminated: survivor '" + s.constituent +
                 "' arrives with mass " + std::to_string(s.state.norm2()));
          add_povm("(eliminated)", K);
          break;
        case Decision::Kind::two_state:
          leaf_two_state(node, path, states, K);
          break;
      }
      return;
    }

    const LocalMeasurement& m = node.measurement;
    NodeCheck nc;
    nc.path = path.empty() ? "(root)" : path;
    for (const auto& id : m.projectors.empty()
                              ? std::vector<std::string>{}
                              : m.projectors.front().ids)
      if (tree.full_layout.subsystem(id).party != m.party) {
        nc.measurement_ok = false;
        nc.measurement_detail =
            "slice subsystem '" + id + "' not owned by party " + m.party;
      }
    if (nc.measurement_ok) {
      const MeasurementCheck mc =
          is_projective_measurement(m.projectors, kCompletenessTol);
      nc.measurement_ok = mc.ok;
      nc.measurement_detail = mc.failure;
    }
    if (!nc.measurement_ok)
      fail("node " + nc.path + " measurement '" + m.name +
           "': " + nc.measurement_detail);

    auto branches = apply_local_measurement(states, m, tree.full_layout, elim_tol);
    for (std::size_t o = 0; o < branches.size(); ++o) {
      std::vector<BranchState> survivors;
      for (auto& bs : branches[o])
        if (bs.survivor) survivors.push_back(std::move(bs));
      const std::string child_path =
          path.empty() ? m.outcome_names[o] : path + "/" + m.outcome_names[o];
      if (!survivors.empty()) {
        NodeCheck branch_check;
        branch_check.path = child_path;
        check_survivor_orthogonality(survivors, branch_check);
        if (!branch_check.survivors_orthogonal)
          report.nodes.push_back(branch_check);
      }
      Mat Knext;
      if (build_povm)
        Knext = embed_matrix(tree.full_layout, m.projectors[o].ids,
                             m.projectors[o].matrix) *
                K;
      if (!survivors.empty() || build_povm)
        walk(node.children[o], child_path, survivors, Knext);
    }
    report.nodes.push_back(std::move(nc));
  }
};

inline std::vector<BranchState> initial_states(const ProtocolTree& tree,
                                               const CatalogSet& set) {
  if (!set.layout.same_structure(tree.candidate_layout))
    throw LayoutError("verify: set '" + set.name +
                      "' does not live on the protocol's candidate layout");
  std::vector<BranchState> states;
  for (const auto& cand : set.candidates)
    for (const auto& part : cand.constituents) {
      BranchState bs;
      bs.candidate = cand.label;
      bs.constituent = part.label;
      bs.state = tensor(part.state.normalized(),
                        tree.resource.normalized(), part.label);
      states.push_back(std::move(bs));
    }
  return states;
}

inline VerificationReport run_engine(const ProtocolTree& tree, const CatalogSet& set,
                                     const std::map<std::string, std::string>* grouping,
                                     double tol, bool build_povm,
                                     std::map<std::string, Mat>* povm_out) {
  Engine eng{tree};
  eng.grouping = grouping;
  eng.tol = tol;
  eng.build_povm = build_povm;
  eng.report.pass = true;
  eng.report.protocol = tree.name;
  eng.report.set = set.name;
  eng.report.tol = tol;
  eng.report.elim_tol = eng.elim_tol;
  eng.report.resource_rank = schmidt_rank(tree.resource);
  eng.report.resource_ebits = ebits_for_rank(eng.report.resource_rank);

  auto states = initial_states(tree, set);
  Mat K;
  if (build_povm) {
    const int D = tree.full_layout.total_dim();
    K = Mat::Identity(D, D);
  }
  eng.walk(tree.root, "", states, K);

  for (const auto& cand : set.candidates)
    for (const auto& part : cand.constituents) {
      ConstituentResult r;
      r.candidate = cand.label;
      r.constituent = part.label;
      r.weight = part.weight;
      auto it = eng.success.find({cand.label, part.label});
      r.success = it == eng.success.end() ? 0.0 : it->second;
      if (std::abs(r.success - 1.0) > std::max(tol, 1e-9))
        eng.fail("constituent '" + part.label + "' of '" + cand.label +
                 "': success probability " + std::to_string(r.success));
      eng.report.results.push_back(std::move(r));
    }
  if (povm_out) *povm_out = std::move(eng.povm);
  return std::move(eng.report);
}

}  // namespace detail

// Full simulation of the tree on every pure constituent of every candidate:
// validates each measurement, certifies survivor orthogonality per branch,
// checks leaf decisions, and accounts per-constituent success probability.
inline VerificationReport verify(const ProtocolTree& tree, const CatalogSet& set,
                                 double tol = kDefaultTol) {
  return detail::run_engine(tree, set, nullptr, tol, false, nullptr);
}

// Mixed-candidate restatement: leaf labels collapse to groups named after
// the candidates, and a constituent's mass counts when it lands on a leaf of
// its own candidate's group.  The identity grouping over a pure set
// coincides with verify.
inline VerificationReport lift_mixed(const ProtocolTree& tree, const CatalogSet& set,
                                     const std::map<std::string, std::string>& grouping,
                                     double tol = kDefaultTol) {
  VerificationReport r = detail::run_engine(tree, set, &grouping, tol, false, nullptr);
  r.protocol = tree.name + " [grouped]";
  return r;
}

// Global POVM elements per identification label (plus "(eliminated)") from
// the branch operators, with two-state leaves refined into their rotated
// basis and conditional projections.  Requires a passing verification.
inline std::map<std::string, Mat> aggregate_povm(const ProtocolTree& tree,
                                                 const CatalogSet& set,
                                                 double tol = kDefaultTol) {
  std::map<std::string, Mat> povm;
  VerificationReport r = detail::run_engine(tree, set, nullptr, tol, true, &povm);
  if (!r.pass)
    throw LayoutError("aggregate_povm: protocol does not verify on set '" +
                      set.name + "'");
  return povm;
}

struct ResourceCost {
  int schmidt_rank = 0;
  double ebits = 0.0;
};

inline ResourceCost resource_cost(const ProtocolTree& tree,
                                  double tol = kRankTol) {
  ResourceCost rc;
  rc.schmidt_rank = schmidt_rank(tree.resource, tol);
  rc.ebits = ebits_for_rank(rc.schmidt_rank);
  return rc;
}

// Ebits needed to ship the smaller party's candidate system through
// teleportation, the baseline any assisted protocol should beat.
inline double teleport_baseline(const SystemLayout& candidate_layout) {
  const auto parties = candidate_layout.parties();
  int dmin = 0;
  for (const auto& p : parties) {
    const int d = candidate_layout.party_dim(p);
    dmin = dmin == 0 ? d : std::min(dmin, d);
  }
  return std::log2(static_cast<double>(dmin));
}

}  // namespace loccsim
