#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "loccsim/ket.hpp"
#include "loccsim/layout.hpp"
#include "loccsim/operators.hpp"
#include "loccsim/protocol.hpp"

namespace loccsim {

using ordered_json = nlohmann::ordered_json;

struct ParseError : std::runtime_error {
  int line = 0, column = 0;
  ParseError(std::string msg, int l, int c)
      : std::runtime_error("line " + std::to_string(l) + ", column " +
                           std::to_string(c) + ": " + std::move(msg)),
        line(l),
        column(c) {}
  explicit ParseError(std::string msg) : std::runtime_error(std::move(msg)) {}
};

namespace detail {

inline std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline ordered_json layout_to_json(const SystemLayout& L) {
  ordered_json arr = ordered_json::array();
  for (const auto& s : L.subsystems())
    arr.push_back({{"id", s.id}, {"dim", s.dim}, {"party", s.party}});
  return arr;
}

inline SystemLayout layout_from_json(const ordered_json& j, const std::string& at) {
  if (!j.is_array() || j.empty())
    throw ParseError(at + ": expected non-empty subsystem array");
  std::vector<Subsystem> subs;
  for (const auto& e : j) {
    if (!e.contains("id") || !e.contains("dim") || !e.contains("party"))
      throw ParseError(at + ": subsystem needs id/dim/party");
    subs.push_back({e.at("id").get<std::string>(), e.at("dim").get<int>(),
                    e.at("party").get<std::string>()});
  }
  return SystemLayout(subs);
}

inline std::vector<int> digits_for(int index, const std::vector<int>& dims) {
  std::vector<int> out(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    out[k] = index % dims[k];
    index /= dims[k];
  }
  return out;
}

inline int index_for(const std::vector<int>& digits, const std::vector<int>& dims,
                     const std::string& at) {
  if (digits.size() != dims.size())
    throw ParseError(at + ": basis arity does not match subsystem count");
  int idx = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (digits[k] < 0 || digits[k] >= dims[k])
      throw ParseError(at + ": basis digit out of range");
    idx = idx * dims[k] + digits[k];
  }
  return idx;
}

inline ordered_json vector_to_json(const Vec& v, const std::vector<int>& dims) {
  ordered_json arr = ordered_json::array();
  for (int i = 0; i < v.size(); ++i) {
    if (v[i] == cd(0.0, 0.0)) continue;
    arr.push_back({{"basis", digits_for(i, dims)},
                   {"amp", {v[i].real(), v[i].imag()}}});
  }
  return arr;
}

inline Vec vector_from_json(const ordered_json& j, const std::vector<int>& dims,
                            const std::string& at) {
  int dim = 1;
  for (int d : dims) dim *= d;
  Vec v = Vec::Zero(dim);
  if (!j.is_array()) throw ParseError(at + ": expected amplitude array");
  for (const auto& e : j) {
    if (!e.contains("basis") || !e.contains("amp"))
      throw ParseError(at + ": amplitude entry needs basis/amp");
    const auto& amp = e.at("amp");
    if (!amp.is_array() || amp.size() != 2)
      throw ParseError(at + ": amp must be [re, im]");
    const int idx = index_for(e.at("basis").get<std::vector<int>>(), dims, at);
    v[idx] = cd(amp[0].get<double>(), amp[1].get<double>());
  }
  return v;
}

inline ordered_json node_to_json(const ProtocolNode& n) {
  if (n.leaf) {
    switch (n.decision.kind) {
      case Decision::Kind::identify:
        return {{"type", "identify"}, {"label", n.decision.label}};
      case Decision::Kind::two_state:
        return {{"type", "two_state"},
                {"labels", {n.decision.pair[0], n.decision.pair[1]}}};
      case Decision::Kind::eliminated:
        return {{"type", "eliminated"}};
    }
  }
  const LocalMeasurement& m = n.measurement;
  ordered_json outcomes = ordered_json::array();
  for (std::size_t o = 0; o < m.projectors.size(); ++o) {
    const Projector& p = m.projectors[o];
    if (p.remainder && o + 1 != m.projectors.size())
      throw LayoutError("export: remainder outcome must come last");
    ordered_json pj;
    if (p.remainder) {
      pj = {{"remainder", true}};
    } else {
      ordered_json vecs = ordered_json::array();
      for (const auto& v : p.range_basis) vecs.push_back(vector_to_json(v, p.dims));
      pj = {{"vectors", std::move(vecs)}};
    }
    outcomes.push_back({{"name", m.outcome_names[o]},
                        {"projector", std::move(pj)},
                        {"child", node_to_json(n.children[o])}});
  }
  return {{"type", "measure"},
          {"name", m.name},
          {"party", m.party},
          {"subsystems", m.projectors.front().ids},
          {"outcomes", std::move(outcomes)}};
}

inline ProtocolNode node_from_json(const ordered_json& j, const SystemLayout& full,
                                   const std::string& at) {
  if (!j.contains("type")) throw ParseError(at + ": node needs a type");
  const std::string type = j.at("type").get<std::string>();
  if (type == "identify") {
    if (!j.contains("label")) throw ParseError(at + ": identify needs label");
    return identify_leaf(j.at("label").get<std::string>());
  }
  if (type == "two_state") {
    if (!j.contains("labels") || !j.at("labels").is_array() ||
        j.at("labels").size() != 2)
      throw ParseError(at + ": two_state needs two labels");
    return two_state_leaf(j.at("labels")[0].get<std::string>(),
                          j.at("labels")[1].get<std::string>());
  }
  if (type == "eliminated") return eliminated_leaf();
  if (type != "measure") throw ParseError(at + ": unknown node type '" + type + "'");

  for (const char* key : {"name", "party", "subsystems", "outcomes"})
    if (!j.contains(key))
      throw ParseError(at + ": measure node needs '" + std::string(key) + "'");
  const auto ids = j.at("subsystems").get<std::vector<std::string>>();
  std::vector<int> dims;
  for (const auto& id : ids) {
    if (!full.has(id)) throw ParseError(at + ": unknown subsystem '" + id + "'");
    dims.push_back(full.subsystem(id).dim);
  }
  int slice = 1;
  for (int d : dims) slice *= d;

  LocalMeasurement m;
  m.name = j.at("name").get<std::string>();
  m.party = j.at("party").get<std::string>();
  std::vector<ProtocolNode> children;
  const auto& outcomes = j.at("outcomes");
  if (!outcomes.is_array() || outcomes.empty())
    throw ParseError(at + ": measure node needs outcomes");
  for (std::size_t o = 0; o < outcomes.size(); ++o) {
    const std::string oat = at + ".outcomes[" + std::to_string(o) + "]";
    const auto& oj = outcomes[o];
    if (!oj.contains("name") || !oj.contains("projector") || !oj.contains("child"))
      throw ParseError(oat + ": outcome needs name/projector/child");
    m.outcome_names.push_back(oj.at("name").get<std::string>());
    const auto& pj = oj.at("projector");
    if (pj.contains("remainder") && pj.at("remainder").get<bool>()) {
      if (o + 1 != outcomes.size())
        throw ParseError(oat + ": remainder outcome must come last");
      if (m.projectors.empty())
        throw ParseError(oat + ": remainder needs preceding outcomes");
      m.projectors.push_back(remainder_projector(m.projectors));
    } else {
      if (!pj.contains("vectors"))
        throw ParseError(oat + ": projector needs vectors or remainder");
      Projector p;
      p.ids = ids;
      p.dims = dims;
      p.matrix = Mat::Zero(slice, slice);
      for (const auto& vj : pj.at("vectors")) {
        Vec v = vector_from_json(vj, dims, oat);
        p.range_basis.push_back(v);
        p.matrix += v * v.adjoint();
      }
      for (std::size_t i = 0; i < p.range_basis.size(); ++i)
        for (std::size_t k = 0; k <= i; ++k) {
          const cd g = p.range_basis[k].dot(p.range_basis[i]);
          if (std::abs(g - (i == k ? cd(1.0) : cd(0.0))) > kDefaultTol)
            throw ParseError(oat + ": projector vectors not orthonormal");
        }
      m.projectors.push_back(std::move(p));
    }
    children.push_back(node_from_json(oj.at("child"), full, oat + ".child"));
  }
  return measure_node(std::move(m), std::move(children));
}

}  // namespace detail

inline ordered_json export_protocol(const ProtocolTree& t) {
  ordered_json j;
  j["format"] = "loccsim.protocol";
  j["version"] = 1;
  j["name"] = t.name;
  j["candidate_layout"] = detail::layout_to_json(t.candidate_layout);
  j["resource_layout"] = detail::layout_to_json(t.resource.layout);
  std::vector<int> rdims;
  for (const auto& s : t.resource.layout.subsystems()) rdims.push_back(s.dim);
  j["resource"] = {{"label", t.resource.label},
                   {"amplitudes", detail::vector_to_json(t.resource.amplitudes, rdims)}};
  j["root"] = detail::node_to_json(t.root);
  return j;
}

inline std::string export_protocol_text(const ProtocolTree& t) {
  return export_protocol(t).dump(2) + "\n";
}

inline ProtocolTree import_protocol_json(const ordered_json& j) {
  for (const char* key :
       {"format", "version", "name", "candidate_layout", "resource_layout",
        "resource", "root"})
    if (!j.contains(key))
      throw ParseError("root: missing '" + std::string(key) + "'");
  if (j.at("format").get<std::string>() != "loccsim.protocol")
    throw ParseError("root: unrecognized format tag");
  if (j.at("version").get<int>() != 1)
    throw ParseError("root: unsupported version");
  const SystemLayout cand =
      detail::layout_from_json(j.at("candidate_layout"), "candidate_layout");
  const SystemLayout rl =
      detail::layout_from_json(j.at("resource_layout"), "resource_layout");
  std::vector<int> rdims;
  for (const auto& s : rl.subsystems()) rdims.push_back(s.dim);
  const auto& rj = j.at("resource");
  if (!rj.contains("label") || !rj.contains("amplitudes"))
    throw ParseError("resource: needs label and amplitudes");
  Ket resource(rl, detail::vector_from_json(rj.at("amplitudes"), rdims, "resource"),
               rj.at("label").get<std::string>());
  const SystemLayout full = concat(cand, rl);
  ProtocolNode root = detail::node_from_json(j.at("root"), full, "root");
  return make_tree(j.at("name").get<std::string>(), cand, std::move(resource),
                   std::move(root));
}

inline ProtocolTree import_protocol(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = detail::line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError(e.what(), line, col);
  }
  return import_protocol_json(j);
}

namespace detail {

inline bool vec_equal(const Vec& a, const Vec& b) {
  return a.size() == b.size() && (a - b).cwiseAbs().maxCoeff() == 0.0;
}

inline bool layout_equal(const SystemLayout& a, const SystemLayout& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a.subsystems()[i];
    const auto& y = b.subsystems()[i];
    if (x.id != y.id || x.dim != y.dim || x.party != y.party) return false;
  }
  return true;
}

inline bool node_equal(const ProtocolNode& a, const ProtocolNode& b) {
  if (a.leaf != b.leaf) return false;
  if (a.leaf)
    return a.decision.kind == b.decision.kind &&
           a.decision.label == b.decision.label && a.decision.pair == b.decision.pair;
  const auto& ma = a.measurement;
  const auto& mb = b.measurement;
  if (ma.name != mb.name || ma.party != mb.party ||
      ma.outcome_names != mb.outcome_names ||
      ma.projectors.size() != mb.projectors.size())
    return false;
  for (std::size_t i = 0; i < ma.projectors.size(); ++i) {
    const auto& pa = ma.projectors[i];
    const auto& pb = mb.projectors[i];
    if (pa.ids != pb.ids || pa.dims != pb.dims || pa.remainder != pb.remainder)
      return false;
    if ((pa.matrix - pb.matrix).cwiseAbs().maxCoeff() != 0.0) return false;
    if (pa.range_basis.size() != pb.range_basis.size()) return false;
    for (std::size_t k = 0; k < pa.range_basis.size(); ++k)
      if (!vec_equal(pa.range_basis[k], pb.range_basis[k])) return false;
  }
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!node_equal(a.children[i], b.children[i])) return false;
  return true;
}

}  // namespace detail

inline bool protocols_equal(const ProtocolTree& a, const ProtocolTree& b) {
  return a.name == b.name && detail::layout_equal(a.candidate_layout, b.candidate_layout) &&
         detail::layout_equal(a.resource.layout, b.resource.layout) &&
         a.resource.label == b.resource.label &&
         detail::vec_equal(a.resource.amplitudes, b.resource.amplitudes) &&
         detail::node_equal(a.root, b.root);
}

}  // namespace loccsim
