#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace loccsim {

struct LayoutError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Subsystem {
  std::string id;
  int dim = 0;
  std::string party;
};

// Ordered list of named finite-dimensional subsystems, each owned by one
// party.  Global indices are mixed-radix over the subsystem dims with the
// first subsystem most significant.
class SystemLayout {
public:
  SystemLayout() = default;

  explicit SystemLayout(std::vector<Subsystem> subsystems)
      : subs_(std::move(subsystems)) {
    if (subs_.empty()) throw LayoutError("layout: no subsystems");
    for (std::size_t i = 0; i < subs_.size(); ++i) {
      const auto& s = subs_[i];
      if (s.id.empty()) throw LayoutError("layout: empty subsystem id");
      if (s.dim < 1) throw LayoutError("layout: dim < 1 for '" + s.id + "'");
      if (s.party.empty())
        throw LayoutError("layout: empty party for '" + s.id + "'");
      for (std::size_t j = 0; j < i; ++j)
        if (subs_[j].id == s.id)
          throw LayoutError("layout: duplicate subsystem id '" + s.id + "'");
    }
  }

  const std::vector<Subsystem>& subsystems() const { return subs_; }
  std::size_t size() const { return subs_.size(); }

  int total_dim() const {
    int d = 1;
    for (const auto& s : subs_) d *= s.dim;
    return d;
  }

  bool has(const std::string& id) const {
    return std::any_of(subs_.begin(), subs_.end(),
                       [&](const Subsystem& s) { return s.id == id; });
  }

  int position_of(const std::string& id) const {
    for (std::size_t i = 0; i < subs_.size(); ++i)
      if (subs_[i].id == id) return static_cast<int>(i);
    throw LayoutError("layout: unknown subsystem '" + id + "'");
  }

  const Subsystem& subsystem(const std::string& id) const {
    return subs_[static_cast<std::size_t>(position_of(id))];
  }

  // Positions of the given ids; requires them listed in layout order.
  std::vector<int> positions_of(const std::vector<std::string>& ids) const {
    std::vector<int> pos;
    pos.reserve(ids.size());
    int prev = -1;
    for (const auto& id : ids) {
      int p = position_of(id);
      if (p <= prev)
        throw LayoutError("layout: ids not in layout order at '" + id + "'");
      prev = p;
      pos.push_back(p);
    }
    return pos;
  }

  // Distinct parties in order of first appearance.
  std::vector<std::string> parties() const {
    std::vector<std::string> out;
    for (const auto& s : subs_)
      if (std::find(out.begin(), out.end(), s.party) == out.end())
        out.push_back(s.party);
    return out;
  }

  std::vector<int> party_positions(const std::string& party) const {
    std::vector<int> pos;
    for (std::size_t i = 0; i < subs_.size(); ++i)
      if (subs_[i].party == party) pos.push_back(static_cast<int>(i));
    if (pos.empty()) throw LayoutError("layout: unknown party '" + party + "'");
    return pos;
  }

  int party_dim(const std::string& party) const {
    int d = 1;
    for (int p : party_positions(party)) d *= subs_[p].dim;
    return d;
  }

  int slice_dim(const std::vector<int>& positions) const {
    int d = 1;
    for (int p : positions) d *= subs_[static_cast<std::size_t>(p)].dim;
    return d;
  }

  void digits_of(int index, std::vector<int>& out) const {
    out.resize(subs_.size());
    for (std::size_t i = subs_.size(); i-- > 0;) {
      out[i] = index % subs_[i].dim;
      index /= subs_[i].dim;
    }
  }

  int index_from_digits(const std::vector<int>& digits) const {
    int idx = 0;
    for (std::size_t i = 0; i < subs_.size(); ++i)
      idx = idx * subs_[i].dim + digits[i];
    return idx;
  }

  bool same_structure(const SystemLayout& other) const {
    if (subs_.size() != other.subs_.size()) return false;
    for (std::size_t i = 0; i < subs_.size(); ++i) {
      const auto& a = subs_[i];
      const auto& b = other.subs_[i];
      if (a.id != b.id || a.dim != b.dim || a.party != b.party) return false;
    }
    return true;
  }

private:
  std::vector<Subsystem> subs_;
};

// Concatenation for tensor products of systems with disjoint ids.
inline SystemLayout concat(const SystemLayout& a, const SystemLayout& b) {
  std::vector<Subsystem> subs = a.subsystems();
  for (const auto& s : b.subsystems()) {
    if (a.has(s.id))
      throw LayoutError("concat: subsystem id collision '" + s.id + "'");
    subs.push_back(s);
  }
  return SystemLayout(std::move(subs));
}

}  // namespace loccsim
