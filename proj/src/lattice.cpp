#include "oodn/lattice.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

namespace oodn {

CountReport predict_counts(std::size_t n) {
  if (n < 1) throw std::invalid_argument("class count must be >= 1");
  if (n > 40) throw std::invalid_argument("class count too large");
  CountReport r;
  r.n = n;
  std::size_t per_family = (std::size_t{1} << n) - n - 1;
  r.predicted_union = per_family;
  r.predicted_intersection = per_family;
  r.predicted_total = (std::size_t{1} << (n + 1)) - 2 * (n + 1);
  return r;
}

bool LawReport::all_passed() const {
  for (const auto& e : entries)
    if (!e.failures.empty()) return false;
  return true;
}

std::string ascii_node_name(const std::string& name) {
  std::string out;
  for (std::size_t i = 0; i < name.size();) {
    if (name.compare(i, 3, "∪") == 0) {
      out += "_u";
      i += 3;
    } else if (name.compare(i, 3, "∩") == 0) {
      out += "_n";
      i += 3;
    } else {
      out += name[i];
      ++i;
    }
  }
  return out;
}

namespace {

std::string joined(const std::vector<std::string>& names, const std::string& mark) {
  std::string out;
  for (const auto& n : names) out += n;
  return out + mark;
}

/// Subsets of {0..n-1} with size >= 2, ordered by size then index order.
std::vector<std::vector<std::size_t>> subset_order(std::size_t n) {
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t size = 2; size <= n; ++size) {
    std::vector<std::size_t> pick(size);
    for (std::size_t i = 0; i < size; ++i) pick[i] = i;
    while (true) {
      out.push_back(pick);
      std::size_t i = size;
      while (i > 0 && pick[i - 1] == n - size + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < size; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  return out;
}

}  // namespace

KnowledgeLattice KnowledgeLattice::close_under_exploiters(
    const std::vector<ClassSpec>& basics, LatticeMode mode, std::size_t max_n) {
  if (basics.empty())
    throw std::invalid_argument("closure needs at least one basic class");
  if (basics.size() > max_n)
    throw std::invalid_argument("closure limit exceeded: " +
                                std::to_string(basics.size()) + " basics, cap " +
                                std::to_string(max_n));
  {
    std::set<std::string> seen;
    for (const auto& c : basics)
      if (!seen.insert(c.name()).second)
        throw std::invalid_argument("duplicate basic class name '" + c.name() + "'");
  }

  KnowledgeLattice lat;
  lat.mode_ = mode;
  for (const auto& c : basics) {
    lat.basic_names_.push_back(c.name());
    lat.nodes_.push_back({c.with_provenance(Provenance::basic()),
                          {c.name()},
                          Provenance::Kind::Basic,
                          {c.name()}});
  }

  for (const auto& subset : subset_order(basics.size())) {
    std::vector<ClassSpec> operands;
    std::vector<std::string> names;
    for (std::size_t i : subset) {
      operands.push_back(basics[i]);
      names.push_back(basics[i].name());
    }
    ClassSpec u = union_classes(operands)
                      .renamed(joined(names, kUnionSuffix))
                      .with_provenance(Provenance::union_of(names));
    lat.nodes_.push_back({std::move(u), names, Provenance::Kind::Union, {}});
    lat.nodes_.back().merged_names = {lat.nodes_.back().cls.name()};
  }
  for (const auto& subset : subset_order(basics.size())) {
    std::vector<ClassSpec> operands;
    std::vector<std::string> names;
    for (std::size_t i : subset) {
      operands.push_back(basics[i]);
      names.push_back(basics[i].name());
    }
    ClassSpec x = intersect_classes(operands)
                      .renamed(joined(names, kIntersectionSuffix))
                      .with_provenance(Provenance::intersection_of(names));
    lat.nodes_.push_back({std::move(x), names, Provenance::Kind::Intersection, {}});
    lat.nodes_.back().merged_names = {lat.nodes_.back().cls.name()};
  }

  if (mode == LatticeMode::Strict) {
    std::map<std::string, std::vector<std::size_t>> groups;
    std::vector<std::string> order;
    for (std::size_t i = 0; i < lat.nodes_.size(); ++i) {
      std::string d = class_digest(lat.nodes_[i].cls);
      if (!groups.count(d)) order.push_back(d);
      groups[d].push_back(i);
    }
    std::vector<LatticeNode> merged;
    for (const auto& d : order) {
      const auto& group = groups[d];
      std::size_t rep = group.front();
      for (std::size_t i : group) {
        const LatticeNode& a = lat.nodes_[i];
        const LatticeNode& r = lat.nodes_[rep];
        bool a_basic = a.family == Provenance::Kind::Basic;
        bool r_basic = r.family == Provenance::Kind::Basic;
        if (a_basic != r_basic) {
          if (a_basic) rep = i;
          continue;
        }
        if (a.subset.size() != r.subset.size()) {
          if (a.subset.size() > r.subset.size()) rep = i;
          continue;
        }
        if (a.cls.name() < r.cls.name()) rep = i;
      }
      LatticeNode node = lat.nodes_[rep];
      node.merged_names.clear();
      for (std::size_t i : group) node.merged_names.push_back(lat.nodes_[i].cls.name());
      merged.push_back(std::move(node));
    }
    lat.nodes_ = std::move(merged);
  }

  lat.build_order();
  return lat;
}

KnowledgeLattice KnowledgeLattice::from_nodes(std::vector<ClassSpec> classes,
                                              LatticeMode mode) {
  if (classes.empty()) throw std::invalid_argument("empty node list");
  KnowledgeLattice lat;
  lat.mode_ = mode;
  std::set<std::string> seen;
  for (auto& c : classes) {
    std::string name = c.name();
    if (!seen.insert(name).second)
      throw std::invalid_argument("duplicate node name '" + name + "'");
    Provenance::Kind family = c.provenance().kind;
    std::vector<std::string> subset = family == Provenance::Kind::Basic
                                          ? std::vector<std::string>{name}
                                          : c.provenance().names;
    if (family == Provenance::Kind::Basic) lat.basic_names_.push_back(name);
    lat.nodes_.push_back({std::move(c), std::move(subset), family, {name}});
  }
  lat.build_order();
  return lat;
}

void KnowledgeLattice::build_order() {
  const std::size_t n = nodes_.size();

  // Intern member digests so a subtype test is a sorted-int subset test.
  std::map<std::string, int> intern;
  std::vector<std::vector<std::vector<int>>> type_sets(n);
  std::vector<std::string> digests(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const TypeSpec& t : types_described(nodes_[i].cls)) {
      std::vector<int> ids;
      ids.reserve(t.members.size());
      for (const auto& m : t.members) {
        auto [it, _] = intern.try_emplace(m.digest(), static_cast<int>(intern.size()));
        ids.push_back(it->second);
      }
      std::sort(ids.begin(), ids.end());
      type_sets[i].push_back(std::move(ids));
    }
    digests[i] = class_digest(nodes_[i].cls);
  }

  auto subtype_ids = [](const std::vector<int>& a, const std::vector<int>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
  };

  leq_.assign(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        leq_[i][j] = true;
        continue;
      }
      bool all = true;
      for (const auto& ta : type_sets[i]) {
        bool covered = false;
        for (const auto& tb : type_sets[j])
          if (subtype_ids(ta, tb)) {
            covered = true;
            break;
          }
        if (!covered) {
          all = false;
          break;
        }
      }
      leq_[i][j] = all;
    }

  // Covering edges of the strict order via bitset rows.
  const std::size_t words = (n + 63) / 64;
  std::vector<std::vector<std::uint64_t>> up(n, std::vector<std::uint64_t>(words, 0));
  auto bit = [](const std::vector<std::uint64_t>& row, std::size_t j) {
    return (row[j / 64] >> (j % 64)) & 1u;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && leq_[i][j] && !leq_[j][i]) up[i][j / 64] |= std::uint64_t{1} << (j % 64);

  hasse_.clear();
  std::vector<std::uint64_t> acc(words);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(acc.begin(), acc.end(), 0);
    for (std::size_t j = 0; j < n; ++j)
      if (bit(up[i], j))
        for (std::size_t w = 0; w < words; ++w) acc[w] |= up[j][w];
    for (std::size_t j = 0; j < n; ++j)
      if (bit(up[i], j) && !bit(acc, j)) hasse_.push_back({i, j});
  }

  // Structural alias groups.
  alias_groups_.clear();
  if (mode_ == LatticeMode::Strict) {
    for (const auto& node : nodes_)
      if (node.merged_names.size() >= 2) alias_groups_.push_back(node.merged_names);
  } else {
    std::map<std::string, std::vector<std::string>> groups;
    std::vector<std::string> order;
    for (std::size_t i = 0; i < n; ++i) {
      if (!groups.count(digests[i])) order.push_back(digests[i]);
      groups[digests[i]].push_back(nodes_[i].cls.name());
    }
    for (const auto& d : order)
      if (groups[d].size() >= 2) alias_groups_.push_back(groups[d]);
  }

  // Designated bounds: union / intersection of all basics.
  if (n == 1) {
    top_ = bottom_ = 0;
    return;
  }
  auto locate = [&](const std::string& expected) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].cls.name() == expected) return i;
      for (const auto& m : nodes_[i].merged_names)
        if (m == expected) return i;
    }
    return std::nullopt;
  };
  std::optional<std::size_t> top = locate(joined(basic_names_, kUnionSuffix));
  std::optional<std::size_t> bottom =
      locate(joined(basic_names_, kIntersectionSuffix));
  if (!top) {
    for (std::size_t i = 0; i < nodes_.size() && !top; ++i) {
      bool maximum = true;
      for (std::size_t j = 0; j < nodes_.size(); ++j)
        if (!leq_[j][i]) {
          maximum = false;
          break;
        }
      if (maximum) top = i;
    }
  }
  if (!bottom) {
    for (std::size_t i = 0; i < nodes_.size() && !bottom; ++i) {
      bool minimum = true;
      for (std::size_t j = 0; j < nodes_.size(); ++j)
        if (!leq_[i][j]) {
          minimum = false;
          break;
        }
      if (minimum) bottom = i;
    }
  }
  if (!top || !bottom)
    throw std::invalid_argument("node set has no maximum or no minimum");
  top_ = *top;
  bottom_ = *bottom;
}

const LatticeNode* KnowledgeLattice::find(const std::string& name) const {
  for (const auto& node : nodes_)
    if (node.cls.name() == name) return &node;
  for (const auto& node : nodes_)
    if (ascii_node_name(node.cls.name()) == name) return &node;
  return nullptr;
}

std::size_t KnowledgeLattice::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].cls.name() == name) return i;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (ascii_node_name(nodes_[i].cls.name()) == name) return i;
  throw std::invalid_argument("unknown node '" + name + "'");
}

bool KnowledgeLattice::leq(const std::string& a, const std::string& b) const {
  return leq_[index_of(a)][index_of(b)];
}

const std::string& KnowledgeLattice::top_name() const {
  return nodes_[top_].cls.name();
}

const std::string& KnowledgeLattice::bottom_name() const {
  return nodes_[bottom_].cls.name();
}

std::vector<std::string> KnowledgeLattice::empty_class_names() const {
  std::vector<std::string> out;
  for (const auto& node : nodes_)
    if (node.family != Provenance::Kind::Basic && node.cls.is_empty())
      out.push_back(node.cls.name());
  return out;
}

std::size_t KnowledgeLattice::generated_count(Provenance::Kind family) const {
  std::size_t n = 0;
  for (const auto& node : nodes_)
    if (node.family == family) ++n;
  return n;
}

KnowledgeLattice::Bound KnowledgeLattice::bound(const std::string& a,
                                                const std::string& b,
                                                bool upper) const {
  std::size_t ia = index_of(a);
  std::size_t ib = index_of(b);
  std::vector<std::size_t> candidates;
  for (std::size_t x = 0; x < nodes_.size(); ++x) {
    bool ok = upper ? (leq_[ia][x] && leq_[ib][x]) : (leq_[x][ia] && leq_[x][ib]);
    if (ok) candidates.push_back(x);
  }
  if (candidates.empty())
    throw std::invalid_argument("no common " + std::string(upper ? "upper" : "lower") +
                                " bound of '" + a + "' and '" + b + "'");
  std::vector<std::size_t> extremal;
  for (std::size_t x : candidates) {
    bool beaten = false;
    for (std::size_t y : candidates) {
      if (y == x) continue;
      bool closer = upper ? (leq_[y][x] && !leq_[x][y]) : (leq_[x][y] && !leq_[y][x]);
      if (closer) {
        beaten = true;
        break;
      }
    }
    if (!beaten) extremal.push_back(x);
  }

  std::set<std::string> distinct;
  for (std::size_t x : extremal) distinct.insert(class_digest(nodes_[x].cls));
  if (distinct.size() > 1) {
    std::vector<std::string> antichain;
    for (std::size_t x : extremal) antichain.push_back(nodes_[x].cls.name());
    std::sort(antichain.begin(), antichain.end());
    throw NonUniqueBound("no unique " + std::string(upper ? "least upper" : "greatest lower") +
                             " bound of '" + a + "' and '" + b + "'",
                         std::move(antichain));
  }

  // All extremal nodes are structural aliases; prefer the node generated
  // from the combined constituent sets, then the designated bound, then the
  // lexicographically smallest name.
  std::vector<std::string> combined = nodes_[ia].subset;
  combined.insert(combined.end(), nodes_[ib].subset.begin(), nodes_[ib].subset.end());
  std::sort(combined.begin(), combined.end());
  combined.erase(std::unique(combined.begin(), combined.end()), combined.end());
  Provenance preferred = upper ? Provenance::union_of(combined)
                               : Provenance::intersection_of(combined);
  std::size_t chosen = extremal.front();
  bool fixed = false;
  for (std::size_t x : extremal)
    if (nodes_[x].cls.provenance() == preferred) {
      chosen = x;
      fixed = true;
      break;
    }
  if (!fixed) {
    for (std::size_t x : extremal) {
      if (x == (upper ? top_ : bottom_)) {
        chosen = x;
        fixed = true;
        break;
      }
    }
  }
  if (!fixed)
    for (std::size_t x : extremal)
      if (nodes_[x].cls.name() < nodes_[chosen].cls.name()) chosen = x;
  Bound out;
  out.name = nodes_[chosen].cls.name();
  for (std::size_t x : extremal)
    if (x != chosen) out.aliases.push_back(nodes_[x].cls.name());
  std::sort(out.aliases.begin(), out.aliases.end());
  return out;
}

KnowledgeLattice::Bound KnowledgeLattice::lub(const std::string& a,
                                              const std::string& b) const {
  return bound(a, b, true);
}

KnowledgeLattice::Bound KnowledgeLattice::glb(const std::string& a,
                                              const std::string& b) const {
  return bound(a, b, false);
}

namespace {

ClassSpec tagged(const ClassSpec& c, const char* tag) { return c.renamed(tag); }

}  // namespace

LawReport KnowledgeLattice::verify_laws(std::size_t samples, std::uint64_t seed) const {
  LawReport report;
  std::mt19937_64 rng(seed);
  auto pick = [&]() -> const ClassSpec& {
    return nodes_[rng() % nodes_.size()].cls;
  };
  auto fail = [](LawReport::Entry& e, const std::string& law,
                 std::vector<std::string> names, const std::string& detail) {
    e.failures.push_back({law, std::move(names), detail});
  };

  LawReport::Entry l1{"L1", "associativity of union and intersection", 0, {}};
  LawReport::Entry l2{"L2", "commutativity of union and intersection", 0, {}};
  LawReport::Entry l3{"L3", "idempotency of union and intersection", 0, {}};
  LawReport::Entry l4{"L4", "absorption", 0, {}};
  LawReport::Entry l5{"L5", "identities against top and bottom", 0, {}};

  for (std::size_t s = 0; s < samples; ++s) {
    const ClassSpec& a = pick();
    const ClassSpec& b = pick();
    const ClassSpec& c = pick();
    std::vector<std::string> names{a.name(), b.name(), c.name()};

    ClassSpec ab_u = union_classes({tagged(a, "#a"), tagged(b, "#b")});
    ClassSpec bc_u = union_classes({tagged(b, "#b"), tagged(c, "#c")});
    ClassSpec left_u = union_classes({tagged(ab_u, "#x"), tagged(c, "#c")});
    ClassSpec right_u = union_classes({tagged(a, "#a"), tagged(bc_u, "#y")});
    ++l1.checked;
    if (!class_equivalent(left_u, right_u))
      fail(l1, "L1", names, "(a OR b) OR c != a OR (b OR c)");

    ClassSpec ab_i = intersect_classes({tagged(a, "#a"), tagged(b, "#b")});
    ClassSpec bc_i = intersect_classes({tagged(b, "#b"), tagged(c, "#c")});
    ClassSpec left_i = intersect_classes({tagged(ab_i, "#x"), tagged(c, "#c")});
    ClassSpec right_i = intersect_classes({tagged(a, "#a"), tagged(bc_i, "#y")});
    ++l1.checked;
    if (!class_equivalent(left_i, right_i))
      fail(l1, "L1", names, "(a AND b) AND c != a AND (b AND c)");

    ClassSpec ba_u = union_classes({tagged(b, "#b"), tagged(a, "#a")});
    ++l2.checked;
    if (!class_equivalent(ab_u, ba_u)) fail(l2, "L2", names, "a OR b != b OR a");
    ClassSpec ba_i = intersect_classes({tagged(b, "#b"), tagged(a, "#a")});
    ++l2.checked;
    if (!class_equivalent(ab_i, ba_i)) fail(l2, "L2", names, "a AND b != b AND a");

    ++l3.checked;
    if (!class_equivalent(union_classes({tagged(a, "#a")}), a))
      fail(l3, "L3", {a.name()}, "a OR a != a");
    ++l3.checked;
    if (!class_equivalent(intersect_classes({tagged(a, "#a")}), a))
      fail(l3, "L3", {a.name()}, "a AND a != a");
  }

  // Absorption: exhaustive on small lattices, sampled otherwise.
  auto check_absorption = [&](const ClassSpec& a, const ClassSpec& b) {
    ClassSpec meet = intersect_classes({tagged(a, "#a"), tagged(b, "#b")});
    ClassSpec join = union_classes({tagged(a, "#a"), tagged(b, "#b")});
    ++l4.checked;
    if (!class_equivalent(union_classes({tagged(a, "#a"), tagged(meet, "#m")}), a))
      fail(l4, "L4", {a.name(), b.name()}, "a OR (a AND b) != a");
    ++l4.checked;
    if (!class_equivalent(intersect_classes({tagged(a, "#a"), tagged(join, "#j")}), a))
      fail(l4, "L4", {a.name(), b.name()}, "a AND (a OR b) != a");
  };
  if (nodes_.size() <= 64) {
    for (const auto& na : nodes_)
      for (const auto& nb : nodes_) check_absorption(na.cls, nb.cls);
  } else {
    for (std::size_t s = 0; s < samples; ++s) check_absorption(pick(), pick());
  }

  const ClassSpec& top = nodes_[top_].cls;
  const ClassSpec& bottom = nodes_[bottom_].cls;
  for (const auto& node : nodes_) {
    const ClassSpec& a = node.cls;
    ++l5.checked;
    if (!class_equivalent(union_classes({tagged(a, "#a"), tagged(bottom, "#0")}), a))
      fail(l5, "L5", {a.name()}, "a OR 0 != a");
    ++l5.checked;
    if (!class_equivalent(intersect_classes({tagged(a, "#a"), tagged(top, "#1")}), a))
      fail(l5, "L5", {a.name()}, "a AND 1 != a");
    ++l5.checked;
    if (!class_equivalent(intersect_classes({tagged(a, "#a"), tagged(bottom, "#0")}),
                          bottom))
      fail(l5, "L5", {a.name()}, "a AND 0 != 0");
    ++l5.checked;
    if (!class_equivalent(union_classes({tagged(a, "#a"), tagged(top, "#1")}), top))
      fail(l5, "L5", {a.name()}, "a OR 1 != 1");
  }

  report.entries = {std::move(l1), std::move(l2), std::move(l3), std::move(l4),
                    std::move(l5)};
  return report;
}

RelationReport KnowledgeLattice::enumerate_relations() const {
  RelationReport r;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    for (std::size_t j = 0; j < nodes_.size(); ++j)
      if (i != j && leq_[i][j])
        r.structural.push_back({nodes_[i].cls.name(), nodes_[j].cls.name()});
  std::sort(r.structural.begin(), r.structural.end());

  // Constituent-chain families over the generated subset keys; a closure
  // holds every subset of size >= 2 in both families by construction.
  const std::size_t n = basic_names_.size();
  if (n == 0) return r;
  const std::size_t full = (std::size_t{1} << n) - 1;
  auto popcount = [](std::size_t v) {
    std::size_t c = 0;
    while (v) {
      v &= v - 1;
      ++c;
    }
    return c;
  };
  for (std::size_t d = 1; d <= full; ++d) {
    std::size_t size = popcount(d);
    if (size > 3) continue;
    std::size_t supersets = 0;
    for (std::size_t e = d + 1; e <= full; ++e)
      if ((e & d) == d && popcount(e) >= 2 && e != d) ++supersets;
    if (size == 1)
      r.family_basics += 2 * supersets;  // chains into both families
    else if (size == 2)
      r.family_pairs += 2 * supersets;
    else
      r.family_triples += 2 * supersets;
  }
  return r;
}

CountReport KnowledgeLattice::count_report() const {
  CountReport r = predict_counts(basic_names_.empty() ? 1 : basic_names_.size());
  std::set<std::string> basic_digests;
  for (const auto& node : nodes_)
    if (node.family == Provenance::Kind::Basic)
      basic_digests.insert(class_digest(node.cls));
  std::set<std::string> unions;
  std::set<std::string> intersections;
  for (const auto& node : nodes_) {
    if (node.family == Provenance::Kind::Basic) continue;
    std::string d = class_digest(node.cls);
    if (basic_digests.count(d)) continue;
    if (node.family == Provenance::Kind::Union)
      unions.insert(d);
    else
      intersections.insert(d);
  }
  r.observed_union = unions.size();
  r.observed_intersection = intersections.size();
  std::set<std::string> all = unions;
  all.insert(intersections.begin(), intersections.end());
  r.observed_total = all.size();
  r.alias_count = 0;
  for (const auto& g : alias_groups_) r.alias_count += g.size() - 1;
  return r;
}

}  // namespace oodn
