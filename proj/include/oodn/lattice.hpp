#ifndef OODN_LATTICE_HPP
#define OODN_LATTICE_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "oodn/exploiters.hpp"
#include "oodn/model.hpp"

namespace oodn {

/// Node identity under closure. Named keeps one node per generating subset
/// (the worked examples' view); Strict merges structurally identical nodes
/// and records the merged names, making antisymmetry and the counting
/// formulas literally checkable.
enum class LatticeMode { Named, Strict };

inline constexpr std::size_t kDefaultMaxBasics = 12;

struct LatticeNode {
  ClassSpec cls;
  /// Names of the basic classes this node was generated from (the node's
  /// own name for basics), in basic-definition order.
  std::vector<std::string> subset;
  Provenance::Kind family = Provenance::Kind::Basic;
  /// Strict mode: names of all structurally identical generated nodes this
  /// node absorbed (includes its own name). Size 1 otherwise.
  std::vector<std::string> merged_names;
};

/// Closed-form predictions: union and intersection families each contribute
/// 2^n - n - 1 new classes, 2^(n+1) - 2(n+1) in total.
struct CountReport {
  std::size_t n = 0;
  std::size_t predicted_union = 0;
  std::size_t predicted_intersection = 0;
  std::size_t predicted_total = 0;
  std::size_t observed_union = 0;
  std::size_t observed_intersection = 0;
  std::size_t observed_total = 0;
  std::size_t alias_count = 0;
};

CountReport predict_counts(std::size_t n);

struct LawFailure {
  std::string law;
  std::vector<std::string> nodes;
  std::string detail;
};

struct LawReport {
  struct Entry {
    std::string law;
    std::string description;
    std::size_t checked = 0;
    std::vector<LawFailure> failures;
  };
  std::vector<Entry> entries;
  bool all_passed() const;
};

struct RelationReport {
  /// Full structural subsumption pairs (a, b) with a != b and a subclass b.
  std::vector<std::pair<std::string, std::string>> structural;
  /// Constituent-chain convention: links from each node to same-family
  /// nodes generated from a strict superset of its constituents (basics
  /// link into both families).
  std::size_t family_basics = 0;
  std::size_t family_pairs = 0;
  std::size_t family_triples = 0;
  std::size_t family_total() const {
    return family_basics + family_pairs + family_triples;
  }
};

struct NonUniqueBound : std::runtime_error {
  NonUniqueBound(std::string message, std::vector<std::string> antichain)
      : std::runtime_error(std::move(message)), antichain(std::move(antichain)) {}
  std::vector<std::string> antichain;
};

class KnowledgeLattice {
 public:
  /// Generates union and intersection classes for every subset of size >= 2
  /// (by size, then index order), computes the subsumption order over all
  /// node pairs, and identifies top (union of all) and bottom (intersection
  /// of all).
  static KnowledgeLattice close_under_exploiters(
      const std::vector<ClassSpec>& basics, LatticeMode mode,
      std::size_t max_n = kDefaultMaxBasics);

  /// Rebuilds a lattice from serialized nodes (basics carry basic
  /// provenance; generated nodes carry their subset provenance).
  static KnowledgeLattice from_nodes(std::vector<ClassSpec> nodes, LatticeMode mode);

  LatticeMode mode() const { return mode_; }
  const std::vector<LatticeNode>& nodes() const { return nodes_; }
  const std::vector<std::string>& basic_names() const { return basic_names_; }

  /// Lookup by exact name or its ASCII transliteration (_u/_n suffixes).
  const LatticeNode* find(const std::string& name) const;
  std::size_t index_of(const std::string& name) const;

  bool leq(std::size_t a, std::size_t b) const { return leq_[a][b]; }
  bool leq(const std::string& a, const std::string& b) const;

  const std::string& top_name() const;
  const std::string& bottom_name() const;

  /// Covering edges (subclass index, superclass index) of the strict order.
  const std::vector<std::pair<std::size_t, std::size_t>>& hasse_edges() const {
    return hasse_;
  }

  /// Groups (size >= 2) of node names with structurally identical content.
  const std::vector<std::vector<std::string>>& alias_groups() const {
    return alias_groups_;
  }

  /// Names of generated classes with no members at all.
  std::vector<std::string> empty_class_names() const;

  std::size_t generated_count(Provenance::Kind family) const;

  struct Bound {
    std::string name;
    std::vector<std::string> aliases;  // other members of the bound's alias set
  };

  /// Least node above both (Named mode: unique modulo aliases). Throws
  /// NonUniqueBound when the minimal upper bounds form a non-alias
  /// antichain.
  Bound lub(const std::string& a, const std::string& b) const;
  Bound glb(const std::string& a, const std::string& b) const;

  /// Checks L1-L3 on seeded random triples via exploiter recomputation, L4
  /// on all pairs (sampled above 64 nodes), and the L5 identities against
  /// top and bottom exhaustively. Equality is structural type-set identity,
  /// which is alias-aware by construction.
  LawReport verify_laws(std::size_t samples, std::uint64_t seed) const;

  RelationReport enumerate_relations() const;

  CountReport count_report() const;

 private:
  KnowledgeLattice() = default;
  void build_order();
  Bound bound(const std::string& a, const std::string& b, bool upper) const;

  LatticeMode mode_ = LatticeMode::Named;
  std::vector<LatticeNode> nodes_;
  std::vector<std::string> basic_names_;
  std::vector<std::vector<bool>> leq_;
  std::vector<std::pair<std::size_t, std::size_t>> hasse_;
  std::vector<std::vector<std::string>> alias_groups_;
  std::size_t top_ = 0;
  std::size_t bottom_ = 0;
};

/// "SRb∪" -> "SRb_u", "SRb∩" -> "SRb_n"; other characters unchanged.
std::string ascii_node_name(const std::string& name);

}  // namespace oodn

#endif
