#ifndef OODN_MODEL_HPP
#define OODN_MODEL_HPP

#include <set>
#include <string>
#include <variant>
#include <vector>

#include "oodn/expr.hpp"
#include "oodn/unit.hpp"

namespace oodn {

enum class MemberKind { Quantitative, Verification, Method };

/// One slot of a quantitative property: an exact magnitude or a named
/// unknown, with a unit. Unknowns are compared by name, so two classes with
/// distinct unknown names never share a symbolic property.
struct QuantValue {
  std::variant<Rational, std::string> magnitude;
  Unit unit;

  bool is_symbolic() const { return std::holds_alternative<std::string>(magnitude); }
  const Rational& exact() const { return std::get<Rational>(magnitude); }
  const std::string& variable() const { return std::get<std::string>(magnitude); }

  static QuantValue of(Rational r, Unit u) { return {std::move(r), std::move(u)}; }
  static QuantValue unknown(std::string name, Unit u) {
    return {std::move(name), std::move(u)};
  }

  bool operator==(const QuantValue&) const = default;
};

/// A property (quantitative or verification) or a method. Expression bodies
/// are normalized at construction, so structural comparison and
/// serialization are canonical.
class Member {
 public:
  static Member quantitative(std::string key, std::vector<QuantValue> values);
  static Member verification(std::string key, ExprPtr predicate, bool asserted = true);
  static Member method(std::string key, ExprPtr body, Unit result_unit);

  const std::string& key() const { return key_; }
  MemberKind kind() const { return kind_; }
  bool is_method() const { return kind_ == MemberKind::Method; }
  bool is_property() const { return kind_ != MemberKind::Method; }

  const std::vector<QuantValue>& values() const { return values_; }
  const ExprPtr& predicate() const { return expr_; }
  bool asserted() const { return asserted_; }
  const ExprPtr& body() const { return expr_; }
  const Unit& result_unit() const { return result_unit_; }

  /// Canonical one-line serialization; digest equality coincides with
  /// member_equal.
  const std::string& digest() const { return digest_; }

 private:
  Member() = default;
  std::string key_;
  MemberKind kind_ = MemberKind::Quantitative;
  std::vector<QuantValue> values_;
  ExprPtr expr_;
  bool asserted_ = true;
  Unit result_unit_;
  std::string digest_;
};

/// Same key, same kind, and same content: quantitative value lists must be
/// element-wise identical (equal exact magnitudes or the same unknown name,
/// equal units); verification and method bodies compare structurally on
/// canonical forms.
bool member_equal(const Member& a, const Member& b);

/// Canonically ordered member collection: properties sorted by key, then
/// methods sorted by key; keys unique.
class MemberSet {
 public:
  MemberSet() = default;
  explicit MemberSet(std::vector<Member> members);

  const std::vector<Member>& members() const { return members_; }
  const Member* find(const std::string& key) const;
  bool contains_equal(const Member& m) const;

  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  std::size_t property_count() const;
  std::size_t method_count() const;

  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

 private:
  std::vector<Member> members_;
};

/// A homogeneous class of objects, i.e. a single type: a named member list.
/// Extracted types list core members first, then projection members.
struct TypeSpec {
  std::string name;
  std::vector<Member> members;

  const Member* find(const std::string& key) const;
  std::size_t property_count() const;
  std::size_t method_count() const;
};

/// Property keys referenced from the type's predicates and method bodies
/// that the type does not carry itself. Such members evaluate only under a
/// binding that supplies the missing slots (common cores reference
/// projection-provided properties this way).
std::set<std::string> externally_resolved_keys(const TypeSpec& t);

/// Every member of t1 has a member_equal counterpart in t2 (properties
/// against properties, methods against methods).
bool is_subtype(const TypeSpec& t1, const TypeSpec& t2);

/// Subtype both ways: identical member sets up to order.
bool types_equal(const TypeSpec& t1, const TypeSpec& t2);

/// Members of the first type that every other type contains member_equal
/// (the first type's instances are kept).
std::vector<Member> common_members(const std::vector<TypeSpec>& types);

/// Sorted member digests; equality coincides with types_equal.
std::string type_digest(const TypeSpec& t);

/// Where a class came from: declared as-is, or generated by an exploiter
/// over the named constituents (name sets are kept sorted).
struct Provenance {
  enum class Kind { Basic, Union, Intersection };
  Kind kind = Kind::Basic;
  std::vector<std::string> names;

  static Provenance basic() { return {}; }
  static Provenance union_of(std::vector<std::string> names);
  static Provenance intersection_of(std::vector<std::string> names);

  std::string key() const;
  bool operator==(const Provenance&) const = default;
};

struct Projection {
  std::string type_name;
  MemberSet members;
};

/// Homogeneous (one type) or inhomogeneous (core + at least two per-type
/// projections) class of objects. Immutable after construction.
class ClassSpec {
 public:
  static ClassSpec make_homogeneous(std::string name, MemberSet members,
                                    Provenance provenance = Provenance::basic());
  static ClassSpec make_inhomogeneous(std::string name, MemberSet core,
                                      std::vector<Projection> projections,
                                      Provenance provenance);

  const std::string& name() const { return name_; }
  bool is_homogeneous() const { return projections_.empty(); }
  /// Full member set for homogeneous classes, shared core otherwise.
  const MemberSet& core() const { return core_; }
  const std::vector<Projection>& projections() const { return projections_; }
  const Provenance& provenance() const { return provenance_; }

  std::size_t type_count() const {
    return is_homogeneous() ? 1 : projections_.size();
  }

  /// The distinguished empty class: homogeneous with no members.
  bool is_empty() const { return is_homogeneous() && core_.empty(); }

  ClassSpec with_provenance(Provenance p) const;
  ClassSpec renamed(std::string name) const;

 private:
  ClassSpec() = default;
  std::string name_;
  MemberSet core_;
  std::vector<Projection> projections_;
  Provenance provenance_;
};

/// Type i described by the class (1-based). Homogeneous classes have exactly
/// one type, the class itself.
TypeSpec extract_type(const ClassSpec& c, std::size_t i);

std::vector<TypeSpec> types_described(const ClassSpec& c);

/// Number of different types the class describes.
std::size_t types_described_count(const ClassSpec& c);

/// Every type described by c1 is a subtype of some type described by c2.
bool is_subclass(const ClassSpec& c1, const ClassSpec& c2);

/// Structural identity of the described type sets (names ignored).
bool class_equivalent(const ClassSpec& a, const ClassSpec& b);

/// Sorted digests of the described types; equality coincides with
/// class_equivalent.
std::string class_digest(const ClassSpec& c);

struct ObjectInstance {
  std::string name;
  std::string class_name;
  Binding binding;
};

/// True iff every verification member of t evaluates to true under the
/// object's binding. Throws EvalError naming the key on unbound slots.
bool validate_object(const ObjectInstance& o, const TypeSpec& t);

}  // namespace oodn

#endif
