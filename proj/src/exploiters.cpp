#include "oodn/exploiters.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

namespace oodn {

namespace {

void check_operands(const std::vector<ClassSpec>& classes, const char* op) {
  if (classes.empty())
    throw std::invalid_argument(std::string(op) + ": empty operand list");
  std::set<std::string> names;
  for (const auto& c : classes)
    if (!names.insert(c.name()).second)
      throw std::invalid_argument(std::string(op) + ": duplicate class name '" +
                                  c.name() + "'");
}

bool proper_subtype(const TypeSpec& a, const TypeSpec& b) {
  return is_subtype(a, b) && !is_subtype(b, a);
}

/// Dedupe structural duplicates (keep first), then drop types that are
/// proper subtypes of another survivor. Order of first appearance is kept.
std::vector<TypeSpec> maximal_distinct(const std::vector<TypeSpec>& types) {
  std::vector<TypeSpec> distinct;
  std::set<std::string> seen;
  for (const auto& t : types)
    if (seen.insert(type_digest(t)).second) distinct.push_back(t);
  std::vector<TypeSpec> out;
  for (const auto& t : distinct) {
    bool absorbed = false;
    for (const auto& u : distinct)
      if (proper_subtype(t, u)) {
        absorbed = true;
        break;
      }
    if (!absorbed) out.push_back(t);
  }
  return out;
}

std::string joined_names(const std::vector<TypeSpec>& types, const std::string& mark) {
  std::string out;
  for (const auto& t : types) out += t.name;
  return out + mark;
}

}  // namespace

ClassSpec union_classes(const std::vector<ClassSpec>& classes) {
  check_operands(classes, "union");

  std::vector<TypeSpec> flattened;
  for (const auto& c : classes)
    for (TypeSpec& t : types_described(c)) flattened.push_back(std::move(t));

  std::map<std::string, std::string> digest_by_name;
  for (const auto& t : flattened) {
    auto [it, inserted] = digest_by_name.try_emplace(t.name, type_digest(t));
    if (!inserted && it->second != type_digest(t))
      throw std::invalid_argument("union: duplicate type name '" + t.name + "'");
  }

  std::vector<TypeSpec> survivors = maximal_distinct(flattened);

  std::vector<std::string> survivor_names;
  for (const auto& t : survivors) survivor_names.push_back(t.name);
  Provenance provenance = Provenance::union_of(survivor_names);

  if (survivors.size() == 1) {
    TypeSpec& t = survivors.front();
    return ClassSpec::make_homogeneous(t.name, MemberSet(std::move(t.members)),
                                       std::move(provenance));
  }

  std::vector<Member> core = common_members(survivors);
  std::set<std::string> core_keys;
  for (const auto& m : core) core_keys.insert(m.key());

  std::vector<Projection> projections;
  for (const auto& t : survivors) {
    std::vector<Member> leftovers;
    for (const auto& m : t.members)
      if (!core_keys.count(m.key())) leftovers.push_back(m);
    projections.push_back({t.name, MemberSet(std::move(leftovers))});
  }

  return ClassSpec::make_inhomogeneous(joined_names(survivors, kUnionSuffix),
                                       MemberSet(std::move(core)),
                                       std::move(projections), std::move(provenance));
}

ClassSpec intersect_classes(const std::vector<ClassSpec>& classes) {
  check_operands(classes, "intersection");

  std::vector<std::vector<TypeSpec>> per_operand;
  for (const auto& c : classes) per_operand.push_back(types_described(c));

  // Every tuple of types drawn one from each operand.
  std::vector<TypeSpec> candidates;
  std::vector<std::size_t> pick(per_operand.size(), 0);
  while (true) {
    std::vector<TypeSpec> tuple;
    for (std::size_t i = 0; i < per_operand.size(); ++i)
      tuple.push_back(per_operand[i][pick[i]]);
    candidates.push_back(TypeSpec{"", common_members(tuple)});

    std::size_t i = 0;
    for (; i < pick.size(); ++i) {
      if (++pick[i] < per_operand[i].size()) break;
      pick[i] = 0;
    }
    if (i == pick.size()) break;
  }

  std::vector<TypeSpec> survivors = maximal_distinct(candidates);

  std::string result_name;
  for (const auto& c : classes) result_name += c.name();
  result_name += kIntersectionSuffix;

  std::vector<std::string> operand_names;
  for (const auto& c : classes) operand_names.push_back(c.name());
  Provenance provenance = Provenance::intersection_of(std::move(operand_names));

  if (survivors.size() == 1) {
    TypeSpec& t = survivors.front();
    // A survivor identical to an operand type keeps that type's name
    // (intersection with a superclass returns the class itself).
    std::string name = result_name;
    for (const auto& operand : per_operand) {
      for (const auto& u : operand)
        if (types_equal(t, u)) {
          name = u.name;
          break;
        }
      if (name != result_name) break;
    }
    return ClassSpec::make_homogeneous(name, MemberSet(std::move(t.members)),
                                       std::move(provenance));
  }

  std::vector<Member> core = common_members(survivors);
  std::set<std::string> core_keys;
  for (const auto& m : core) core_keys.insert(m.key());

  std::vector<Projection> projections;
  int counter = 0;
  for (const auto& t : survivors) {
    std::vector<Member> leftovers;
    for (const auto& m : t.members)
      if (!core_keys.count(m.key())) leftovers.push_back(m);
    projections.push_back({"t" + std::to_string(++counter),
                           MemberSet(std::move(leftovers))});
  }

  return ClassSpec::make_inhomogeneous(result_name, MemberSet(std::move(core)),
                                       std::move(projections), std::move(provenance));
}

namespace {

Unit slot_unit(const std::string& key, std::size_t index, const TypeSpec& t1,
               const TypeSpec& t2) {
  for (const TypeSpec* t : {&t1, &t2}) {
    const Member* m = t->find(key);
    if (m != nullptr && m->kind() == MemberKind::Quantitative) {
      if (index <= m->values().size()) return m->values()[index - 1].unit;
      if (!m->values().empty()) return m->values().front().unit;
    }
  }
  return Unit{};
}

bool values_agree(const Value& a, const Value& b) {
  if (a.is_boolean() != b.is_boolean()) return false;
  if (a.is_boolean()) return a.truth() == b.truth();
  if (!a.unit().is_dimensionless() && !b.unit().is_dimensionless() &&
      a.unit() != b.unit())
    return false;
  if (a.is_exact() && b.is_exact())
    return a.exact_magnitude() == b.exact_magnitude();
  return std::abs(a.magnitude() - b.magnitude()) <= kEqChainTolerance;
}

}  // namespace

bool cross_equivalence_check(const Member& m, const TypeSpec& t1,
                             const TypeSpec& t2, int samples, std::uint64_t seed) {
  if (m.kind() == MemberKind::Quantitative)
    throw std::invalid_argument(
        "cross_equivalence_check applies to verification and method members");
  const Member* v1 = t1.find(m.key());
  const Member* v2 = t2.find(m.key());
  if (v1 == nullptr || v2 == nullptr)
    throw std::invalid_argument("member '" + m.key() +
                                "' must be present in both types");
  if (v1->kind() != m.kind() || v2->kind() != m.kind())
    throw std::invalid_argument("member '" + m.key() + "' kind mismatch");

  const ExprPtr& e1 =
      m.kind() == MemberKind::Method ? v1->body() : v1->predicate();
  const ExprPtr& e2 =
      m.kind() == MemberKind::Method ? v2->body() : v2->predicate();

  std::set<std::pair<std::string, int>> slots = collect_refs(*e1);
  for (const auto& s : collect_refs(*e2)) slots.insert(s);
  std::set<std::string> variables = collect_variables(*e1);
  for (const auto& v : collect_variables(*e2)) variables.insert(v);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> numerator(1, 359);
  std::uniform_int_distribution<int> denominator(1, 4);

  for (int i = 0; i < samples; ++i) {
    // One fresh binding per type per sample; both versions must agree
    // under each.
    for (int round = 0; round < 2; ++round) {
      Binding b;
      for (const auto& [key, index] : slots)
        b.set_slot(key, index, Rational(numerator(rng), denominator(rng)),
                   slot_unit(key, index, t1, t2));
      for (const auto& name : variables)
        b.set_variable(name, Rational(numerator(rng), denominator(rng)), Unit{});
      if (!values_agree(evaluate(e1, b), evaluate(e2, b))) return false;
    }
  }
  return true;
}

}  // namespace oodn
