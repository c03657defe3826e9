#include "oodn/model.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace oodn {

namespace {

std::string quant_value_digest(const QuantValue& v) {
  std::string m = v.is_symbolic() ? "?" + v.variable() : render_rational(v.exact());
  return m + "@" + v.unit.render();
}

std::string make_digest(const Member& m) {
  std::ostringstream os;
  switch (m.kind()) {
    case MemberKind::Quantitative:
      os << "q|" << m.key();
      for (const auto& v : m.values()) os << '|' << quant_value_digest(v);
      break;
    case MemberKind::Verification:
      os << "v|" << m.key() << '|' << (m.asserted() ? 1 : 0) << '|'
         << render(m.predicate());
      break;
    case MemberKind::Method:
      os << "m|" << m.key() << '|' << m.result_unit().render() << '|'
         << render(m.body());
      break;
  }
  return os.str();
}

void require_key(const std::string& key) {
  if (key.empty()) throw std::invalid_argument("empty member key");
}

}  // namespace

Member Member::quantitative(std::string key, std::vector<QuantValue> values) {
  require_key(key);
  if (values.empty())
    throw std::invalid_argument("quantitative member '" + key + "' has no values");
  Member m;
  m.key_ = std::move(key);
  m.kind_ = MemberKind::Quantitative;
  m.values_ = std::move(values);
  m.digest_ = make_digest(m);
  return m;
}

Member Member::verification(std::string key, ExprPtr predicate, bool asserted) {
  require_key(key);
  if (!predicate) throw std::invalid_argument("null predicate");
  ExprPtr normal = normalize(predicate);
  if (!normal->is_boolean())
    throw std::invalid_argument("verification member '" + key +
                                "' must have a boolean-valued predicate");
  Member m;
  m.key_ = std::move(key);
  m.kind_ = MemberKind::Verification;
  m.expr_ = std::move(normal);
  m.asserted_ = asserted;
  m.digest_ = make_digest(m);
  return m;
}

Member Member::method(std::string key, ExprPtr body, Unit result_unit) {
  require_key(key);
  if (!body) throw std::invalid_argument("null method body");
  ExprPtr normal = normalize(body);
  if (normal->is_boolean())
    throw std::invalid_argument("method '" + key + "' must be magnitude-valued");
  Member m;
  m.key_ = std::move(key);
  m.kind_ = MemberKind::Method;
  m.expr_ = std::move(normal);
  m.result_unit_ = std::move(result_unit);
  m.digest_ = make_digest(m);
  return m;
}

bool member_equal(const Member& a, const Member& b) {
  if (a.key() != b.key() || a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case MemberKind::Quantitative:
      return a.values() == b.values();
    case MemberKind::Verification:
      return a.asserted() == b.asserted() &&
             expressions_equal(a.predicate(), b.predicate());
    case MemberKind::Method:
      return a.result_unit() == b.result_unit() &&
             expressions_equal(a.body(), b.body());
  }
  return false;
}

MemberSet::MemberSet(std::vector<Member> members) : members_(std::move(members)) {
  std::stable_sort(members_.begin(), members_.end(),
                   [](const Member& a, const Member& b) {
                     if (a.is_method() != b.is_method()) return !a.is_method();
                     return a.key() < b.key();
                   });
  for (std::size_t i = 1; i < members_.size(); ++i)
    if (members_[i].key() == members_[i - 1].key())
      throw std::invalid_argument("duplicate member key '" + members_[i].key() + "'");
}

const Member* MemberSet::find(const std::string& key) const {
  for (const auto& m : members_)
    if (m.key() == key) return &m;
  return nullptr;
}

bool MemberSet::contains_equal(const Member& m) const {
  const Member* found = find(m.key());
  return found != nullptr && member_equal(*found, m);
}

std::size_t MemberSet::property_count() const {
  std::size_t n = 0;
  for (const auto& m : members_)
    if (m.is_property()) ++n;
  return n;
}

std::size_t MemberSet::method_count() const { return size() - property_count(); }

const Member* TypeSpec::find(const std::string& key) const {
  for (const auto& m : members)
    if (m.key() == key) return &m;
  return nullptr;
}

std::size_t TypeSpec::property_count() const {
  std::size_t n = 0;
  for (const auto& m : members)
    if (m.is_property()) ++n;
  return n;
}

std::size_t TypeSpec::method_count() const {
  return members.size() - property_count();
}

std::set<std::string> externally_resolved_keys(const TypeSpec& t) {
  std::set<std::string> out;
  for (const auto& m : t.members) {
    if (m.kind() == MemberKind::Quantitative) continue;
    const ExprPtr& body = m.kind() == MemberKind::Method ? m.body() : m.predicate();
    for (const auto& [key, index] : collect_refs(*body))
      if (t.find(key) == nullptr) out.insert(key);
  }
  return out;
}

std::vector<Member> common_members(const std::vector<TypeSpec>& types) {
  std::vector<Member> out;
  for (const auto& m : types.front().members) {
    bool everywhere = true;
    for (std::size_t i = 1; i < types.size(); ++i) {
      const Member* other = types[i].find(m.key());
      if (other == nullptr || !member_equal(m, *other)) {
        everywhere = false;
        break;
      }
    }
    if (everywhere) out.push_back(m);
  }
  return out;
}

bool is_subtype(const TypeSpec& t1, const TypeSpec& t2) {
  for (const auto& m : t1.members) {
    const Member* other = t2.find(m.key());
    if (other == nullptr || !member_equal(m, *other)) return false;
  }
  return true;
}

bool types_equal(const TypeSpec& t1, const TypeSpec& t2) {
  return t1.members.size() == t2.members.size() && is_subtype(t1, t2);
}

std::string type_digest(const TypeSpec& t) {
  std::vector<std::string> digests;
  digests.reserve(t.members.size());
  for (const auto& m : t.members) digests.push_back(m.digest());
  std::sort(digests.begin(), digests.end());
  std::string out;
  for (const auto& d : digests) {
    out += d;
    out += '\n';
  }
  return out;
}

Provenance Provenance::union_of(std::vector<std::string> names) {
  std::sort(names.begin(), names.end());
  return {Kind::Union, std::move(names)};
}

Provenance Provenance::intersection_of(std::vector<std::string> names) {
  std::sort(names.begin(), names.end());
  return {Kind::Intersection, std::move(names)};
}

std::string Provenance::key() const {
  switch (kind) {
    case Kind::Basic:
      return "basic";
    case Kind::Union:
    case Kind::Intersection: {
      std::string out = kind == Kind::Union ? "union{" : "intersection{";
      for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ',';
        out += names[i];
      }
      return out + "}";
    }
  }
  return "basic";
}

ClassSpec ClassSpec::make_homogeneous(std::string name, MemberSet members,
                                      Provenance provenance) {
  if (name.empty()) throw std::invalid_argument("empty class name");
  ClassSpec c;
  c.name_ = std::move(name);
  c.core_ = std::move(members);
  c.provenance_ = std::move(provenance);
  return c;
}

ClassSpec ClassSpec::make_inhomogeneous(std::string name, MemberSet core,
                                        std::vector<Projection> projections,
                                        Provenance provenance) {
  if (name.empty()) throw std::invalid_argument("empty class name");
  if (projections.size() < 2)
    throw std::invalid_argument("inhomogeneous class '" + name +
                                "' needs at least 2 projections");
  for (const auto& p : projections) {
    for (const auto& m : p.members)
      if (core.find(m.key()) != nullptr)
        throw std::invalid_argument("key '" + m.key() +
                                    "' appears in both core and projection '" +
                                    p.type_name + "'");
  }
  ClassSpec c;
  c.name_ = std::move(name);
  c.core_ = std::move(core);
  c.projections_ = std::move(projections);
  c.provenance_ = std::move(provenance);
  return c;
}

ClassSpec ClassSpec::with_provenance(Provenance p) const {
  ClassSpec c = *this;
  c.provenance_ = std::move(p);
  return c;
}

ClassSpec ClassSpec::renamed(std::string name) const {
  ClassSpec c = *this;
  c.name_ = std::move(name);
  return c;
}

TypeSpec extract_type(const ClassSpec& c, std::size_t i) {
  if (i < 1 || i > c.type_count())
    throw std::out_of_range("type index " + std::to_string(i) + " out of range for '" +
                            c.name() + "' (" + std::to_string(c.type_count()) +
                            " types)");
  if (c.is_homogeneous())
    return TypeSpec{c.name(), c.core().members()};
  const Projection& p = c.projections()[i - 1];
  std::vector<Member> members = c.core().members();
  members.insert(members.end(), p.members.begin(), p.members.end());
  return TypeSpec{p.type_name, std::move(members)};
}

std::vector<TypeSpec> types_described(const ClassSpec& c) {
  std::vector<TypeSpec> out;
  out.reserve(c.type_count());
  for (std::size_t i = 1; i <= c.type_count(); ++i) out.push_back(extract_type(c, i));
  return out;
}

std::size_t types_described_count(const ClassSpec& c) { return c.type_count(); }

bool is_subclass(const ClassSpec& c1, const ClassSpec& c2) {
  std::vector<TypeSpec> t2 = types_described(c2);
  for (const TypeSpec& t : types_described(c1)) {
    bool covered = false;
    for (const TypeSpec& u : t2)
      if (is_subtype(t, u)) {
        covered = true;
        break;
      }
    if (!covered) return false;
  }
  return true;
}

std::string class_digest(const ClassSpec& c) {
  std::vector<std::string> digests;
  for (const TypeSpec& t : types_described(c)) digests.push_back(type_digest(t));
  std::sort(digests.begin(), digests.end());
  std::string out;
  for (const auto& d : digests) {
    out += d;
    out += "--\n";
  }
  return out;
}

bool class_equivalent(const ClassSpec& a, const ClassSpec& b) {
  return class_digest(a) == class_digest(b);
}

bool validate_object(const ObjectInstance& o, const TypeSpec& t) {
  for (const auto& m : t.members) {
    if (m.kind() != MemberKind::Verification) continue;
    Value v = evaluate(m.predicate(), o.binding);
    if (!v.truth()) return false;
  }
  return true;
}

}  // namespace oodn
