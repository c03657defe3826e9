#include "oodn/kbio.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace oodn {

using nlohmann::json;

const ClassSpec* KBDocument::find_class(const std::string& name) const {
  for (const auto& c : classes)
    if (c.name() == name) return &c;
  for (const auto& c : classes)
    if (ascii_node_name(c.name()) == name) return &c;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Members

namespace {

std::string magnitude_to_string(const QuantValue& v) {
  return v.is_symbolic() ? "var:" + v.variable() : render_rational(v.exact());
}

json member_to_json(const Member& m) {
  json j;
  j["key"] = m.key();
  switch (m.kind()) {
    case MemberKind::Quantitative: {
      j["member_kind"] = "quantitative";
      json values = json::array();
      for (const auto& v : m.values()) {
        json jv;
        jv["magnitude"] = magnitude_to_string(v);
        jv["unit"] = v.unit.render();
        values.push_back(std::move(jv));
      }
      j["values"] = std::move(values);
      break;
    }
    case MemberKind::Verification:
      j["member_kind"] = "verification";
      j["predicate"] = render(m.predicate());
      j["asserted"] = m.asserted();
      break;
    case MemberKind::Method:
      j["member_kind"] = "method";
      j["body"] = render(m.body());
      j["result_unit"] = m.result_unit().render();
      break;
  }
  return j;
}

const json& field(const json& j, const char* name, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
  auto it = j.find(name);
  if (it == j.end())
    throw SchemaError(path, std::string("missing field '") + name + "'");
  return *it;
}

std::string string_field(const json& j, const char* name, const std::string& path) {
  const json& f = field(j, name, path);
  if (!f.is_string())
    throw SchemaError(path + "." + name, "expected a string");
  return f.get<std::string>();
}

Unit unit_field(const json& j, const char* name, const std::string& path) {
  std::string text = string_field(j, name, path);
  auto u = Unit::parse(text);
  if (!u) throw SchemaError(path + "." + name, "malformed unit '" + text + "'");
  return *u;
}

ExprPtr expr_field(const json& j, const char* name, const std::string& path) {
  std::string text = string_field(j, name, path);
  try {
    return parse_expression(text);
  } catch (const ParseError& e) {
    throw SchemaError(path + "." + name, std::string("malformed expression: ") + e.what());
  }
}

Member member_from_json(const json& j, const std::string& path) {
  std::string key = string_field(j, "key", path);
  std::string kind = string_field(j, "member_kind", path);
  try {
    if (kind == "quantitative") {
      const json& values = field(j, "values", path);
      if (!values.is_array() || values.empty())
        throw SchemaError(path + ".values", "expected a nonempty array");
      std::vector<QuantValue> out;
      for (std::size_t i = 0; i < values.size(); ++i) {
        std::string vpath = path + ".values[" + std::to_string(i) + "]";
        std::string magnitude = string_field(values[i], "magnitude", vpath);
        Unit unit = unit_field(values[i], "unit", vpath);
        if (magnitude.rfind("var:", 0) == 0) {
          std::string name = magnitude.substr(4);
          if (name.empty()) throw SchemaError(vpath, "empty variable name");
          out.push_back(QuantValue::unknown(name, unit));
        } else {
          auto r = parse_rational(magnitude);
          if (!r) throw SchemaError(vpath, "malformed magnitude '" + magnitude + "'");
          out.push_back(QuantValue::of(*r, unit));
        }
      }
      return Member::quantitative(key, std::move(out));
    }
    if (kind == "verification") {
      bool asserted = true;
      if (j.contains("asserted")) {
        if (!j["asserted"].is_boolean())
          throw SchemaError(path + ".asserted", "expected a boolean");
        asserted = j["asserted"].get<bool>();
      }
      return Member::verification(key, expr_field(j, "predicate", path), asserted);
    }
    if (kind == "method")
      return Member::method(key, expr_field(j, "body", path),
                            unit_field(j, "result_unit", path));
  } catch (const std::invalid_argument& e) {
    throw SchemaError(path, e.what());
  }
  throw SchemaError(path + ".member_kind", "unknown member kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Classes

json provenance_to_json(const Provenance& p) {
  json j;
  switch (p.kind) {
    case Provenance::Kind::Basic:
      j["kind"] = "basic";
      break;
    case Provenance::Kind::Union:
      j["kind"] = "union";
      j["of"] = p.names;
      break;
    case Provenance::Kind::Intersection:
      j["kind"] = "intersection";
      j["of"] = p.names;
      break;
  }
  return j;
}

Provenance provenance_from_json(const json& j, const std::string& path) {
  if (!j.contains("provenance")) return Provenance::basic();
  const json& p = j["provenance"];
  std::string kind = string_field(p, "kind", path + ".provenance");
  if (kind == "basic") return Provenance::basic();
  const json& of = field(p, "of", path + ".provenance");
  if (!of.is_array()) throw SchemaError(path + ".provenance.of", "expected an array");
  std::vector<std::string> names;
  for (const auto& n : of) {
    if (!n.is_string())
      throw SchemaError(path + ".provenance.of", "expected strings");
    names.push_back(n.get<std::string>());
  }
  if (kind == "union") return Provenance::union_of(std::move(names));
  if (kind == "intersection") return Provenance::intersection_of(std::move(names));
  throw SchemaError(path + ".provenance.kind", "unknown kind '" + kind + "'");
}

/// Serializes members, replacing table-shared bodies with references when a
/// lookup is provided.
json members_to_json(const MemberSet& members,
                     const std::map<std::string, std::size_t>* table) {
  json out = json::array();
  for (const auto& m : members) {
    if (table != nullptr && m.kind() != MemberKind::Quantitative) {
      auto it = table->find(m.digest());
      if (it != table->end()) {
        json j;
        j["key"] = m.key();
        j["member_kind"] =
            m.kind() == MemberKind::Method ? "method" : "verification";
        j["body_ref"] = it->second;
        out.push_back(std::move(j));
        continue;
      }
    }
    out.push_back(member_to_json(m));
  }
  return out;
}

MemberSet members_from_json(const json& j, const std::string& path,
                            const std::vector<Member>* table) {
  if (!j.is_array()) throw SchemaError(path, "expected an array");
  std::vector<Member> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    std::string mpath = path + "[" + std::to_string(i) + "]";
    if (j[i].is_object() && j[i].contains("body_ref")) {
      if (table == nullptr)
        throw SchemaError(mpath, "body_ref outside a compressed document");
      std::string key = string_field(j[i], "key", mpath);
      std::string kind = string_field(j[i], "member_kind", mpath);
      const json& r = j[i]["body_ref"];
      if (!r.is_number_unsigned())
        throw SchemaError(mpath + ".body_ref", "expected an index");
      std::size_t idx = r.get<std::size_t>();
      if (idx >= table->size())
        throw SchemaError(mpath, "dangling body-table reference " + std::to_string(idx));
      const Member& entry = (*table)[idx];
      std::string entry_kind =
          entry.kind() == MemberKind::Method ? "method" : "verification";
      if (entry.key() != key || entry_kind != kind)
        throw SchemaError(mpath, "dangling body-table reference " + std::to_string(idx) +
                                     " (entry does not match slot '" + key + "')");
      out.push_back(entry);
      continue;
    }
    out.push_back(member_from_json(j[i], mpath));
  }
  try {
    return MemberSet(std::move(out));
  } catch (const std::invalid_argument& e) {
    throw SchemaError(path, e.what());
  }
}

json class_to_json(const ClassSpec& c,
                   const std::map<std::string, std::size_t>* table) {
  json j;
  j["name"] = c.name();
  j["provenance"] = provenance_to_json(c.provenance());
  if (c.is_homogeneous()) {
    j["kind"] = "homogeneous";
    j["members"] = members_to_json(c.core(), nullptr);
  } else {
    j["kind"] = "inhomogeneous";
    j["core"] = members_to_json(c.core(), nullptr);
    json projections = json::array();
    for (const auto& p : c.projections()) {
      json pj;
      pj["name"] = p.type_name;
      pj["members"] = members_to_json(p.members, table);
      projections.push_back(std::move(pj));
    }
    j["projections"] = std::move(projections);
  }
  return j;
}

ClassSpec class_from_json(const json& j, const std::string& path,
                          const std::vector<Member>* table) {
  std::string name = string_field(j, "name", path);
  std::string kind = string_field(j, "kind", path);
  Provenance provenance = provenance_from_json(j, path);
  try {
    if (kind == "homogeneous")
      return ClassSpec::make_homogeneous(
          name, members_from_json(field(j, "members", path), path + ".members", nullptr),
          std::move(provenance));
    if (kind == "inhomogeneous") {
      MemberSet core =
          members_from_json(field(j, "core", path), path + ".core", nullptr);
      const json& pj = field(j, "projections", path);
      if (!pj.is_array()) throw SchemaError(path + ".projections", "expected an array");
      std::vector<Projection> projections;
      for (std::size_t i = 0; i < pj.size(); ++i) {
        std::string ppath = path + ".projections[" + std::to_string(i) + "]";
        projections.push_back(
            {string_field(pj[i], "name", ppath),
             members_from_json(field(pj[i], "members", ppath), ppath + ".members",
                               table)});
      }
      return ClassSpec::make_inhomogeneous(name, std::move(core),
                                           std::move(projections),
                                           std::move(provenance));
    }
  } catch (const std::invalid_argument& e) {
    throw SchemaError(path, e.what());
  }
  throw SchemaError(path + ".kind", "unknown class kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Objects and the lattice section

json object_to_json(const ObjectInstance& o) {
  json j;
  j["name"] = o.name;
  j["class"] = o.class_name;
  json binding = json::array();
  for (const auto& [slot, value] : o.binding.slots()) {
    json e;
    e["key"] = slot.first;
    e["index"] = slot.second;
    e["magnitude"] = render_rational(value.first);
    e["unit"] = value.second.render();
    binding.push_back(std::move(e));
  }
  for (const auto& [name, value] : o.binding.variables()) {
    json e;
    e["name"] = name;
    e["magnitude"] = render_rational(value.first);
    e["unit"] = value.second.render();
    binding.push_back(std::move(e));
  }
  j["binding"] = std::move(binding);
  return j;
}

ObjectInstance object_from_json(const json& j, const std::string& path) {
  ObjectInstance o;
  o.name = string_field(j, "name", path);
  o.class_name = string_field(j, "class", path);
  const json& binding = field(j, "binding", path);
  if (!binding.is_array()) throw SchemaError(path + ".binding", "expected an array");
  for (std::size_t i = 0; i < binding.size(); ++i) {
    std::string bpath = path + ".binding[" + std::to_string(i) + "]";
    const json& e = binding[i];
    std::string magnitude = string_field(e, "magnitude", bpath);
    auto r = parse_rational(magnitude);
    if (!r) throw SchemaError(bpath, "malformed magnitude '" + magnitude + "'");
    Unit unit = unit_field(e, "unit", bpath);
    if (e.contains("key")) {
      const json& idx = field(e, "index", bpath);
      if (!idx.is_number_integer())
        throw SchemaError(bpath + ".index", "expected an integer");
      o.binding.set_slot(string_field(e, "key", bpath), idx.get<int>(), *r, unit);
    } else {
      o.binding.set_variable(string_field(e, "name", bpath), *r, unit);
    }
  }
  return o;
}

std::string mode_name(LatticeMode mode) {
  return mode == LatticeMode::Named ? "named" : "strict";
}

LatticeMode mode_from_name(const std::string& name, const std::string& path) {
  if (name == "named") return LatticeMode::Named;
  if (name == "strict") return LatticeMode::Strict;
  throw SchemaError(path, "unknown mode '" + name + "'");
}

json pairs_to_json(const std::vector<std::pair<std::string, std::string>>& pairs) {
  json out = json::array();
  for (const auto& [a, b] : pairs) out.push_back(json::array({a, b}));
  return out;
}

std::vector<std::pair<std::string, std::string>> pairs_from_json(
    const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array");
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string())
      throw SchemaError(path, "expected [name, name] pairs");
    out.push_back({e[0].get<std::string>(), e[1].get<std::string>()});
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Documents

std::string save_kb(const KBDocument& doc) {
  json j;
  j["version"] = kFormatVersion;
  json classes = json::array();
  for (const auto& c : doc.classes) classes.push_back(class_to_json(c, nullptr));
  j["classes"] = std::move(classes);
  json objects = json::array();
  for (const auto& o : doc.objects) objects.push_back(object_to_json(o));
  j["objects"] = std::move(objects);
  if (doc.lattice) {
    json l;
    l["mode"] = mode_name(doc.lattice->mode);
    l["top"] = doc.lattice->top;
    l["bottom"] = doc.lattice->bottom;
    l["order"] = pairs_to_json(doc.lattice->order);
    l["hasse"] = pairs_to_json(doc.lattice->hasse);
    json aliases = json::array();
    for (const auto& group : doc.lattice->aliases) aliases.push_back(group);
    l["aliases"] = std::move(aliases);
    j["lattice"] = std::move(l);
  }
  return j.dump(2) + "\n";
}

KBDocument load_kb(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("not valid JSON: ") + e.what());
  }
  std::string version = string_field(j, "version", "$");
  if (version != kFormatVersion)
    throw SchemaError("$.version", "unsupported version '" + version +
                                       "' (expected '" + kFormatVersion + "')");
  KBDocument doc;
  if (j.contains("classes")) {
    const json& classes = j["classes"];
    if (!classes.is_array()) throw SchemaError("$.classes", "expected an array");
    std::set<std::string> names;
    for (std::size_t i = 0; i < classes.size(); ++i) {
      std::string path = "$.classes[" + std::to_string(i) + "]";
      ClassSpec c = class_from_json(classes[i], path, nullptr);
      if (!names.insert(c.name()).second)
        throw SchemaError(path, "duplicate class name '" + c.name() + "'");
      doc.classes.push_back(std::move(c));
    }
  }
  if (j.contains("objects")) {
    const json& objects = j["objects"];
    if (!objects.is_array()) throw SchemaError("$.objects", "expected an array");
    for (std::size_t i = 0; i < objects.size(); ++i)
      doc.objects.push_back(
          object_from_json(objects[i], "$.objects[" + std::to_string(i) + "]"));
  }
  if (j.contains("lattice")) {
    const json& l = j["lattice"];
    LatticeSection section;
    section.mode = mode_from_name(string_field(l, "mode", "$.lattice"), "$.lattice.mode");
    section.top = string_field(l, "top", "$.lattice");
    section.bottom = string_field(l, "bottom", "$.lattice");
    section.order = pairs_from_json(field(l, "order", "$.lattice"), "$.lattice.order");
    section.hasse = pairs_from_json(field(l, "hasse", "$.lattice"), "$.lattice.hasse");
    const json& aliases = field(l, "aliases", "$.lattice");
    if (!aliases.is_array()) throw SchemaError("$.lattice.aliases", "expected an array");
    for (const auto& g : aliases) {
      std::vector<std::string> group;
      for (const auto& n : g) {
        if (!n.is_string())
          throw SchemaError("$.lattice.aliases", "expected name arrays");
        group.push_back(n.get<std::string>());
      }
      section.aliases.push_back(std::move(group));
    }
    doc.lattice = std::move(section);
  }
  return doc;
}

KBDocument lattice_document(const KnowledgeLattice& lattice) {
  KBDocument doc;
  for (const auto& node : lattice.nodes()) doc.classes.push_back(node.cls);

  LatticeSection section;
  section.mode = lattice.mode();
  section.top = lattice.top_name();
  section.bottom = lattice.bottom_name();
  const auto& nodes = lattice.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = 0; j < nodes.size(); ++j)
      if (i != j && lattice.leq(i, j))
        section.order.push_back({nodes[i].cls.name(), nodes[j].cls.name()});
  std::sort(section.order.begin(), section.order.end());
  for (const auto& [a, b] : lattice.hasse_edges())
    section.hasse.push_back({nodes[a].cls.name(), nodes[b].cls.name()});
  std::sort(section.hasse.begin(), section.hasse.end());
  for (auto group : lattice.alias_groups()) {
    std::sort(group.begin(), group.end());
    section.aliases.push_back(std::move(group));
  }
  std::sort(section.aliases.begin(), section.aliases.end());
  doc.lattice = std::move(section);
  return doc;
}

// ---------------------------------------------------------------------------
// Compression

CompressedKB compress(const std::vector<ClassSpec>& classes) {
  if (classes.empty()) throw std::invalid_argument("compress: empty class list");
  std::set<std::string> seen;
  std::vector<std::string> names;
  for (const auto& c : classes) {
    if (!seen.insert(c.name()).second)
      throw std::invalid_argument("compress: duplicate class name '" + c.name() + "'");
    names.push_back(c.name());
  }

  std::vector<TypeSpec> types;
  for (const auto& c : classes)
    for (TypeSpec& t : types_described(c)) types.push_back(std::move(t));
  std::set<std::string> type_names;
  for (const auto& t : types)
    if (!type_names.insert(t.name).second)
      throw std::invalid_argument("compress: duplicate type name '" + t.name + "'");

  if (types.size() == 1) return CompressedKB(std::move(names), classes.front());

  // Union-of-all without absorption: every input type keeps a projection,
  // so restoration is exact even when one input subsumes another.
  std::vector<Member> core = common_members(types);
  std::set<std::string> core_keys;
  for (const auto& m : core) core_keys.insert(m.key());
  std::vector<Projection> projections;
  std::string top_name;
  std::vector<std::string> type_name_list;
  for (const auto& t : types) {
    std::vector<Member> leftovers;
    for (const auto& m : t.members)
      if (!core_keys.count(m.key())) leftovers.push_back(m);
    projections.push_back({t.name, MemberSet(std::move(leftovers))});
    top_name += t.name;
    type_name_list.push_back(t.name);
  }
  top_name += kUnionSuffix;
  ClassSpec top = ClassSpec::make_inhomogeneous(
      top_name, MemberSet(std::move(core)), std::move(projections),
      Provenance::union_of(std::move(type_name_list)));
  return CompressedKB(std::move(names), std::move(top));
}

std::vector<ClassSpec> restore(const CompressedKB& c) {
  std::vector<ClassSpec> out;
  for (std::size_t i = 1; i <= c.top.type_count(); ++i) {
    TypeSpec t = extract_type(c.top, i);
    out.push_back(ClassSpec::make_homogeneous(t.name, MemberSet(std::move(t.members)),
                                              Provenance::basic()));
  }
  return out;
}

std::string save_compressed(const CompressedKB& c) {
  // Table of method/verification bodies shared by >= 2 projections.
  std::map<std::string, std::size_t> occurrences;
  for (const auto& p : c.top.projections())
    for (const auto& m : p.members)
      if (m.kind() != MemberKind::Quantitative) ++occurrences[m.digest()];
  std::map<std::string, std::size_t> table_index;
  std::vector<const Member*> table;
  for (const auto& p : c.top.projections())
    for (const auto& m : p.members)
      if (m.kind() != MemberKind::Quantitative && occurrences[m.digest()] >= 2 &&
          !table_index.count(m.digest())) {
        table_index[m.digest()] = table.size();
        table.push_back(&m);
      }

  json j;
  j["version"] = kFormatVersion;
  j["kind"] = "compressed";
  j["basics"] = c.basic_names;
  json entries = json::array();
  for (const Member* m : table) entries.push_back(member_to_json(*m));
  j["body_table"] = std::move(entries);
  j["top"] = class_to_json(c.top, &table_index);
  return j.dump(2) + "\n";
}

CompressedKB load_compressed(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("not valid JSON: ") + e.what());
  }
  std::string version = string_field(j, "version", "$");
  if (version != kFormatVersion)
    throw SchemaError("$.version", "unsupported version '" + version + "'");
  if (string_field(j, "kind", "$") != "compressed")
    throw SchemaError("$.kind", "not a compressed document");

  const json& basics = field(j, "basics", "$");
  if (!basics.is_array()) throw SchemaError("$.basics", "expected an array");
  std::vector<std::string> names;
  for (const auto& n : basics) {
    if (!n.is_string()) throw SchemaError("$.basics", "expected strings");
    names.push_back(n.get<std::string>());
  }

  const json& entries = field(j, "body_table", "$");
  if (!entries.is_array()) throw SchemaError("$.body_table", "expected an array");
  std::vector<Member> table;
  for (std::size_t i = 0; i < entries.size(); ++i)
    table.push_back(
        member_from_json(entries[i], "$.body_table[" + std::to_string(i) + "]"));

  ClassSpec top = class_from_json(field(j, "top", "$"), "$.top", &table);
  if (top.type_count() != names.size())
    throw SchemaError("$.top", "projection count does not match basics list");
  return CompressedKB(std::move(names), std::move(top));
}

// ---------------------------------------------------------------------------
// Statistics

namespace {

void count_members(const MemberSet& members, StorageStats& stats,
                   std::set<std::string>& method_digests) {
  stats.property_slots += members.property_count();
  stats.methods_raw += members.method_count();
  for (const auto& m : members)
    if (m.is_method()) method_digests.insert(m.digest());
}

void count_class(const ClassSpec& c, StorageStats& stats,
                 std::set<std::string>& method_digests) {
  ++stats.classes;
  count_members(c.core(), stats, method_digests);
  for (const auto& p : c.projections()) count_members(p.members, stats, method_digests);
}

}  // namespace

StorageStats storage_stats(const KBDocument& doc) {
  StorageStats stats;
  std::set<std::string> method_digests;
  for (const auto& c : doc.classes) count_class(c, stats, method_digests);
  stats.method_bodies_distinct = method_digests.size();
  stats.bytes = save_kb(doc).size();
  return stats;
}

StorageStats storage_stats(const CompressedKB& c) {
  StorageStats stats;
  std::set<std::string> method_digests;
  count_class(c.top, stats, method_digests);
  stats.classes = 1;
  stats.method_bodies_distinct = method_digests.size();
  stats.bytes = save_compressed(c).size();
  KBDocument plain;
  plain.classes = restore(c);
  stats.compression_ratio =
      static_cast<double>(stats.bytes) / static_cast<double>(save_kb(plain).size());
  return stats;
}

// ---------------------------------------------------------------------------
// DOT export

std::string export_dot(const KnowledgeLattice& lattice) {
  std::ostringstream os;
  os << "digraph oodn {\n";
  os << "  rankdir=BT;\n";
  os << "  node [shape=box];\n";
  for (const auto& node : lattice.nodes()) {
    const std::string& name = node.cls.name();
    os << "  \"" << ascii_node_name(name) << "\" [label=\"" << name << "\"];\n";
  }
  std::vector<std::pair<std::string, std::string>> edges;
  const auto& nodes = lattice.nodes();
  for (const auto& [a, b] : lattice.hasse_edges())
    edges.push_back({ascii_node_name(nodes[a].cls.name()),
                     ascii_node_name(nodes[b].cls.name())});
  std::sort(edges.begin(), edges.end());
  for (const auto& [a, b] : edges) os << "  \"" << a << "\" -> \"" << b << "\";\n";
  os << "  { rank=min; \"" << ascii_node_name(lattice.bottom_name()) << "\"; }\n";
  os << "  { rank=max; \"" << ascii_node_name(lattice.top_name()) << "\"; }\n";
  if (lattice.mode() == LatticeMode::Named) {
    std::vector<std::string> lines;
    for (auto group : lattice.alias_groups()) {
      std::sort(group.begin(), group.end());
      std::string line = "  // aliases:";
      for (const auto& n : group) line += " " + n;
      lines.push_back(std::move(line));
    }
    std::sort(lines.begin(), lines.end());
    for (const auto& line : lines) os << line << "\n";
  }
  os << "}\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Bundled quadrangle example

namespace {

Member quantity(const char* key, long value, const char* unit) {
  return Member::quantitative(key, {QuantValue::of(Rational(value), Unit(unit))});
}

Member symbolic_tuple(const char* key, const std::string& prefix, const char* unit) {
  std::vector<QuantValue> values;
  for (int i = 1; i <= 4; ++i)
    values.push_back(QuantValue::unknown(prefix + std::to_string(i), Unit(unit)));
  return Member::quantitative(key, std::move(values));
}

Member concrete_tuple(const char* key, long value, const char* unit) {
  std::vector<QuantValue> values(4, QuantValue::of(Rational(value), Unit(unit)));
  return Member::quantitative(key, std::move(values));
}

Member verification(const char* key, const char* predicate) {
  return Member::verification(key, parse_expression(predicate));
}

Member method(const char* key, const char* body, const char* unit) {
  return Member::method(key, parse_expression(body), *Unit::parse(unit));
}

}  // namespace

KBDocument builtin_quadrangle() {
  const char* sum_360 =
      "(= (+ (ref angle_sizes 1) (ref angle_sizes 2) (ref angle_sizes 3) "
      "(ref angle_sizes 4)) 360)";
  const char* all_sides_equal =
      "(= (ref side_sizes 1) (ref side_sizes 2) (ref side_sizes 3) "
      "(ref side_sizes 4))";
  const char* angles_90 =
      "(= (ref angle_sizes 1) (ref angle_sizes 2) (ref angle_sizes 3) "
      "(ref angle_sizes 4) 90)";
  const char* opp_parallel =
      "(and (= (ref angle_sizes 1) (ref angle_sizes 3)) "
      "(= (ref angle_sizes 2) (ref angle_sizes 4)))";
  const char* opp_equal =
      "(and (= (ref side_sizes 1) (ref side_sizes 3)) "
      "(= (ref side_sizes 2) (ref side_sizes 4)))";

  KBDocument doc;
  doc.classes.push_back(ClassSpec::make_homogeneous(
      "S", MemberSet({
               quantity("side_count", 4, "sides"),
               quantity("angle_count", 4, "angles"),
               symbolic_tuple("side_sizes", "S_s", "cm"),
               concrete_tuple("angle_sizes", 90, "deg"),
               verification("vf_sum_360", sum_360),
               verification("vf_all_sides_equal", all_sides_equal),
               verification("vf_angles_90", angles_90),
               method("m_perimeter", "(* 4 (ref side_sizes 1))", "cm"),
               method("m_area", "(pow (ref side_sizes 1) 2)", "cm^2"),
           })));
  doc.classes.push_back(ClassSpec::make_homogeneous(
      "Rb", MemberSet({
                quantity("side_count", 4, "sides"),
                quantity("angle_count", 4, "angles"),
                symbolic_tuple("side_sizes", "Rb_s", "cm"),
                symbolic_tuple("angle_sizes", "Rb_a", "deg"),
                verification("vf_sum_360", sum_360),
                verification("vf_all_sides_equal", all_sides_equal),
                method("m_perimeter", "(* 4 (ref side_sizes 1))", "cm"),
                method("m_area",
                       "(* (pow (ref side_sizes 1) 2) (sin (ref angle_sizes 1)))",
                       "cm^2"),
            })));
  doc.classes.push_back(ClassSpec::make_homogeneous(
      "P", MemberSet({
               quantity("side_count", 4, "sides"),
               quantity("angle_count", 4, "angles"),
               symbolic_tuple("side_sizes", "P_s", "cm"),
               symbolic_tuple("angle_sizes", "P_a", "deg"),
               verification("vf_sum_360", sum_360),
               verification("vf_opp_parallel", opp_parallel),
               verification("vf_opp_equal", opp_equal),
               method("m_perimeter", "(* 2 (+ (ref side_sizes 1) (ref side_sizes 2)))",
                      "cm"),
               method("m_area",
                      "(* (ref side_sizes 1) (ref side_sizes 2) "
                      "(sin (ref angle_sizes 1)))",
                      "cm^2"),
           })));
  doc.classes.push_back(ClassSpec::make_homogeneous(
      "Rt", MemberSet({
                quantity("side_count", 4, "sides"),
                quantity("angle_count", 4, "angles"),
                symbolic_tuple("side_sizes", "Rt_s", "cm"),
                concrete_tuple("angle_sizes", 90, "deg"),
                verification("vf_sum_360", sum_360),
                verification("vf_opp_equal", opp_equal),
                method("m_perimeter",
                       "(* 2 (+ (ref side_sizes 1) (ref side_sizes 2)))", "cm"),
                method("m_area", "(* (ref side_sizes 1) (ref side_sizes 2))", "cm^2"),
            })));
  return doc;
}

std::optional<QuadrangleReference> quadrangle_reference(
    const std::vector<ClassSpec>& classes) {
  KBDocument fixture = builtin_quadrangle();
  if (classes.size() != fixture.classes.size()) return std::nullopt;
  std::multiset<std::string> a;
  std::multiset<std::string> b;
  for (const auto& c : classes) a.insert(class_digest(c));
  for (const auto& c : fixture.classes) b.insert(class_digest(c));
  if (a != b) return std::nullopt;
  return QuadrangleReference{};
}

}  // namespace oodn
