#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "oodn/kbio.hpp"
#include "oodn/lattice.hpp"

using namespace oodn;

namespace {

KnowledgeLattice quad_lattice(LatticeMode mode) {
  return KnowledgeLattice::close_under_exploiters(builtin_quadrangle().classes, mode);
}

std::set<std::string> node_names(const KnowledgeLattice& lat) {
  std::set<std::string> out;
  for (const auto& n : lat.nodes()) out.insert(n.cls.name());
  return out;
}

/// n classes sharing a 3-member core, one marker member per subset of size
/// >= 2 held by exactly that subset's classes, and one unique member per
/// class. Satisfies the counting preconditions with all generated classes
/// pairwise distinct.
std::vector<ClassSpec> synthetic_basics(std::size_t n) {
  auto quantity = [](const std::string& key, long v) {
    return Member::quantitative(key, {QuantValue::of(Rational(v), Unit("u"))});
  };
  std::vector<ClassSpec> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Member> members;
    members.push_back(quantity("core_a", 1));
    members.push_back(quantity("core_b", 2));
    members.push_back(Member::method("core_m", parse_expression("(* 2 (ref core_a 1))"),
                                     Unit("u")));
    members.push_back(quantity("unique_" + std::to_string(i), static_cast<long>(i)));
    for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
      if (__builtin_popcountll(mask) < 2) continue;
      if (!(mask & (std::size_t{1} << i))) continue;
      members.push_back(quantity("marker_" + std::to_string(mask),
                                 static_cast<long>(mask)));
    }
    out.push_back(ClassSpec::make_homogeneous("C" + std::to_string(i),
                                              MemberSet(std::move(members))));
  }
  return out;
}

/// Set-arithmetic oracle for the synthetic construction: the member keys an
/// intersection over `subset` must carry.
std::set<std::string> expected_intersection_keys(std::size_t n, std::size_t subset) {
  std::set<std::string> keys{"core_a", "core_b", "core_m"};
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    if (__builtin_popcountll(mask) < 2) continue;
    if ((mask & subset) == subset) keys.insert("marker_" + std::to_string(mask));
  }
  return keys;
}

}  // namespace

TEST_CASE("quadrangle closure in named mode: 4 + 22 nodes with the expected names") {
  KnowledgeLattice lat = quad_lattice(LatticeMode::Named);
  CHECK(lat.nodes().size() == 26);
  CHECK(lat.generated_count(Provenance::Kind::Union) == 11);
  CHECK(lat.generated_count(Provenance::Kind::Intersection) == 11);

  std::set<std::string> expected;
  for (const char* b : {"S", "Rb", "P", "Rt"}) expected.insert(b);
  for (const char* u :
       {"SRb", "SP", "SRt", "RbP", "RbRt", "PRt", "SRbP", "SRbRt", "SPRt", "RbPRt",
        "SRbPRt"}) {
    expected.insert(std::string(u) + "∪");
    expected.insert(std::string(u) + "∩");
  }
  CHECK(node_names(lat) == expected);

  CHECK(lat.top_name() == "SRbPRt∪");
  CHECK(lat.bottom_name() == "SRbPRt∩");
  CHECK(lat.empty_class_names().empty());
}

TEST_CASE("single-class closure") {
  std::vector<ClassSpec> one = {builtin_quadrangle().classes[0]};
  KnowledgeLattice lat = KnowledgeLattice::close_under_exploiters(one, LatticeMode::Named);
  CHECK(lat.nodes().size() == 1);
  CHECK(lat.top_name() == "S");
  CHECK(lat.bottom_name() == "S");
  CHECK(lat.hasse_edges().empty());
  CHECK(predict_counts(1).predicted_total == 0);
}

TEST_CASE("closure cap") {
  std::vector<ClassSpec> many;
  for (int i = 0; i < 3; ++i)
    many.push_back(ClassSpec::make_homogeneous(
        "X" + std::to_string(i),
        MemberSet({Member::quantitative("p" + std::to_string(i),
                                        {QuantValue::of(Rational(i), Unit("u"))})})));
  CHECK_THROWS_AS(KnowledgeLattice::close_under_exploiters(many, LatticeMode::Named, 2),
                  std::invalid_argument);
  std::vector<ClassSpec> dup = {many[0], many[0]};
  CHECK_THROWS_AS(KnowledgeLattice::close_under_exploiters(dup, LatticeMode::Named),
                  std::invalid_argument);
}

TEST_CASE("strict mode collapses the intersection family to 4 classes") {
  KnowledgeLattice lat = quad_lattice(LatticeMode::Strict);
  CHECK(lat.generated_count(Provenance::Kind::Union) == 11);
  CHECK(lat.generated_count(Provenance::Kind::Intersection) == 4);
  CHECK(lat.nodes().size() == 19);

  std::set<std::string> intersections;
  for (const auto& n : lat.nodes())
    if (n.family == Provenance::Kind::Intersection) intersections.insert(n.cls.name());
  CHECK(intersections == std::set<std::string>{"SRb∩", "SRt∩", "PRt∩",
                                               "SRbPRt∩"});

  REQUIRE(lat.alias_groups().size() == 1);
  std::set<std::string> group(lat.alias_groups()[0].begin(),
                              lat.alias_groups()[0].end());
  CHECK(group == std::set<std::string>{"SP∩", "RbP∩", "RbRt∩",
                                       "SRbP∩", "SRbRt∩", "SPRt∩",
                                       "RbPRt∩", "SRbPRt∩"});
  CHECK(lat.bottom_name() == "SRbPRt∩");
}

TEST_CASE("named mode records the same alias group without merging") {
  KnowledgeLattice lat = quad_lattice(LatticeMode::Named);
  REQUIRE(lat.alias_groups().size() == 1);
  CHECK(lat.alias_groups()[0].size() == 8);
  CountReport r = lat.count_report();
  CHECK(r.alias_count == 7);
  CHECK(r.observed_union == 11);
  CHECK(r.observed_intersection == 4);
  CHECK(r.observed_total == 15);
  CHECK(r.predicted_union == 11);
  CHECK(r.predicted_total == 22);
}

TEST_CASE("count predictions") {
  CHECK(predict_counts(1).predicted_union == 0);
  CHECK(predict_counts(1).predicted_intersection == 0);
  CHECK(predict_counts(1).predicted_total == 0);
  CHECK(predict_counts(4).predicted_union == 11);
  CHECK(predict_counts(4).predicted_intersection == 11);
  CHECK(predict_counts(4).predicted_total == 22);
  CHECK(predict_counts(6).predicted_union == 57);
  CHECK(predict_counts(6).predicted_total == 114);
  // Brute-force: number of subsets of size >= 2.
  for (std::size_t n = 1; n <= 8; ++n) {
    std::size_t subsets = 0;
    for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask)
      if (__builtin_popcountll(mask) >= 2) ++subsets;
    CHECK(predict_counts(n).predicted_union == subsets);
    CHECK(predict_counts(n).predicted_total == 2 * subsets);
  }
}

TEST_CASE("synthetic closures match the counting formulas exactly") {
  for (std::size_t n = 2; n <= 5; ++n) {
    std::vector<ClassSpec> basics = synthetic_basics(n);
    KnowledgeLattice lat =
        KnowledgeLattice::close_under_exploiters(basics, LatticeMode::Strict);
    CountReport r = lat.count_report();
    CHECK(r.observed_union == r.predicted_union);
    CHECK(r.observed_intersection == r.predicted_intersection);
    CHECK(r.observed_total == r.predicted_total);
    CHECK(r.alias_count == 0);

    // Set-arithmetic oracle: each intersection node carries exactly the
    // core plus the markers of its subset's supersets.
    for (const auto& node : lat.nodes()) {
      if (node.family != Provenance::Kind::Intersection) continue;
      std::size_t subset = 0;
      for (const auto& name : node.subset)
        subset |= std::size_t{1} << std::stoul(name.substr(1));
      std::set<std::string> got;
      for (const auto& m : node.cls.core()) got.insert(m.key());
      CHECK(got == expected_intersection_keys(n, subset));
    }
  }
}

TEST_CASE("types described per node") {
  KnowledgeLattice lat = quad_lattice(LatticeMode::Named);
  CHECK(types_described_count(lat.find("S")->cls) == 1);
  CHECK(types_described_count(lat.find("SRbP∪")->cls) == 3);
  CHECK(types_described_count(lat.find("SRbPRt∪")->cls) == 4);
  CHECK(types_described_count(lat.find("SRb∩")->cls) == 1);
}

TEST_CASE("bounds over the fixture order") {
  KnowledgeLattice lat = quad_lattice(LatticeMode::Named);
  CHECK(lat.lub("S", "Rb").name == "SRb∪");
  CHECK(lat.glb("S", "Rb").name == "SRb∩");
  CHECK(lat.lub("S", "S").name == "S");
  CHECK(lat.lub("S", "SRbPRt∪").name == "SRbPRt∪");
  CHECK(lat.glb("S", "SRbPRt∪").name == "S");

  // Bounds agree with exploiter provenance on every basic pair.
  const char* basics[] = {"S", "Rb", "P", "Rt"};
  for (const char* a : basics)
    for (const char* b : basics) {
      if (std::string(a) == b) continue;
      const LatticeNode* join = lat.find(lat.lub(a, b).name);
      REQUIRE(join != nullptr);
      CHECK(join->cls.provenance() ==
            Provenance::union_of({std::string(a), std::string(b)}));
      const LatticeNode* meet = lat.find(lat.glb(a, b).name);
      REQUIRE(meet != nullptr);
      CHECK(meet->cls.provenance() ==
            Provenance::intersection_of({std::string(a), std::string(b)}));
    }

  // Aliased meets resolve modulo the alias group.
  KnowledgeLattice::Bound aliased = lat.glb("SP∩", "RbP∩");
  CHECK(aliased.name == "SRbP∩");
  CHECK(aliased.aliases.size() == 7);

  // Join of incomparable intersections has no unique least upper bound.
  CHECK_THROWS_AS(lat.lub("SRb∩", "PRt∩"), NonUniqueBound);
  try {
    lat.lub("SRb∩", "PRt∩");
  } catch (const NonUniqueBound& e) {
    CHECK(e.antichain == std::vector<std::string>{"RbP∪", "RbRt∪",
                                                  "SP∪", "SRt∪"});
  }
  CHECK_THROWS_AS(lat.lub("S", "missing"), std::invalid_argument);
}

TEST_CASE("ascii transliteration is accepted for node lookup") {
  KnowledgeLattice lat = quad_lattice(LatticeMode::Named);
  CHECK(lat.find("SRb_u") != nullptr);
  CHECK(lat.find("SRb_u")->cls.name() == "SRb∪");
  CHECK(lat.leq("SRb_u", "SRbPRt_u"));
  CHECK(ascii_node_name("SRb∪") == "SRb_u");
  CHECK(ascii_node_name("SRbPRt∩") == "SRbPRt_n");
}

TEST_CASE("lattice laws hold on the fixture") {
  KnowledgeLattice lat = quad_lattice(LatticeMode::Named);
  LawReport report = lat.verify_laws(1000, 42);
  CHECK(report.all_passed());
  REQUIRE(report.entries.size() == 5);
  CHECK(report.entries[0].law == "L1");
  CHECK(report.entries[0].checked == 2000);
  CHECK(report.entries[3].checked == 2 * 26 * 26);
  CHECK(report.entries[4].checked == 4 * 26);

  KnowledgeLattice strict = quad_lattice(LatticeMode::Strict);
  CHECK(strict.verify_laws(300, 7).all_passed());
}

TEST_CASE("order is consistent with the exploiters on all fixture pairs") {
  KnowledgeLattice lat = quad_lattice(LatticeMode::Named);
  const auto& nodes = lat.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      const ClassSpec& a = nodes[i].cls;
      const ClassSpec& b = nodes[j].cls;
      bool sub = lat.leq(i, j);
      ClassSpec joined = union_classes({a.renamed("#a"), b.renamed("#b")});
      CHECK(sub == class_equivalent(joined, b));
      ClassSpec met = intersect_classes({a.renamed("#a"), b.renamed("#b")});
      CHECK(sub == class_equivalent(met, a));
    }
}

TEST_CASE("order properties: reflexive, transitive, antisymmetric modulo aliases") {
  for (LatticeMode mode : {LatticeMode::Named, LatticeMode::Strict}) {
    KnowledgeLattice lat = quad_lattice(mode);
    std::size_t n = lat.nodes().size();
    for (std::size_t i = 0; i < n; ++i) CHECK(lat.leq(i, i));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (lat.leq(i, j) && lat.leq(j, i) && i != j) {
          CHECK(mode == LatticeMode::Named);
          CHECK(class_equivalent(lat.nodes()[i].cls, lat.nodes()[j].cls));
        }
        for (std::size_t k = 0; k < n; ++k)
          if (lat.leq(i, j) && lat.leq(j, k)) CHECK(lat.leq(i, k));
      }
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(lat.leq(lat.nodes()[i].cls.name(), lat.top_name()));
      CHECK(lat.leq(lat.bottom_name(), lat.nodes()[i].cls.name()));
    }
  }
}

TEST_CASE("relation families and structural pairs") {
  KnowledgeLattice lat = quad_lattice(LatticeMode::Named);
  RelationReport r = lat.enumerate_relations();
  CHECK(r.family_basics == 56);
  CHECK(r.family_pairs == 36);
  CHECK(r.family_triples == 8);
  CHECK(r.family_total() == 100);
  for (const auto& [a, b] : r.structural) CHECK(lat.leq(a, b));
  // The structural pair list is the non-reflexive order.
  std::size_t expected = 0;
  for (std::size_t i = 0; i < lat.nodes().size(); ++i)
    for (std::size_t j = 0; j < lat.nodes().size(); ++j)
      if (i != j && lat.leq(i, j)) ++expected;
  CHECK(r.structural.size() == expected);

  KnowledgeLattice single = KnowledgeLattice::close_under_exploiters(
      {builtin_quadrangle().classes[0]}, LatticeMode::Named);
  RelationReport rs = single.enumerate_relations();
  CHECK(rs.structural.empty());
  CHECK(rs.family_total() == 0);
}

TEST_CASE("hasse edges form the transitive reduction") {
  KnowledgeLattice lat = quad_lattice(LatticeMode::Named);
  const auto& nodes = lat.nodes();
  std::size_t n = nodes.size();

  // Brute-force reduction oracle over the strict order.
  auto strict = [&](std::size_t i, std::size_t j) {
    return i != j && lat.leq(i, j) && !lat.leq(j, i);
  };
  std::set<std::pair<std::size_t, std::size_t>> expected;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (!strict(i, j)) continue;
      bool covered = true;
      for (std::size_t k = 0; k < n; ++k)
        if (strict(i, k) && strict(k, j)) {
          covered = false;
          break;
        }
      if (covered) expected.insert({i, j});
    }
  std::set<std::pair<std::size_t, std::size_t>> got(lat.hasse_edges().begin(),
                                                    lat.hasse_edges().end());
  CHECK(got == expected);

  // Upward covers of S are exactly the pair unions containing S.
  std::set<std::string> covers_of_s;
  std::size_t s = lat.index_of("S");
  for (const auto& [a, b] : lat.hasse_edges())
    if (a == s) covers_of_s.insert(nodes[b].cls.name());
  CHECK(covers_of_s ==
        std::set<std::string>{"SRb∪", "SP∪", "SRt∪"});
  for (const auto& [a, b] : lat.hasse_edges()) CHECK(a != lat.index_of("SRbPRt∪"));

  // The reachability closure of the covers regenerates the strict order.
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (const auto& [a, b] : lat.hasse_edges()) reach[a][b] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (reach[i][k] && reach[k][j]) reach[i][j] = true;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      CHECK(reach[i][j] == strict(i, j));

  // Determinism across rebuilds.
  KnowledgeLattice again = quad_lattice(LatticeMode::Named);
  CHECK(again.hasse_edges() == lat.hasse_edges());
}

TEST_CASE("rebuilding a lattice from its nodes preserves the structure") {
  KnowledgeLattice lat = quad_lattice(LatticeMode::Named);
  std::vector<ClassSpec> classes;
  for (const auto& node : lat.nodes()) classes.push_back(node.cls);
  KnowledgeLattice rebuilt = KnowledgeLattice::from_nodes(classes, LatticeMode::Named);
  CHECK(rebuilt.nodes().size() == lat.nodes().size());
  CHECK(rebuilt.top_name() == lat.top_name());
  CHECK(rebuilt.bottom_name() == lat.bottom_name());
  CHECK(rebuilt.hasse_edges() == lat.hasse_edges());
  CHECK(rebuilt.basic_names() == lat.basic_names());
  RelationReport a = rebuilt.enumerate_relations();
  RelationReport b = lat.enumerate_relations();
  CHECK(a.family_basics == b.family_basics);
  CHECK(a.structural == b.structural);
}
