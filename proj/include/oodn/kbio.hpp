#ifndef OODN_KBIO_HPP
#define OODN_KBIO_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oodn/lattice.hpp"
#include "oodn/model.hpp"

namespace oodn {

inline const std::string kFormatVersion = "oodn-kb/1";

struct SchemaError : std::runtime_error {
  SchemaError(const std::string& path, const std::string& message)
      : std::runtime_error(path + ": " + message) {}
};

struct LatticeSection {
  LatticeMode mode = LatticeMode::Named;
  std::vector<std::pair<std::string, std::string>> order;  // a subclass-of b
  std::vector<std::pair<std::string, std::string>> hasse;
  std::string top;
  std::string bottom;
  std::vector<std::vector<std::string>> aliases;
};

struct KBDocument {
  std::vector<ClassSpec> classes;
  std::vector<ObjectInstance> objects;
  std::optional<LatticeSection> lattice;

  const ClassSpec* find_class(const std::string& name) const;
};

/// Canonical serialization: JSON with sorted keys, members in canonical
/// order, expressions as s-expression strings. load(save(doc)) == doc and
/// save(load(text)) == text on canonical documents.
std::string save_kb(const KBDocument& doc);
KBDocument load_kb(const std::string& text);

/// Snapshot of a closed lattice as a document: nodes in lattice order plus
/// the order/hasse/alias section.
KBDocument lattice_document(const KnowledgeLattice& lattice);

// ---------------------------------------------------------------------------
// Compressed storage

/// Stores only the top (union-of-all) class; each original class is
/// recoverable as core + its projection. The serialized form additionally
/// dedupes member_equal method/verification bodies shared across
/// projections through a body table.
struct CompressedKB {
  std::vector<std::string> basic_names;
  ClassSpec top;

  CompressedKB(std::vector<std::string> names, ClassSpec top_class)
      : basic_names(std::move(names)), top(std::move(top_class)) {}
};

CompressedKB compress(const std::vector<ClassSpec>& classes);

/// Inverse of compress: one homogeneous class per projection, in original
/// order, member-for-member identical to the inputs.
std::vector<ClassSpec> restore(const CompressedKB& c);

std::string save_compressed(const CompressedKB& c);
/// Throws SchemaError on malformed documents, including dangling body-table
/// references.
CompressedKB load_compressed(const std::string& text);

// ---------------------------------------------------------------------------
// Reports and export

struct StorageStats {
  std::size_t classes = 0;
  std::size_t property_slots = 0;
  std::size_t methods_raw = 0;
  std::size_t method_bodies_distinct = 0;
  std::size_t bytes = 0;
  /// compressed bytes / plain bytes of the restored document.
  std::optional<double> compression_ratio;
};

StorageStats storage_stats(const KBDocument& doc);
StorageStats storage_stats(const CompressedKB& c);

/// DOT digraph: rankdir=BT, covering edges oriented subclass -> superclass,
/// ASCII node ids with the original names as labels, top/bottom pinned by
/// rank, alias groups annotated as comments in Named mode.
std::string export_dot(const KnowledgeLattice& lattice);

// ---------------------------------------------------------------------------
// Bundled example

/// Four convex quadrangle classes: square, rhombus, parallelogram,
/// rectangle; 26 properties and 8 methods in total.
KBDocument builtin_quadrangle();

/// Figures quoted for the quadrangle example in the OODN literature. Some
/// are not derivable from the definitions (see README); reports show them
/// next to the derived values when the input matches the bundled example.
struct QuadrangleReference {
  std::size_t new_classes = 22;
  std::size_t relations_total = 96;
  std::size_t relations_basics = 56;
  std::size_t relations_pairs = 32;
  std::size_t relations_triples = 8;
  std::size_t compressed_properties = 17;
  std::size_t compressed_methods = 5;
};

/// Set when the classes structurally match the bundled quadrangle fixture.
std::optional<QuadrangleReference> quadrangle_reference(
    const std::vector<ClassSpec>& classes);

}  // namespace oodn

#endif
