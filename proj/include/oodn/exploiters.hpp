#ifndef OODN_EXPLOITERS_HPP
#define OODN_EXPLOITERS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "oodn/model.hpp"

namespace oodn {

inline const std::string kUnionSuffix = "∪";         // ∪
inline const std::string kIntersectionSuffix = "∩";  // ∩

/// N-ary union exploiter. Flattens every operand into its described types,
/// drops types that are proper subtypes of another flattened type, dedupes
/// structural duplicates, and rebuilds: one surviving type yields a
/// homogeneous class; several yield core (members common to all survivors)
/// plus per-type projections in constituent order. Name: surviving type
/// names joined plus the union mark.
ClassSpec union_classes(const std::vector<ClassSpec>& classes);

/// N-ary intersection exploiter. For every tuple of types drawn one from
/// each operand, the common member set is a candidate type; candidates that
/// are proper subtypes of another candidate are discarded, structural
/// duplicates deduped. A single survivor yields a homogeneous class (the
/// distinguished empty class when no members are shared).
ClassSpec intersect_classes(const std::vector<ClassSpec>& classes);

/// Semantic oracle backing structural member equality: evaluates each
/// type's version of the member (looked up by key) against seeded random
/// bindings covering both bodies' slots, and reports whether every
/// evaluation pair agreed (exactly for rationals, within 1e-9 once a sine
/// has forced a double).
bool cross_equivalence_check(const Member& m, const TypeSpec& t1,
                             const TypeSpec& t2, int samples, std::uint64_t seed);

}  // namespace oodn

#endif
