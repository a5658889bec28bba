#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "opwire/contract.hpp"
#include "opwire/lti.hpp"
#include "opwire/moore.hpp"

namespace opwire {

inline constexpr int kMaxHierarchyDepth = 32;

/// Tree of boxes. A box may carry an implementing sub-model (its child, whose
/// outer interface must equal the box's interface) and per-algebra
/// assignments. A refined box may also carry an abstract machine/system; that
/// is what refinement checking compares against the composed implementation.
struct HierarchicalModel {
  Interface outer;
  WiringDiagram diagram;
  std::map<std::string, HierarchicalModel> children;
  std::map<std::string, MooreMachine> machines;
  std::map<std::string, LtiSystem> systems;
  std::map<std::string, Contract> contracts;
  std::map<std::string, TraceContract> trace_contracts;

  bool operator==(const HierarchicalModel&) const = default;
};

/// Structural validation of the whole tree; throws ValidationError (or
/// DepthExceeded) with a slash-joined path to the offending element.
void validate_model(const HierarchicalModel& m);

/// Flattened leaf box path -> ancestor box ids, root first. Unrefined root
/// boxes map to an empty ancestor list.
using Provenance = std::map<std::string, std::vector<std::string>>;

struct FlatModel {
  WiringDiagram diagram;
  Provenance provenance;
  // Leaf assignments keyed by flattened path. Contracts survive only on
  // boxes that were not refined away.
  std::map<std::string, MooreMachine> machines;
  std::map<std::string, LtiSystem> systems;
  std::map<std::string, Contract> contracts;
  std::map<std::string, TraceContract> trace_contracts;
};

/// Bottom-up substitution of every child diagram into its parent; the
/// provenance records each leaf's ancestry.
FlatModel flatten(const HierarchicalModel& m);

/// Staged composition along the tree: each refined box contributes the
/// composite of its child, each leaf its assigned machine/system.
MooreMachine compose_moore(const HierarchicalModel& m, long long cap = kDefaultEnumCap);
LtiSystem compose_lti(const HierarchicalModel& m, double eps = kDefaultPivotTol);

struct RefinementResult {
  bool ok = true;
  std::vector<PackedVal> counterexample;  // least distinguishing input sequence
};

/// Compares a box's abstract Moore machine against the composite of its
/// implementing child, by finite-horizon trace equivalence. `box` is a
/// slash-joined path; horizon < 0 selects the default: product of the two
/// state counts, plus one.
RefinementResult check_refinement_moore(const HierarchicalModel& m, const std::string& box,
                                        int horizon = -1, long long cap = kDefaultEnumCap);

/// Same for the linear algebra, via Markov-parameter equivalence.
bool check_refinement_lti(const HierarchicalModel& m, const std::string& box,
                          double tol = 1e-9, double eps = kDefaultPivotTol);

struct ImpactEntry {
  std::string path;
  enum class Kind { VerdictChanged, MissingAssignment } kind = Kind::VerdictChanged;
  bool abstract_ok = false;   // verdict of the stored abstract machine
  bool composed_ok = false;   // verdict of the recomposed implementation
  std::string detail;

  auto operator<=>(const ImpactEntry&) const = default;
};

struct ImpactReport {
  std::vector<ImpactEntry> entries;  // sorted by path

  bool empty() const { return entries.empty(); }
};

/// Recomputes the satisfaction verdicts along the ancestor chain of `box`
/// (against each ancestor's stored contract / trace contract) and reports
/// every ancestor whose recomposed verdict differs from the verdict of its
/// stored abstract machine. Missing comparisons are recorded per entry, not
/// fatal.
ImpactReport propagate_change(const HierarchicalModel& m, const std::string& box, int h,
                              long long cap = kDefaultEnumCap);

/// Line-oriented rendering, one entry per line, sorted by path.
std::string render_impact(const ImpactReport& report);

}  // namespace opwire
