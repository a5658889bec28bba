#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "opwire/moore.hpp"

namespace opwire {

/// Input/output relation over a finite-typed interface: the set of allowed
/// (input valuation, output valuation) pairs.
struct Contract {
  Interface iface;
  std::set<std::pair<PackedVal, PackedVal>> pairs;

  bool operator==(const Contract&) const = default;
};

Contract make_contract(Interface iface,
                       const std::vector<std::pair<Valuation, Valuation>>& pairs);

/// Contract whose pairs allow every input/output combination.
Contract full_contract(Interface iface);

/// Trace-level contract: allowed (input sequence, output sequence) pairs of a
/// fixed horizon. Sequence element [t] is the packed valuation at tick t.
struct TraceContract {
  Interface iface;
  int horizon = 0;
  std::set<std::pair<std::vector<PackedVal>, std::vector<PackedVal>>> pairs;

  bool operator==(const TraceContract&) const = default;
};

/// Composite contract of a wired diagram by the pullback formula: (i, o) is
/// allowed iff some assignment of values to every inner output port makes
/// each component's resolved (input, output) pair allowed and reads back to o
/// through phi_out. Computed by enumeration over outer inputs x inner
/// outputs, guarded by `cap`.
Contract compose_contracts(const WiringDiagram& d,
                           const std::map<std::string, Contract>& assign,
                           long long cap = kDefaultEnumCap);

/// Same pullback formula with each port carrying a length-h sequence instead
/// of a single value. All assigned contracts must share one horizon.
TraceContract compose_trace_contracts(const WiringDiagram& d,
                                      const std::map<std::string, TraceContract>& assign,
                                      long long cap = kDefaultEnumCap);

/// Verdict of checking a machine against a contract. On failure the
/// counterexample is the lexicographically least violating input sequence,
/// with `t` the first violating tick.
struct SatisfactionResult {
  bool ok = true;
  std::vector<PackedVal> counterexample;
  int t = -1;
};

/// True iff every step of every length-h run satisfies the step relation:
/// (u_t, y_t) in r.pairs for all input sequences of length h.
SatisfactionResult satisfies(const MooreMachine& m, const Contract& r, int h,
                             long long cap = kDefaultEnumCap);

/// True iff every length-h run's (input, output) trace pair is allowed.
SatisfactionResult satisfies_trace(const MooreMachine& m, const TraceContract& r,
                                   long long cap = kDefaultEnumCap);

/// The natural transformation component at one box: the machine's reachable
/// trace set at horizon h, as a trace contract.
TraceContract alpha(const MooreMachine& m, int h, long long cap = kDefaultEnumCap);

/// Result of checking the naturality square at one diagram: compose-then-
/// abstract (alpha of the composite machine) against abstract-then-compose
/// (trace contracts composed from per-box alphas).
struct NaturalityResult {
  bool ok = false;
  long long trace_count = 0;  // traces of the composite leg
  // Pairs present on exactly one side.
  std::vector<std::pair<std::vector<PackedVal>, std::vector<PackedVal>>> only_behavior;
  std::vector<std::pair<std::vector<PackedVal>, std::vector<PackedVal>>> only_contract;
};

NaturalityResult check_naturality(const WiringDiagram& d,
                                  const std::map<std::string, MooreMachine>& assign,
                                  int h, long long cap = kDefaultEnumCap);

}  // namespace opwire
