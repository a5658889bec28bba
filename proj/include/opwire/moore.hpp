#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "opwire/diagram.hpp"
#include "opwire/valuation.hpp"

namespace opwire {

/// Deterministic Moore machine over a fully finite-typed interface. The
/// readout depends on the state alone, never on the current input; that is
/// what makes arbitrary feedback well-defined under composition.
///
/// Output alignment: the output at tick t is the readout of the state entered
/// at tick t, before input t is consumed.
struct MooreMachine {
  Interface iface;
  std::vector<std::string> states;
  int init = 0;
  // readout[s][output port] = label index
  std::vector<std::vector<int>> readout;
  // update[s][packed input valuation] = next state index
  std::vector<std::vector<int>> update;

  int state_index(const std::string& label) const;

  bool operator==(const MooreMachine&) const = default;
};

/// Verifies totality and range of the tables; throws ValidationError.
void check_moore(const MooreMachine& m);

/// Relabels states (used when a composite machine needs serializable names).
MooreMachine rename_states(const MooreMachine& m, const std::vector<std::string>& names);

/// Finite input/output trace. Element [t] is the packed valuation at tick t.
struct Trace {
  std::vector<PackedVal> inputs;
  std::vector<PackedVal> outputs;

  auto operator<=>(const Trace&) const = default;
};

/// One tick: returns (update(s, v), readout(s)). The output is the pre-step
/// readout.
std::pair<std::string, Valuation> step(const MooreMachine& m, const std::string& state,
                                       const Valuation& v);

/// Folds step from the initial state; outputs[t] is the readout at tick t.
Trace simulate(const MooreMachine& m, const std::vector<Valuation>& inputs);
Trace simulate_packed(const MooreMachine& m, const std::vector<PackedVal>& inputs);

/// All traces of horizon h: one per input sequence, |alphabet|^h in total.
/// Guarded by `cap`.
std::set<Trace> traces(const MooreMachine& m, int h, long long cap = kDefaultEnumCap);

/// Functorial action of a wiring diagram on Moore machines: the composite
/// machine over the outer interface. States are the product of component
/// states in inner-box order; the readout routes phi_out; the update resolves
/// every inner input from outer inputs and component readouts via phi_in.
MooreMachine apply_moore(const WiringDiagram& d,
                         const std::map<std::string, MooreMachine>& assign,
                         long long cap = kDefaultEnumCap);

/// Least distinguishing input sequence of length h between two machines with
/// equal interfaces, or nullopt when trace-equivalent at that horizon.
/// Decided by lexicographic search over the product machine.
std::optional<std::vector<PackedVal>> trace_equivalent_counterexample(
    const MooreMachine& a, const MooreMachine& b, int h,
    long long cap = kDefaultEnumCap);

}  // namespace opwire
