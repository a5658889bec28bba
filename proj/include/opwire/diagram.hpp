#pragma once

#include <compare>
#include <map>
#include <string>
#include <vector>

#include "opwire/types.hpp"

namespace opwire {

struct BoxDecl {
  std::string id;
  Interface iface;

  bool operator==(const BoxDecl&) const = default;
};

/// (box, port) reference into a diagram's inner boxes.
struct PortRef {
  std::string box;
  std::string port;

  auto operator<=>(const PortRef&) const = default;
};

/// Source feeding an inner input port: either an outer input of the diagram
/// or the output of an inner box (self-feedback allowed).
struct Supplier {
  enum class Kind { OuterInput, InnerOutput };

  Kind kind = Kind::OuterInput;
  std::string box;  // InnerOutput only
  std::string port;

  static Supplier outer(std::string port);
  static Supplier inner(std::string box, std::string port);

  bool is_outer() const { return kind == Kind::OuterInput; }

  auto operator<=>(const Supplier&) const = default;
};

/// A wiring diagram: inner boxes, an outer interface, and the two wiring maps.
/// phi_in assigns exactly one supplier to every inner input port; phi_out
/// reads every outer output from an inner output. Fan-out is unrestricted,
/// fan-in is impossible by construction (phi_in is a map).
struct WiringDiagram {
  std::vector<BoxDecl> inner;
  Interface outer;
  std::map<PortRef, Supplier> phi_in;
  std::map<std::string, PortRef> phi_out;

  const BoxDecl* find_box(const std::string& id) const;

  bool operator==(const WiringDiagram&) const = default;
};

enum class ViolationCode {
  DuplicateId,
  MissingSupplier,
  TypeMismatch,
  DanglingReference,
};

const char* to_string(ViolationCode code);

struct Violation {
  ViolationCode code;
  std::string where;    // "box.port" or box/port identifier
  std::string message;

  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

/// Checks every structural invariant: unique ids and port names, total and
/// well-typed phi_in/phi_out, no dangling references. Report-returning; never
/// throws.
ValidationReport validate(const WiringDiagram& d);

/// Diagram with one inner box of interface `x`, wired name-for-name to an
/// equal outer interface.
WiringDiagram identity_wiring(const Interface& x, const std::string& box_id = "box");

/// Operadic substitution: replaces inner box `slot` of `f` by the whole
/// diagram `g` (whose outer interface must equal the slot's interface) and
/// flattens the wiring by chasing suppliers across the former boundary.
/// Substituted box ids are prefixed "slot/".
WiringDiagram substitute(const WiringDiagram& f, const std::string& slot,
                         const WiringDiagram& g);

/// Monoidal product: disjoint juxtaposition of two diagrams. Box ids and
/// outer port names of `g` are suffixed on collision; no wires cross between
/// the two halves.
WiringDiagram tensor(const WiringDiagram& f, const WiringDiagram& g);

/// Renames inner boxes according to `mapping` (ids absent from the map are
/// kept), rewriting both wiring maps.
WiringDiagram rename_boxes(const WiringDiagram& d,
                           const std::map<std::string, std::string>& mapping);

/// Positional id normal form: inner boxes renamed "b0", "b1", ... in order.
WiringDiagram normalize_ids(const WiringDiagram& d);

/// Structural equality up to id normalization (port order preserved).
bool structurally_equal(const WiringDiagram& a, const WiringDiagram& b);

/// Deterministic Graphviz rendering: one node per inner box, boundary nodes
/// for the outer interface, one edge per wiring entry. Equal diagrams yield
/// byte-identical output. Throws InvalidDiagram if `d` does not validate.
std::string export_dot(const WiringDiagram& d);

}  // namespace opwire
