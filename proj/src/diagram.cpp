#include "opwire/diagram.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace opwire {

Supplier Supplier::outer(std::string port) {
  Supplier s;
  s.kind = Kind::OuterInput;
  s.port = std::move(port);
  return s;
}

Supplier Supplier::inner(std::string box, std::string port) {
  Supplier s;
  s.kind = Kind::InnerOutput;
  s.box = std::move(box);
  s.port = std::move(port);
  return s;
}

const BoxDecl* WiringDiagram::find_box(const std::string& id) const {
  for (const auto& b : inner) {
    if (b.id == id) return &b;
  }
  return nullptr;
}

const char* to_string(ViolationCode code) {
  switch (code) {
    case ViolationCode::DuplicateId: return "DuplicateId";
    case ViolationCode::MissingSupplier: return "MissingSupplier";
    case ViolationCode::TypeMismatch: return "TypeMismatch";
    case ViolationCode::DanglingReference: return "DanglingReference";
  }
  return "?";
}

namespace {

void check_port_names(const Interface& iface, const std::string& owner,
                      std::vector<Violation>& out) {
  std::set<std::string> seen;
  for (const auto& p : iface.inputs) {
    if (!seen.insert(p.name).second) {
      out.push_back({ViolationCode::DuplicateId, owner + "." + p.name,
                     "duplicate input port name"});
    }
  }
  seen.clear();
  for (const auto& p : iface.outputs) {
    if (!seen.insert(p.name).second) {
      out.push_back({ViolationCode::DuplicateId, owner + "." + p.name,
                     "duplicate output port name"});
    }
  }
}

// Resolves the value type a supplier provides, or nullptr with a violation.
const ValueType* supplier_type(const WiringDiagram& d, const Supplier& s,
                               const std::string& where,
                               std::vector<Violation>& out) {
  if (s.is_outer()) {
    const Port* p = d.outer.find_input(s.port);
    if (!p) {
      out.push_back({ViolationCode::DanglingReference, where,
                     "supplier references unknown outer input '" + s.port + "'"});
      return nullptr;
    }
    return &p->type;
  }
  const BoxDecl* b = d.find_box(s.box);
  if (!b) {
    out.push_back({ViolationCode::DanglingReference, where,
                   "supplier references unknown box '" + s.box + "'"});
    return nullptr;
  }
  const Port* p = b->iface.find_output(s.port);
  if (!p) {
    out.push_back({ViolationCode::DanglingReference, where,
                   "supplier references unknown output '" + s.box + "." + s.port + "'"});
    return nullptr;
  }
  return &p->type;
}

}  // namespace

ValidationReport validate(const WiringDiagram& d) {
  ValidationReport rep;
  auto& out = rep.violations;

  std::set<std::string> ids;
  for (const auto& b : d.inner) {
    if (!ids.insert(b.id).second) {
      out.push_back({ViolationCode::DuplicateId, b.id, "duplicate box id"});
    }
    check_port_names(b.iface, b.id, out);
  }
  check_port_names(d.outer, "outer", out);

  // Every inner input port needs exactly one well-typed supplier.
  for (const auto& b : d.inner) {
    for (const auto& p : b.iface.inputs) {
      auto it = d.phi_in.find({b.id, p.name});
      if (it == d.phi_in.end()) {
        out.push_back({ViolationCode::MissingSupplier, b.id + "." + p.name,
                       "inner input has no supplier"});
        continue;
      }
      const std::string where = b.id + "." + p.name;
      const ValueType* t = supplier_type(d, it->second, where, out);
      if (t && !(*t == p.type)) {
        const std::string src = it->second.is_outer()
                                    ? "outer." + it->second.port
                                    : it->second.box + "." + it->second.port;
        out.push_back({ViolationCode::TypeMismatch, where,
                       "supplier " + src + " has type " + to_string(*t) +
                           " but port expects " + to_string(p.type)});
      }
    }
  }

  // Every outer output reads a type-equal inner output.
  for (const auto& q : d.outer.outputs) {
    auto it = d.phi_out.find(q.name);
    if (it == d.phi_out.end()) {
      out.push_back({ViolationCode::MissingSupplier, "outer." + q.name,
                     "outer output has no source"});
      continue;
    }
    const std::string where = "outer." + q.name;
    const BoxDecl* b = d.find_box(it->second.box);
    if (!b) {
      out.push_back({ViolationCode::DanglingReference, where,
                     "references unknown box '" + it->second.box + "'"});
      continue;
    }
    const Port* p = b->iface.find_output(it->second.port);
    if (!p) {
      out.push_back({ViolationCode::DanglingReference, where,
                     "references unknown output '" + it->second.box + "." +
                         it->second.port + "'"});
      continue;
    }
    if (!(p->type == q.type)) {
      out.push_back({ViolationCode::TypeMismatch, where,
                     "source " + it->second.box + "." + it->second.port +
                         " has type " + to_string(p->type) +
                         " but outer output expects " + to_string(q.type)});
    }
  }

  // Stray wiring entries whose keys reference nothing.
  for (const auto& [ref, s] : d.phi_in) {
    const BoxDecl* b = d.find_box(ref.box);
    if (!b || !b->iface.find_input(ref.port)) {
      out.push_back({ViolationCode::DanglingReference, ref.box + "." + ref.port,
                     "wiring entry targets nonexistent inner input"});
    }
    (void)s;
  }
  for (const auto& [name, ref] : d.phi_out) {
    if (!d.outer.find_output(name)) {
      out.push_back({ViolationCode::DanglingReference, "outer." + name,
                     "wiring entry targets nonexistent outer output"});
    }
    (void)ref;
  }

  return rep;
}

WiringDiagram identity_wiring(const Interface& x, const std::string& box_id) {
  WiringDiagram d;
  d.outer = x;
  d.inner.push_back({box_id, x});
  for (const auto& p : x.inputs) {
    d.phi_in[{box_id, p.name}] = Supplier::outer(p.name);
  }
  for (const auto& q : x.outputs) {
    d.phi_out[q.name] = {box_id, q.name};
  }
  return d;
}

namespace {

const PortRef& phi_out_of(const WiringDiagram& g, const std::string& port) {
  auto it = g.phi_out.find(port);
  if (it == g.phi_out.end()) {
    throw Error(ErrorCode::InvalidDiagram,
                "substituted diagram has no source for outer output '" + port + "'");
  }
  return it->second;
}

}  // namespace

WiringDiagram substitute(const WiringDiagram& f, const std::string& slot,
                         const WiringDiagram& g) {
  const BoxDecl* slot_box = f.find_box(slot);
  if (!slot_box) {
    throw Error(ErrorCode::InterfaceMismatch, "no inner box '" + slot + "' to substitute");
  }
  if (!(g.outer == slot_box->iface)) {
    throw Error(ErrorCode::InterfaceMismatch,
                "outer interface of substituted diagram does not match slot '" + slot + "'");
  }
  const std::string prefix = slot + "/";

  WiringDiagram r;
  r.outer = f.outer;
  std::set<std::string> ids;
  for (const auto& b : f.inner) {
    if (b.id == slot) {
      for (const auto& gb : g.inner) {
        r.inner.push_back({prefix + gb.id, gb.iface});
      }
    } else {
      r.inner.push_back(b);
    }
  }
  for (const auto& b : r.inner) {
    if (!ids.insert(b.id).second) {
      throw Error(ErrorCode::InvalidDiagram,
                  "box id collision '" + b.id + "' after substitution");
    }
  }

  // Resolves a supplier written in f's context into the flattened context.
  // Chains have length <= 2: an output of the slot resolves through g.phi_out
  // and terminates, because phi_out targets inner outputs only.
  auto chase_f = [&](const Supplier& s) -> Supplier {
    if (s.is_outer() || s.box != slot) return s;
    const PortRef& t = phi_out_of(g, s.port);
    return Supplier::inner(prefix + t.box, t.port);
  };

  for (const auto& b : f.inner) {
    if (b.id == slot) continue;
    for (const auto& p : b.iface.inputs) {
      auto it = f.phi_in.find({b.id, p.name});
      if (it == f.phi_in.end()) continue;
      r.phi_in[{b.id, p.name}] = chase_f(it->second);
    }
  }
  for (const auto& gb : g.inner) {
    for (const auto& p : gb.iface.inputs) {
      auto it = g.phi_in.find({gb.id, p.name});
      if (it == g.phi_in.end()) continue;
      const Supplier& s = it->second;
      Supplier resolved;
      if (s.is_outer()) {
        // g's outer input is an input port of the slot box; follow f's wiring.
        auto fit = f.phi_in.find({slot, s.port});
        if (fit == f.phi_in.end()) continue;
        resolved = chase_f(fit->second);
      } else {
        resolved = Supplier::inner(prefix + s.box, s.port);
      }
      r.phi_in[{prefix + gb.id, p.name}] = resolved;
    }
  }

  for (const auto& q : f.outer.outputs) {
    auto it = f.phi_out.find(q.name);
    if (it == f.phi_out.end()) continue;
    const PortRef& t = it->second;
    if (t.box != slot) {
      r.phi_out[q.name] = t;
    } else {
      const PortRef& gt = phi_out_of(g, t.port);
      r.phi_out[q.name] = {prefix + gt.box, gt.port};
    }
  }

  return r;
}

namespace {

std::string fresh_name(const std::string& base, const std::set<std::string>& taken) {
  if (!taken.count(base)) return base;
  for (int k = 2;; ++k) {
    std::string candidate = base + "_" + std::to_string(k);
    if (!taken.count(candidate)) return candidate;
  }
}

}  // namespace

WiringDiagram tensor(const WiringDiagram& f, const WiringDiagram& g) {
  WiringDiagram r = f;

  std::set<std::string> ids;
  for (const auto& b : f.inner) ids.insert(b.id);
  std::map<std::string, std::string> box_ren;
  for (const auto& gb : g.inner) {
    std::string id = fresh_name(gb.id, ids);
    ids.insert(id);
    box_ren[gb.id] = id;
    r.inner.push_back({id, gb.iface});
  }

  std::set<std::string> in_names, out_names;
  for (const auto& p : f.outer.inputs) in_names.insert(p.name);
  for (const auto& p : f.outer.outputs) out_names.insert(p.name);
  std::map<std::string, std::string> in_ren, out_ren;
  for (const auto& p : g.outer.inputs) {
    std::string name = fresh_name(p.name, in_names);
    in_names.insert(name);
    in_ren[p.name] = name;
    r.outer.inputs.push_back({name, p.type});
  }
  for (const auto& p : g.outer.outputs) {
    std::string name = fresh_name(p.name, out_names);
    out_names.insert(name);
    out_ren[p.name] = name;
    r.outer.outputs.push_back({name, p.type});
  }

  for (const auto& [ref, s] : g.phi_in) {
    Supplier s2 = s.is_outer() ? Supplier::outer(in_ren.at(s.port))
                               : Supplier::inner(box_ren.at(s.box), s.port);
    r.phi_in[{box_ren.at(ref.box), ref.port}] = s2;
  }
  for (const auto& [name, ref] : g.phi_out) {
    r.phi_out[out_ren.at(name)] = {box_ren.at(ref.box), ref.port};
  }

  return r;
}

WiringDiagram rename_boxes(const WiringDiagram& d,
                           const std::map<std::string, std::string>& mapping) {
  auto ren = [&](const std::string& id) -> const std::string& {
    auto it = mapping.find(id);
    return it == mapping.end() ? id : it->second;
  };
  WiringDiagram r;
  r.outer = d.outer;
  for (const auto& b : d.inner) r.inner.push_back({ren(b.id), b.iface});
  for (const auto& [ref, s] : d.phi_in) {
    Supplier s2 = s.is_outer() ? s : Supplier::inner(ren(s.box), s.port);
    r.phi_in[{ren(ref.box), ref.port}] = s2;
  }
  for (const auto& [name, ref] : d.phi_out) {
    r.phi_out[name] = {ren(ref.box), ref.port};
  }
  return r;
}

WiringDiagram normalize_ids(const WiringDiagram& d) {
  std::map<std::string, std::string> mapping;
  for (size_t i = 0; i < d.inner.size(); ++i) {
    mapping[d.inner[i].id] = "b" + std::to_string(i);
  }
  return rename_boxes(d, mapping);
}

bool structurally_equal(const WiringDiagram& a, const WiringDiagram& b) {
  return normalize_ids(a) == normalize_ids(b);
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

namespace {

// Full interface listing; together with the edges this makes the rendering a
// complete structural description of the diagram (unused ports included).
std::string dot_iface_label(const Interface& iface) {
  std::string s;
  s += "\\nin:";
  for (const auto& p : iface.inputs) {
    s += " " + dot_escape(p.name) + ":" + dot_escape(to_string(p.type));
  }
  s += "\\nout:";
  for (const auto& q : iface.outputs) {
    s += " " + dot_escape(q.name) + ":" + dot_escape(to_string(q.type));
  }
  return s;
}

}  // namespace

std::string export_dot(const WiringDiagram& d) {
  ValidationReport rep = validate(d);
  if (!rep.ok()) {
    throw Error(ErrorCode::InvalidDiagram,
                "diagram does not validate: " + rep.violations.front().message +
                    " (" + rep.violations.front().where + ")");
  }

  std::ostringstream os;
  os << "digraph wiring {\n";
  os << "  rankdir=LR;\n";
  for (const auto& p : d.outer.inputs) {
    os << "  \"in:" << dot_escape(p.name) << "\" [shape=plaintext,label=\""
       << dot_escape(p.name) << " : " << dot_escape(to_string(p.type)) << "\"];\n";
  }
  for (const auto& b : d.inner) {
    os << "  \"box:" << dot_escape(b.id) << "\" [shape=box,label=\""
       << dot_escape(b.id) << dot_iface_label(b.iface) << "\"];\n";
  }
  for (const auto& q : d.outer.outputs) {
    os << "  \"out:" << dot_escape(q.name) << "\" [shape=plaintext,label=\""
       << dot_escape(q.name) << " : " << dot_escape(to_string(q.type)) << "\"];\n";
  }
  for (const auto& b : d.inner) {
    for (const auto& p : b.iface.inputs) {
      const Supplier& s = d.phi_in.at({b.id, p.name});
      if (s.is_outer()) {
        os << "  \"in:" << dot_escape(s.port) << "\"";
      } else {
        os << "  \"box:" << dot_escape(s.box) << "\"";
      }
      os << " -> \"box:" << dot_escape(b.id) << "\" [label=\""
         << dot_escape(s.port) << "->" << dot_escape(p.name) << "\"];\n";
    }
  }
  for (const auto& q : d.outer.outputs) {
    const PortRef& t = d.phi_out.at(q.name);
    os << "  \"box:" << dot_escape(t.box) << "\" -> \"out:" << dot_escape(q.name)
       << "\" [label=\"" << dot_escape(t.port) << "->" << dot_escape(q.name)
       << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace opwire
