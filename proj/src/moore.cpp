#include "opwire/moore.hpp"

#include <algorithm>

namespace opwire {

int MooreMachine::state_index(const std::string& label) const {
  for (size_t i = 0; i < states.size(); ++i) {
    if (states[i] == label) return static_cast<int>(i);
  }
  return -1;
}

void check_moore(const MooreMachine& m) {
  if (!m.iface.all_finite()) {
    throw Error(ErrorCode::NonFiniteType, "Moore machine needs finite-typed ports");
  }
  if (m.states.empty()) {
    throw Error(ErrorCode::ValidationError, "machine has no states");
  }
  std::set<std::string> seen(m.states.begin(), m.states.end());
  if (seen.size() != m.states.size()) {
    throw Error(ErrorCode::ValidationError, "duplicate state labels");
  }
  if (m.init < 0 || m.init >= static_cast<int>(m.states.size())) {
    throw Error(ErrorCode::ValidationError, "initial state out of range");
  }
  const auto in_r = input_radices(m.iface);
  const auto out_r = output_radices(m.iface);
  const long long alphabet = count_guarded(in_r, kDefaultEnumCap, "input alphabet");
  if (m.readout.size() != m.states.size() || m.update.size() != m.states.size()) {
    throw Error(ErrorCode::ValidationError, "readout/update tables must cover every state");
  }
  for (size_t s = 0; s < m.states.size(); ++s) {
    if (m.readout[s].size() != out_r.size()) {
      throw Error(ErrorCode::ValidationError,
                  "readout of state '" + m.states[s] + "' has wrong arity");
    }
    for (size_t p = 0; p < out_r.size(); ++p) {
      if (m.readout[s][p] < 0 || m.readout[s][p] >= out_r[p]) {
        throw Error(ErrorCode::ValidationError,
                    "readout label index out of range in state '" + m.states[s] + "'");
      }
    }
    if (static_cast<long long>(m.update[s].size()) != alphabet) {
      throw Error(ErrorCode::ValidationError,
                  "update table of state '" + m.states[s] + "' is not total");
    }
    for (int next : m.update[s]) {
      if (next < 0 || next >= static_cast<int>(m.states.size())) {
        throw Error(ErrorCode::ValidationError,
                    "transition target out of range in state '" + m.states[s] + "'");
      }
    }
  }
}

MooreMachine rename_states(const MooreMachine& m, const std::vector<std::string>& names) {
  if (names.size() != m.states.size()) {
    throw Error(ErrorCode::ValidationError, "rename needs one name per state");
  }
  MooreMachine out = m;
  out.states = names;
  return out;
}

std::pair<std::string, Valuation> step(const MooreMachine& m, const std::string& state,
                                       const Valuation& v) {
  int s = m.state_index(state);
  if (s < 0) {
    throw Error(ErrorCode::UnknownState, "no state '" + state + "'");
  }
  const auto in_r = input_radices(m.iface);
  const PackedVal packed = encode_input(m.iface, v);
  const long long a = pack_digits(packed, in_r);
  const int next = m.update[s][a];
  PackedVal out = m.readout[s];
  return {m.states[next], decode_output(m.iface, out)};
}

Trace simulate_packed(const MooreMachine& m, const std::vector<PackedVal>& inputs) {
  const auto in_r = input_radices(m.iface);
  Trace tr;
  tr.inputs = inputs;
  tr.outputs.reserve(inputs.size());
  int s = m.init;
  for (const auto& v : inputs) {
    if (v.size() != in_r.size()) {
      throw Error(ErrorCode::PartialInput, "input valuation has wrong arity");
    }
    tr.outputs.push_back(m.readout[s]);
    s = m.update[s][pack_digits(v, in_r)];
  }
  return tr;
}

Trace simulate(const MooreMachine& m, const std::vector<Valuation>& inputs) {
  std::vector<PackedVal> packed;
  packed.reserve(inputs.size());
  for (const auto& v : inputs) packed.push_back(encode_input(m.iface, v));
  return simulate_packed(m, packed);
}

std::set<Trace> traces(const MooreMachine& m, int h, long long cap) {
  if (h < 0) {
    throw Error(ErrorCode::ValidationError, "horizon must be >= 0");
  }
  const auto in_r = input_radices(m.iface);
  const long long alphabet = count_guarded(in_r, cap, "input alphabet");
  // |alphabet|^h candidate sequences.
  std::vector<int> seq_radices(static_cast<size_t>(h), static_cast<int>(alphabet));
  const long long total = count_guarded(seq_radices, cap, "trace enumeration");

  std::set<Trace> out;
  for (long long idx = 0; idx < total; ++idx) {
    const std::vector<int> flat = unpack_digits(idx, seq_radices);
    std::vector<PackedVal> inputs;
    inputs.reserve(flat.size());
    for (int a : flat) inputs.push_back(unpack_digits(a, in_r));
    out.insert(simulate_packed(m, inputs));
  }
  return out;
}

namespace {

struct BoxBinding {
  const MooreMachine* machine = nullptr;
  std::vector<int> in_radices;
  std::vector<int> out_radices;
  // Per input port: {true, outer input position, -} or {false, box index, port index}.
  struct Source {
    bool from_outer = false;
    int outer_pos = -1;
    int box = -1;
    int port = -1;
  };
  std::vector<Source> sources;
};

}  // namespace

MooreMachine apply_moore(const WiringDiagram& d,
                         const std::map<std::string, MooreMachine>& assign,
                         long long cap) {
  ValidationReport rep = validate(d);
  if (!rep.ok()) {
    throw Error(ErrorCode::InvalidDiagram,
                "diagram does not validate: " + rep.violations.front().message +
                    " (" + rep.violations.front().where + ")");
  }
  if (!d.outer.all_finite()) {
    throw Error(ErrorCode::NonFiniteType, "outer interface has non-finite ports");
  }

  std::map<std::string, int> box_pos;
  for (size_t i = 0; i < d.inner.size(); ++i) box_pos[d.inner[i].id] = static_cast<int>(i);

  std::vector<BoxBinding> boxes(d.inner.size());
  for (size_t i = 0; i < d.inner.size(); ++i) {
    const BoxDecl& b = d.inner[i];
    auto it = assign.find(b.id);
    if (it == assign.end()) {
      throw Error(ErrorCode::MissingAssignment, "no machine assigned to box '" + b.id + "'");
    }
    const MooreMachine& m = it->second;
    if (!(m.iface == b.iface)) {
      throw Error(ErrorCode::InterfaceMismatch,
                  "machine interface does not match box '" + b.id + "'");
    }
    check_moore(m);
    BoxBinding& bind = boxes[i];
    bind.machine = &m;
    bind.in_radices = input_radices(b.iface);
    bind.out_radices = output_radices(b.iface);
    bind.sources.resize(b.iface.inputs.size());
    for (size_t p = 0; p < b.iface.inputs.size(); ++p) {
      const Supplier& s = d.phi_in.at({b.id, b.iface.inputs[p].name});
      auto& src = bind.sources[p];
      if (s.is_outer()) {
        src.from_outer = true;
        src.outer_pos = d.outer.input_index(s.port);
      } else {
        src.box = box_pos.at(s.box);
        src.port = d.find_box(s.box)->iface.output_index(s.port);
      }
    }
  }

  std::vector<std::pair<int, int>> out_sources;  // per outer output: (box, port)
  for (const auto& q : d.outer.outputs) {
    const PortRef& t = d.phi_out.at(q.name);
    out_sources.emplace_back(box_pos.at(t.box),
                             d.find_box(t.box)->iface.output_index(t.port));
  }

  std::vector<int> state_radices;
  for (const auto& bind : boxes) {
    state_radices.push_back(static_cast<int>(bind.machine->states.size()));
  }
  const long long total_states = count_guarded(state_radices, cap, "composite state space");
  const auto outer_in_r = input_radices(d.outer);
  const long long alphabet = count_guarded(outer_in_r, cap, "composite input alphabet");
  if (total_states > cap / std::max<long long>(alphabet, 1)) {
    throw Error(ErrorCode::ExplosionGuard, "composite transition table exceeds the cap");
  }

  MooreMachine out;
  out.iface = d.outer;
  out.init = 0;
  out.states.reserve(total_states);
  out.readout.reserve(total_states);
  out.update.reserve(total_states);

  std::vector<int> init_digits;
  for (const auto& bind : boxes) init_digits.push_back(bind.machine->init);
  out.init = static_cast<int>(pack_digits(init_digits, state_radices));

  for (long long sidx = 0; sidx < total_states; ++sidx) {
    const std::vector<int> comp = unpack_digits(sidx, state_radices);

    std::string label = "(";
    for (size_t i = 0; i < comp.size(); ++i) {
      if (i) label += ",";
      label += boxes[i].machine->states[comp[i]];
    }
    label += ")";
    out.states.push_back(label);

    // All component readouts are available before any input is consumed.
    std::vector<const std::vector<int>*> box_out(boxes.size());
    for (size_t i = 0; i < boxes.size(); ++i) {
      box_out[i] = &boxes[i].machine->readout[comp[i]];
    }

    std::vector<int> ro;
    ro.reserve(out_sources.size());
    for (const auto& [bi, pi] : out_sources) ro.push_back((*box_out[bi])[pi]);
    out.readout.push_back(std::move(ro));

    std::vector<int> row;
    row.reserve(alphabet);
    for (long long a = 0; a < alphabet; ++a) {
      const std::vector<int> v = unpack_digits(a, outer_in_r);
      std::vector<int> next(boxes.size());
      for (size_t i = 0; i < boxes.size(); ++i) {
        const BoxBinding& bind = boxes[i];
        std::vector<int> u(bind.sources.size());
        for (size_t p = 0; p < bind.sources.size(); ++p) {
          const auto& src = bind.sources[p];
          u[p] = src.from_outer ? v[src.outer_pos] : (*box_out[src.box])[src.port];
        }
        next[i] = bind.machine->update[comp[i]][pack_digits(u, bind.in_radices)];
      }
      row.push_back(static_cast<int>(pack_digits(next, state_radices)));
    }
    out.update.push_back(std::move(row));
  }

  return out;
}

std::optional<std::vector<PackedVal>> trace_equivalent_counterexample(
    const MooreMachine& a, const MooreMachine& b, int h, long long cap) {
  if (!(a.iface == b.iface)) {
    throw Error(ErrorCode::InterfaceMismatch, "machines have different interfaces");
  }
  if (h <= 0) return std::nullopt;
  const auto in_r = input_radices(a.iface);
  const long long alphabet = count_guarded(in_r, cap, "input alphabet");
  const long long na = static_cast<long long>(a.states.size());
  const long long nb = static_cast<long long>(b.states.size());
  if (na * nb * h > cap || na * nb * alphabet > cap) {
    throw Error(ErrorCode::ExplosionGuard, "product search exceeds the cap");
  }

  // reach[k][sa][sb]: a difference is observable within k more readouts.
  auto differ = [&](int sa, int sb) { return a.readout[sa] != b.readout[sb]; };
  std::vector<std::vector<char>> reach(static_cast<size_t>(h) + 1,
                                       std::vector<char>(na * nb, 0));
  for (int k = 1; k <= h; ++k) {
    for (int sa = 0; sa < na; ++sa) {
      for (int sb = 0; sb < nb; ++sb) {
        char r = 0;
        if (differ(sa, sb)) {
          r = 1;
        } else if (k > 1) {
          for (long long sym = 0; sym < alphabet && !r; ++sym) {
            r = reach[k - 1][a.update[sa][sym] * nb + b.update[sb][sym]];
          }
        }
        reach[k][sa * nb + sb] = r;
      }
    }
  }

  if (!reach[h][a.init * nb + b.init]) return std::nullopt;

  // Reconstruct the lexicographically least distinguishing sequence.
  std::vector<PackedVal> seq;
  seq.reserve(h);
  int sa = a.init, sb = b.init;
  bool exposed = false;
  for (int t = 0; t < h; ++t) {
    const int k = h - t;
    long long chosen = 0;
    if (!exposed) {
      if (differ(sa, sb)) {
        exposed = true;  // remaining inputs are free; take the least symbols
      } else {
        for (long long sym = 0; sym < alphabet; ++sym) {
          if (reach[k - 1][a.update[sa][sym] * nb + b.update[sb][sym]]) {
            chosen = sym;
            break;
          }
        }
      }
    }
    seq.push_back(unpack_digits(chosen, in_r));
    sa = a.update[sa][chosen];
    sb = b.update[sb][chosen];
  }
  return seq;
}

}  // namespace opwire
