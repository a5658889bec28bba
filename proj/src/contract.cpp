#include "opwire/contract.hpp"

#include <algorithm>

namespace opwire {

Contract make_contract(Interface iface,
                       const std::vector<std::pair<Valuation, Valuation>>& pairs) {
  Contract c;
  c.iface = std::move(iface);
  for (const auto& [in, out] : pairs) {
    c.pairs.insert({encode_input(c.iface, in), encode_output(c.iface, out)});
  }
  return c;
}

Contract full_contract(Interface iface) {
  Contract c;
  c.iface = std::move(iface);
  const auto in_r = input_radices(c.iface);
  const auto out_r = output_radices(c.iface);
  const long long ni = count_guarded(in_r, kDefaultEnumCap, "contract inputs");
  const long long no = count_guarded(out_r, kDefaultEnumCap, "contract outputs");
  if (ni * no > kDefaultEnumCap) {
    throw Error(ErrorCode::ExplosionGuard, "full contract exceeds the enumeration cap");
  }
  for (long long i = 0; i < ni; ++i) {
    for (long long o = 0; o < no; ++o) {
      c.pairs.insert({unpack_digits(i, in_r), unpack_digits(o, out_r)});
    }
  }
  return c;
}

namespace {

void require_valid(const WiringDiagram& d) {
  ValidationReport rep = validate(d);
  if (!rep.ok()) {
    throw Error(ErrorCode::InvalidDiagram,
                "diagram does not validate: " + rep.violations.front().message +
                    " (" + rep.violations.front().where + ")");
  }
}

}  // namespace

Contract compose_contracts(const WiringDiagram& d,
                           const std::map<std::string, Contract>& assign,
                           long long cap) {
  require_valid(d);
  if (!d.outer.all_finite()) {
    throw Error(ErrorCode::NonFiniteType, "outer interface has non-finite ports");
  }

  std::map<std::string, int> box_pos;
  std::vector<const Contract*> contracts(d.inner.size());
  // Flat positions of every inner output port, in diagram order.
  std::vector<std::vector<int>> out_pos(d.inner.size());
  std::vector<int> inner_out_radices;
  for (size_t i = 0; i < d.inner.size(); ++i) {
    const BoxDecl& b = d.inner[i];
    box_pos[b.id] = static_cast<int>(i);
    auto it = assign.find(b.id);
    if (it == assign.end()) {
      throw Error(ErrorCode::MissingAssignment, "no contract assigned to box '" + b.id + "'");
    }
    if (!(it->second.iface == b.iface)) {
      throw Error(ErrorCode::InterfaceMismatch,
                  "contract interface does not match box '" + b.id + "'");
    }
    contracts[i] = &it->second;
    const auto radices = output_radices(b.iface);
    for (int r : radices) {
      out_pos[i].push_back(static_cast<int>(inner_out_radices.size()));
      inner_out_radices.push_back(r);
    }
  }

  // Per box, per input port: where the value comes from.
  struct Source {
    bool from_outer = false;
    int pos = 0;  // outer input index or flat inner output position
  };
  std::vector<std::vector<Source>> sources(d.inner.size());
  for (size_t i = 0; i < d.inner.size(); ++i) {
    const BoxDecl& b = d.inner[i];
    for (const auto& port : b.iface.inputs) {
      const Supplier& s = d.phi_in.at({b.id, port.name});
      Source src;
      if (s.is_outer()) {
        src.from_outer = true;
        src.pos = d.outer.input_index(s.port);
      } else {
        const int sb = box_pos.at(s.box);
        src.pos = out_pos[sb][d.find_box(s.box)->iface.output_index(s.port)];
      }
      sources[i].push_back(src);
    }
  }
  std::vector<int> phi_out_pos;
  for (const auto& q : d.outer.outputs) {
    const PortRef& t = d.phi_out.at(q.name);
    const int sb = box_pos.at(t.box);
    phi_out_pos.push_back(out_pos[sb][d.find_box(t.box)->iface.output_index(t.port)]);
  }

  const auto outer_in_r = input_radices(d.outer);
  const long long n_in = count_guarded(outer_in_r, cap, "outer input enumeration");
  const long long n_wit = count_guarded(inner_out_radices, cap, "witness enumeration");
  if (n_in > 0 && n_wit > cap / n_in) {
    throw Error(ErrorCode::ExplosionGuard,
                "contract composition candidates exceed the enumeration cap of " +
                    std::to_string(cap));
  }

  Contract result;
  result.iface = d.outer;
  for (long long ii = 0; ii < n_in; ++ii) {
    const std::vector<int> in_val = unpack_digits(ii, outer_in_r);
    for (long long wi = 0; wi < n_wit; ++wi) {
      const std::vector<int> wit = unpack_digits(wi, inner_out_radices);
      bool all_allowed = true;
      for (size_t b = 0; b < d.inner.size() && all_allowed; ++b) {
        PackedVal u(sources[b].size());
        for (size_t p = 0; p < sources[b].size(); ++p) {
          const Source& src = sources[b][p];
          u[p] = src.from_outer ? in_val[src.pos] : wit[src.pos];
        }
        PackedVal o(out_pos[b].size());
        for (size_t p = 0; p < out_pos[b].size(); ++p) o[p] = wit[out_pos[b][p]];
        all_allowed = contracts[b]->pairs.count({u, o}) > 0;
      }
      if (!all_allowed) continue;
      PackedVal out_val(phi_out_pos.size());
      for (size_t q = 0; q < phi_out_pos.size(); ++q) out_val[q] = wit[phi_out_pos[q]];
      result.pairs.insert({in_val, out_val});
    }
  }
  return result;
}

namespace {

// Sequence-lifted view of a finite type at horizon h: one label per length-h
// sequence, in lexicographic (first tick most significant) order. Lifting
// turns the trace-level pullback into the single-step one over bigger types.
ValueType lift_type(const ValueType& t, int h, long long cap) {
  if (!t.is_finite()) {
    throw Error(ErrorCode::NonFiniteType, "trace contracts need finite port types");
  }
  if (h == 0) return ValueType::finite({"-"});
  const int radix = static_cast<int>(t.labels.size());
  std::vector<int> radices(static_cast<size_t>(h), radix);
  const long long total = count_guarded(radices, cap, "sequence domain");
  std::vector<std::string> labels;
  labels.reserve(total);
  for (long long i = 0; i < total; ++i) {
    const auto digits = unpack_digits(i, radices);
    std::string lab;
    for (size_t t2 = 0; t2 < digits.size(); ++t2) {
      if (t2) lab += ",";
      lab += t.labels[digits[t2]];
    }
    labels.push_back(lab);
  }
  return ValueType::finite(std::move(labels));
}

Interface lift_interface(const Interface& iface, int h, long long cap) {
  Interface out;
  for (const auto& p : iface.inputs) {
    out.inputs.push_back({p.name, lift_type(p.type, h, cap)});
  }
  for (const auto& p : iface.outputs) {
    out.outputs.push_back({p.name, lift_type(p.type, h, cap)});
  }
  return out;
}

WiringDiagram lift_diagram(const WiringDiagram& d, int h, long long cap) {
  WiringDiagram out;
  out.outer = lift_interface(d.outer, h, cap);
  for (const auto& b : d.inner) {
    out.inner.push_back({b.id, lift_interface(b.iface, h, cap)});
  }
  out.phi_in = d.phi_in;
  out.phi_out = d.phi_out;
  return out;
}

// [t][port] sequence-of-valuations -> per-port flat sequence indices.
PackedVal pack_sequences(const std::vector<PackedVal>& seq, const std::vector<int>& radices,
                         int h) {
  PackedVal out(radices.size());
  for (size_t p = 0; p < radices.size(); ++p) {
    long long idx = 0;
    for (int t = 0; t < h; ++t) idx = idx * radices[p] + seq[t][p];
    out[p] = static_cast<int>(idx);
  }
  return out;
}

std::vector<PackedVal> unpack_sequences(const PackedVal& packed,
                                        const std::vector<int>& radices, int h) {
  std::vector<PackedVal> seq(static_cast<size_t>(h), PackedVal(radices.size()));
  for (size_t p = 0; p < radices.size(); ++p) {
    long long idx = packed[p];
    for (int t = h; t-- > 0;) {
      seq[t][p] = static_cast<int>(idx % radices[p]);
      idx /= radices[p];
    }
  }
  return seq;
}

}  // namespace

TraceContract compose_trace_contracts(const WiringDiagram& d,
                                      const std::map<std::string, TraceContract>& assign,
                                      long long cap) {
  require_valid(d);
  int h = -1;
  for (const auto& [id, tc] : assign) {
    if (h < 0) h = tc.horizon;
    if (tc.horizon != h) {
      throw Error(ErrorCode::HorizonMismatch,
                  "trace contract of box '" + id + "' has horizon " +
                      std::to_string(tc.horizon) + ", expected " + std::to_string(h));
    }
  }
  if (h < 0) h = 0;  // no boxes

  WiringDiagram lifted = lift_diagram(d, h, cap);
  std::map<std::string, Contract> step_contracts;
  for (size_t i = 0; i < d.inner.size(); ++i) {
    const BoxDecl& b = d.inner[i];
    auto it = assign.find(b.id);
    if (it == assign.end()) {
      throw Error(ErrorCode::MissingAssignment,
                  "no trace contract assigned to box '" + b.id + "'");
    }
    if (!(it->second.iface == b.iface)) {
      throw Error(ErrorCode::InterfaceMismatch,
                  "trace contract interface does not match box '" + b.id + "'");
    }
    Contract c;
    c.iface = lifted.inner[i].iface;
    const auto in_r = input_radices(b.iface);
    const auto out_r = output_radices(b.iface);
    for (const auto& [in_seq, out_seq] : it->second.pairs) {
      c.pairs.insert({pack_sequences(in_seq, in_r, h), pack_sequences(out_seq, out_r, h)});
    }
    step_contracts[b.id] = std::move(c);
  }

  const Contract composed = compose_contracts(lifted, step_contracts, cap);

  TraceContract out;
  out.iface = d.outer;
  out.horizon = h;
  const auto in_r = input_radices(d.outer);
  const auto out_r = output_radices(d.outer);
  for (const auto& [in_packed, out_packed] : composed.pairs) {
    out.pairs.insert(
        {unpack_sequences(in_packed, in_r, h), unpack_sequences(out_packed, out_r, h)});
  }
  return out;
}

SatisfactionResult satisfies(const MooreMachine& m, const Contract& r, int h,
                             long long cap) {
  if (!(m.iface == r.iface)) {
    throw Error(ErrorCode::InterfaceMismatch, "machine and contract interfaces differ");
  }
  if (h < 0) {
    throw Error(ErrorCode::ValidationError, "horizon must be >= 0");
  }
  SatisfactionResult res;
  if (h == 0) return res;

  const auto in_r = input_radices(m.iface);
  const long long alphabet = count_guarded(in_r, cap, "input alphabet");
  const long long n = static_cast<long long>(m.states.size());
  if (n * h > cap || n * alphabet > cap) {
    throw Error(ErrorCode::ExplosionGuard, "satisfaction search exceeds the cap");
  }

  // allowed[state][symbol]: the step relation admits (symbol, readout(state)).
  std::vector<std::vector<char>> allowed(n, std::vector<char>(alphabet, 0));
  for (long long s = 0; s < n; ++s) {
    for (long long a = 0; a < alphabet; ++a) {
      allowed[s][a] =
          r.pairs.count({unpack_digits(a, in_r), m.readout[s]}) > 0 ? 1 : 0;
    }
  }

  // viol[k][s]: some violation is reachable within k more steps from s.
  std::vector<std::vector<char>> viol(static_cast<size_t>(h) + 1,
                                      std::vector<char>(n, 0));
  for (int k = 1; k <= h; ++k) {
    for (long long s = 0; s < n; ++s) {
      char v = 0;
      for (long long a = 0; a < alphabet && !v; ++a) {
        v = !allowed[s][a] || (k > 1 && viol[k - 1][m.update[s][a]]);
      }
      viol[k][s] = v;
    }
  }
  if (!viol[h][m.init]) return res;

  // Lexicographically least violating sequence; t is its first bad tick.
  res.ok = false;
  res.counterexample.reserve(h);
  int s = m.init;
  bool found = false;
  for (int t = 0; t < h; ++t) {
    const int k = h - t;
    long long chosen = 0;
    if (!found) {
      for (long long a = 0; a < alphabet; ++a) {
        if (!allowed[s][a] || (k > 1 && viol[k - 1][m.update[s][a]])) {
          chosen = a;
          break;
        }
      }
      if (!allowed[s][chosen]) {
        found = true;
        res.t = t;
      }
    }
    res.counterexample.push_back(unpack_digits(chosen, in_r));
    s = m.update[s][chosen];
  }
  return res;
}

SatisfactionResult satisfies_trace(const MooreMachine& m, const TraceContract& r,
                                   long long cap) {
  if (!(m.iface == r.iface)) {
    throw Error(ErrorCode::InterfaceMismatch, "machine and contract interfaces differ");
  }
  const int h = r.horizon;
  const auto in_r = input_radices(m.iface);
  const long long alphabet = count_guarded(in_r, cap, "input alphabet");
  std::vector<int> seq_radices(static_cast<size_t>(h), static_cast<int>(alphabet));
  const long long total = count_guarded(seq_radices, cap, "trace satisfaction");

  SatisfactionResult res;
  for (long long idx = 0; idx < total; ++idx) {
    const std::vector<int> flat = unpack_digits(idx, seq_radices);
    std::vector<PackedVal> inputs;
    inputs.reserve(flat.size());
    for (int a : flat) inputs.push_back(unpack_digits(a, in_r));
    const Trace tr = simulate_packed(m, inputs);
    if (!r.pairs.count({tr.inputs, tr.outputs})) {
      res.ok = false;
      res.counterexample = tr.inputs;
      res.t = 0;
      return res;
    }
  }
  return res;
}

TraceContract alpha(const MooreMachine& m, int h, long long cap) {
  TraceContract out;
  out.iface = m.iface;
  out.horizon = h;
  for (const Trace& tr : traces(m, h, cap)) {
    out.pairs.insert({tr.inputs, tr.outputs});
  }
  return out;
}

NaturalityResult check_naturality(const WiringDiagram& d,
                                  const std::map<std::string, MooreMachine>& assign,
                                  int h, long long cap) {
  // Behavior leg: compose machines first, then abstract to traces.
  const MooreMachine composite = apply_moore(d, assign, cap);
  const TraceContract behavior = alpha(composite, h, cap);

  // Contract leg: abstract each machine to traces, then compose contracts.
  std::map<std::string, TraceContract> per_box;
  for (const auto& b : d.inner) {
    per_box[b.id] = alpha(assign.at(b.id), h, cap);
  }
  const TraceContract contract = compose_trace_contracts(d, per_box, cap);

  NaturalityResult res;
  res.trace_count = static_cast<long long>(behavior.pairs.size());
  std::set_difference(behavior.pairs.begin(), behavior.pairs.end(),
                      contract.pairs.begin(), contract.pairs.end(),
                      std::back_inserter(res.only_behavior));
  std::set_difference(contract.pairs.begin(), contract.pairs.end(),
                      behavior.pairs.begin(), behavior.pairs.end(),
                      std::back_inserter(res.only_contract));
  res.ok = res.only_behavior.empty() && res.only_contract.empty();
  return res;
}

}  // namespace opwire
