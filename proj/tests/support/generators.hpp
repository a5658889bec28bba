#pragma once

#include <random>
#include <string>

#include "opwire/contract.hpp"
#include "opwire/lti.hpp"
#include "opwire/moore.hpp"

namespace opwire::testing {

struct Rng {
  std::mt19937 eng;

  explicit Rng(uint32_t seed) : eng(seed) {}

  int i(int lo, int hi) {  // inclusive
    return std::uniform_int_distribution<int>(lo, hi)(eng);
  }
  double d(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(eng);
  }
  bool chance(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(eng) < p; }
};

inline ValueType bit_type() { return ValueType::finite({"0", "1"}); }

inline Interface rand_iface(Rng& rng, const ValueType& t, int max_in, int max_out,
                            int min_in = 0, int min_out = 1) {
  Interface iface;
  const int ni = rng.i(min_in, max_in);
  const int no = rng.i(min_out, max_out);
  for (int k = 0; k < ni; ++k) iface.inputs.push_back({"i" + std::to_string(k), t});
  for (int k = 0; k < no; ++k) iface.outputs.push_back({"o" + std::to_string(k), t});
  return iface;
}

// Random diagram over one shared port type. Every box has at least one
// output, so suppliers always exist; wiring picks uniformly among outer
// inputs and all inner outputs (self-feedback included). max_out_ports = 0
// means "same as max_ports".
inline WiringDiagram rand_diagram_with_outer(Rng& rng, const Interface& outer,
                                             const ValueType& t, int max_boxes,
                                             int max_ports, int max_out_ports = 0) {
  if (max_out_ports == 0) max_out_ports = max_ports;
  WiringDiagram d;
  d.outer = outer;
  const int nboxes = rng.i(1, max_boxes);
  for (int b = 0; b < nboxes; ++b) {
    d.inner.push_back(
        {"x" + std::to_string(b), rand_iface(rng, t, max_ports, max_out_ports)});
  }
  std::vector<Supplier> pool;
  for (const auto& p : outer.inputs) pool.push_back(Supplier::outer(p.name));
  std::vector<PortRef> outs;
  for (const auto& b : d.inner) {
    for (const auto& q : b.iface.outputs) {
      pool.push_back(Supplier::inner(b.id, q.name));
      outs.push_back({b.id, q.name});
    }
  }
  for (const auto& b : d.inner) {
    for (const auto& p : b.iface.inputs) {
      d.phi_in[{b.id, p.name}] = pool[rng.i(0, static_cast<int>(pool.size()) - 1)];
    }
  }
  for (const auto& q : outer.outputs) {
    d.phi_out[q.name] = outs[rng.i(0, static_cast<int>(outs.size()) - 1)];
  }
  return d;
}

inline WiringDiagram rand_diagram(Rng& rng, const ValueType& t, int max_boxes,
                                  int max_ports, int max_out_ports = 0) {
  Interface outer;
  const int ni = rng.i(0, max_ports);
  const int no = rng.i(1, max_out_ports ? max_out_ports : max_ports);
  for (int k = 0; k < ni; ++k) outer.inputs.push_back({"u" + std::to_string(k), t});
  for (int k = 0; k < no; ++k) outer.outputs.push_back({"y" + std::to_string(k), t});
  return rand_diagram_with_outer(rng, outer, t, max_boxes, max_ports, max_out_ports);
}

inline MooreMachine rand_moore(Rng& rng, const Interface& iface, int max_states) {
  MooreMachine m;
  m.iface = iface;
  const int n = rng.i(1, max_states);
  for (int s = 0; s < n; ++s) m.states.push_back("s" + std::to_string(s));
  m.init = rng.i(0, n - 1);
  const auto in_r = input_radices(iface);
  const auto out_r = output_radices(iface);
  long long alphabet = 1;
  for (int r : in_r) alphabet *= r;
  for (int s = 0; s < n; ++s) {
    std::vector<int> ro;
    for (int r : out_r) ro.push_back(rng.i(0, r - 1));
    m.readout.push_back(std::move(ro));
    std::vector<int> row;
    for (long long a = 0; a < alphabet; ++a) row.push_back(rng.i(0, n - 1));
    m.update.push_back(std::move(row));
  }
  return m;
}

inline Contract rand_contract(Rng& rng, const Interface& iface, double keep_prob) {
  Contract c = full_contract(iface);
  Contract out;
  out.iface = iface;
  for (const auto& pair : c.pairs) {
    if (rng.chance(keep_prob)) out.pairs.insert(pair);
  }
  return out;
}

inline LtiSystem rand_lti(Rng& rng, const Interface& iface, int max_n, double d_scale) {
  LtiSystem s;
  s.iface = iface;
  s.n = rng.i(0, max_n);
  const int m = iface.total_input_dim();
  const int p = iface.total_output_dim();
  auto fill = [&](int rows, int cols, double scale) {
    Matrix mat(rows, cols);
    for (auto& v : mat.a) v = rng.d(-1.0, 1.0) * scale;
    return mat;
  };
  s.A = fill(s.n, s.n, 1.0);
  s.B = fill(s.n, m, 1.0);
  s.C = fill(p, s.n, 1.0);
  s.D = fill(p, m, d_scale);
  return s;
}

}  // namespace opwire::testing
