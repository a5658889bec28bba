// Regenerates the example corpus under corpus/ in canonical serialized form.
// Usage: make_corpus [output-dir]

#include <fstream>
#include <functional>
#include <iostream>

#include "opwire/contract.hpp"
#include "opwire/model_io.hpp"

using namespace opwire;

namespace {

ValueType bit() { return ValueType::finite({"0", "1"}); }

MooreMachine build_machine(Interface iface, std::vector<std::string> states,
                           const std::string& init,
                           const std::function<std::vector<int>(int)>& readout,
                           const std::function<int(int, const std::vector<int>&)>& update) {
  MooreMachine m;
  m.iface = std::move(iface);
  m.states = std::move(states);
  m.init = m.state_index(init);
  const auto in_r = input_radices(m.iface);
  const long long alphabet = count_guarded(in_r, kDefaultEnumCap, "alphabet");
  for (size_t s = 0; s < m.states.size(); ++s) {
    m.readout.push_back(readout(static_cast<int>(s)));
    std::vector<int> row;
    for (long long a = 0; a < alphabet; ++a) {
      row.push_back(update(static_cast<int>(s), unpack_digits(a, in_r)));
    }
    m.update.push_back(std::move(row));
  }
  check_moore(m);
  return m;
}

Interface uav_outer(const ValueType& t) {
  return Interface{{{"e", t}, {"d", t}}, {{"s", t}}};
}

WiringDiagram uav_diagram(const ValueType& t) {
  WiringDiagram d;
  d.outer = uav_outer(t);
  d.inner = {
      {"L", Interface{{{"s", t}}, {{"s'", t}}}},
      {"C", Interface{{{"s'", t}, {"d", t}}, {{"c", t}}}},
      {"D", Interface{{{"c", t}, {"e", t}}, {{"s", t}}}},
  };
  d.phi_in[{"L", "s"}] = Supplier::inner("D", "s");
  d.phi_in[{"C", "s'"}] = Supplier::inner("L", "s'");
  d.phi_in[{"C", "d"}] = Supplier::outer("d");
  d.phi_in[{"D", "c"}] = Supplier::inner("C", "c");
  d.phi_in[{"D", "e"}] = Supplier::outer("e");
  d.phi_out["s"] = {"D", "s"};
  return d;
}

ModelFile uav_lti() {
  ModelFile mf;
  mf.metadata["name"] = "uav";
  mf.metadata["description"] =
      "sensor/controller/dynamics loop with LTI semantics; sensor and controller are "
      "static gains";
  const ValueType real = ValueType::real();
  mf.model.outer = uav_outer(real);
  mf.model.diagram = uav_diagram(real);

  LtiSystem sensor;
  sensor.iface = mf.model.diagram.inner[0].iface;
  sensor.n = 0;
  sensor.A = Matrix(0, 0);
  sensor.B = Matrix(0, 1);
  sensor.C = Matrix(1, 0);
  sensor.D = Matrix{{1.0}};

  LtiSystem controller;
  controller.iface = mf.model.diagram.inner[1].iface;
  controller.n = 0;
  controller.A = Matrix(0, 0);
  controller.B = Matrix(0, 2);
  controller.C = Matrix(1, 0);
  controller.D = Matrix{{-0.5, 0.5}};

  LtiSystem dynamics;
  dynamics.iface = mf.model.diagram.inner[2].iface;
  dynamics.n = 1;
  dynamics.A = Matrix{{0.9}};
  dynamics.B = Matrix{{0.1, 0.05}};
  dynamics.C = Matrix{{1.0}};
  dynamics.D = Matrix{{0.0, 0.0}};

  mf.model.systems = {{"L", sensor}, {"C", controller}, {"D", dynamics}};
  return mf;
}

MooreMachine sensor_delay() {
  return build_machine(Interface{{{"s", bit()}}, {{"s'", bit()}}}, {"l0", "l1"}, "l0",
                       [](int s) { return std::vector<int>{s}; },
                       [](int, const std::vector<int>& in) { return in[0]; });
}

MooreMachine controller_xor() {
  return build_machine(Interface{{{"s'", bit()}, {"d", bit()}}, {{"c", bit()}}},
                       {"c0", "c1"}, "c0", [](int s) { return std::vector<int>{s}; },
                       [](int, const std::vector<int>& in) { return in[0] ^ in[1]; });
}

MooreMachine dynamics_abstract() {
  // Two-deep pipeline of c AND e: state m<m1><m2> outputs m2 and shifts.
  return build_machine(
      Interface{{{"c", bit()}, {"e", bit()}}, {{"s", bit()}}},
      {"m00", "m01", "m10", "m11"}, "m00",
      [](int s) { return std::vector<int>{s & 1}; },
      [](int s, const std::vector<int>& in) {
        const int m1 = (s >> 1) & 1;
        return ((in[0] & in[1]) << 1) | m1;
      });
}

MooreMachine autopilot() {
  return build_machine(Interface{{{"c", bit()}, {"e", bit()}}, {{"a", bit()}}},
                       {"p0", "p1"}, "p0", [](int s) { return std::vector<int>{s}; },
                       [](int, const std::vector<int>& in) { return in[0] & in[1]; });
}

MooreMachine airframe(bool perturbed) {
  return build_machine(Interface{{{"a", bit()}}, {{"s", bit()}}}, {"f0", "f1"}, "f0",
                       [](int s) { return std::vector<int>{s}; },
                       [perturbed](int s, const std::vector<int>& in) {
                         if (perturbed && s == 0 && in[0] == 1) return 0;  // stuck
                         return in[0];
                       });
}

HierarchicalModel dynamics_child(bool perturbed) {
  HierarchicalModel child;
  child.outer = Interface{{{"c", bit()}, {"e", bit()}}, {{"s", bit()}}};
  child.diagram.outer = child.outer;
  child.diagram.inner = {
      {"autopilot", Interface{{{"c", bit()}, {"e", bit()}}, {{"a", bit()}}}},
      {"airframe", Interface{{{"a", bit()}}, {{"s", bit()}}}},
  };
  child.diagram.phi_in[{"autopilot", "c"}] = Supplier::outer("c");
  child.diagram.phi_in[{"autopilot", "e"}] = Supplier::outer("e");
  child.diagram.phi_in[{"airframe", "a"}] = Supplier::inner("autopilot", "a");
  child.diagram.phi_out["s"] = {"airframe", "s"};
  child.machines = {{"autopilot", autopilot()}, {"airframe", airframe(perturbed)}};
  return child;
}

ModelFile uav_finite(bool perturbed) {
  ModelFile mf;
  mf.metadata["name"] = perturbed ? "uav-finite-perturbed" : "uav-finite";
  mf.metadata["description"] =
      perturbed ? "uav-finite with a stuck airframe transition; the dynamics refinement "
                  "no longer holds"
                : "sensor/controller/dynamics loop with Moore semantics; the dynamics box "
                  "is refined into an autopilot/airframe sub-diagram";
  mf.model.outer = uav_outer(bit());
  mf.model.diagram = uav_diagram(bit());
  mf.model.machines = {
      {"L", sensor_delay()}, {"C", controller_xor()}, {"D", dynamics_abstract()}};
  mf.model.children = {{"D", dynamics_child(perturbed)}};
  mf.model.contracts = {{"L", full_contract(mf.model.diagram.inner[0].iface)}};
  mf.model.trace_contracts = {{"D", alpha(dynamics_abstract(), 2)}};
  return mf;
}

ModelFile logic_contracts() {
  ModelFile mf;
  mf.metadata["name"] = "logic";
  mf.metadata["description"] =
      "two-gate diagram carrying only contracts: an XOR stage into a NOT stage";
  mf.model.outer = Interface{{{"a", bit()}, {"b", bit()}}, {{"z", bit()}}};
  mf.model.diagram.outer = mf.model.outer;
  mf.model.diagram.inner = {
      {"G1", Interface{{{"x", bit()}, {"y", bit()}}, {{"w", bit()}}}},
      {"G2", Interface{{{"p", bit()}}, {{"z", bit()}}}},
  };
  mf.model.diagram.phi_in[{"G1", "x"}] = Supplier::outer("a");
  mf.model.diagram.phi_in[{"G1", "y"}] = Supplier::outer("b");
  mf.model.diagram.phi_in[{"G2", "p"}] = Supplier::inner("G1", "w");
  mf.model.diagram.phi_out["z"] = {"G2", "z"};

  Contract xor_c;
  xor_c.iface = mf.model.diagram.inner[0].iface;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      xor_c.pairs.insert({{x, y}, {x ^ y}});
    }
  }
  Contract not_c;
  not_c.iface = mf.model.diagram.inner[1].iface;
  not_c.pairs.insert({{0}, {1}});
  not_c.pairs.insert({{1}, {0}});
  mf.model.contracts = {{"G1", xor_c}, {"G2", not_c}};
  return mf;
}

std::string lti_inputs_csv(int steps) {
  TraceFile tf;
  tf.columns = {"e", "d"};
  for (int t = 0; t < steps; ++t) {
    const double e = (t % 5) * 0.1 - 0.2;
    const double d = ((t * 7) % 11) * 0.05;
    tf.rows.push_back({format_double(e), format_double(d)});
  }
  return serialize_trace_csv(tf);
}

std::string finite_inputs_csv(int steps) {
  TraceFile tf;
  tf.columns = {"e", "d"};
  for (int t = 0; t < steps; ++t) {
    tf.rows.push_back({t % 3 == 0 ? "1" : "0", t % 2 == 1 ? "1" : "0"});
  }
  return serialize_trace_csv(tf);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) {
    std::cerr << "failed to write " << path << "\n";
    std::exit(1);
  }
  std::cout << "wrote " << path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  const std::string dir = argc > 1 ? argv[1] : "corpus";
  write_file(dir + "/uav.model", serialize_model(uav_lti()));
  write_file(dir + "/uav-finite.model", serialize_model(uav_finite(false)));
  write_file(dir + "/uav-finite-perturbed.model", serialize_model(uav_finite(true)));
  write_file(dir + "/logic.model", serialize_model(logic_contracts()));
  write_file(dir + "/uav_inputs.csv", lti_inputs_csv(100));
  write_file(dir + "/uav-finite_inputs.csv", finite_inputs_csv(12));
  return 0;
}
