#include "opwire/model_io.hpp"

#include <charconv>
#include <cstdio>

#include "json.hpp"

namespace opwire {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::SchemaError, msg, path);
}

const json& field(const json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) {
    schema_error(path, std::string("missing required key '") + key + "'");
  }
  return *it;
}

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object");
}

void expect_array(const json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array");
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) schema_error(path, "expected a string");
  return j.get<std::string>();
}

int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) schema_error(path, "expected an integer");
  return j.get<int>();
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected a number");
  return j.get<double>();
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& path) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) schema_error(path + "/" + it.key(), "unknown key");
  }
}

// Identifier rule shared by box ids, port names, state names, and labels:
// printable ASCII without '"', '\' or ',' (commas would collide with the CSV
// and sequence-label separators).
void check_name(const std::string& s, const std::string& path) {
  if (s.empty()) schema_error(path, "name must be non-empty");
  for (char c : s) {
    if (c < 0x21 || c > 0x7e || c == '"' || c == '\\' || c == ',') {
      schema_error(path, "name '" + s + "' contains a forbidden character");
    }
  }
}

ValueType parse_type(const json& j, const std::string& path) {
  expect_object(j, path);
  reject_unknown_keys(j, {"kind", "labels", "dim"}, path);
  const std::string kind = get_string(field(j, "kind", path), path + "/kind");
  if (kind == "real") {
    reject_unknown_keys(j, {"kind"}, path);
    return ValueType::real();
  }
  if (kind == "vector") {
    reject_unknown_keys(j, {"kind", "dim"}, path);
    const int dim = get_int(field(j, "dim", path), path + "/dim");
    if (dim < 1) schema_error(path + "/dim", "vector dim must be >= 1");
    return ValueType::real_vector(dim);
  }
  if (kind == "finite") {
    reject_unknown_keys(j, {"kind", "labels"}, path);
    const json& labels = field(j, "labels", path);
    expect_array(labels, path + "/labels");
    std::vector<std::string> out;
    for (size_t i = 0; i < labels.size(); ++i) {
      const std::string lp = path + "/labels/" + std::to_string(i);
      out.push_back(get_string(labels[i], lp));
      check_name(out.back(), lp);
    }
    try {
      return ValueType::finite(std::move(out));
    } catch (const Error& e) {
      schema_error(path + "/labels", e.what());
    }
  }
  schema_error(path + "/kind", "unknown type kind '" + kind + "'");
}

Interface parse_interface(const json& j, const std::string& path) {
  expect_object(j, path);
  reject_unknown_keys(j, {"inputs", "outputs"}, path);
  Interface iface;
  auto side = [&](const char* key, std::vector<Port>& out) {
    auto it = j.find(key);
    if (it == j.end()) return;
    const std::string sp = path + "/" + key;
    expect_array(*it, sp);
    for (size_t i = 0; i < it->size(); ++i) {
      const json& pj = (*it)[i];
      const std::string pp = sp + "/" + std::to_string(i);
      expect_object(pj, pp);
      reject_unknown_keys(pj, {"name", "type"}, pp);
      Port p;
      p.name = get_string(field(pj, "name", pp), pp + "/name");
      check_name(p.name, pp + "/name");
      p.type = parse_type(field(pj, "type", pp), pp + "/type");
      out.push_back(std::move(p));
    }
  };
  side("inputs", iface.inputs);
  side("outputs", iface.outputs);
  return iface;
}

Valuation parse_valuation(const json& j, const std::string& path) {
  expect_object(j, path);
  Valuation v;
  for (auto it = j.begin(); it != j.end(); ++it) {
    v[it.key()] = get_string(it.value(), path + "/" + it.key());
  }
  return v;
}

MooreMachine parse_machine(const json& j, const Interface& iface, const std::string& path) {
  expect_object(j, path);
  reject_unknown_keys(j, {"states", "init", "readout", "transitions"}, path);

  MooreMachine m;
  m.iface = iface;
  const json& states = field(j, "states", path);
  expect_array(states, path + "/states");
  for (size_t i = 0; i < states.size(); ++i) {
    const std::string sp = path + "/states/" + std::to_string(i);
    m.states.push_back(get_string(states[i], sp));
    check_name(m.states.back(), sp);
  }
  if (m.states.empty()) schema_error(path + "/states", "machine needs at least one state");

  const std::string init = get_string(field(j, "init", path), path + "/init");
  m.init = m.state_index(init);
  if (m.init < 0) {
    throw Error(ErrorCode::ValidationError, "init state '" + init + "' is not declared",
                path + "/init");
  }

  std::vector<int> in_r, out_r;
  try {
    in_r = input_radices(iface);
    out_r = output_radices(iface);
  } catch (const Error& e) {
    throw Error(ErrorCode::ValidationError,
                std::string("machine on a non-finite interface: ") + e.what(), path);
  }
  const long long alphabet = count_guarded(in_r, kDefaultEnumCap, "input alphabet");

  m.readout.assign(m.states.size(), {});
  const json& readout = field(j, "readout", path);
  expect_array(readout, path + "/readout");
  for (size_t i = 0; i < readout.size(); ++i) {
    const std::string rp = path + "/readout/" + std::to_string(i);
    expect_object(readout[i], rp);
    reject_unknown_keys(readout[i], {"state", "outputs"}, rp);
    const std::string st = get_string(field(readout[i], "state", rp), rp + "/state");
    const int si = m.state_index(st);
    if (si < 0) throw Error(ErrorCode::ValidationError, "unknown state '" + st + "'", rp);
    if (!m.readout[si].empty()) {
      throw Error(ErrorCode::ValidationError, "duplicate readout for state '" + st + "'", rp);
    }
    try {
      m.readout[si] = encode_output(iface, parse_valuation(field(readout[i], "outputs", rp),
                                                           rp + "/outputs"));
    } catch (const Error& e) {
      throw Error(ErrorCode::ValidationError, e.what(), rp + "/outputs");
    }
    if (out_r.empty()) m.readout[si].push_back(-1);  // sentinel: portless readout seen
  }
  for (size_t s = 0; s < m.states.size(); ++s) {
    if (m.readout[s].empty()) {
      throw Error(ErrorCode::ValidationError,
                  "state '" + m.states[s] + "' has no readout", path + "/readout");
    }
  }
  // drop the arity-0 sentinel
  for (auto& ro : m.readout) {
    if (ro.size() == 1 && ro[0] == -1) ro.clear();
  }

  m.update.assign(m.states.size(), std::vector<int>(alphabet, -1));
  const json& transitions = field(j, "transitions", path);
  expect_array(transitions, path + "/transitions");
  for (size_t i = 0; i < transitions.size(); ++i) {
    const std::string tp = path + "/transitions/" + std::to_string(i);
    expect_object(transitions[i], tp);
    reject_unknown_keys(transitions[i], {"state", "inputs", "next"}, tp);
    const std::string st = get_string(field(transitions[i], "state", tp), tp + "/state");
    const std::string nx = get_string(field(transitions[i], "next", tp), tp + "/next");
    const int si = m.state_index(st);
    const int ni = m.state_index(nx);
    if (si < 0) throw Error(ErrorCode::ValidationError, "unknown state '" + st + "'", tp);
    if (ni < 0) throw Error(ErrorCode::ValidationError, "unknown state '" + nx + "'", tp);
    long long a;
    try {
      a = pack_digits(encode_input(iface, parse_valuation(field(transitions[i], "inputs", tp),
                                                          tp + "/inputs")),
                      in_r);
    } catch (const Error& e) {
      throw Error(ErrorCode::ValidationError, e.what(), tp + "/inputs");
    }
    if (m.update[si][a] != -1) {
      throw Error(ErrorCode::ValidationError,
                  "duplicate transition from state '" + st + "'", tp);
    }
    m.update[si][a] = ni;
  }
  for (size_t s = 0; s < m.states.size(); ++s) {
    for (long long a = 0; a < alphabet; ++a) {
      if (m.update[s][a] == -1) {
        throw Error(ErrorCode::ValidationError,
                    "update table is not total: state '" + m.states[s] +
                        "' misses an input valuation",
                    path + "/transitions");
      }
    }
  }
  return m;
}

Matrix parse_matrix(const json& j, const std::string& path) {
  expect_object(j, path);
  reject_unknown_keys(j, {"rows", "cols", "entries"}, path);
  const int rows = get_int(field(j, "rows", path), path + "/rows");
  const int cols = get_int(field(j, "cols", path), path + "/cols");
  if (rows < 0 || cols < 0) schema_error(path, "matrix dims must be >= 0");
  const json& entries = field(j, "entries", path);
  expect_array(entries, path + "/entries");
  if (static_cast<int>(entries.size()) != rows) {
    throw Error(ErrorCode::ValidationError,
                "expected " + std::to_string(rows) + " rows, got " +
                    std::to_string(entries.size()),
                path + "/entries");
  }
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const std::string rp = path + "/entries/" + std::to_string(i);
    expect_array(entries[i], rp);
    if (static_cast<int>(entries[i].size()) != cols) {
      throw Error(ErrorCode::ValidationError,
                  "expected " + std::to_string(cols) + " columns", rp);
    }
    for (int c = 0; c < cols; ++c) {
      m.at(i, c) = get_number(entries[i][c], rp + "/" + std::to_string(c));
    }
  }
  if (!m.all_finite()) {
    throw Error(ErrorCode::ValidationError, "non-finite matrix entry", path + "/entries");
  }
  return m;
}

LtiSystem parse_system(const json& j, const Interface& iface, const std::string& path) {
  expect_object(j, path);
  reject_unknown_keys(j, {"state_dim", "A", "B", "C", "D"}, path);
  LtiSystem s;
  s.iface = iface;
  s.n = get_int(field(j, "state_dim", path), path + "/state_dim");
  s.A = parse_matrix(field(j, "A", path), path + "/A");
  s.B = parse_matrix(field(j, "B", path), path + "/B");
  s.C = parse_matrix(field(j, "C", path), path + "/C");
  s.D = parse_matrix(field(j, "D", path), path + "/D");
  try {
    check_lti(s);
  } catch (const Error& e) {
    throw Error(ErrorCode::ValidationError, e.what(), path);
  }
  return s;
}

Contract parse_contract(const json& j, const Interface& iface, const std::string& path) {
  expect_object(j, path);
  reject_unknown_keys(j, {"pairs"}, path);
  Contract c;
  c.iface = iface;
  const json& pairs = field(j, "pairs", path);
  expect_array(pairs, path + "/pairs");
  for (size_t i = 0; i < pairs.size(); ++i) {
    const std::string pp = path + "/pairs/" + std::to_string(i);
    expect_object(pairs[i], pp);
    reject_unknown_keys(pairs[i], {"inputs", "outputs"}, pp);
    try {
      c.pairs.insert(
          {encode_input(iface, parse_valuation(field(pairs[i], "inputs", pp), pp + "/inputs")),
           encode_output(iface,
                         parse_valuation(field(pairs[i], "outputs", pp), pp + "/outputs"))});
    } catch (const Error& e) {
      throw Error(ErrorCode::ValidationError, e.what(), pp);
    }
  }
  return c;
}

std::vector<PackedVal> parse_port_sequences(const json& j, const std::vector<Port>& ports,
                                            int horizon, const std::string& path) {
  expect_object(j, path);
  if (j.size() != ports.size()) {
    throw Error(ErrorCode::ValidationError, "sequence valuation must cover every port", path);
  }
  std::vector<PackedVal> seq(static_cast<size_t>(horizon),
                             PackedVal(ports.size()));
  for (size_t p = 0; p < ports.size(); ++p) {
    auto it = j.find(ports[p].name);
    if (it == j.end()) {
      throw Error(ErrorCode::ValidationError, "missing port '" + ports[p].name + "'", path);
    }
    const std::string sp = path + "/" + ports[p].name;
    expect_array(*it, sp);
    if (static_cast<int>(it->size()) != horizon) {
      throw Error(ErrorCode::ValidationError, "sequence length must equal the horizon", sp);
    }
    for (int t = 0; t < horizon; ++t) {
      const std::string label = get_string((*it)[t], sp + "/" + std::to_string(t));
      const int idx = ports[p].type.label_index(label);
      if (idx < 0) {
        throw Error(ErrorCode::ValidationError,
                    "label '" + label + "' is not in the type of port '" + ports[p].name + "'",
                    sp + "/" + std::to_string(t));
      }
      seq[t][p] = idx;
    }
  }
  return seq;
}

TraceContract parse_trace_contract(const json& j, const Interface& iface,
                                   const std::string& path) {
  expect_object(j, path);
  reject_unknown_keys(j, {"horizon", "pairs"}, path);
  TraceContract tc;
  tc.iface = iface;
  tc.horizon = get_int(field(j, "horizon", path), path + "/horizon");
  if (tc.horizon < 0) schema_error(path + "/horizon", "horizon must be >= 0");
  const json& pairs = field(j, "pairs", path);
  expect_array(pairs, path + "/pairs");
  for (size_t i = 0; i < pairs.size(); ++i) {
    const std::string pp = path + "/pairs/" + std::to_string(i);
    expect_object(pairs[i], pp);
    reject_unknown_keys(pairs[i], {"inputs", "outputs"}, pp);
    tc.pairs.insert({parse_port_sequences(field(pairs[i], "inputs", pp), iface.inputs,
                                          tc.horizon, pp + "/inputs"),
                     parse_port_sequences(field(pairs[i], "outputs", pp), iface.outputs,
                                          tc.horizon, pp + "/outputs")});
  }
  return tc;
}

HierarchicalModel parse_hmodel(const json& j, const std::string& path, int depth) {
  if (depth > kMaxHierarchyDepth) {
    throw Error(ErrorCode::DepthExceeded, "hierarchy too deep", path);
  }
  expect_object(j, path);
  reject_unknown_keys(j,
                      {"interface", "diagram", "children", "machines", "systems",
                       "contracts", "trace_contracts"},
                      path);

  HierarchicalModel m;
  m.outer = parse_interface(field(j, "interface", path), path + "/interface");
  m.diagram.outer = m.outer;

  const json& dj = field(j, "diagram", path);
  const std::string dp = path + "/diagram";
  expect_object(dj, dp);
  reject_unknown_keys(dj, {"boxes", "wires_in", "wires_out"}, dp);
  const json& boxes = field(dj, "boxes", dp);
  expect_array(boxes, dp + "/boxes");
  for (size_t i = 0; i < boxes.size(); ++i) {
    const std::string bp = dp + "/boxes/" + std::to_string(i);
    expect_object(boxes[i], bp);
    reject_unknown_keys(boxes[i], {"id", "interface"}, bp);
    BoxDecl b;
    b.id = get_string(field(boxes[i], "id", bp), bp + "/id");
    check_name(b.id, bp + "/id");
    b.iface = parse_interface(field(boxes[i], "interface", bp), bp + "/interface");
    m.diagram.inner.push_back(std::move(b));
  }
  if (auto it = dj.find("wires_in"); it != dj.end()) {
    expect_array(*it, dp + "/wires_in");
    for (size_t i = 0; i < it->size(); ++i) {
      const std::string wp = dp + "/wires_in/" + std::to_string(i);
      const json& wj = (*it)[i];
      expect_object(wj, wp);
      reject_unknown_keys(wj, {"box", "port", "from"}, wp);
      PortRef ref;
      ref.box = get_string(field(wj, "box", wp), wp + "/box");
      ref.port = get_string(field(wj, "port", wp), wp + "/port");
      const json& fj = field(wj, "from", wp);
      const std::string fp = wp + "/from";
      expect_object(fj, fp);
      Supplier s;
      if (fj.contains("outer")) {
        reject_unknown_keys(fj, {"outer"}, fp);
        s = Supplier::outer(get_string(fj["outer"], fp + "/outer"));
      } else {
        reject_unknown_keys(fj, {"box", "port"}, fp);
        s = Supplier::inner(get_string(field(fj, "box", fp), fp + "/box"),
                            get_string(field(fj, "port", fp), fp + "/port"));
      }
      if (m.diagram.phi_in.count(ref)) {
        throw Error(ErrorCode::ValidationError,
                    "duplicate wire into " + ref.box + "." + ref.port, wp);
      }
      m.diagram.phi_in[ref] = s;
    }
  }
  if (auto it = dj.find("wires_out"); it != dj.end()) {
    expect_array(*it, dp + "/wires_out");
    for (size_t i = 0; i < it->size(); ++i) {
      const std::string wp = dp + "/wires_out/" + std::to_string(i);
      const json& wj = (*it)[i];
      expect_object(wj, wp);
      reject_unknown_keys(wj, {"outer", "box", "port"}, wp);
      const std::string outer = get_string(field(wj, "outer", wp), wp + "/outer");
      if (m.diagram.phi_out.count(outer)) {
        throw Error(ErrorCode::ValidationError, "duplicate wire out of '" + outer + "'", wp);
      }
      m.diagram.phi_out[outer] = {get_string(field(wj, "box", wp), wp + "/box"),
                                  get_string(field(wj, "port", wp), wp + "/port")};
    }
  }

  auto box_iface = [&](const std::string& id, const std::string& at) -> const Interface& {
    const BoxDecl* b = m.diagram.find_box(id);
    if (!b) {
      throw Error(ErrorCode::ValidationError, "assignment references unknown box '" + id + "'",
                  at);
    }
    return b->iface;
  };

  if (auto it = j.find("machines"); it != j.end()) {
    const std::string mp = path + "/machines";
    expect_object(*it, mp);
    for (auto mit = it->begin(); mit != it->end(); ++mit) {
      m.machines[mit.key()] =
          parse_machine(mit.value(), box_iface(mit.key(), mp + "/" + mit.key()),
                        mp + "/" + mit.key());
    }
  }
  if (auto it = j.find("systems"); it != j.end()) {
    const std::string sp = path + "/systems";
    expect_object(*it, sp);
    for (auto sit = it->begin(); sit != it->end(); ++sit) {
      m.systems[sit.key()] =
          parse_system(sit.value(), box_iface(sit.key(), sp + "/" + sit.key()),
                       sp + "/" + sit.key());
    }
  }
  if (auto it = j.find("contracts"); it != j.end()) {
    const std::string cp = path + "/contracts";
    expect_object(*it, cp);
    for (auto cit = it->begin(); cit != it->end(); ++cit) {
      m.contracts[cit.key()] =
          parse_contract(cit.value(), box_iface(cit.key(), cp + "/" + cit.key()),
                         cp + "/" + cit.key());
    }
  }
  if (auto it = j.find("trace_contracts"); it != j.end()) {
    const std::string cp = path + "/trace_contracts";
    expect_object(*it, cp);
    for (auto cit = it->begin(); cit != it->end(); ++cit) {
      m.trace_contracts[cit.key()] =
          parse_trace_contract(cit.value(), box_iface(cit.key(), cp + "/" + cit.key()),
                               cp + "/" + cit.key());
    }
  }
  if (auto it = j.find("children"); it != j.end()) {
    const std::string cp = path + "/children";
    expect_object(*it, cp);
    for (auto cit = it->begin(); cit != it->end(); ++cit) {
      m.children[cit.key()] = parse_hmodel(cit.value(), cp + "/" + cit.key(), depth + 1);
    }
  }

  return m;
}

std::pair<int, int> line_col_of(const std::string& text, size_t byte) {
  int line = 1, col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

ModelFile parse_model(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    auto [line, col] = line_col_of(text, e.byte > 0 ? e.byte - 1 : 0);
    throw Error(ErrorCode::SyntaxError,
                std::string(e.what()) + " (line " + std::to_string(line) + ", column " +
                    std::to_string(col) + ")");
  }

  expect_object(j, "");
  reject_unknown_keys(j, {"version", "metadata", "model"}, "");
  ModelFile mf;
  mf.version = get_string(field(j, "version", ""), "/version");
  if (mf.version != "1") {
    schema_error("/version", "unsupported format version '" + mf.version + "'");
  }
  if (auto it = j.find("metadata"); it != j.end()) {
    expect_object(*it, "/metadata");
    for (auto mit = it->begin(); mit != it->end(); ++mit) {
      mf.metadata[mit.key()] = get_string(mit.value(), "/metadata/" + mit.key());
    }
  }
  mf.model = parse_hmodel(field(j, "model", ""), "/model", 1);

  try {
    validate_model(mf.model);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DepthExceeded) throw;
    throw Error(ErrorCode::ValidationError, e.what(),
                e.path().empty() ? "/model" : "/model/" + e.path());
  }
  return mf;
}

namespace {

json type_json(const ValueType& t) {
  json j;
  switch (t.kind) {
    case ValueType::Kind::Real:
      j["kind"] = "real";
      break;
    case ValueType::Kind::RealVector:
      j["kind"] = "vector";
      j["dim"] = t.dim;
      break;
    case ValueType::Kind::Finite:
      j["kind"] = "finite";
      j["labels"] = t.labels;
      break;
  }
  return j;
}

json interface_json(const Interface& iface) {
  json j = json::object();
  json ins = json::array(), outs = json::array();
  for (const auto& p : iface.inputs) {
    ins.push_back({{"name", p.name}, {"type", type_json(p.type)}});
  }
  for (const auto& p : iface.outputs) {
    outs.push_back({{"name", p.name}, {"type", type_json(p.type)}});
  }
  if (!ins.empty()) j["inputs"] = std::move(ins);
  if (!outs.empty()) j["outputs"] = std::move(outs);
  return j;
}

json valuation_json(const Valuation& v) {
  json j = json::object();
  for (const auto& [k, val] : v) j[k] = val;
  return j;
}

json machine_json(const MooreMachine& m) {
  json j;
  j["states"] = m.states;
  j["init"] = m.states[m.init];
  const auto in_r = input_radices(m.iface);
  json readout = json::array();
  for (size_t s = 0; s < m.states.size(); ++s) {
    readout.push_back({{"state", m.states[s]},
                       {"outputs", valuation_json(decode_output(m.iface, m.readout[s]))}});
  }
  j["readout"] = std::move(readout);
  json transitions = json::array();
  for (size_t s = 0; s < m.states.size(); ++s) {
    for (size_t a = 0; a < m.update[s].size(); ++a) {
      transitions.push_back(
          {{"state", m.states[s]},
           {"inputs", valuation_json(
                          decode_input(m.iface, unpack_digits(static_cast<long long>(a), in_r)))},
           {"next", m.states[m.update[s][a]]}});
    }
  }
  j["transitions"] = std::move(transitions);
  return j;
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows; ++i) {
    json row = json::array();
    for (int c = 0; c < m.cols; ++c) row.push_back(m.at(i, c));
    rows.push_back(std::move(row));
  }
  return {{"rows", m.rows}, {"cols", m.cols}, {"entries", std::move(rows)}};
}

json system_json(const LtiSystem& s) {
  return {{"state_dim", s.n},
          {"A", matrix_json(s.A)},
          {"B", matrix_json(s.B)},
          {"C", matrix_json(s.C)},
          {"D", matrix_json(s.D)}};
}

json contract_json(const Contract& c) {
  json pairs = json::array();
  for (const auto& [in, out] : c.pairs) {
    pairs.push_back({{"inputs", valuation_json(decode_input(c.iface, in))},
                     {"outputs", valuation_json(decode_output(c.iface, out))}});
  }
  return {{"pairs", std::move(pairs)}};
}

json port_sequences_json(const std::vector<PackedVal>& seq, const std::vector<Port>& ports) {
  json j = json::object();
  for (size_t p = 0; p < ports.size(); ++p) {
    json labels = json::array();
    for (const auto& step : seq) labels.push_back(ports[p].type.labels[step[p]]);
    j[ports[p].name] = std::move(labels);
  }
  return j;
}

json trace_contract_json(const TraceContract& tc) {
  json pairs = json::array();
  for (const auto& [in, out] : tc.pairs) {
    pairs.push_back({{"inputs", port_sequences_json(in, tc.iface.inputs)},
                     {"outputs", port_sequences_json(out, tc.iface.outputs)}});
  }
  return {{"horizon", tc.horizon}, {"pairs", std::move(pairs)}};
}

json hmodel_json(const HierarchicalModel& m) {
  json j;
  j["interface"] = interface_json(m.outer);

  json dj = json::object();
  json boxes = json::array();
  for (const auto& b : m.diagram.inner) {
    boxes.push_back({{"id", b.id}, {"interface", interface_json(b.iface)}});
  }
  dj["boxes"] = std::move(boxes);
  json wires_in = json::array();
  for (const auto& [ref, s] : m.diagram.phi_in) {
    json w = {{"box", ref.box}, {"port", ref.port}};
    w["from"] = s.is_outer() ? json{{"outer", s.port}}
                             : json{{"box", s.box}, {"port", s.port}};
    wires_in.push_back(std::move(w));
  }
  if (!wires_in.empty()) dj["wires_in"] = std::move(wires_in);
  json wires_out = json::array();
  for (const auto& [name, ref] : m.diagram.phi_out) {
    wires_out.push_back({{"outer", name}, {"box", ref.box}, {"port", ref.port}});
  }
  if (!wires_out.empty()) dj["wires_out"] = std::move(wires_out);
  j["diagram"] = std::move(dj);

  if (!m.machines.empty()) {
    json mj = json::object();
    for (const auto& [id, mm] : m.machines) mj[id] = machine_json(mm);
    j["machines"] = std::move(mj);
  }
  if (!m.systems.empty()) {
    json sj = json::object();
    for (const auto& [id, s] : m.systems) sj[id] = system_json(s);
    j["systems"] = std::move(sj);
  }
  if (!m.contracts.empty()) {
    json cj = json::object();
    for (const auto& [id, c] : m.contracts) cj[id] = contract_json(c);
    j["contracts"] = std::move(cj);
  }
  if (!m.trace_contracts.empty()) {
    json cj = json::object();
    for (const auto& [id, tc] : m.trace_contracts) cj[id] = trace_contract_json(tc);
    j["trace_contracts"] = std::move(cj);
  }
  if (!m.children.empty()) {
    json cj = json::object();
    for (const auto& [id, child] : m.children) cj[id] = hmodel_json(child);
    j["children"] = std::move(cj);
  }
  return j;
}

}  // namespace

std::string serialize_model(const ModelFile& mf) {
  json j;
  j["version"] = mf.version;
  if (!mf.metadata.empty()) {
    json meta = json::object();
    for (const auto& [k, v] : mf.metadata) meta[k] = v;
    j["metadata"] = std::move(meta);
  }
  j["model"] = hmodel_json(mf.model);
  return j.dump(2) + "\n";
}

TraceFile parse_trace_csv(const std::string& text) {
  TraceFile tf;
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  if (lines.empty()) {
    throw Error(ErrorCode::SyntaxError, "trace file needs a header row");
  }
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char c : line) {
      if (c == ',') {
        out.push_back(field);
        field.clear();
      } else {
        field += c;
      }
    }
    out.push_back(field);
    return out;
  };
  tf.columns = split(lines[0]);
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto row = split(lines[i]);
    if (row.size() != tf.columns.size()) {
      throw Error(ErrorCode::SyntaxError,
                  "row " + std::to_string(i + 1) + " has " + std::to_string(row.size()) +
                      " fields, expected " + std::to_string(tf.columns.size()));
    }
    tf.rows.push_back(std::move(row));
  }
  return tf;
}

std::string serialize_trace_csv(const TraceFile& tf) {
  std::string out;
  for (size_t i = 0; i < tf.columns.size(); ++i) {
    if (i) out += ",";
    out += tf.columns[i];
  }
  out += "\n";
  for (const auto& row : tf.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      out += row[i];
    }
    out += "\n";
  }
  return out;
}

std::vector<std::string> csv_columns_for_inputs(const Interface& iface) {
  std::vector<std::string> out;
  for (const auto& p : iface.inputs) {
    const int w = p.type.is_finite() ? 1 : p.type.scalar_width();
    if (w == 1) {
      out.push_back(p.name);
    } else {
      for (int i = 0; i < w; ++i) out.push_back(p.name + "[" + std::to_string(i) + "]");
    }
  }
  return out;
}

std::vector<std::string> csv_columns_for_outputs(const Interface& iface) {
  std::vector<std::string> out;
  for (const auto& p : iface.outputs) {
    const int w = p.type.is_finite() ? 1 : p.type.scalar_width();
    if (w == 1) {
      out.push_back(p.name);
    } else {
      for (int i = 0; i < w; ++i) out.push_back(p.name + "[" + std::to_string(i) + "]");
    }
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
  }
  return std::string(buf, ptr);
}

std::string serialize_contract(const Contract& c) {
  json j;
  j["interface"] = interface_json(c.iface);
  j["pairs"] = contract_json(c)["pairs"];
  return j.dump(2) + "\n";
}

}  // namespace opwire
