#include "opwire/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <tuple>

#include "CLI11.hpp"
#include "opwire/model_io.hpp"

namespace opwire {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::SyntaxError, "cannot open file '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

long long resolve_cap(long long flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("OPWIRE_MAX_ENUM")) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (end && *end == '\0' && v > 0) return v;
    throw Error(ErrorCode::SyntaxError,
                std::string("OPWIRE_MAX_ENUM must be a positive integer, got '") + env + "'");
  }
  return kDefaultEnumCap;
}

std::string render_valuation(const std::vector<Port>& ports, const PackedVal& v) {
  std::string out;
  for (size_t p = 0; p < ports.size(); ++p) {
    if (p) out += ",";
    out += ports[p].name + "=" + ports[p].type.labels[v[p]];
  }
  return out;
}

std::string render_sequence(const std::vector<Port>& ports,
                            const std::vector<PackedVal>& seq) {
  std::string out = "[";
  for (size_t t = 0; t < seq.size(); ++t) {
    if (t) out += "; ";
    out += render_valuation(ports, seq[t]);
  }
  out += "]";
  return out;
}

int cmd_validate(const std::string& file, std::ostream& out, std::ostream& err) {
  std::string text = read_file(file);
  try {
    parse_model(text);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ValidationError || e.code() == ErrorCode::InterfaceMismatch ||
        e.code() == ErrorCode::MixedAlgebra || e.code() == ErrorCode::DepthExceeded) {
      out << e.what() << "\n";
      return 1;
    }
    err << e.what() << "\n";
    return 2;
  }
  out << "ok\n";
  return 0;
}

ModelFile flatten_to_file(const ModelFile& mf) {
  FlatModel flat = flatten(mf.model);
  ModelFile out;
  out.version = mf.version;
  out.metadata = mf.metadata;
  for (const auto& [path, ancestors] : flat.provenance) {
    std::string chain;
    for (size_t i = 0; i < ancestors.size(); ++i) {
      if (i) chain += "/";
      chain += ancestors[i];
    }
    out.metadata["provenance:" + path] = chain;
  }
  out.model.outer = mf.model.outer;
  out.model.diagram = std::move(flat.diagram);
  out.model.machines = std::move(flat.machines);
  out.model.systems = std::move(flat.systems);
  out.model.contracts = std::move(flat.contracts);
  out.model.trace_contracts = std::move(flat.trace_contracts);
  return out;
}

int cmd_flatten(const std::string& file, std::ostream& out) {
  const ModelFile mf = parse_model(read_file(file));
  out << serialize_model(flatten_to_file(mf));
  return 0;
}

int cmd_export_dot(const std::string& file, bool flat, std::ostream& out) {
  const ModelFile mf = parse_model(read_file(file));
  const WiringDiagram d = flat ? flatten(mf.model).diagram : mf.model.diagram;
  out << export_dot(d);
  return 0;
}

int cmd_simulate(const std::string& file, const std::string& inputs_file, int horizon,
                 long long cap, std::ostream& out) {
  const ModelFile mf = parse_model(read_file(file));
  const FlatModel flat = flatten(mf.model);
  const TraceFile tf = parse_trace_csv(read_file(inputs_file));

  size_t steps = tf.rows.size();
  if (horizon >= 0) {
    if (static_cast<size_t>(horizon) > tf.rows.size()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "horizon " + std::to_string(horizon) + " exceeds the " +
                      std::to_string(tf.rows.size()) + " steps in the trace file");
    }
    steps = static_cast<size_t>(horizon);
  }

  const bool moore = !flat.machines.empty();
  const bool lti = !flat.systems.empty();
  if (moore == lti) {
    throw Error(ErrorCode::MixedAlgebra,
                moore ? "model mixes Moore and LTI leaf assignments"
                      : "model has no leaf behavior assignments");
  }

  const Interface& outer = mf.model.outer;
  const auto expect_cols = csv_columns_for_inputs(outer);
  if (tf.columns != expect_cols) {
    std::string want;
    for (size_t i = 0; i < expect_cols.size(); ++i) {
      if (i) want += ",";
      want += expect_cols[i];
    }
    throw Error(ErrorCode::SchemaError, "trace file header must be exactly: " + want);
  }

  const auto out_cols = csv_columns_for_outputs(outer);
  TraceFile result;
  result.columns = out_cols;

  if (moore) {
    const MooreMachine composite = apply_moore(flat.diagram, flat.machines, cap);
    std::vector<Valuation> inputs;
    for (size_t r = 0; r < steps; ++r) {
      Valuation v;
      for (size_t c = 0; c < expect_cols.size(); ++c) v[expect_cols[c]] = tf.rows[r][c];
      inputs.push_back(std::move(v));
    }
    const Trace tr = simulate(composite, inputs);
    for (const auto& step_out : tr.outputs) {
      std::vector<std::string> row;
      for (size_t p = 0; p < outer.outputs.size(); ++p) {
        row.push_back(outer.outputs[p].type.labels[step_out[p]]);
      }
      result.rows.push_back(std::move(row));
    }
  } else {
    const LtiSystem composite = apply_lti(flat.diagram, flat.systems);
    std::vector<std::vector<double>> inputs;
    for (size_t r = 0; r < steps; ++r) {
      std::vector<double> u;
      for (size_t c = 0; c < expect_cols.size(); ++c) {
        const std::string& s = tf.rows[r][c];
        try {
          size_t used = 0;
          u.push_back(std::stod(s, &used));
          if (used != s.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
          throw Error(ErrorCode::SyntaxError,
                      "row " + std::to_string(r + 2) + ", column '" + expect_cols[c] +
                          "': '" + s + "' is not a number");
        }
      }
      inputs.push_back(std::move(u));
    }
    const std::vector<double> x0(composite.n, 0.0);
    const auto outputs = simulate_lti(composite, x0, inputs);
    for (const auto& y : outputs) {
      std::vector<std::string> row;
      for (double v : y) row.push_back(format_double(v));
      result.rows.push_back(std::move(row));
    }
  }

  out << serialize_trace_csv(result);
  return 0;
}

int cmd_compose_contracts(const std::string& file, long long cap, std::ostream& out) {
  const ModelFile mf = parse_model(read_file(file));
  const Contract composite = compose_contracts(mf.model.diagram, mf.model.contracts, cap);
  out << serialize_contract(composite);
  return 0;
}

struct CheckLine {
  std::string path;
  std::string kind;
  bool checked = false;
  bool ok = false;
  std::string detail;
};

void collect_checks(const HierarchicalModel& m, const std::string& prefix, int horizon,
                    long long cap, std::vector<CheckLine>& lines) {
  auto machine_for = [&](const std::string& id) -> std::optional<MooreMachine> {
    auto child = m.children.find(id);
    if (child != m.children.end()) return compose_moore(child->second, cap);
    auto mm = m.machines.find(id);
    if (mm != m.machines.end()) return mm->second;
    return std::nullopt;
  };
  for (const auto& [id, c] : m.contracts) {
    CheckLine line;
    line.path = prefix.empty() ? id : prefix + "/" + id;
    line.kind = "contract";
    if (auto machine = machine_for(id)) {
      const SatisfactionResult res = satisfies(*machine, c, horizon, cap);
      line.checked = true;
      line.ok = res.ok;
      if (!res.ok) {
        line.detail = "violated at t=" + std::to_string(res.t) + ", inputs " +
                      render_sequence(c.iface.inputs, res.counterexample);
      }
    } else {
      line.detail = "skipped (no machine)";
    }
    lines.push_back(std::move(line));
  }
  for (const auto& [id, tc] : m.trace_contracts) {
    CheckLine line;
    line.path = prefix.empty() ? id : prefix + "/" + id;
    line.kind = "trace contract";
    if (auto machine = machine_for(id)) {
      const SatisfactionResult res = satisfies_trace(*machine, tc, cap);
      line.checked = true;
      line.ok = res.ok;
      if (!res.ok) {
        line.detail = "violated, inputs " +
                      render_sequence(tc.iface.inputs, res.counterexample);
      }
    } else {
      line.detail = "skipped (no machine)";
    }
    lines.push_back(std::move(line));
  }
  for (const auto& [id, child] : m.children) {
    collect_checks(child, prefix.empty() ? id : prefix + "/" + id, horizon, cap, lines);
  }
}

int cmd_check(const std::string& file, int horizon, long long cap, std::ostream& out) {
  const ModelFile mf = parse_model(read_file(file));
  std::vector<CheckLine> lines;
  collect_checks(mf.model, "", horizon, cap, lines);
  std::sort(lines.begin(), lines.end(), [](const CheckLine& a, const CheckLine& b) {
    return std::tie(a.path, a.kind) < std::tie(b.path, b.kind);
  });
  bool any_violated = false;
  for (const auto& line : lines) {
    out << line.path << ": " << line.kind << " ";
    if (!line.checked) {
      out << line.detail << "\n";
    } else if (line.ok) {
      out << "satisfied\n";
    } else {
      out << line.detail << "\n";
      any_violated = true;
    }
  }
  if (lines.empty()) out << "no contracts to check\n";
  return any_violated ? 1 : 0;
}

int cmd_check_naturality(const std::string& file, int horizon, long long cap,
                         std::ostream& out) {
  const ModelFile mf = parse_model(read_file(file));
  const FlatModel flat = flatten(mf.model);
  if (!flat.systems.empty()) {
    throw Error(ErrorCode::NonFiniteType, "naturality checking needs Moore leaves");
  }
  const NaturalityResult res = check_naturality(flat.diagram, flat.machines, horizon, cap);
  if (res.ok) {
    out << "naturality holds (" << res.trace_count << " traces)\n";
    return 0;
  }
  const Interface& outer = mf.model.outer;
  for (const auto& [in, o] : res.only_behavior) {
    out << "only in behavior leg: in=" << render_sequence(outer.inputs, in)
        << " out=" << render_sequence(outer.outputs, o) << "\n";
  }
  for (const auto& [in, o] : res.only_contract) {
    out << "only in contract leg: in=" << render_sequence(outer.inputs, in)
        << " out=" << render_sequence(outer.outputs, o) << "\n";
  }
  return 1;
}

int cmd_check_refinement(const std::string& file, const std::string& box, int horizon,
                         double tol, long long cap, std::ostream& out) {
  const ModelFile mf = parse_model(read_file(file));

  // Find which algebra the box's abstract assignment lives in.
  const HierarchicalModel* level = &mf.model;
  std::string id = box;
  {
    std::string rest = box;
    for (size_t pos = rest.find('/'); pos != std::string::npos; pos = rest.find('/')) {
      const std::string head = rest.substr(0, pos);
      auto it = level->children.find(head);
      if (it == level->children.end()) {
        throw Error(ErrorCode::MissingAssignment, "no child at '" + head + "'", box);
      }
      level = &it->second;
      rest = rest.substr(pos + 1);
    }
    id = rest;
  }

  if (level->machines.count(id)) {
    const RefinementResult res = check_refinement_moore(mf.model, box, horizon, cap);
    if (res.ok) {
      out << "refinement holds\n";
      return 0;
    }
    const Interface& iface = level->machines.at(id).iface;
    out << "refinement violated, counterexample inputs "
        << render_sequence(iface.inputs, res.counterexample) << "\n";
    return 1;
  }
  if (level->systems.count(id)) {
    if (check_refinement_lti(mf.model, box, tol)) {
      out << "refinement holds\n";
      return 0;
    }
    out << "refinement violated (Markov parameters differ beyond tol=" << tol << ")\n";
    return 1;
  }
  throw Error(ErrorCode::MissingAssignment, "box '" + box + "' has no abstract assignment");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"opwire: wiring diagrams with Moore, LTI and contract semantics"};
  app.require_subcommand(1);

  long long max_enum = 0;
  app.add_option("--max-enum", max_enum, "enumeration cap (overrides OPWIRE_MAX_ENUM)");

  std::string file, inputs_file, box;
  int horizon = -1;
  bool flat = false;
  double tol = 1e-9;

  auto* validate_cmd = app.add_subcommand("validate", "parse and validate a model file");
  validate_cmd->add_option("file", file)->required();

  auto* flatten_cmd =
      app.add_subcommand("flatten", "emit the flattened model with provenance metadata");
  flatten_cmd->add_option("file", file)->required();

  auto* simulate_cmd = app.add_subcommand("simulate", "simulate the composed model");
  simulate_cmd->add_option("file", file)->required();
  simulate_cmd->add_option("--inputs", inputs_file, "CSV trace file")->required();
  simulate_cmd->add_option("--horizon", horizon, "number of steps (default: whole file)");

  auto* compose_cmd =
      app.add_subcommand("compose-contracts", "compose the root boxes' contracts");
  compose_cmd->add_option("file", file)->required();

  auto* check_cmd = app.add_subcommand("check", "check every contract assignment");
  check_cmd->add_option("file", file)->required();
  int check_horizon = 2;
  check_cmd->add_option("--horizon", check_horizon, "step-contract horizon (default 2)");

  auto* nat_cmd =
      app.add_subcommand("check-naturality", "compare the behavior and contract legs");
  nat_cmd->add_option("file", file)->required();
  int nat_horizon = 2;
  nat_cmd->add_option("--horizon", nat_horizon, "trace horizon (default 2)");

  auto* ref_cmd = app.add_subcommand("check-refinement",
                                     "compare a box's abstraction with its implementation");
  ref_cmd->add_option("file", file)->required();
  ref_cmd->add_option("--box", box, "slash-joined box path")->required();
  ref_cmd->add_option("--horizon", horizon,
                      "trace horizon (default: state-count product + 1)");
  ref_cmd->add_option("--tol", tol, "Markov tolerance for LTI refinement (default 1e-9)");

  auto* dot_cmd = app.add_subcommand("export-dot", "render the wiring diagram as DOT");
  dot_cmd->add_option("file", file)->required();
  dot_cmd->add_flag("--flat", flat, "flatten before rendering");

  std::vector<const char*> argv;
  argv.push_back("opwire");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help and friends
      return app.exit(e, out, err);
    }
    app.exit(e, err, err);
    return 2;
  }

  try {
    const long long cap = resolve_cap(max_enum);
    if (validate_cmd->parsed()) return cmd_validate(file, out, err);
    if (flatten_cmd->parsed()) return cmd_flatten(file, out);
    if (simulate_cmd->parsed()) return cmd_simulate(file, inputs_file, horizon, cap, out);
    if (compose_cmd->parsed()) return cmd_compose_contracts(file, cap, out);
    if (check_cmd->parsed()) return cmd_check(file, check_horizon, cap, out);
    if (nat_cmd->parsed()) return cmd_check_naturality(file, nat_horizon, cap, out);
    if (ref_cmd->parsed()) return cmd_check_refinement(file, box, horizon, tol, cap, out);
    if (dot_cmd->parsed()) return cmd_export_dot(file, flat, out);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  err << "no subcommand given\n";
  return 2;
}

}  // namespace opwire
