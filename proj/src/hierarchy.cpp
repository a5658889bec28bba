#include "opwire/hierarchy.hpp"

#include <algorithm>

namespace opwire {

namespace {

std::string join_path(const std::string& prefix, const std::string& id) {
  return prefix.empty() ? id : prefix + "/" + id;
}

void validate_level(const HierarchicalModel& m, const std::string& path, int depth) {
  if (depth > kMaxHierarchyDepth) {
    throw Error(ErrorCode::DepthExceeded,
                "hierarchy deeper than " + std::to_string(kMaxHierarchyDepth), path);
  }
  if (!(m.outer == m.diagram.outer)) {
    throw Error(ErrorCode::ValidationError,
                "model interface differs from its diagram's outer interface", path);
  }
  ValidationReport rep = validate(m.diagram);
  if (!rep.ok()) {
    std::string msg = "diagram does not validate:";
    for (const auto& v : rep.violations) {
      msg += "\n  [" + std::string(to_string(v.code)) + "] " + v.where + ": " + v.message;
    }
    throw Error(ErrorCode::ValidationError, msg, path);
  }

  auto box_of = [&](const std::string& id, const char* what) -> const BoxDecl& {
    const BoxDecl* b = m.diagram.find_box(id);
    if (!b) {
      throw Error(ErrorCode::ValidationError,
                  std::string(what) + " references unknown box '" + id + "'", path);
    }
    return *b;
  };

  for (const auto& [id, mm] : m.machines) {
    const BoxDecl& b = box_of(id, "machine assignment");
    if (!(mm.iface == b.iface)) {
      throw Error(ErrorCode::InterfaceMismatch,
                  "machine interface does not match box '" + id + "'", path);
    }
    check_moore(mm);
    if (m.systems.count(id)) {
      throw Error(ErrorCode::MixedAlgebra,
                  "box '" + id + "' carries both a machine and a system", path);
    }
  }
  for (const auto& [id, s] : m.systems) {
    const BoxDecl& b = box_of(id, "system assignment");
    if (!(s.iface == b.iface)) {
      throw Error(ErrorCode::InterfaceMismatch,
                  "system interface does not match box '" + id + "'", path);
    }
    check_lti(s);
  }
  for (const auto& [id, c] : m.contracts) {
    const BoxDecl& b = box_of(id, "contract assignment");
    if (!(c.iface == b.iface)) {
      throw Error(ErrorCode::InterfaceMismatch,
                  "contract interface does not match box '" + id + "'", path);
    }
  }
  for (const auto& [id, tc] : m.trace_contracts) {
    const BoxDecl& b = box_of(id, "trace contract assignment");
    if (!(tc.iface == b.iface)) {
      throw Error(ErrorCode::InterfaceMismatch,
                  "trace contract interface does not match box '" + id + "'", path);
    }
    if (tc.horizon < 0) {
      throw Error(ErrorCode::ValidationError, "negative horizon on box '" + id + "'", path);
    }
  }
  for (const auto& [id, child] : m.children) {
    const BoxDecl& b = box_of(id, "child");
    if (!(child.outer == b.iface)) {
      throw Error(ErrorCode::InterfaceMismatch,
                  "child interface does not match box '" + id + "'", join_path(path, id));
    }
    validate_level(child, join_path(path, id), depth + 1);
  }
}

}  // namespace

void validate_model(const HierarchicalModel& m) { validate_level(m, "", 1); }

namespace {

void flatten_into(const HierarchicalModel& m, int depth, FlatModel& out) {
  if (depth > kMaxHierarchyDepth) {
    throw Error(ErrorCode::DepthExceeded,
                "hierarchy deeper than " + std::to_string(kMaxHierarchyDepth));
  }
  out.diagram = m.diagram;
  for (const auto& b : m.diagram.inner) {
    out.provenance[b.id] = {};
  }
  // Leaf assignments of this level.
  for (const auto& [id, mm] : m.machines) {
    if (!m.children.count(id)) out.machines[id] = mm;
  }
  for (const auto& [id, s] : m.systems) {
    if (!m.children.count(id)) out.systems[id] = s;
  }
  for (const auto& [id, c] : m.contracts) {
    if (!m.children.count(id)) out.contracts[id] = c;
  }
  for (const auto& [id, tc] : m.trace_contracts) {
    if (!m.children.count(id)) out.trace_contracts[id] = tc;
  }

  for (const auto& [id, child] : m.children) {
    FlatModel sub;
    flatten_into(child, depth + 1, sub);
    out.diagram = substitute(out.diagram, id, sub.diagram);
    out.provenance.erase(id);
    const std::string prefix = id + "/";
    for (const auto& [p, anc] : sub.provenance) {
      std::vector<std::string> chain;
      chain.push_back(id);
      chain.insert(chain.end(), anc.begin(), anc.end());
      out.provenance[prefix + p] = std::move(chain);
    }
    for (const auto& [p, mm] : sub.machines) out.machines[prefix + p] = mm;
    for (const auto& [p, s] : sub.systems) out.systems[prefix + p] = s;
    for (const auto& [p, c] : sub.contracts) out.contracts[prefix + p] = c;
    for (const auto& [p, tc] : sub.trace_contracts) out.trace_contracts[prefix + p] = tc;
  }
}

}  // namespace

FlatModel flatten(const HierarchicalModel& m) {
  validate_model(m);
  FlatModel out;
  flatten_into(m, 1, out);
  return out;
}

MooreMachine compose_moore(const HierarchicalModel& m, long long cap) {
  std::map<std::string, MooreMachine> assign;
  for (const auto& b : m.diagram.inner) {
    auto child = m.children.find(b.id);
    if (child != m.children.end()) {
      assign[b.id] = compose_moore(child->second, cap);
      continue;
    }
    auto mm = m.machines.find(b.id);
    if (mm == m.machines.end()) {
      if (m.systems.count(b.id)) {
        throw Error(ErrorCode::MixedAlgebra,
                    "box '" + b.id + "' carries an LTI system, not a Moore machine");
      }
      throw Error(ErrorCode::MissingAssignment, "leaf box '" + b.id + "' has no machine");
    }
    assign[b.id] = mm->second;
  }
  return apply_moore(m.diagram, assign, cap);
}

LtiSystem compose_lti(const HierarchicalModel& m, double eps) {
  std::map<std::string, LtiSystem> assign;
  for (const auto& b : m.diagram.inner) {
    auto child = m.children.find(b.id);
    if (child != m.children.end()) {
      assign[b.id] = compose_lti(child->second, eps);
      continue;
    }
    auto s = m.systems.find(b.id);
    if (s == m.systems.end()) {
      if (m.machines.count(b.id)) {
        throw Error(ErrorCode::MixedAlgebra,
                    "box '" + b.id + "' carries a Moore machine, not an LTI system");
      }
      throw Error(ErrorCode::MissingAssignment, "leaf box '" + b.id + "' has no system");
    }
    assign[b.id] = s->second;
  }
  return apply_lti(m.diagram, assign, eps);
}

namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : path) {
    if (c == '/') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

/// Model level declaring the box named by the last path segment.
const HierarchicalModel& parent_of(const HierarchicalModel& root, const std::string& path,
                                   std::string& box_out) {
  const auto parts = split_path(path);
  const HierarchicalModel* level = &root;
  for (size_t i = 0; i + 1 < parts.size(); ++i) {
    auto it = level->children.find(parts[i]);
    if (it == level->children.end()) {
      throw Error(ErrorCode::MissingAssignment, "no child at '" + parts[i] + "'", path);
    }
    level = &it->second;
  }
  box_out = parts.back();
  if (!level->diagram.find_box(box_out)) {
    throw Error(ErrorCode::MissingAssignment, "no box '" + box_out + "'", path);
  }
  return *level;
}

}  // namespace

RefinementResult check_refinement_moore(const HierarchicalModel& m, const std::string& box,
                                        int horizon, long long cap) {
  std::string id;
  const HierarchicalModel& level = parent_of(m, box, id);
  auto abstract_it = level.machines.find(id);
  if (abstract_it == level.machines.end()) {
    if (level.systems.count(id)) {
      throw Error(ErrorCode::MixedAlgebra,
                  "box '" + id + "' carries an LTI abstraction; use the LTI check", box);
    }
    throw Error(ErrorCode::MissingAssignment, "box has no abstract machine", box);
  }
  auto child_it = level.children.find(id);
  if (child_it == level.children.end()) {
    throw Error(ErrorCode::MissingAssignment, "box has no implementing child", box);
  }
  const MooreMachine& abstract = abstract_it->second;
  const MooreMachine implemented = compose_moore(child_it->second, cap);
  if (horizon < 0) {
    horizon = static_cast<int>(abstract.states.size() * implemented.states.size()) + 1;
  }
  RefinementResult res;
  auto cex = trace_equivalent_counterexample(abstract, implemented, horizon, cap);
  if (cex) {
    res.ok = false;
    res.counterexample = std::move(*cex);
  }
  return res;
}

bool check_refinement_lti(const HierarchicalModel& m, const std::string& box, double tol,
                          double eps) {
  std::string id;
  const HierarchicalModel& level = parent_of(m, box, id);
  auto abstract_it = level.systems.find(id);
  if (abstract_it == level.systems.end()) {
    if (level.machines.count(id)) {
      throw Error(ErrorCode::MixedAlgebra,
                  "box '" + id + "' carries a Moore abstraction; use the Moore check", box);
    }
    throw Error(ErrorCode::MissingAssignment, "box has no abstract system", box);
  }
  auto child_it = level.children.find(id);
  if (child_it == level.children.end()) {
    throw Error(ErrorCode::MissingAssignment, "box has no implementing child", box);
  }
  const LtiSystem implemented = compose_lti(child_it->second, eps);
  return lti_equivalent(abstract_it->second, implemented, tol);
}

namespace {

std::string render_counterexample(const Interface& iface,
                                  const std::vector<PackedVal>& seq);

struct ChainStep {
  std::string path;
  const HierarchicalModel* level = nullptr;
  std::string box;
};

}  // namespace

ImpactReport propagate_change(const HierarchicalModel& m, const std::string& box, int h,
                              long long cap) {
  // Ancestor chain: the box itself, then each enclosing box up to the root.
  const auto parts = split_path(box);
  std::vector<ChainStep> chain;
  {
    std::string path;
    for (size_t i = 0; i < parts.size(); ++i) {
      path = join_path(path, parts[i]);
      std::string id;
      const HierarchicalModel& level = parent_of(m, path, id);
      chain.push_back({path, &level, id});
    }
  }
  std::reverse(chain.begin(), chain.end());  // innermost first

  ImpactReport report;
  for (const auto& step : chain) {
    const HierarchicalModel& level = *step.level;
    const bool has_contract = level.contracts.count(step.box) > 0;
    const bool has_trace = level.trace_contracts.count(step.box) > 0;
    if (!has_contract && !has_trace) continue;

    auto child_it = level.children.find(step.box);
    auto abstract_it = level.machines.find(step.box);
    if (child_it == level.children.end() && abstract_it == level.machines.end()) {
      ImpactEntry e;
      e.path = step.path;
      e.kind = ImpactEntry::Kind::MissingAssignment;
      e.detail = "contract present but no machine to check";
      report.entries.push_back(std::move(e));
      continue;
    }

    MooreMachine composed;
    try {
      composed = child_it != level.children.end() ? compose_moore(child_it->second, cap)
                                                  : abstract_it->second;
    } catch (const Error& err) {
      ImpactEntry e;
      e.path = step.path;
      e.kind = ImpactEntry::Kind::MissingAssignment;
      e.detail = err.what();
      report.entries.push_back(std::move(e));
      continue;
    }
    if (abstract_it == level.machines.end()) {
      ImpactEntry e;
      e.path = step.path;
      e.kind = ImpactEntry::Kind::MissingAssignment;
      e.detail = "no abstract machine to compare the recomposed verdict against";
      report.entries.push_back(std::move(e));
      continue;
    }
    const MooreMachine& abstract = abstract_it->second;

    auto compare = [&](auto check, const std::string& what) {
      const SatisfactionResult now = check(composed);
      const SatisfactionResult was = check(abstract);
      if (now.ok == was.ok) return;
      ImpactEntry e;
      e.path = step.path;
      e.kind = ImpactEntry::Kind::VerdictChanged;
      e.abstract_ok = was.ok;
      e.composed_ok = now.ok;
      const SatisfactionResult& bad = now.ok ? was : now;
      e.detail = what + (now.ok ? " newly satisfied" : " newly violated") +
                 ", counterexample " +
                 render_counterexample(abstract.iface, bad.counterexample);
      report.entries.push_back(std::move(e));
    };
    if (has_contract) {
      const Contract& c = level.contracts.at(step.box);
      compare([&](const MooreMachine& mm) { return satisfies(mm, c, h, cap); }, "contract");
    }
    if (has_trace) {
      const TraceContract& tc = level.trace_contracts.at(step.box);
      compare([&](const MooreMachine& mm) { return satisfies_trace(mm, tc, cap); },
              "trace contract");
    }
  }

  std::sort(report.entries.begin(), report.entries.end());
  return report;
}

std::string render_impact(const ImpactReport& report) {
  std::string out;
  for (const auto& e : report.entries) {
    out += e.path;
    out += e.kind == ImpactEntry::Kind::VerdictChanged ? ": verdict changed, "
                                                       : ": missing assignment, ";
    out += e.detail;
    out += "\n";
  }
  return out;
}

namespace {

std::string render_counterexample(const Interface& iface,
                                  const std::vector<PackedVal>& seq) {
  std::string out = "[";
  for (size_t t = 0; t < seq.size(); ++t) {
    if (t) out += "; ";
    const Valuation v = decode_input(iface, seq[t]);
    bool first = true;
    for (const auto& [port, label] : v) {
      if (!first) out += ",";
      first = false;
      out += port + "=" + label;
    }
  }
  out += "]";
  return out;
}

}  // namespace

}  // namespace opwire
