#pragma once

#include <map>
#include <string>
#include <vector>

#include "opwire/hierarchy.hpp"

namespace opwire {

/// Versioned on-disk model: a hierarchical model with all algebra assignments
/// inline, plus free-form string metadata. The serializer is canonical
/// (sorted keys, shortest round-trip numbers), so serialize(parse(x)) is a
/// fixed point on canonical files.
struct ModelFile {
  std::string version = "1";
  std::map<std::string, std::string> metadata;
  HierarchicalModel model;

  bool operator==(const ModelFile&) const = default;
};

/// Parses and fully validates a model file. Errors carry a JSON-pointer-style
/// path; syntax errors carry line/column.
ModelFile parse_model(const std::string& text);

/// Canonical UTF-8 JSON rendering.
std::string serialize_model(const ModelFile& mf);

/// CSV trace files: a header row of column names, one time step per line.
/// Finite ports carry labels; real ports decimal numbers, with vector ports
/// split into "name[i]" columns.
struct TraceFile {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

TraceFile parse_trace_csv(const std::string& text);
std::string serialize_trace_csv(const TraceFile& tf);

/// Expected CSV column names for an interface side.
std::vector<std::string> csv_columns_for_inputs(const Interface& iface);
std::vector<std::string> csv_columns_for_outputs(const Interface& iface);

/// Shortest round-trip decimal rendering of a double (the same formatting the
/// model serializer uses).
std::string format_double(double v);

/// Canonical JSON rendering of a standalone contract, interface included.
std::string serialize_contract(const Contract& c);

}  // namespace opwire
