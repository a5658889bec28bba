#include "opwire/types.hpp"

#include <set>

namespace opwire {

ValueType ValueType::finite(std::vector<std::string> labels) {
  if (labels.empty()) {
    throw Error(ErrorCode::ValidationError, "finite type needs at least one label");
  }
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) {
      throw Error(ErrorCode::ValidationError, "duplicate label '" + l + "' in finite type");
    }
  }
  ValueType t;
  t.kind = Kind::Finite;
  t.labels = std::move(labels);
  return t;
}

ValueType ValueType::real() {
  ValueType t;
  t.kind = Kind::Real;
  return t;
}

ValueType ValueType::real_vector(int dim) {
  if (dim < 1) {
    throw Error(ErrorCode::ValidationError, "vector type needs dim >= 1");
  }
  ValueType t;
  t.kind = Kind::RealVector;
  t.dim = dim;
  return t;
}

int ValueType::scalar_width() const {
  switch (kind) {
    case Kind::Real: return 1;
    case Kind::RealVector: return dim;
    case Kind::Finite:
      throw Error(ErrorCode::NonRealType, "finite type has no scalar width");
  }
  return 0;
}

int ValueType::label_index(const std::string& label) const {
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return static_cast<int>(i);
  }
  return -1;
}

std::string to_string(const ValueType& t) {
  switch (t.kind) {
    case ValueType::Kind::Real: return "real";
    case ValueType::Kind::RealVector: return "vector[" + std::to_string(t.dim) + "]";
    case ValueType::Kind::Finite: {
      std::string out = "finite{";
      for (size_t i = 0; i < t.labels.size(); ++i) {
        if (i) out += ",";
        out += t.labels[i];
      }
      out += "}";
      return out;
    }
  }
  return "?";
}

const Port* Interface::find_input(const std::string& name) const {
  for (const auto& p : inputs) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

const Port* Interface::find_output(const std::string& name) const {
  for (const auto& p : outputs) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

int Interface::input_index(const std::string& name) const {
  for (size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

int Interface::output_index(const std::string& name) const {
  for (size_t i = 0; i < outputs.size(); ++i) {
    if (outputs[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

int Interface::total_input_dim() const {
  int n = 0;
  for (const auto& p : inputs) n += p.type.scalar_width();
  return n;
}

int Interface::total_output_dim() const {
  int n = 0;
  for (const auto& p : outputs) n += p.type.scalar_width();
  return n;
}

bool Interface::all_finite() const {
  for (const auto& p : inputs) {
    if (!p.type.is_finite()) return false;
  }
  for (const auto& p : outputs) {
    if (!p.type.is_finite()) return false;
  }
  return true;
}

bool Interface::all_real() const {
  for (const auto& p : inputs) {
    if (p.type.is_finite()) return false;
  }
  for (const auto& p : outputs) {
    if (p.type.is_finite()) return false;
  }
  return true;
}

}  // namespace opwire
