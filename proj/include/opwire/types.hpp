#pragma once

#include <string>
#include <vector>

#include "opwire/errors.hpp"

namespace opwire {

/// Value type carried by a port. Finite types have an ordered, duplicate-free
/// label list; Real is a single scalar; RealVector is a contiguous block of
/// `dim` scalars.
struct ValueType {
  enum class Kind { Finite, Real, RealVector };

  Kind kind = Kind::Real;
  std::vector<std::string> labels;  // Finite only
  int dim = 0;                      // RealVector only

  static ValueType finite(std::vector<std::string> labels);
  static ValueType real();
  static ValueType real_vector(int dim);

  bool is_finite() const { return kind == Kind::Finite; }
  bool is_real_like() const { return kind != Kind::Finite; }

  /// Number of scalar lanes this type occupies in a packed real vector.
  int scalar_width() const;

  /// Index of a label within a Finite type, or -1 if absent.
  int label_index(const std::string& label) const;

  bool operator==(const ValueType&) const = default;
};

std::string to_string(const ValueType& t);

struct Port {
  std::string name;
  ValueType type;

  bool operator==(const Port&) const = default;
};

/// Ordered input and output port lists of a box or of a diagram boundary.
struct Interface {
  std::vector<Port> inputs;
  std::vector<Port> outputs;

  const Port* find_input(const std::string& name) const;
  const Port* find_output(const std::string& name) const;
  int input_index(const std::string& name) const;
  int output_index(const std::string& name) const;

  /// Total packed scalar dimensions (real-typed interfaces only).
  int total_input_dim() const;
  int total_output_dim() const;

  bool all_finite() const;
  bool all_real() const;

  bool operator==(const Interface&) const = default;
};

}  // namespace opwire
