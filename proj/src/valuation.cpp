#include "opwire/valuation.hpp"

namespace opwire {

namespace {

std::vector<int> radices_of(const std::vector<Port>& ports) {
  std::vector<int> r;
  r.reserve(ports.size());
  for (const auto& p : ports) {
    if (!p.type.is_finite()) {
      throw Error(ErrorCode::NonFiniteType,
                  "port '" + p.name + "' has non-finite type " + to_string(p.type));
    }
    r.push_back(static_cast<int>(p.type.labels.size()));
  }
  return r;
}

PackedVal encode(const std::vector<Port>& ports, const Valuation& v) {
  if (v.size() != ports.size()) {
    throw Error(ErrorCode::PartialInput,
                "valuation has " + std::to_string(v.size()) + " entries, expected " +
                    std::to_string(ports.size()));
  }
  PackedVal out;
  out.reserve(ports.size());
  for (const auto& p : ports) {
    auto it = v.find(p.name);
    if (it == v.end()) {
      throw Error(ErrorCode::PartialInput, "valuation misses port '" + p.name + "'");
    }
    int idx = p.type.label_index(it->second);
    if (idx < 0) {
      throw Error(ErrorCode::PartialInput,
                  "label '" + it->second + "' is not in the type of port '" + p.name + "'");
    }
    out.push_back(idx);
  }
  return out;
}

Valuation decode(const std::vector<Port>& ports, const PackedVal& v) {
  if (v.size() != ports.size()) {
    throw Error(ErrorCode::PartialInput, "packed valuation has wrong arity");
  }
  Valuation out;
  for (size_t i = 0; i < ports.size(); ++i) {
    out[ports[i].name] = ports[i].type.labels.at(v[i]);
  }
  return out;
}

}  // namespace

std::vector<int> input_radices(const Interface& iface) { return radices_of(iface.inputs); }
std::vector<int> output_radices(const Interface& iface) { return radices_of(iface.outputs); }

long long pack_digits(const std::vector<int>& digits, const std::vector<int>& radices) {
  long long idx = 0;
  for (size_t i = 0; i < radices.size(); ++i) {
    idx = idx * radices[i] + digits[i];
  }
  return idx;
}

std::vector<int> unpack_digits(long long index, const std::vector<int>& radices) {
  std::vector<int> digits(radices.size(), 0);
  for (size_t i = radices.size(); i-- > 0;) {
    digits[i] = static_cast<int>(index % radices[i]);
    index /= radices[i];
  }
  return digits;
}

long long count_guarded(const std::vector<int>& radices, long long cap,
                        const std::string& what) {
  long long n = 1;
  for (int r : radices) {
    if (r <= 0) {
      throw Error(ErrorCode::NonFiniteType, "empty domain in " + what);
    }
    if (n > cap / r) {
      throw Error(ErrorCode::ExplosionGuard,
                  what + " exceeds the enumeration cap of " + std::to_string(cap));
    }
    n *= r;
  }
  return n;
}

PackedVal encode_input(const Interface& iface, const Valuation& v) {
  return encode(iface.inputs, v);
}
PackedVal encode_output(const Interface& iface, const Valuation& v) {
  return encode(iface.outputs, v);
}
Valuation decode_input(const Interface& iface, const PackedVal& v) {
  return decode(iface.inputs, v);
}
Valuation decode_output(const Interface& iface, const PackedVal& v) {
  return decode(iface.outputs, v);
}

}  // namespace opwire
