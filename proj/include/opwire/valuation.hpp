#pragma once

#include <map>
#include <string>
#include <vector>

#include "opwire/types.hpp"

namespace opwire {

/// Label assignment per port name, the human-facing form of a port valuation.
using Valuation = std::map<std::string, std::string>;

/// Packed valuation: one label index per port, in interface port order.
using PackedVal = std::vector<int>;

/// Default ceiling for exhaustive enumerations (traces, contract pullbacks).
inline constexpr long long kDefaultEnumCap = 1'000'000;

/// Label counts per input/output port. Throws NonFiniteType on non-finite ports.
std::vector<int> input_radices(const Interface& iface);
std::vector<int> output_radices(const Interface& iface);

/// Mixed-radix packing with the FIRST digit most significant, so numeric
/// order of packed indices equals lexicographic order of digit vectors.
long long pack_digits(const std::vector<int>& digits, const std::vector<int>& radices);
std::vector<int> unpack_digits(long long index, const std::vector<int>& radices);

/// Product of radices; throws ExplosionGuard when it exceeds `cap`.
long long count_guarded(const std::vector<int>& radices, long long cap,
                        const std::string& what);

/// Label-form <-> packed-form conversions (throw PartialInput on missing
/// ports, extra ports, or unknown labels).
PackedVal encode_input(const Interface& iface, const Valuation& v);
PackedVal encode_output(const Interface& iface, const Valuation& v);
Valuation decode_input(const Interface& iface, const PackedVal& v);
Valuation decode_output(const Interface& iface, const PackedVal& v);

}  // namespace opwire
