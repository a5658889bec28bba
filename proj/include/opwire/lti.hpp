#pragma once

#include <map>
#include <string>
#include <vector>

#include "opwire/diagram.hpp"
#include "opwire/matrix.hpp"

namespace opwire {

/// Discrete-time LTI state-space system x+ = Ax + Bu, y = Cx + Du over a
/// real-typed interface. Multi-port interfaces pack into single input/output
/// vectors in declared port order; vector ports occupy contiguous blocks.
/// n = 0 encodes a static gain y = Du.
struct LtiSystem {
  Interface iface;
  int n = 0;  // state dimension
  Matrix A;   // n x n
  Matrix B;   // n x m
  Matrix C;   // p x n
  Matrix D;   // p x m

  bool operator==(const LtiSystem&) const = default;
};

/// Verifies dimension consistency against the interface; throws on failure.
void check_lti(const LtiSystem& s);

/// Default pivot tolerance below which an instantaneous loop is rejected.
inline constexpr double kDefaultPivotTol = 1e-10;

/// Functorial action of a wiring diagram on LTI systems. Stacks the
/// components block-diagonally, builds selection matrices E_y (inner inputs
/// from inner outputs), E_v (inner inputs from outer inputs) and F (outer
/// outputs from inner outputs) out of the wiring, and closes the
/// instantaneous loop through M = (I - E_y D)^-1:
///   A' = A + B M E_y C,  B' = B M E_v,
///   C' = F (C + D M E_y C),  D' = F D M E_v.
/// Throws IllPosedLoop when a pivot of (I - E_y D) falls below `eps`.
LtiSystem apply_lti(const WiringDiagram& d,
                    const std::map<std::string, LtiSystem>& assign,
                    double eps = kDefaultPivotTol);

/// Iterates x+ = Ax + Bu, y = Cx + Du; the output sequence aligns with the
/// inputs. x0 must have dimension n, each input dimension m.
std::vector<std::vector<double>> simulate_lti(const LtiSystem& s,
                                              const std::vector<double>& x0,
                                              const std::vector<std::vector<double>>& inputs);

/// [D, CB, CAB, ..., C A^(count-2) B].
std::vector<Matrix> markov_parameters(const LtiSystem& s, int count);

/// Input/output equivalence: Markov parameters up to index n1+n2+1 agree
/// entrywise within tol (sufficient by Cayley-Hamilton).
bool lti_equivalent(const LtiSystem& s1, const LtiSystem& s2, double tol);

}  // namespace opwire
