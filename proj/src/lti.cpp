#include "opwire/lti.hpp"

#include <cmath>

namespace opwire {

void check_lti(const LtiSystem& s) {
  if (!s.iface.all_real()) {
    throw Error(ErrorCode::NonRealType, "LTI system needs real-typed ports");
  }
  const int m = s.iface.total_input_dim();
  const int p = s.iface.total_output_dim();
  if (s.n < 0) {
    throw Error(ErrorCode::DimensionMismatch, "state dimension must be >= 0");
  }
  auto expect = [](const Matrix& mat, int r, int c, const char* name) {
    if (mat.rows != r || mat.cols != c) {
      throw Error(ErrorCode::DimensionMismatch,
                  std::string(name) + " must be " + std::to_string(r) + "x" +
                      std::to_string(c) + ", got " + std::to_string(mat.rows) + "x" +
                      std::to_string(mat.cols));
    }
    if (!mat.all_finite()) {
      throw Error(ErrorCode::ValidationError, std::string(name) + " has non-finite entries");
    }
  };
  expect(s.A, s.n, s.n, "A");
  expect(s.B, s.n, m, "B");
  expect(s.C, p, s.n, "C");
  expect(s.D, p, m, "D");
}

namespace {

struct Packing {
  // Scalar offset of each (box index, input port index) / (box, output port).
  std::vector<std::vector<int>> in_off;
  std::vector<std::vector<int>> out_off;
  int total_in = 0;
  int total_out = 0;
};

Packing pack_ports(const WiringDiagram& d) {
  Packing p;
  p.in_off.resize(d.inner.size());
  p.out_off.resize(d.inner.size());
  for (size_t i = 0; i < d.inner.size(); ++i) {
    for (const auto& port : d.inner[i].iface.inputs) {
      p.in_off[i].push_back(p.total_in);
      p.total_in += port.type.scalar_width();
    }
    for (const auto& port : d.inner[i].iface.outputs) {
      p.out_off[i].push_back(p.total_out);
      p.total_out += port.type.scalar_width();
    }
  }
  return p;
}

}  // namespace

LtiSystem apply_lti(const WiringDiagram& d,
                    const std::map<std::string, LtiSystem>& assign, double eps) {
  ValidationReport rep = validate(d);
  if (!rep.ok()) {
    throw Error(ErrorCode::InvalidDiagram,
                "diagram does not validate: " + rep.violations.front().message +
                    " (" + rep.violations.front().where + ")");
  }
  if (!d.outer.all_real()) {
    throw Error(ErrorCode::NonRealType, "outer interface has finite-typed ports");
  }

  std::map<std::string, int> box_pos;
  std::vector<const LtiSystem*> sys(d.inner.size());
  int total_n = 0;
  for (size_t i = 0; i < d.inner.size(); ++i) {
    const BoxDecl& b = d.inner[i];
    box_pos[b.id] = static_cast<int>(i);
    auto it = assign.find(b.id);
    if (it == assign.end()) {
      throw Error(ErrorCode::MissingAssignment, "no system assigned to box '" + b.id + "'");
    }
    if (!(it->second.iface == b.iface)) {
      throw Error(ErrorCode::InterfaceMismatch,
                  "system interface does not match box '" + b.id + "'");
    }
    check_lti(it->second);
    sys[i] = &it->second;
    total_n += it->second.n;
  }

  const Packing pk = pack_ports(d);

  // Block-diagonal stacks in inner-box order.
  Matrix Ad(total_n, total_n), Bd(total_n, pk.total_in);
  Matrix Cd(pk.total_out, total_n), Dd(pk.total_out, pk.total_in);
  {
    int at_n = 0;
    for (size_t i = 0; i < d.inner.size(); ++i) {
      const LtiSystem& s = *sys[i];
      const int in0 = pk.in_off[i].empty() ? 0 : pk.in_off[i].front();
      const int out0 = pk.out_off[i].empty() ? 0 : pk.out_off[i].front();
      set_block(Ad, at_n, at_n, s.A);
      set_block(Bd, at_n, in0, s.B);
      set_block(Cd, out0, at_n, s.C);
      set_block(Dd, out0, in0, s.D);
      at_n += s.n;
    }
  }

  // Selection matrices from the wiring. Type equality makes the connected
  // blocks identity-shaped.
  Matrix Ey(pk.total_in, pk.total_out), Ev(pk.total_in, d.outer.total_input_dim());
  std::vector<int> outer_in_off;
  {
    int off = 0;
    for (const auto& port : d.outer.inputs) {
      outer_in_off.push_back(off);
      off += port.type.scalar_width();
    }
  }
  for (size_t i = 0; i < d.inner.size(); ++i) {
    const BoxDecl& b = d.inner[i];
    for (size_t p = 0; p < b.iface.inputs.size(); ++p) {
      const Supplier& s = d.phi_in.at({b.id, b.iface.inputs[p].name});
      const int width = b.iface.inputs[p].type.scalar_width();
      const int row0 = pk.in_off[i][p];
      if (s.is_outer()) {
        const int col0 = outer_in_off[d.outer.input_index(s.port)];
        for (int w = 0; w < width; ++w) Ev.at(row0 + w, col0 + w) = 1.0;
      } else {
        const int src_box = box_pos.at(s.box);
        const int src_port = d.find_box(s.box)->iface.output_index(s.port);
        const int col0 = pk.out_off[src_box][src_port];
        for (int w = 0; w < width; ++w) Ey.at(row0 + w, col0 + w) = 1.0;
      }
    }
  }
  Matrix F(d.outer.total_output_dim(), pk.total_out);
  {
    int row0 = 0;
    for (const auto& q : d.outer.outputs) {
      const PortRef& t = d.phi_out.at(q.name);
      const int src_box = box_pos.at(t.box);
      const int src_port = d.find_box(t.box)->iface.output_index(t.port);
      const int col0 = pk.out_off[src_box][src_port];
      const int width = q.type.scalar_width();
      for (int w = 0; w < width; ++w) F.at(row0 + w, col0 + w) = 1.0;
      row0 += width;
    }
  }

  // Close the instantaneous loop.
  InvertResult inv = invert(Matrix::identity(pk.total_in) - Ey * Dd, eps);
  if (!inv.ok) {
    throw Error(ErrorCode::IllPosedLoop,
                "instantaneous feedback loop is not well-posed (pivot " +
                    std::to_string(inv.failed_pivot) + " < " + std::to_string(eps) + ")");
  }
  const Matrix& M = inv.inverse;
  const Matrix MEyC = M * (Ey * Cd);
  const Matrix MEv = M * Ev;

  LtiSystem out;
  out.iface = d.outer;
  out.n = total_n;
  out.A = Ad + Bd * MEyC;
  out.B = Bd * MEv;
  out.C = F * (Cd + Dd * MEyC);
  out.D = F * (Dd * MEv);
  return out;
}

std::vector<std::vector<double>> simulate_lti(const LtiSystem& s,
                                              const std::vector<double>& x0,
                                              const std::vector<std::vector<double>>& inputs) {
  check_lti(s);
  const int m = s.iface.total_input_dim();
  if (static_cast<int>(x0.size()) != s.n) {
    throw Error(ErrorCode::DimensionMismatch, "x0 has wrong dimension");
  }
  Matrix x(s.n, 1, x0);
  std::vector<std::vector<double>> out;
  out.reserve(inputs.size());
  for (const auto& uv : inputs) {
    if (static_cast<int>(uv.size()) != m) {
      throw Error(ErrorCode::DimensionMismatch, "input vector has wrong dimension");
    }
    Matrix u(m, 1, uv);
    Matrix y = s.C * x + s.D * u;
    out.push_back(y.a);
    x = s.A * x + s.B * u;
  }
  return out;
}

std::vector<Matrix> markov_parameters(const LtiSystem& s, int count) {
  if (count < 1) {
    throw Error(ErrorCode::DimensionMismatch, "Markov parameter count must be >= 1");
  }
  std::vector<Matrix> out;
  out.reserve(count);
  out.push_back(s.D);
  Matrix power_b = s.B;  // A^i * B
  for (int i = 1; i < count; ++i) {
    out.push_back(s.C * power_b);
    if (i + 1 < count) power_b = s.A * power_b;
  }
  return out;
}

bool lti_equivalent(const LtiSystem& s1, const LtiSystem& s2, double tol) {
  if (!(s1.iface == s2.iface)) {
    throw Error(ErrorCode::InterfaceMismatch, "systems have different interfaces");
  }
  const int count = s1.n + s2.n + 1;
  const auto m1 = markov_parameters(s1, count);
  const auto m2 = markov_parameters(s2, count);
  for (int i = 0; i < count; ++i) {
    if (!approx_equal(m1[i], m2[i], tol)) return false;
  }
  return true;
}

}  // namespace opwire
