#include "doctest.h"

#include "opwire/contract.hpp"
#include "support/generators.hpp"
#include "support/machines.hpp"
#include "support/oracles.hpp"
#include "support/uav.hpp"

using namespace opwire;
using namespace opwire::testing;

namespace {

Interface bit_io(const std::string& in, const std::string& out) {
  return Interface{{{in, bit_type()}}, {{out, bit_type()}}};
}

WiringDiagram series_two(const Interface& first, const Interface& second,
                         const Interface& outer) {
  WiringDiagram d;
  d.outer = outer;
  d.inner = {{"f", first}, {"g", second}};
  d.phi_in[{"f", first.inputs[0].name}] = Supplier::outer(outer.inputs[0].name);
  d.phi_in[{"g", second.inputs[0].name}] = Supplier::inner("f", first.outputs[0].name);
  d.phi_out[outer.outputs[0].name] = {"g", second.outputs[0].name};
  return d;
}

}  // namespace

TEST_SUITE("contract") {

TEST_CASE("series composition of two bit relations") {
  const Interface io = bit_io("u", "y");
  const WiringDiagram d = series_two(io, io, io);
  Contract r1;  // identity relation
  r1.iface = io;
  r1.pairs = {{{0}, {0}}, {{1}, {1}}};
  Contract r2;  // negation relation
  r2.iface = io;
  r2.pairs = {{{0}, {1}}, {{1}, {0}}};
  const Contract c = compose_contracts(d, {{"f", r1}, {"g", r2}});
  CHECK(c.pairs == decltype(c.pairs){{{0}, {1}}, {{1}, {0}}});
}

TEST_CASE("identity wiring leaves a contract unchanged") {
  Rng rng(8001);
  for (int it = 0; it < 20; ++it) {
    const Interface iface = rand_iface(rng, bit_type(), 2, 2, 0, 1);
    const Contract r = rand_contract(rng, iface, 0.6);
    const WiringDiagram d = identity_wiring(iface, "b");
    const Contract c = compose_contracts(d, {{"b", r}});
    CHECK(c.pairs == r.pairs);
  }
}

TEST_CASE("an empty component contract empties the composite") {
  const Interface io = bit_io("u", "y");
  const WiringDiagram d = series_two(io, io, io);
  Contract empty;
  empty.iface = io;
  const Contract c = compose_contracts(d, {{"f", full_contract(io)}, {"g", empty}});
  CHECK(c.pairs.empty());
}

TEST_CASE("contracts on a tensor compose to the product relation") {
  Rng rng(8002);
  for (int it = 0; it < 15; ++it) {
    const WiringDiagram f = rand_diagram(rng, bit_type(), 2, 2);
    const WiringDiagram g = rand_diagram(rng, bit_type(), 2, 2);
    std::map<std::string, Contract> fa, ga;
    for (const auto& b : f.inner) fa[b.id] = rand_contract(rng, b.iface, 0.7);
    for (const auto& b : g.inner) ga[b.id] = rand_contract(rng, b.iface, 0.7);
    const WiringDiagram t = tensor(f, g);
    std::map<std::string, Contract> ta = fa;
    {
      size_t gi = 0;
      for (size_t bi = f.inner.size(); bi < t.inner.size(); ++bi, ++gi) {
        ta[t.inner[bi].id] = ga.at(g.inner[gi].id);
      }
    }
    const Contract cf = compose_contracts(f, fa);
    const Contract cg = compose_contracts(g, ga);
    const Contract ct = compose_contracts(t, ta);

    std::set<std::pair<PackedVal, PackedVal>> expect;
    for (const auto& [i1, o1] : cf.pairs) {
      for (const auto& [i2, o2] : cg.pairs) {
        PackedVal i = i1, o = o1;
        i.insert(i.end(), i2.begin(), i2.end());
        o.insert(o.end(), o2.begin(), o2.end());
        expect.insert({i, o});
      }
    }
    CHECK(ct.pairs == expect);
  }
}

TEST_CASE("compose_contracts agrees with the label-level enumerator") {
  Rng rng(8003);
  for (int it = 0; it < 100; ++it) {
    const WiringDiagram d = rand_diagram(rng, bit_type(), 3, 2);
    std::map<std::string, Contract> assign;
    for (const auto& b : d.inner) assign[b.id] = rand_contract(rng, b.iface, 0.55);
    const Contract got = compose_contracts(d, assign);

    std::set<LabelPair> got_labels = contract_pairs_as_labels(got);
    CHECK(got_labels == enumerate_composite_contract(d, assign));
  }
}

TEST_CASE("composition is monotone in each component contract") {
  Rng rng(8004);
  for (int it = 0; it < 30; ++it) {
    const WiringDiagram d = rand_diagram(rng, bit_type(), 3, 2);
    std::map<std::string, Contract> small, large;
    for (const auto& b : d.inner) {
      small[b.id] = rand_contract(rng, b.iface, 0.4);
      Contract bigger = small[b.id];
      for (const auto& pair : full_contract(b.iface).pairs) {
        if (rng.chance(0.3)) bigger.pairs.insert(pair);
      }
      large[b.id] = std::move(bigger);
    }
    const Contract cs = compose_contracts(d, small);
    const Contract cl = compose_contracts(d, large);
    for (const auto& pair : cs.pairs) CHECK(cl.pairs.count(pair) == 1);
  }
}

TEST_CASE("explosion guard on contract composition") {
  // 6 boxes x 2 output bits each with 4 outer input bits: 2^16 witnesses
  Rng rng(8005);
  WiringDiagram d;
  d.outer.inputs = {{"u0", bit_type()}, {"u1", bit_type()}, {"u2", bit_type()},
                    {"u3", bit_type()}};
  d.outer.outputs = {{"y", bit_type()}};
  for (int b = 0; b < 6; ++b) {
    Interface iface;
    iface.inputs = {{"i", bit_type()}};
    iface.outputs = {{"o0", bit_type()}, {"o1", bit_type()}};
    d.inner.push_back({"x" + std::to_string(b), iface});
    d.phi_in[{d.inner.back().id, "i"}] = Supplier::outer("u0");
  }
  d.phi_out["y"] = {"x0", "o0"};
  std::map<std::string, Contract> assign;
  for (const auto& b : d.inner) assign[b.id] = full_contract(b.iface);
  CHECK_THROWS_AS(compose_contracts(d, assign, 1000), Error);
  CHECK_NOTHROW(compose_contracts(d, assign, 1 << 20));
}

TEST_CASE("satisfies: vacuous, violated, and empty contracts") {
  const MooreMachine m = delay_machine(0);
  SUBCASE("full relation is vacuously satisfied") {
    CHECK(satisfies(m, full_contract(m.iface), 4).ok);
  }
  SUBCASE("output-equals-input fails with the least counterexample") {
    Contract eq;
    eq.iface = m.iface;
    eq.pairs = {{{0}, {0}}, {{1}, {1}}};
    const SatisfactionResult res = satisfies(m, eq, 1);
    REQUIRE_FALSE(res.ok);
    CHECK(res.t == 0);
    CHECK(res.counterexample == std::vector<PackedVal>{{1}});
  }
  SUBCASE("empty contract fails at t=0 with the all-least sequence") {
    Contract empty;
    empty.iface = m.iface;
    const SatisfactionResult res = satisfies(m, empty, 3);
    REQUIRE_FALSE(res.ok);
    CHECK(res.t == 0);
    CHECK(res.counterexample == std::vector<PackedVal>{{0}, {0}, {0}});
  }
  SUBCASE("h=0 always holds") {
    Contract empty;
    empty.iface = m.iface;
    CHECK(satisfies(m, empty, 0).ok);
  }
}

TEST_CASE("satisfies agrees with brute-force enumeration") {
  Rng rng(8006);
  for (int it = 0; it < 40; ++it) {
    const Interface iface = rand_iface(rng, bit_type(), 1, 1, 1, 1);
    const MooreMachine m = rand_moore(rng, iface, 2);
    const Contract r = rand_contract(rng, iface, 0.7);
    const int h = rng.i(1, 3);
    const SatisfactionResult got = satisfies(m, r, h);

    // brute force in lexicographic order
    const auto in_r = input_radices(iface);
    long long alphabet = 1;
    for (int rr : in_r) alphabet *= rr;
    std::vector<int> seq_radices(h, static_cast<int>(alphabet));
    long long total = 1;
    for (int t = 0; t < h; ++t) total *= alphabet;
    bool want_ok = true;
    std::vector<PackedVal> want_cex;
    int want_t = -1;
    for (long long idx = 0; idx < total && want_ok; ++idx) {
      const auto flat = unpack_digits(idx, seq_radices);
      std::vector<PackedVal> ins;
      for (int a : flat) ins.push_back(unpack_digits(a, in_r));
      const Trace tr = simulate_packed(m, ins);
      for (int t = 0; t < h; ++t) {
        if (!r.pairs.count({tr.inputs[t], tr.outputs[t]})) {
          want_ok = false;
          want_cex = tr.inputs;
          want_t = t;
          break;
        }
      }
    }
    CHECK(got.ok == want_ok);
    if (!want_ok) {
      CHECK(got.counterexample == want_cex);
      CHECK(got.t == want_t);
    }
  }
}

TEST_CASE("satisfies is monotone in the contract and antitone in the horizon") {
  Rng rng(8007);
  for (int it = 0; it < 30; ++it) {
    const Interface iface = rand_iface(rng, bit_type(), 1, 1, 1, 1);
    const MooreMachine m = rand_moore(rng, iface, 2);
    const Contract r = rand_contract(rng, iface, 0.8);
    Contract bigger = r;
    for (const auto& pair : full_contract(iface).pairs) {
      if (rng.chance(0.5)) bigger.pairs.insert(pair);
    }
    const int h = rng.i(1, 4);
    if (satisfies(m, r, h).ok) {
      CHECK(satisfies(m, bigger, h).ok);
      for (int h2 = 0; h2 <= h; ++h2) CHECK(satisfies(m, r, h2).ok);
    }
  }
}

TEST_CASE("alpha: horizon zero, delay at h=1, and the brute-force oracle") {
  SUBCASE("h=0 is the singleton empty-trace contract") {
    const TraceContract tc = alpha(delay_machine(0), 0);
    REQUIRE(tc.pairs.size() == 1);
    CHECK(tc.pairs.begin()->first.empty());
  }
  SUBCASE("delay at h=1 answers its initial readout to both inputs") {
    const TraceContract tc = alpha(delay_machine(1), 1);
    decltype(tc.pairs) want;
    want.insert({{{0}}, {{1}}});
    want.insert({{{1}}, {{1}}});
    CHECK(tc.pairs == want);
  }
  SUBCASE("alpha equals the trace enumeration on random machines") {
    Rng rng(8008);
    for (int it = 0; it < 20; ++it) {
      const Interface iface = rand_iface(rng, bit_type(), 1, 1, 1, 1);
      const MooreMachine m = rand_moore(rng, iface, 2);
      const int h = rng.i(0, 3);
      const TraceContract tc = alpha(m, h);
      CHECK(tc.horizon == h);
      std::set<std::pair<std::vector<PackedVal>, std::vector<PackedVal>>> want;
      for (const Trace& tr : traces(m, h)) want.insert({tr.inputs, tr.outputs});
      CHECK(tc.pairs == want);
    }
  }
}

TEST_CASE("alpha prefix restriction equals alpha at the shorter horizon") {
  Rng rng(8009);
  for (int it = 0; it < 20; ++it) {
    const Interface iface = rand_iface(rng, bit_type(), 1, 1, 1, 1);
    const MooreMachine m = rand_moore(rng, iface, 3);
    const int h = rng.i(1, 4);
    const TraceContract at_h = alpha(m, h);
    const TraceContract at_h1 = alpha(m, h - 1);
    decltype(at_h.pairs) prefixes;
    for (auto [in, out] : at_h.pairs) {
      in.resize(h - 1);
      out.resize(h - 1);
      prefixes.insert({in, out});
    }
    CHECK(prefixes == at_h1.pairs);
  }
}

TEST_CASE("compose_trace_contracts: identity, h=1 reduction, series") {
  Rng rng(8010);
  SUBCASE("identity wiring is neutral") {
    for (int it = 0; it < 10; ++it) {
      const Interface iface = rand_iface(rng, bit_type(), 1, 1, 1, 1);
      const MooreMachine m = rand_moore(rng, iface, 2);
      const TraceContract tc = alpha(m, 2);
      const WiringDiagram d = identity_wiring(iface, "b");
      CHECK(compose_trace_contracts(d, {{"b", tc}}).pairs == tc.pairs);
    }
  }
  SUBCASE("h=1 reduces to single-step composition") {
    for (int it = 0; it < 15; ++it) {
      const WiringDiagram d = rand_diagram(rng, bit_type(), 3, 2);
      std::map<std::string, Contract> step_assign;
      std::map<std::string, TraceContract> tr_assign;
      for (const auto& b : d.inner) {
        const Contract c = rand_contract(rng, b.iface, 0.6);
        step_assign[b.id] = c;
        TraceContract tc;
        tc.iface = b.iface;
        tc.horizon = 1;
        for (const auto& [in, out] : c.pairs) tc.pairs.insert({{in}, {out}});
        tr_assign[b.id] = std::move(tc);
      }
      const Contract step = compose_contracts(d, step_assign);
      const TraceContract traced = compose_trace_contracts(d, tr_assign);
      decltype(step.pairs) from_traced;
      for (const auto& [in, out] : traced.pairs) from_traced.insert({in[0], out[0]});
      CHECK(from_traced == step.pairs);
      CHECK(traced.pairs.size() == step.pairs.size());
    }
  }
  SUBCASE("series of two machine trace contracts equals the composite's") {
    const Interface io = bit_io("u", "y");
    const WiringDiagram d = series_two(io, io, io);
    const MooreMachine m1 = delay_machine(0);
    const MooreMachine m2 = delay_machine(1);
    const int h = 3;
    const TraceContract composed =
        compose_trace_contracts(d, {{"f", alpha(m1, h)}, {"g", alpha(m2, h)}});
    const MooreMachine big = apply_moore(d, {{"f", m1}, {"g", m2}});
    CHECK(composed.pairs == alpha(big, h).pairs);
  }
  SUBCASE("horizon mismatch is rejected") {
    const Interface io = bit_io("u", "y");
    const WiringDiagram d = series_two(io, io, io);
    CHECK_THROWS_AS(compose_trace_contracts(
                        d, {{"f", alpha(delay_machine(0), 1)},
                            {"g", alpha(delay_machine(0), 2)}}),
                    Error);
  }
}

TEST_CASE("naturality: identity, series of delays, and the guard") {
  SUBCASE("identity wiring commutes trivially") {
    const MooreMachine m = delay_machine(0);
    const WiringDiagram d = identity_wiring(m.iface, "b");
    const NaturalityResult res = check_naturality(d, {{"b", m}}, 3);
    CHECK(res.ok);
    CHECK(res.trace_count == 8);
  }
  SUBCASE("two-box series of delays at h=2") {
    const Interface io = bit_io("u", "y");
    const WiringDiagram d = series_two(io, io, io);
    const NaturalityResult res =
        check_naturality(d, {{"f", delay_machine(0)}, {"g", delay_machine(0)}}, 2);
    CHECK(res.ok);
    CHECK(res.trace_count == 4);
    CHECK(res.only_behavior.empty());
    CHECK(res.only_contract.empty());
  }
}

TEST_CASE("naturality on the three-box loop with 2-state machines, h=2") {
  const WiringDiagram d = uav_bit_diagram();
  Rng rng(8012);
  for (int it = 0; it < 10; ++it) {
    std::map<std::string, MooreMachine> assign;
    for (const auto& b : d.inner) assign[b.id] = rand_moore(rng, b.iface, 2);
    const NaturalityResult res = check_naturality(d, assign, 2);
    CHECK(res.ok);
    CHECK(res.only_behavior.empty());
    CHECK(res.only_contract.empty());
    CHECK(res.trace_count == 16);  // (e,d) in 4 symbols, squared
  }
}

TEST_CASE("naturality holds across random deterministic assignments") {
  Rng rng(8011);
  for (int it = 0; it < 60; ++it) {
    // one output port per box keeps the h=3 witness space within the cap
    const WiringDiagram d = rand_diagram(rng, bit_type(), 3, 2, 1);
    std::map<std::string, MooreMachine> assign;
    for (const auto& b : d.inner) assign[b.id] = rand_moore(rng, b.iface, 2);
    const int h = rng.i(1, 3);
    const NaturalityResult res = check_naturality(d, assign, h);
    CHECK(res.ok);
  }
}

TEST_CASE("a non-reachable-trace contract breaks the square visibly") {
  // Sanity that the discrepancy report can fire: feed the contract leg a
  // trace contract larger than alpha would produce.
  const Interface io = bit_io("u", "y");
  const WiringDiagram d = identity_wiring(io, "b");
  const MooreMachine m = delay_machine(0);
  TraceContract padded = alpha(m, 1);
  padded.pairs.insert({{{0}}, {{1}}});  // impossible first output
  const TraceContract composed = compose_trace_contracts(d, {{"b", padded}});
  CHECK(composed.pairs.size() == 3);
}

}  // TEST_SUITE
