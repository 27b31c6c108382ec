#include <doctest.h>

#include "apx/circuit.hpp"
#include "apx/config.hpp"
#include "apx/knf.hpp"
#include "apx/prng.hpp"

using namespace apx;

namespace {

Circuit and2() {
    CircuitBuilder b(2);
    uint32_t x1 = b.add_input(1), x2 = b.add_input(2);
    uint32_t g = b.add_gate(GateOp::And, {x1, x2});
    return std::move(b).build({g});
}

Circuit random_circuit(Prng& rng, uint32_t n, std::size_t extra) {
    CircuitBuilder b(n);
    std::vector<uint32_t> pool;
    for (uint32_t i = 1; i <= n; ++i) pool.push_back(b.add_input(i));
    for (std::size_t g = 0; g < extra; ++g) {
        const uint32_t a1 = pool[rng.below(pool.size())];
        const uint32_t a2 = pool[rng.below(pool.size())];
        switch (rng.below(4)) {
            case 0: pool.push_back(b.add_gate(GateOp::And, {a1, a2})); break;
            case 1: pool.push_back(b.add_gate(GateOp::Or, {a1, a2})); break;
            case 2: pool.push_back(b.add_gate(GateOp::Xor, {a1, a2})); break;
            default: pool.push_back(b.add_not(a1)); break;
        }
    }
    return std::move(b).build({pool.back()});
}

} // namespace

TEST_CASE("evaluation basics") {
    CHECK(Circuit::true_circuit(3).eval1(bits_from_string("101")));
    CHECK_FALSE(Circuit::parity(3).eval1(bits_from_string("110")));
    // 4 encoded with the rightmost bit most significant: 001.
    Circuit lt5 = Circuit::threshold_less_than(3, 5);
    CHECK(lt5.eval1(index_to_bits(4, 3)));
    CHECK_FALSE(lt5.eval1(index_to_bits(5, 3)));
    CHECK_THROWS(Circuit::parity(3).eval(bits_from_string("01")));
}

TEST_CASE("threshold circuits count exactly") {
    for (uint32_t n = 0; n <= 6; ++n) {
        for (uint64_t t = 0; t <= (uint64_t{1} << n); ++t) {
            Circuit c = Circuit::threshold_less_than(n, t);
            uint64_t hits = 0;
            for (uint64_t v = 0; v < (uint64_t{1} << n); ++v)
                hits += c.eval1(index_to_bits(v, n));
            CHECK(hits == t);
        }
    }
    CHECK(Circuit::function_equal(Circuit::threshold_less_than(3, 8), Circuit::true_circuit(3)));
}

TEST_CASE("fix_last agrees with appending the bit") {
    // parity_2 with the last bit fixed to 1 computes NOT x1.
    Circuit p2 = Circuit::parity(2).fix_last(1);
    CHECK(p2.eval1(bits_from_string("0")));
    CHECK_FALSE(p2.eval1(bits_from_string("1")));
    CHECK(Circuit::function_equal(Circuit::null_circuit(4).fix_last(0), Circuit::null_circuit(3)));
    CHECK(Circuit::function_equal(and2().fix_last(1), Circuit::input_bit(1, 1)));
    CHECK_THROWS(Circuit::true_circuit(0).fix_last(0));

    Prng rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        const uint32_t n = 2 + static_cast<uint32_t>(rng.below(8));
        Circuit c = random_circuit(rng, n, 8);
        for (int bit : {0, 1}) {
            Circuit fixed = c.fix_last(bit);
            for (uint64_t v = 0; v < (uint64_t{1} << (n - 1)); ++v) {
                Bits x = index_to_bits(v, n - 1);
                Bits full = x;
                full.push_back(static_cast<uint8_t>(bit));
                CHECK(fixed.eval1(x) == c.eval1(full));
            }
        }
    }
}

TEST_CASE("fix_suffix iterates fix_last") {
    Circuit c = Circuit::parity(3);
    CHECK(c.fix_suffix({}) == c);
    Circuit fixed = c.fix_suffix(bits_from_string("11"));
    CHECK(Circuit::function_equal(fixed, Circuit::input_bit(1, 1)));
    // Fixing the most significant bit of x < 5 to 1 leaves x' < 1 on 2 bits.
    Circuit lt = Circuit::threshold_less_than(3, 5).fix_suffix(bits_from_string("1"));
    CHECK(Circuit::function_equal(lt, Circuit::threshold_less_than(2, 1)));
    CHECK_THROWS(c.fix_suffix(bits_from_string("0000")));
}

TEST_CASE("syntactic constancy is purely structural") {
    for (uint32_t n : {0u, 1u, 5u, 64u}) {
        CHECK(Circuit::null_circuit(n).syntactically_constant() == 0);
        CHECK(Circuit::true_circuit(n).syntactically_constant() == 1);
    }
    // x1 and not x1: semantically 0 but the input path is alive.
    CircuitBuilder b(1);
    uint32_t x1 = b.add_input(1);
    uint32_t g = b.add_gate(GateOp::And, {x1, b.add_not(x1)});
    CHECK_FALSE(std::move(b).build({g}).syntactically_constant().has_value());
}

TEST_CASE("swap and permute relabel inputs") {
    // x1 and (not x2), swapped at position 1, computes (not x1) and x2.
    CircuitBuilder b(2);
    uint32_t x1 = b.add_input(1), x2 = b.add_input(2);
    uint32_t g = b.add_gate(GateOp::And, {x1, b.add_not(x2)});
    Circuit c = std::move(b).build({g});
    Circuit swapped = c.swap_adjacent(1);
    for (uint64_t v = 0; v < 4; ++v) {
        Bits x = index_to_bits(v, 2);
        CHECK(swapped.eval1(x) == (!x[0] && x[1]));
    }
    Circuit par = Circuit::parity(5);
    CHECK(Circuit::function_equal(par.permute({3, 1, 4, 5, 2}), par));
    CHECK(Circuit::function_equal(c.permute({1, 2}), c));

    Prng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const uint32_t n = 2 + static_cast<uint32_t>(rng.below(6));
        Circuit cc = random_circuit(rng, n, 6);
        std::vector<uint32_t> pi(n), sigma(n);
        for (uint32_t i = 0; i < n; ++i) pi[i] = sigma[i] = i + 1;
        for (uint32_t i = n; i > 1; --i) std::swap(pi[i - 1], pi[rng.below(i)]);
        for (uint32_t i = n; i > 1; --i) std::swap(sigma[i - 1], sigma[rng.below(i)]);
        std::vector<uint32_t> compose_ps(n);
        for (uint32_t i = 0; i < n; ++i) compose_ps[i] = pi[sigma[i] - 1];
        CHECK(Circuit::function_equal(cc.permute(compose_ps), cc.permute(sigma).permute(pi)));
    }
}

TEST_CASE("compose") {
    Circuit g = Circuit::parity(3);
    CHECK(Circuit::function_equal(Circuit::identity(1).compose(g), g));
    // Duplicating a 2-bit seed kills parity of the 4 copies.
    CircuitBuilder b(2);
    uint32_t u1 = b.add_input(1), u2 = b.add_input(2);
    Circuit dup = std::move(b).build({u1, u2, u1, u2});
    CHECK(Circuit::function_equal(Circuit::parity(4).compose(dup), Circuit::null_circuit(2)));
    Circuit lt = Circuit::threshold_less_than(3, 5);
    CHECK(Circuit::function_equal(lt.compose(Circuit::identity(3)), lt));
    CHECK_THROWS(Circuit::parity(3).compose(Circuit::identity(2)));
}

TEST_CASE("or_amplify") {
    Circuit c = Circuit::input_bit(1, 1);
    CHECK(Circuit::function_equal(c.or_amplify(1), c));
    CHECK(Circuit::function_equal(Circuit::null_circuit(2).or_amplify(3), Circuit::null_circuit(6)));
    CHECK_THROWS(c.or_amplify(0));
    // OR of two disjoint copies of the projection is OR_2.
    Circuit or2 = c.or_amplify(2);
    for (uint64_t v = 0; v < 4; ++v) {
        Bits x = index_to_bits(v, 2);
        CHECK(or2.eval1(x) == (x[0] || x[1]));
    }
    Prng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const uint32_t n = 1 + static_cast<uint32_t>(rng.below(3));
        const std::size_t k = 1 + rng.below(static_cast<uint64_t>(12 / n));
        Circuit base = random_circuit(rng, n, 4);
        Circuit amp = base.or_amplify(k);
        for (uint64_t v = 0; v < (uint64_t{1} << (n * k)); ++v) {
            Bits x = index_to_bits(v, n * static_cast<uint32_t>(k));
            bool any = false;
            for (std::size_t i = 0; i < k && !any; ++i)
                any = base.eval1(Bits(x.begin() + static_cast<std::ptrdiff_t>(i * n),
                                      x.begin() + static_cast<std::ptrdiff_t>((i + 1) * n)));
            CHECK(amp.eval1(x) == any);
        }
    }
}

TEST_CASE("parity tester, indicator, xor shift") {
    CHECK(Circuit::function_equal(Circuit::parity(4).parity_tester(), Circuit::true_circuit(4)));
    Circuit id2 = Circuit::identity(2);
    Circuit eq10 = id2.indicator_eq(bits_from_string("10"));
    for (uint64_t v = 0; v < 4; ++v) {
        Bits x = index_to_bits(v, 2);
        CHECK(eq10.eval1(x) == (x[0] == 1 && x[1] == 0));
    }
    Prng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const uint32_t n = 2 + static_cast<uint32_t>(rng.below(6));
        Circuit c = random_circuit(rng, n, 5);
        CHECK(Circuit::function_equal(c.xor_shift(Bits(n, 0)), c));
        Bits shift = rng.bits(n);
        Circuit shifted = c.xor_shift(shift);
        for (uint64_t v = 0; v < (uint64_t{1} << n); ++v) {
            Bits r = index_to_bits(v, n);
            CHECK(shifted.eval1(r) == c.eval1(xor_bits(shift, r)));
        }
    }
}

TEST_CASE("serialization round trips") {
    Prng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const uint32_t n = 1 + static_cast<uint32_t>(rng.below(7));
        Circuit c = random_circuit(rng, n, 6);
        CHECK(Circuit::from_json(c.to_json()) == c);
        CHECK(Circuit::unpack(c.pack()) == c);
    }
    // Constant predictors stay tiny under the bit-level encoding.
    CHECK(Circuit::constant(7, 0).description_bits() <= 16);
}

TEST_CASE("knf restriction simplification") {
    Knf f;
    f.connective = Connective::Cnf;
    f.clauses.push_back(KnfClause{{1, 2}, {}});
    Restriction rho(3);
    rho.set(1, 1);
    CHECK(knf_apply_restriction(f, rho).trivialized == 1);

    Knf g;
    g.connective = Connective::Dnf;
    g.clauses.push_back(KnfClause{{1, 2}, {}});
    Restriction rho2(2);
    rho2.set(1, 0);
    CHECK(knf_apply_restriction(g, rho2).trivialized == 0);

    Knf h;
    h.connective = Connective::Cnf;
    h.clauses.push_back(KnfClause{{1, 2}, {}});
    h.clauses.push_back(KnfClause{{3}, {}});
    Restriction rho3(3);
    rho3.set(3, 1);
    KnfSimplification simp = knf_apply_restriction(h, rho3);
    CHECK_FALSE(simp.trivialized.has_value());
    CHECK(simp.live_vars == std::set<uint32_t>{1, 2});
}

TEST_CASE("knf restriction agrees with circuit evaluation") {
    Prng rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        const uint32_t n = 3 + static_cast<uint32_t>(rng.below(6));
        Knf f;
        f.connective = rng.bit() ? Connective::Cnf : Connective::Dnf;
        const std::size_t clauses = 1 + rng.below(5);
        for (std::size_t ci = 0; ci < clauses; ++ci) {
            KnfClause cl;
            const std::size_t w = 1 + rng.below(3);
            for (std::size_t j = 0; j < w; ++j) {
                uint32_t v = 1 + static_cast<uint32_t>(rng.below(n));
                if (cl.pos.count(v) || cl.neg.count(v)) continue;
                (rng.bit() ? cl.pos : cl.neg).insert(v);
            }
            if (cl.width() > 0) f.clauses.push_back(std::move(cl));
        }
        if (f.clauses.empty()) continue;
        Restriction rho(n);
        for (uint32_t v = 1; v <= n; ++v)
            if (rng.below(3) == 0) rho.set(v, static_cast<int>(rng.bit()));
        KnfSimplification simp = knf_apply_restriction(f, rho);
        Circuit circ = f.to_circuit(n);
        const auto free_vars = rho.free_vars();
        for (uint64_t a = 0; a < (uint64_t{1} << free_vars.size()); ++a) {
            Bits free_bits(free_vars.size());
            for (std::size_t j = 0; j < free_vars.size(); ++j) free_bits[j] = (a >> j) & 1;
            Bits x = rho.complete(free_bits);
            const bool val = circ.eval1(x);
            if (simp.trivialized) {
                CHECK(val == (*simp.trivialized == 1));
            } else {
                CHECK(val == simp.simplified.to_circuit(n).eval1(x));
            }
        }
        if (!simp.trivialized) {
            for (uint32_t v : simp.live_vars) CHECK_FALSE(rho.is_set(v));
        }
    }
}

TEST_CASE("layered circuits evaluate like their flattened form") {
    LayeredAC0 c;
    c.num_inputs = 4;
    c.first_layer_and = false;  // OR layer below an AND output: a CNF
    c.layers.resize(2);
    c.layers[0].push_back(LayeredGate{{1, -2}});
    c.layers[0].push_back(LayeredGate{{3, 4}});
    c.layers[1].push_back(LayeredGate{{0, 1}});
    Circuit flat = c.to_circuit();
    for (uint64_t v = 0; v < 16; ++v) {
        Bits x = index_to_bits(v, 4);
        const bool expect = (x[0] || !x[1]) && (x[2] || x[3]);
        CHECK(flat.eval1(x) == expect);
    }
    Knf f = c.layer2_gate_as_knf(0);
    CHECK(f.connective == Connective::Cnf);
    CHECK(f.clauses.size() == 2);
    CHECK(LayeredAC0::from_json(c.to_json()).to_circuit().num_inputs() == 4);
}
