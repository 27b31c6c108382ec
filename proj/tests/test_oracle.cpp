#include <doctest.h>

#include <map>
#include <memory>

#include "apx/circuit.hpp"
#include "apx/oracle.hpp"
#include "apx/prng.hpp"

using namespace apx;

namespace {

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

// Answers 1/2 on everything; boundary-violating by construction.
class HalfOracle : public CountingOracle {
public:
    std::string name() const override { return "half"; }

protected:
    Rational answer(const Circuit&, Precision) override { return Rational(1, 2); }
};

FlatDistribution dist_of(std::initializer_list<const char*> rows) {
    FlatDistribution d;
    for (const char* r : rows) d.strings.push_back(bits_from_string(r));
    d.width = d.strings.front().size();
    return d;
}

} // namespace

TEST_CASE("exact counting on pinned examples") {
    CHECK(exact_count(Circuit::null_circuit(3)) == Rational(0));
    CHECK(exact_count(Circuit::parity(5)) == Rational(1, 2));
    CHECK(exact_count(Circuit::threshold_less_than(3, 5)) == Rational(5, 8));
}

TEST_CASE("exact oracle identities") {
    Prng rng(41);
    ExactOracle oracle;
    const Precision prec{100};
    for (int trial = 0; trial < 30; ++trial) {
        const uint32_t n = 1 + static_cast<uint32_t>(rng.below(10));
        Circuit c = random_circuit(rng, n, 8);
        // Local consistency at zero slack.
        CHECK(oracle.query(c, prec) ==
              (oracle.query(c.fix_last(0), prec) + oracle.query(c.fix_last(1), prec)) / 2);
        // Complementation.
        CHECK(oracle.query(c, prec) + oracle.query(c.negate(), prec) == Rational(1));
        // Permutational symmetry.
        std::vector<uint32_t> pi(n);
        for (uint32_t i = 0; i < n; ++i) pi[i] = i + 1;
        for (uint32_t i = n; i > 1; --i) std::swap(pi[i - 1], pi[rng.below(i)]);
        CHECK(oracle.query(c.permute(pi), prec) == oracle.query(c, prec));
        // Monotonicity against a pointwise-dominating circuit (c OR other).
        Circuit other = random_circuit(rng, n, 4);
        CircuitBuilder b(n);
        std::vector<uint32_t> ins(n);
        for (uint32_t i = 1; i <= n; ++i) ins[i - 1] = b.add_input(i);
        uint32_t oc = b.inline_circuit(c, ins)[0];
        uint32_t oo = b.inline_circuit(other, ins)[0];
        uint32_t out = b.add_or({oc, oo});
        Circuit dominating = std::move(b).build({out});
        REQUIRE(Circuit::pointwise_leq(c, dominating));
        CHECK(oracle.query(c, prec) <= oracle.query(dominating, prec));
        // Global consistency under a function-preserving rewrite (double negation).
        CHECK(oracle.query(c.negate().negate(), prec) == oracle.query(c, prec));
    }
}

TEST_CASE("existence: positive mass has an enumerable witness") {
    Prng rng(43);
    for (int trial = 0; trial < 20; ++trial) {
        const uint32_t n = 1 + static_cast<uint32_t>(rng.below(8));
        Circuit c = random_circuit(rng, n, 6);
        if (exact_count(c) > 0) {
            bool found = false;
            for (uint64_t v = 0; v < (uint64_t{1} << n) && !found; ++v)
                found = c.eval1(index_to_bits(v, n));
            CHECK(found);
        }
    }
}

TEST_CASE("dueling: subtree counts pin the root") {
    Prng rng(47);
    for (int trial = 0; trial < 10; ++trial) {
        const uint32_t n = 2 + static_cast<uint32_t>(rng.below(6));
        Circuit c = random_circuit(rng, n, 6);
        // P_i(x) = exact acceptance of c with suffix x fixed; exact halving.
        std::map<std::string, Rational> table;
        for (uint32_t i = 0; i <= n; ++i) {
            for (uint64_t v = 0; v < (uint64_t{1} << i); ++v) {
                Bits suffix = index_to_bits(v, i);
                table[std::to_string(i) + ":" + to_string(suffix)] = exact_count(c.fix_suffix(suffix));
            }
        }
        for (uint32_t i = 0; i < n; ++i) {
            for (uint64_t v = 0; v < (uint64_t{1} << i); ++v) {
                Bits suffix = index_to_bits(v, i);
                Bits s0 = suffix, s1 = suffix;
                s0.insert(s0.begin(), 0);
                s1.insert(s1.begin(), 1);
                Rational parent = table.at(std::to_string(i) + ":" + to_string(suffix));
                Rational left = table.at(std::to_string(i + 1) + ":" + to_string(s0));
                Rational right = table.at(std::to_string(i + 1) + ":" + to_string(s1));
                CHECK(parent == (left + right) / 2);
            }
        }
        CHECK(table.at("0:") == exact_count(c));
    }
}

TEST_CASE("sampling oracle") {
    const Precision prec10{10};
    CHECK(sample_count(Circuit::null_circuit(8), prec10, Rational(1, 100), 5) == Rational(0));
    CHECK(sample_count(Circuit::true_circuit(8), prec10, Rational(1, 100), 5) == Rational(1));
    Rational v = sample_count(Circuit::parity(8), Precision{20}, Rational(1, 100), 12345);
    CHECK((v - Rational(1, 2)).abs() <= Rational(1, 20));
}

TEST_CASE("sampling oracle stays within delta at the promised rate") {
    // gamma = 1/4 at delta = 1/8 over 300 seeded trials; allow 1.5x margin.
    const Rational gamma(1, 4);
    const Precision prec{8};
    Circuit c = Circuit::parity(6);
    const Rational truth = exact_count(c);
    int misses = 0;
    const int trials = 300;
    for (int t = 0; t < trials; ++t) {
        Rational v = sample_count(c, prec, gamma, 1000 + static_cast<uint64_t>(t));
        if ((v - truth).abs() > prec.delta()) ++misses;
    }
    CHECK(Rational(misses, trials) <= gamma * Rational(3, 2));
}

TEST_CASE("empirical counting") {
    FlatDistribution all2 = dist_of({"00", "01", "10", "11"});
    CHECK(empirical_count(Circuit::null_circuit(2), all2) == Rational(0));
    CircuitBuilder b(2);
    uint32_t g = b.add_gate(GateOp::And, {b.add_input(1), b.add_input(2)});
    CHECK(empirical_count(std::move(b).build({g}), all2) == Rational(1, 4));
    CHECK(empirical_count(Circuit::input_bit(2, 2), dist_of({"00", "00"})) == Rational(0));
    // Order invariance.
    FlatDistribution shuffled = dist_of({"11", "00", "10", "01"});
    Circuit c = Circuit::parity(2);
    CHECK(empirical_count(c, shuffled) == empirical_count(c, all2));
    // Prefix semantics: a 1-input circuit sees the first bit only.
    CHECK(empirical_count(Circuit::input_bit(1, 1), dist_of({"10", "11", "00"})) == Rational(2, 3));
    CHECK_THROWS(empirical_count(Circuit::parity(3), all2));
}

TEST_CASE("axiom checker") {
    // Exact oracle trace over a corpus, with children recorded: clean report.
    Prng rng(53);
    ExactOracle oracle;
    QueryTrace trace;
    oracle.attach_trace(&trace);
    for (int trial = 0; trial < 15; ++trial) {
        const uint32_t n = 1 + static_cast<uint32_t>(rng.below(8));
        Circuit c = random_circuit(rng, n, 6);
        for (uint64_t inv : {10, 100}) {
            oracle.query(c, Precision{inv});
            oracle.query(c.fix_last(0), Precision{inv});
            oracle.query(c.fix_last(1), Precision{inv});
        }
    }
    AxiomReport report = check_axioms(trace, Precision{1000});
    CHECK(report.ok());
    CHECK(report.checked_local_triples > 0);
    CHECK(report.checked_precision_pairs > 0);

    // An oracle answering 1/2 on a constant circuit violates the boundary.
    HalfOracle half;
    QueryTrace bad;
    half.attach_trace(&bad);
    half.query(Circuit::null_circuit(3), Precision{10});
    AxiomReport bad_report = check_axioms(bad, Precision{1000});
    REQUIRE_FALSE(bad_report.ok());
    CHECK(bad_report.violations[0].axiom == AxiomKind::Boundary);

    // Empirical traces always satisfy basic/boundary/precision.
    EmpiricalOracle emp(dist_of({"010", "011", "000"}));
    QueryTrace et;
    emp.attach_trace(&et);
    for (uint32_t w = 0; w <= 3; ++w) {
        Circuit c = w == 0 ? Circuit::true_circuit(0) : Circuit::parity(w);
        emp.query(c, Precision{7});
        emp.query(c, Precision{91});
    }
    AxiomReport er = check_axioms(et, Precision{1000});
    for (const AxiomViolation& v : er.violations) {
        CHECK(v.axiom == AxiomKind::LocalConsistency);
    }
}

TEST_CASE("local-violation descent") {
    ExactOracle exact;
    CHECK_FALSE(find_local_violation(exact, Circuit::parity(5), Precision{10}, Precision{100})
                    .has_value());

    HalfOracle half;
    auto v = find_local_violation(half, Circuit::null_circuit(4), Precision{10}, Precision{100});
    REQUIRE(v.has_value());
    CHECK(v->at_constant);
    CHECK(v->gap == Rational(1, 2));

    EmpiricalOracle emp(dist_of({"00", "00"}));
    auto v2 = find_local_violation(emp, Circuit::input_bit(2, 2), Precision{10}, Precision{100});
    REQUIRE(v2.has_value());
    CHECK_FALSE(v2->at_constant);
    CHECK(v2->gap == Rational(1, 2));
}

TEST_CASE("flat distribution text round trip") {
    FlatDistribution d = dist_of({"0101", "1111", "0101"});
    FlatDistribution back = FlatDistribution::from_text(d.to_text());
    CHECK(back.width == 4);
    CHECK(back.strings == d.strings);
    CHECK_THROWS(FlatDistribution::from_text("01\n001\n"));
}
