#include <doctest.h>

#include "apx/prng.hpp"
#include "apx/tfnp.hpp"

using namespace apx;

namespace {

FlatDistribution dist_of(std::initializer_list<const char*> rows) {
    FlatDistribution d;
    for (const char* r : rows) d.strings.push_back(bits_from_string(r));
    d.width = d.strings.front().size();
    return d;
}

LossyCodeInstance drop_append_instance(uint32_t n) {
    // Compressor drops the last bit, decompressor appends 0.
    CircuitBuilder cb(n);
    std::vector<uint32_t> outs;
    for (uint32_t i = 1; i < n; ++i) outs.push_back(cb.add_input(i));
    Circuit comp = std::move(cb).build(std::move(outs));
    CircuitBuilder db(n - 1);
    std::vector<uint32_t> douts;
    for (uint32_t i = 1; i < n; ++i) douts.push_back(db.add_input(i));
    douts.push_back(db.add_const(0));
    Circuit decomp = std::move(db).build(std::move(douts));
    return LossyCodeInstance::from_circuits(std::move(comp), std::move(decomp));
}

} // namespace

TEST_CASE("weight code on pinned examples") {
    WeightCode code(4, 1);
    CHECK(code.num_strings() == 5);
    CHECK(code.codeword_bits() == 3);
    CHECK(code.rank(bits_from_string("0000")) == 0);
    const char* expected[] = {"0000", "0001", "0010", "0100", "1000"};
    for (int r = 0; r < 5; ++r) {
        CHECK(code.rank(bits_from_string(expected[r])) == r);
        CHECK(code.unrank(r) == bits_from_string(expected[r]));
    }
    CHECK_THROWS(WeightCode(8, 3).rank(bits_from_string("11110000")));
}

TEST_CASE("weight code is a lexicographic bijection") {
    for (std::size_t m = 1; m <= 10; ++m) {
        for (std::size_t k = 0; k <= m; ++k) {
            WeightCode code(m, k);
            mpz_class expected_rank = 0;
            for (uint64_t v = 0; v < (uint64_t{1} << m); ++v) {
                // Enumerate strings in lexicographic order of their text form.
                Bits y(m);
                for (std::size_t j = 0; j < m; ++j) y[j] = (v >> (m - 1 - j)) & 1;
                if (hamming_weight(y) > k) continue;
                CHECK(code.rank(y) == expected_rank);
                CHECK(code.decode(code.encode(y)) == y);
                expected_rank += 1;
            }
            CHECK(expected_rank == code.num_strings());
        }
    }
}

TEST_CASE("refuter solution checking") {
    // const0 guesses bit 1 = 0; a balanced distribution defeats any delta > 0.
    RefuterInstance inst = RefuterInstance::with_builtin(3, 4, 32, Rational(1, 4), "const0");
    CHECK(check_refuter_solution(inst, dist_of({"000", "100", "011", "111"})));
    // All-zero strings: the guess is always right, success 1.
    CHECK_FALSE(check_refuter_solution(inst, dist_of({"000", "000", "000", "000"})));
    // delta = 1/2: only a perfect predictor survives (success < 1 fails it).
    RefuterInstance half = RefuterInstance::with_builtin(3, 4, 32, Rational(1, 2), "const0");
    CHECK_FALSE(check_refuter_solution(half, dist_of({"000", "000", "000", "000"})));
    CHECK(check_refuter_solution(half, dist_of({"100", "000", "000", "000"})));
    CHECK_THROWS(check_refuter_solution(inst, dist_of({"00", "00", "00", "00"})));
    // Oversized predictor descriptions are an error, not a verdict.
    RefuterInstance tiny = RefuterInstance::with_builtin(3, 4, 2, Rational(1, 4), "const0");
    CHECK_THROWS(check_refuter_solution(tiny, dist_of({"000", "100", "011", "111"})));
}

TEST_CASE("randomized refuter solver succeeds quickly") {
    RefuterInstance inst = RefuterInstance::with_builtin(4, 40, 64, Rational(1, 4), "const0");
    int total_tries = 0;
    for (uint64_t seed = 1; seed <= 100; ++seed) {
        RefuterSolveResult r = solve_refuter_randomized(inst, seed, 50);
        REQUIRE(r.solution.has_value());
        CHECK(check_refuter_solution(inst, *r.solution));
        total_tries += static_cast<int>(r.tries);
    }
    CHECK(total_tries <= 300);  // expected O(1) tries per seed
}

TEST_CASE("lossy code basics") {
    LossyCodeInstance inst = drop_append_instance(3);
    CHECK(check_lossycode_solution(inst, bits_from_string("001")));
    CHECK_FALSE(check_lossycode_solution(inst, bits_from_string("000")));
    CHECK_THROWS(check_lossycode_solution(inst, bits_from_string("0011")));
    LossySolveResult r = solve_lossycode_randomized(inst, 5, 1000);
    REQUIRE(r.solution.has_value());
    CHECK(check_lossycode_solution(inst, *r.solution));
}

TEST_CASE("every lossy instance has many solutions") {
    Prng rng(97);
    const uint32_t n = 12;
    // Random compressor/decompressor built from bit shuffles and constants.
    CircuitBuilder cb(n);
    std::vector<uint32_t> co;
    for (uint32_t i = 0; i + 1 < n; ++i)
        co.push_back(cb.add_input(1 + static_cast<uint32_t>(rng.below(n))));
    Circuit comp = std::move(cb).build(std::move(co));
    CircuitBuilder db(n - 1);
    std::vector<uint32_t> dco;
    for (uint32_t i = 0; i < n; ++i) {
        if (rng.bit())
            dco.push_back(db.add_input(1 + static_cast<uint32_t>(rng.below(n - 1))));
        else
            dco.push_back(db.add_const(static_cast<int>(rng.bit())));
    }
    Circuit decomp = std::move(db).build(std::move(dco));
    LossyCodeInstance inst = LossyCodeInstance::from_circuits(comp, decomp);
    uint64_t solutions = 0;
    for (uint64_t v = 0; v < (uint64_t{1} << n); ++v)
        solutions += check_lossycode_solution(inst, index_to_bits(v, n));
    CHECK(solutions >= (uint64_t{1} << (n - 1)));  // pigeonhole
    LossySolveResult r = solve_lossycode_randomized(inst, 11, 1000);
    CHECK(r.solution.has_value());
}

TEST_CASE("reduction regime arithmetic") {
    // (1/40)*1000 = 25 >= 20 + 3 + 1 = 24: instance produced.
    RefuterInstance ok = RefuterInstance::with_builtin(8, 1000, 20, Rational(1, 2), "const0");
    CHECK(ok.parameter_condition());
    RefuterReduction red = refuter_to_lossycode(ok);
    CHECK(red.lossy.n == 8000);
    CHECK(red.codeword_bits == 0);  // weight cap 0 at delta = 1/2
    CHECK(red.tuple_bits < 8000);
    // (1/40)*100 = 2.5 < 24: rejected.
    RefuterInstance bad = RefuterInstance::with_builtin(8, 100, 20, Rational(1, 2), "const0");
    CHECK_FALSE(bad.parameter_condition());
    CHECK_THROWS(refuter_to_lossycode(bad));
}

TEST_CASE("reduction soundness on random instances") {
    Prng rng(101);
    auto names = builtin_generator_names();
    for (int trial = 0; trial < 6; ++trial) {
        const uint32_t n = 4 + static_cast<uint32_t>(rng.below(5));
        const uint32_t s = 160;
        const uint32_t m = 40 * (s + static_cast<uint32_t>(ceil_log2(n)) + 1);
        RefuterInstance inst =
            RefuterInstance::with_builtin(n, m, s, Rational(1, 2), names[rng.below(names.size())]);
        REQUIRE(inst.parameter_condition());
        RefuterReduction red = refuter_to_lossycode(inst);
        LossySolveResult sol = solve_lossycode_randomized(red.lossy, rng.next_u64(), 1000);
        REQUIRE(sol.solution.has_value());
        FlatDistribution dist = red.solution_mapper(*sol.solution);
        CHECK(check_refuter_solution(inst, dist));
    }
}

TEST_CASE("compressor is injective where the generator succeeds") {
    // copy_previous predicts bit n from bit n-1; feed it distributions where
    // that guess is mostly right, so the compressor takes the packing path.
    const uint32_t n = 6;
    const uint32_t s = 64;
    const Rational delta(1, 4);
    const uint32_t m = 40 * (s + static_cast<uint32_t>(ceil_log2(n)) + 1) / 1;  // regime-safe
    RefuterInstance inst = RefuterInstance::with_builtin(n, m, s, delta, "copy_previous");
    REQUIRE(inst.parameter_condition());
    RefuterReduction red = refuter_to_lossycode(inst);
    Prng rng(103);
    FlatDistribution dist;
    dist.width = n;
    for (uint32_t j = 0; j < m; ++j) {
        Bits u = rng.bits(n);
        if (j % 8 != 0) u[n - 1] = u[n - 2];  // 7/8 of the strings agree
        dist.strings.push_back(std::move(u));
    }
    CHECK_FALSE(check_refuter_solution(inst, dist));  // predictor succeeds here
    Bits x = distribution_to_bits(dist);
    Bits packed = red.lossy.compress(x);
    CHECK(packed.size() == x.size() - 1);
    CHECK(red.lossy.decompress(packed) == x);
}

TEST_CASE("stretch amplification") {
    // Base: n = 4, r = 2; drop the last payload bit, ignore the seed.
    CircuitBuilder cb(6);
    std::vector<uint32_t> couts;
    for (uint32_t i = 1; i <= 3; ++i) couts.push_back(cb.add_input(i));
    Circuit base_c = std::move(cb).build(std::move(couts));
    CircuitBuilder db(3);
    std::vector<uint32_t> douts;
    for (uint32_t i = 1; i <= 3; ++i) douts.push_back(db.add_input(i));
    douts.push_back(db.add_const(0));
    Circuit base_d = std::move(db).build(std::move(douts));

    CompressionScheme id_scheme = stretch_amplify(base_c, base_d, 16, 0);
    CHECK(id_scheme.input_bits == 16);
    CHECK(id_scheme.output_bits == 16);
    Prng rng(107);
    Bits z = rng.bits(16);
    CHECK(id_scheme.decompress(id_scheme.compress(z)) == z);

    CompressionScheme scheme = stretch_amplify(base_c, base_d, 16, 3);
    CHECK(scheme.input_bits == 16 + 3 * 2);
    // z: 16 -> 12 -> 9 (rem 0) -> wait: 12/4 = 3 blocks -> 9; 9/4 = 2 blocks,
    // remainder 1 -> 6; output = 6 + (0 + 0 + 1) + 3*2 = 13.
    CHECK(scheme.output_bits == 13);
    CHECK(iterated_output_bits(16, 4, 2, 3) == 13);
    // The base pair round-trips exactly on blocks ending in 0; inputs whose
    // blocks stay in that set decompress exactly.
    int verified = 0;
    for (int trial = 0; trial < 200; ++trial) {
        Bits input = rng.bits(scheme.input_bits);
        Bits packed = scheme.compress(input);
        CHECK(packed.size() == scheme.output_bits);
        // Simulate the rounds to see whether every block stayed good.
        Bits zz(input.begin(), input.begin() + 16);
        bool all_good = true;
        for (std::size_t round = 0; round < 3; ++round) {
            const std::size_t blocks = zz.size() / 4;
            Bits next;
            for (std::size_t j = 0; j < blocks; ++j) {
                Bits block(zz.begin() + static_cast<std::ptrdiff_t>(4 * j),
                           zz.begin() + static_cast<std::ptrdiff_t>(4 * (j + 1)));
                if (block[3] != 0) all_good = false;
                next.insert(next.end(), block.begin(), block.begin() + 3);
            }
            zz = std::move(next);
        }
        if (all_good) {
            CHECK(scheme.decompress(packed) == input);
            ++verified;
        }
    }
    CHECK(verified > 0);
}

TEST_CASE("worst-case-from-average scheme") {
    // Base: n = 3, drop last bit / append 0; fails exactly when x3 = 1.
    CircuitBuilder cb(3);
    std::vector<uint32_t> couts{0, 0};
    {
        uint32_t i1 = cb.add_input(1), i2 = cb.add_input(2);
        couts = {i1, i2};
    }
    Circuit base_c = std::move(cb).build(std::move(couts));
    CircuitBuilder db(2);
    std::vector<uint32_t> douts;
    douts.push_back(db.add_input(1));
    douts.push_back(db.add_input(2));
    douts.push_back(db.add_const(0));
    Circuit base_d = std::move(db).build(std::move(douts));

    // Re-randomization: for every block x, the failure probability over a
    // uniform mask equals the base failure rate (1/2 here), exactly.
    for (uint64_t xv = 0; xv < 8; ++xv) {
        Bits x = index_to_bits(xv, 3);
        int fails = 0;
        for (uint64_t sv = 0; sv < 8; ++sv) {
            Bits sd = index_to_bits(sv, 3);
            Bits m = xor_bits(x, sd);
            if (base_d.eval(base_c.eval(m)) != m) ++fails;
        }
        CHECK(fails == 4);
    }

    CompressionScheme scheme = worstcase_from_average(base_c, base_d, 6, 2);
    CHECK(scheme.input_bits == 6 + 2 * 3);
    CHECK(scheme.output_bits == iterated_output_bits(6, 3, 3, 2));
    // d = 0 keeps everything intact.
    CompressionScheme ident = worstcase_from_average(base_c, base_d, 6, 0);
    Prng rng(109);
    Bits payload = rng.bits(6);
    CHECK(ident.decompress(ident.compress(payload)) == payload);

    // Per-input failure over all seeds is bounded by the union estimate
    // (#block-compressions) * base failure rate.
    std::size_t block_ops = 0;
    {
        std::size_t len = 6;
        for (int round = 0; round < 2; ++round) {
            block_ops += len / 3;
            len = (len / 3) * 2;
        }
    }
    const Rational base_fail(1, 2);
    for (uint64_t pv = 0; pv < 64; ++pv) {
        Bits payload2 = index_to_bits(pv, 6);
        uint64_t fails = 0;
        for (uint64_t sv = 0; sv < 64; ++sv) {
            Bits input = concat(payload2, index_to_bits(sv, 6));
            if (scheme.decompress(scheme.compress(input)) != input) ++fails;
        }
        CHECK(Rational(static_cast<long>(fails), 64) <=
              Rational(static_cast<long>(block_ops)) * base_fail);
    }
}
