#include "apx/selftest.hpp"

#include <memory>

#include "apx/oracle.hpp"
#include "apx/randvar.hpp"
#include "apx/restriction.hpp"
#include "apx/tfnp.hpp"
#include "apx/transforms.hpp"

namespace apx {

namespace {

Circuit random_circuit(Prng& rng, uint32_t n, std::size_t extra_gates) {
    CircuitBuilder b(n);
    std::vector<uint32_t> pool;
    for (uint32_t i = 1; i <= n; ++i) pool.push_back(b.add_input(i));
    for (std::size_t g = 0; g < extra_gates; ++g) {
        const uint64_t pick = rng.below(4);
        const uint32_t a1 = pool[rng.below(pool.size())];
        const uint32_t a2 = pool[rng.below(pool.size())];
        switch (pick) {
            case 0: pool.push_back(b.add_gate(GateOp::And, {a1, a2})); break;
            case 1: pool.push_back(b.add_gate(GateOp::Or, {a1, a2})); break;
            case 2: pool.push_back(b.add_gate(GateOp::Xor, {a1, a2})); break;
            default: pool.push_back(b.add_not(a1)); break;
        }
    }
    return std::move(b).build({pool.back()});
}

} // namespace

SelftestResult run_selftest(bool full, bool inject_fault, uint64_t seed) {
    SelftestResult result;
    const uint32_t max_n = full ? 10 : 8;
    Prng rng(seed);

    auto oracle_for = [&]() -> std::unique_ptr<CountingOracle> {
        auto exact = std::make_unique<ExactOracle>();
        if (!inject_fault) return exact;
        return std::make_unique<SkewedOracle>(std::move(exact));
    };

    auto add = [&](const std::string& name, bool pass, std::string detail = {}) {
        result.checks.push_back({name, pass, std::move(detail)});
    };

    {  // Local consistency of the oracle, exact zero-slack form.
        auto oracle = oracle_for();
        bool ok = true;
        for (int trial = 0; trial < 20 && ok; ++trial) {
            const uint32_t n = 2 + static_cast<uint32_t>(rng.below(max_n - 1));
            Circuit c = random_circuit(rng, n, 6);
            Precision prec{1000};
            Rational parent = oracle->query(c, prec);
            Rational p0 = oracle->query(c.fix_last(0), prec);
            Rational p1 = oracle->query(c.fix_last(1), prec);
            ok = parent == (p0 + p1) / 2;
        }
        add("oracle-local-consistency", ok);
    }
    {  // Complementation and permutation symmetry.
        auto oracle = oracle_for();
        bool ok = true;
        for (int trial = 0; trial < 20 && ok; ++trial) {
            const uint32_t n = 2 + static_cast<uint32_t>(rng.below(max_n - 1));
            Circuit c = random_circuit(rng, n, 5);
            Precision prec{100};
            ok = oracle->query(c, prec) + oracle->query(c.negate(), prec) == Rational(1);
            if (ok) {
                std::vector<uint32_t> pi(n);
                for (uint32_t i = 0; i < n; ++i) pi[i] = i + 1;
                for (uint32_t i = n; i > 1; --i)
                    std::swap(pi[i - 1], pi[rng.below(i)]);
                ok = oracle->query(c.permute(pi), prec) == oracle->query(c, prec);
            }
        }
        add("oracle-complementation-permutation", ok);
    }
    {  // Less-than-t circuits count exactly.
        auto oracle = oracle_for();
        bool ok = true;
        for (uint32_t n = 1; n <= (full ? 10u : 8u) && ok; ++n) {
            for (uint64_t t = 0; t <= (uint64_t{1} << n) && ok; t += (n > 6 ? 17 : 1)) {
                Rational expected(static_cast<long>(t));
                expected /= Rational(mpz_class(1) << n, mpz_class(1));
                ok = oracle->query(Circuit::threshold_less_than(n, t), Precision{100}) == expected;
            }
        }
        add("less-than-t-exact", ok);
    }
    {  // AvgSampler never loses the mean.
        auto oracle = oracle_for();
        bool ok = true;
        for (int trial = 0; trial < 10 && ok; ++trial) {
            const uint32_t n = 3 + static_cast<uint32_t>(rng.below(4));
            LinearCombination combo;
            const std::size_t m = 1 + rng.below(3);
            for (std::size_t i = 0; i < m; ++i) {
                combo.variables.push_back(RandomVariable::indicator_of(random_circuit(rng, n, 4)));
                combo.coefficients.push_back(Rational(1 + static_cast<long>(rng.below(3)),
                                                      1 + static_cast<long>(rng.below(2))));
            }
            Precision prec{1000};
            Rational mu = combo.mu(*oracle, prec);
            Bits z = avg_sampler(combo, 2, *oracle, prec);
            ok = combo.mu_restricted(z, *oracle, prec) >= mu;
        }
        add("avg-sampler-monotone", ok);
    }
    {  // Inequality suites with the exact oracle.
        auto oracle = oracle_for();
        bool ok = true;
        Precision prec{1000};
        Precision beta{1000};
        for (int trial = 0; trial < 5 && ok; ++trial) {
            const uint32_t n = 3 + static_cast<uint32_t>(rng.below(3));
            IneqInstance inst;
            inst.suite = IneqSuite::Markov;
            inst.variables = {RandomVariable::indicator_of(random_circuit(rng, n, 4))};
            inst.k_factor = Rational(2);
            IneqReport rep = verify_inequality(inst, *oracle, prec, beta);
            ok = !rep.hypothesis_ok || rep.pass;
            if (ok) {
                IneqInstance comp;
                comp.suite = IneqSuite::Complementation;
                comp.event = random_circuit(rng, n, 4);
                rep = verify_inequality(comp, *oracle, prec, beta);
                ok = rep.pass;
            }
        }
        add("inequalities-exact", ok);
    }
    {  // Weight-code roundtrip.
        bool ok = true;
        const std::size_t m = full ? 12 : 8;
        for (std::size_t k = 0; k <= 3 && ok; ++k) {
            WeightCode code(m, k);
            mpz_class count = 0;
            for (uint64_t v = 0; v < (uint64_t{1} << m) && ok; ++v) {
                Bits y = index_to_bits(v, m);
                if (hamming_weight(y) > k) continue;
                count += 1;
                ok = code.decode(code.encode(y)) == y;
            }
            if (ok) ok = count == code.num_strings();
        }
        add("weight-code-roundtrip", ok);
    }
    {  // BLR decodes exactly linear functions.
        auto oracle = oracle_for();
        bool ok = true;
        for (uint32_t n = 2; n <= 4 && ok; ++n) {
            for (uint64_t zv = 0; zv < (uint64_t{1} << n) && ok; ++zv) {
                Bits z = index_to_bits(zv, n);
                auto decoded = blr_decode(linear_function_circuit(z), *oracle, Precision{1000},
                                          Rational(1, 200));
                ok = decoded.z.has_value() && *decoded.z == z;
            }
        }
        add("blr-linear-roundtrip", ok);
    }
    {  // Potential recursion identities on random systems.
        bool ok = true;
        for (int trial = 0; trial < (full ? 8 : 4) && ok; ++trial) {
            const uint32_t n = 5 + static_cast<uint32_t>(rng.below(3));
            SetSystem sys;
            sys.n = n;
            std::set<uint32_t> taken;
            for (int s = 0; s < 3; ++s) {
                std::set<uint32_t> set;
                for (int e = 0; e < 2; ++e) {
                    uint32_t v = 1 + static_cast<uint32_t>(rng.below(n));
                    if (!taken.count(v)) { set.insert(v); taken.insert(v); }
                }
                if (!set.empty()) sys.sets.push_back(set);
            }
            const Rational p(1, 3);
            StarString x;
            for (uint32_t i = 0; i < n && ok; ++i) {
                StarString xs = x, xc = x;
                xs.push_back(StarMark::Star);
                xc.push_back(StarMark::Circle);
                ok = phi_small_sets(x, sys, 2, p) ==
                     p * phi_small_sets(xs, sys, 2, p) + (Rational(1) - p) * phi_small_sets(xc, sys, 2, p);
                x.push_back(rng.bit() ? StarMark::Star : StarMark::Circle);
            }
        }
        add("potential-recursion", ok);
    }
    if (full) {  // Reduction soundness sweep.
        bool ok = true;
        int checked = 0;
        for (int trial = 0; trial < 50 && ok; ++trial) {
            const uint32_t n = 4 + static_cast<uint32_t>(rng.below(5));
            const uint32_t s = 48;
            const Rational delta(1, 2);
            const uint32_t m = 40 * (s + static_cast<uint32_t>(ceil_log2(n)) + 1) + static_cast<uint32_t>(rng.below(64));
            auto names = builtin_generator_names();
            RefuterInstance inst = RefuterInstance::with_builtin(
                n, m, s, delta, names[rng.below(names.size())]);
            RefuterReduction red = refuter_to_lossycode(inst);
            LossySolveResult sol = solve_lossycode_randomized(red.lossy, rng.next_u64(), 1000);
            ok = sol.solution.has_value();
            if (ok) {
                FlatDistribution dist = red.solution_mapper(*sol.solution);
                ok = check_refuter_solution(inst, dist);
                ++checked;
            }
        }
        add("reduction-soundness", ok && checked == 50);
    }
    return result;
}

} // namespace apx
