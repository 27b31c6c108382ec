#include <doctest.h>

#include "apx/oracle.hpp"
#include "apx/prng.hpp"
#include "apx/restriction.hpp"

using namespace apx;

namespace {

// The subset-enumeration form of the small-sets potential, straight from its
// defining sum; the production DP must agree with it exactly.
Rational phi_small_sets_by_enumeration(const StarString& x, const SetSystem& sys, std::size_t s,
                                       const Rational& p) {
    const std::size_t m = sys.sets.size();
    auto rho = [&](std::size_t j) -> Rational {
        std::size_t uncircled = 0;
        for (uint32_t v : sys.sets[j]) {
            if (v <= x.size()) {
                if (x[v - 1] == StarMark::Star) return 0;
                continue;
            }
            ++uncircled;
        }
        return (Rational(1) - p).pow(static_cast<unsigned long>(uncircled));
    };
    Rational total = 0;
    for (uint64_t mask = 0; mask < (uint64_t{1} << m); ++mask) {
        std::size_t size = 0;
        for (std::size_t j = 0; j < m; ++j) size += (mask >> j) & 1;
        if (size >= s) continue;
        Rational term = 1;
        for (std::size_t j = 0; j < m; ++j) {
            if ((mask >> j) & 1) term *= rho(j);
            else term *= Rational(1) - rho(j);
        }
        total += term;
    }
    return total;
}

SetSystem random_disjoint_system(Prng& rng, uint32_t n, std::size_t sets, std::size_t max_size) {
    SetSystem sys;
    sys.n = n;
    std::vector<uint32_t> vars(n);
    for (uint32_t i = 0; i < n; ++i) vars[i] = i + 1;
    for (uint32_t i = n; i > 1; --i) std::swap(vars[i - 1], vars[rng.below(i)]);
    std::size_t pos = 0;
    for (std::size_t s = 0; s < sets && pos < n; ++s) {
        std::set<uint32_t> set;
        const std::size_t size = 1 + rng.below(max_size);
        for (std::size_t e = 0; e < size && pos < n; ++e) set.insert(vars[pos++]);
        sys.sets.push_back(std::move(set));
    }
    return sys;
}

Knf random_knf(Prng& rng, uint32_t n, std::size_t clauses, std::size_t width) {
    Knf f;
    f.connective = rng.bit() ? Connective::Cnf : Connective::Dnf;
    for (std::size_t c = 0; c < clauses; ++c) {
        KnfClause cl;
        for (std::size_t j = 0; j < width; ++j) {
            uint32_t v = 1 + static_cast<uint32_t>(rng.below(n));
            if (cl.pos.count(v) || cl.neg.count(v)) continue;
            (rng.bit() ? cl.pos : cl.neg).insert(v);
        }
        if (cl.width() > 0) f.clauses.push_back(std::move(cl));
    }
    if (f.clauses.empty()) f.clauses.push_back(KnfClause{{1}, {}});
    return f;
}

} // namespace

TEST_CASE("small-sets potential on pinned examples") {
    SetSystem sys;
    sys.n = 2;
    sys.sets = {{1}, {2}};
    const Rational half(1, 2);
    CHECK(phi_small_sets({}, sys, 1, half) == Rational(1, 4));
    CHECK(phi_small_sets({StarMark::Circle, StarMark::Circle}, sys, 1, half) == Rational(0));
    CHECK(phi_small_sets({StarMark::Star, StarMark::Star}, sys, 1, half) == Rational(1));
    SetSystem overlapping;
    overlapping.n = 3;
    overlapping.sets = {{1, 2}, {2, 3}};
    CHECK_THROWS(phi_small_sets({}, overlapping, 1, half));
}

TEST_CASE("small-sets potential equals the subset-enumeration formula") {
    Prng rng(113);
    for (int trial = 0; trial < 25; ++trial) {
        const uint32_t n = 4 + static_cast<uint32_t>(rng.below(5));
        SetSystem sys = random_disjoint_system(rng, n, 1 + rng.below(4), 2);
        const Rational p(1 + static_cast<long>(rng.below(3)), 4);
        const std::size_t s = 1 + rng.below(sys.sets.size() + 1);
        StarString x;
        for (int step = 0; step <= static_cast<int>(n); ++step) {
            CHECK(phi_small_sets(x, sys, s, p) == phi_small_sets_by_enumeration(x, sys, s, p));
            if (x.size() < n) x.push_back(rng.bit() ? StarMark::Star : StarMark::Circle);
        }
    }
}

TEST_CASE("potential recursion identities hold on every prefix") {
    Prng rng(127);
    for (int trial = 0; trial < 20; ++trial) {
        const uint32_t n = 6;
        SetSystem sys = random_disjoint_system(rng, n, 3, 2);
        const Rational p(1, 3);
        const std::size_t s = 2;
        // Enumerate all prefixes up to length 4 and check both children.
        std::vector<StarString> frontier{{}};
        for (int depth = 0; depth < 4; ++depth) {
            std::vector<StarString> next;
            for (const StarString& x : frontier) {
                StarString xs = x, xc = x;
                xs.push_back(StarMark::Star);
                xc.push_back(StarMark::Circle);
                CHECK(phi_small_sets(x, sys, s, p) ==
                      p * phi_small_sets(xs, sys, s, p) +
                          (Rational(1) - p) * phi_small_sets(xc, sys, s, p));
                next.push_back(std::move(xs));
                next.push_back(std::move(xc));
            }
            frontier = std::move(next);
        }
    }
}

TEST_CASE("disjoint decomposition") {
    SetSystem already;
    already.n = 6;
    already.sets = {{1, 2}, {3, 4}, {5}};
    auto fams = disjoint_decomposition(already);
    REQUIRE(fams.size() == 1);
    CHECK(fams[0].sets.size() == 3);

    SetSystem chain;
    chain.n = 3;
    chain.sets = {{1, 2}, {2, 3}};
    fams = disjoint_decomposition(chain);
    REQUIRE(fams.size() == 2);
    CHECK(fams[0].sets == std::vector<std::set<uint32_t>>{{1, 2}});
    CHECK(fams[1].sets == std::vector<std::set<uint32_t>>{{3}});
    CHECK(fams[1].origin == std::vector<std::size_t>{1});

    SetSystem empty;
    empty.n = 4;
    CHECK(disjoint_decomposition(empty).empty());
}

TEST_CASE("general potential termination and recursion") {
    Prng rng(131);
    // Narrow case termination: full strings give exactly 0/1 by q* vs b.
    for (int trial = 0; trial < 15; ++trial) {
        const uint32_t n = 6;
        SetSystem sys;
        sys.n = n;
        for (int s = 0; s < 4; ++s) {
            std::set<uint32_t> set;
            set.insert(1 + static_cast<uint32_t>(rng.below(n)));
            set.insert(1 + static_cast<uint32_t>(rng.below(n)));
            sys.sets.push_back(std::move(set));
        }
        const std::size_t b = 2;
        GeneralPotential pot = phi_general(sys, 2, b);
        const Rational p(1, 4);
        for (uint64_t v = 0; v < (uint64_t{1} << n); ++v) {
            StarString x(n);
            std::size_t q_star = 0;
            for (uint32_t i = 0; i < n; ++i) {
                x[i] = ((v >> i) & 1) ? StarMark::Star : StarMark::Circle;
            }
            for (uint32_t e : pot.mode == PotentialCase::Narrow ? pot.narrow_union
                                                                : std::set<uint32_t>{}) {
                if (x[e - 1] == StarMark::Star) ++q_star;
            }
            Rational val = pot.eval(x, p, n);
            if (pot.mode == PotentialCase::Narrow) {
                CHECK(val == (q_star > b ? Rational(1) : Rational(0)));
            } else {
                CHECK((val == Rational(0) || val == Rational(1)));
            }
        }
        // Recursion on every prefix of a few random paths.
        for (int path = 0; path < 4; ++path) {
            StarString x;
            for (uint32_t i = 0; i < n; ++i) {
                StarString xs = x, xc = x;
                xs.push_back(StarMark::Star);
                xc.push_back(StarMark::Circle);
                CHECK(pot.eval(x, p, n) ==
                      p * pot.eval(xs, p, n) + (Rational(1) - p) * pot.eval(xc, p, n));
                x.push_back(rng.bit() ? StarMark::Star : StarMark::Circle);
            }
        }
    }
}

TEST_CASE("subset selection on pinned shapes") {
    {
        // Single 1-NF (OR of x1..x4), n = 4, t = 2.
        Knf f;
        f.connective = Connective::Dnf;
        for (uint32_t v = 1; v <= 4; ++v) f.clauses.push_back(KnfClause{{v}, {}});
        SelectionResult sel = select_subset({f}, 4, 2);
        CHECK(sel.T.size() <= 2);
        REQUIRE(sel.entries.size() == 1);
        const auto* narrow = std::get_if<NarrowWitness>(&sel.entries[0].witness);
        REQUIRE(narrow != nullptr);
        CHECK(narrow->live_literals.size() <= 4);
    }
    {
        // Zero formulas: the greedy subset is returned with no witnesses.
        SelectionResult sel = select_subset({}, 5, 2);
        CHECK(sel.entries.empty());
        CHECK(sel.T.size() <= 3);
    }
    {
        // A single-literal formula is narrow regardless of T.
        Knf f;
        f.connective = Connective::Cnf;
        f.clauses.push_back(KnfClause{{2}, {}});
        SelectionResult sel = select_subset({f}, 6, 2);
        const auto* narrow = std::get_if<NarrowWitness>(&sel.entries[0].witness);
        REQUIRE(narrow != nullptr);
        CHECK(narrow->live_literals.size() <= 1);
    }
}

TEST_CASE("selection greedy path never increases the potential") {
    Prng rng(137);
    for (int trial = 0; trial < 10; ++trial) {
        const uint32_t n = 8 + static_cast<uint32_t>(rng.below(5));
        std::vector<Knf> formulas;
        for (int fi = 0; fi < 3; ++fi) formulas.push_back(random_knf(rng, n, 3, 2));
        RestrictionConfig cfg;
        cfg.adaptive_b = true;
        SelectionResult sel;
        try {
            sel = select_subset(formulas, n, std::max<uint32_t>(1, n / 3), cfg);
        } catch (const std::exception&) {
            continue;  // out-of-regime instances are allowed to refuse
        }
        CHECK(sel.final_potential <= sel.initial_potential);
        // Witnesses verify independently of the construction path.
        for (std::size_t fi = 0; fi < formulas.size(); ++fi) {
            if (const auto* wide = std::get_if<WideWitness>(&sel.entries[fi].witness)) {
                std::set<uint32_t> used;
                for (const KnfClause& sub : wide->subclauses) {
                    CHECK(sub.width() > 0);
                    for (uint32_t v : sub.support()) {
                        CHECK(sel.T.count(v) == 1);
                        CHECK(used.insert(v).second);
                    }
                }
            } else {
                const auto& narrow = std::get<NarrowWitness>(sel.entries[fi].witness);
                for (uint32_t v : narrow.live_literals) CHECK(sel.T.count(v) == 0);
            }
        }
    }
}

TEST_CASE("derandomized restriction on pinned shapes") {
    {
        // Wide DNF whose witness subclauses are single literals: trivializes.
        Knf f;
        f.connective = Connective::Dnf;
        for (uint32_t v = 1; v <= 6; ++v) f.clauses.push_back(KnfClause{{v}, {}});
        std::set<uint32_t> T{1, 2, 3, 4, 5, 6};
        WideWitness w;
        for (uint32_t v = 1; v <= 6; ++v) w.subclauses.push_back(KnfClause{{v}, {}});
        std::vector<SelectionEntry> entries(1);
        entries[0].witness = std::move(w);
        RestrictionConfig cfg;
        cfg.k = 1;
        Restriction rho = derandomized_restriction({f}, entries, T, 6, 2, cfg);
        CHECK(knf_apply_restriction(f, rho).trivialized == 1);
    }
    {
        // All-narrow input: any assignment works and one is returned.
        Knf f;
        f.connective = Connective::Cnf;
        f.clauses.push_back(KnfClause{{1, 2}, {}});
        std::vector<SelectionEntry> entries(1);
        entries[0].witness = NarrowWitness{{1, 2}};
        Restriction rho = derandomized_restriction({f}, entries, {3, 4}, 4, 2);
        CHECK(rho.num_fixed() == 2);
    }
}

TEST_CASE("derandomized restriction potential halves exactly at every step") {
    Prng rng(139);
    for (int trial = 0; trial < 10; ++trial) {
        const uint32_t n = 9;
        Knf f;
        f.connective = Connective::Dnf;
        std::set<uint32_t> T;
        WideWitness w;
        // Disjoint two-literal terms over a fresh chunk of variables.
        for (uint32_t v = 1; v + 1 <= n; v += 2) {
            KnfClause cl;
            cl.pos.insert(v);
            if (rng.bit()) cl.pos.insert(v + 1);
            else cl.neg.insert(v + 1);
            f.clauses.push_back(cl);
            w.subclauses.push_back(cl);
            T.insert(v);
            T.insert(v + 1);
        }
        std::vector<SelectionEntry> entries(1);
        entries[0].witness = w;
        std::vector<uint8_t> prefix;
        for (std::size_t step = 0; step < T.size(); ++step) {
            Rational parent = derand_prefix_potential({f}, entries, T, n, prefix);
            std::vector<uint8_t> p0 = prefix, p1 = prefix;
            p0.push_back(0);
            p1.push_back(1);
            Rational left = derand_prefix_potential({f}, entries, T, n, p0);
            Rational right = derand_prefix_potential({f}, entries, T, n, p1);
            CHECK(parent == (left + right) / 2);
            prefix.push_back(left <= right ? 0 : 1);
        }
    }
}

TEST_CASE("random restriction failure expectation obeys the lemma bound") {
    // Exact expectation of the failure event over assignments to T, compared
    // with l * (1 - 2^-c)^(ceil(k ln n)).
    Prng rng(149);
    for (int trial = 0; trial < 5; ++trial) {
        const uint32_t n = 12;
        const std::size_t k = 1;
        const long wide_count = ceil_mul_ln(static_cast<long>(k), static_cast<long>(n));
        std::vector<Knf> formulas;
        std::vector<SelectionEntry> entries;
        std::set<uint32_t> T;
        for (uint32_t v = 1; v <= n; ++v) T.insert(v);
        const std::size_t ell = 2;
        for (std::size_t fi = 0; fi < ell; ++fi) {
            Knf f;
            f.connective = Connective::Dnf;
            WideWitness w;
            std::vector<uint32_t> vars(n);
            for (uint32_t i = 0; i < n; ++i) vars[i] = i + 1;
            for (uint32_t i = n; i > 1; --i) std::swap(vars[i - 1], vars[rng.below(i)]);
            for (long j = 0; j < wide_count; ++j) {
                KnfClause cl;
                cl.pos.insert(vars[static_cast<std::size_t>(2 * j)]);
                cl.neg.insert(vars[static_cast<std::size_t>(2 * j + 1)]);
                f.clauses.push_back(cl);
                w.subclauses.push_back(cl);
            }
            formulas.push_back(std::move(f));
            SelectionEntry e;
            e.witness = std::move(w);
            entries.push_back(std::move(e));
        }
        const std::size_t c = 2;
        uint64_t bad = 0;
        for (uint64_t a = 0; a < (uint64_t{1} << n); ++a) {
            Restriction rho(n);
            for (uint32_t v = 1; v <= n; ++v) rho.set(v, (a >> (v - 1)) & 1);
            for (const Knf& f : formulas) {
                KnfSimplification simp = knf_apply_restriction(f, rho);
                if (!simp.trivialized) { ++bad; break; }
            }
        }
        Rational expectation(static_cast<long>(bad));
        expectation /= Rational(mpz_class(1) << n, mpz_class(1));
        Rational bound = Rational(static_cast<long>(ell)) *
                         (Rational(1) - Rational::pow2(-static_cast<long>(c)))
                             .pow(static_cast<unsigned long>(wide_count));
        CHECK(expectation <= bound);
    }
}

TEST_CASE("depth reduction") {
    {
        // Fully trivialized second layer collapses to a constant.
        LayeredAC0 c;
        c.num_inputs = 3;
        c.first_layer_and = false;
        c.layers.resize(2);
        c.layers[0].push_back(LayeredGate{{1, 2}});
        c.layers[1].push_back(LayeredGate{{0}});
        Restriction rho(3);
        rho.set(1, 1);
        LayeredAC0 reduced = depth_reduce(c, rho, 2);
        CHECK(reduced.depth() == 1);
        CHECK(reduced.to_circuit().eval1(bits_from_string("100")));
    }
    {
        // One surviving AND of two literals under an OR: a single gate.
        LayeredAC0 c;
        c.num_inputs = 4;
        c.first_layer_and = true;  // ANDs under an OR: a DNF
        c.layers.resize(2);
        c.layers[0].push_back(LayeredGate{{1, 2}});
        c.layers[0].push_back(LayeredGate{{3, 4}});
        c.layers[1].push_back(LayeredGate{{0, 1}});
        Restriction rho(4);
        rho.set(3, 0);  // kills the second term
        LayeredAC0 reduced = depth_reduce(c, rho, 2);
        CHECK(reduced.depth() == 1);
        Circuit flat = reduced.to_circuit();
        Circuit orig = c.to_circuit();
        for (uint64_t v = 0; v < 16; ++v) {
            Bits x = index_to_bits(v, 4);
            if (x[2] != 0) continue;  // compare under the restriction
            CHECK(flat.eval1(x) == orig.eval1(x));
        }
    }
    {
        // Depth 3 drops to depth 2 via the CNF/DNF merge.
        LayeredAC0 c;
        c.num_inputs = 4;
        c.first_layer_and = false;  // OR, AND, OR
        c.layers.resize(3);
        c.layers[0].push_back(LayeredGate{{1, 2}});
        c.layers[0].push_back(LayeredGate{{-1, 3}});
        c.layers[0].push_back(LayeredGate{{4}});
        c.layers[1].push_back(LayeredGate{{0, 1}});
        c.layers[1].push_back(LayeredGate{{1, 2}});
        c.layers[2].push_back(LayeredGate{{0, 1}});
        Restriction rho(4);
        rho.set(2, 0);
        LayeredAC0 reduced = depth_reduce(c, rho, 3);
        CHECK(reduced.depth() == 2);
        Circuit flat = reduced.to_circuit();
        Circuit orig = c.to_circuit();
        for (uint64_t v = 0; v < 16; ++v) {
            Bits x = index_to_bits(v, 4);
            if (x[1] != 0) continue;
            CHECK(flat.eval1(x) == orig.eval1(x));
        }
    }
}

TEST_CASE("parity separation on degenerate circuits") {
    LayeredAC0 nullc;
    nullc.num_inputs = 5;
    nullc.first_layer_and = false;
    nullc.layers.resize(1);
    nullc.layers[0].push_back(LayeredGate{{}});  // empty OR: constant 0
    ParitySeparation sep = parity_separating_input(nullc, 2);
    int par = 0;
    for (uint8_t bit : sep.witness) par ^= bit;
    CHECK(par == 1);  // any odd-parity input witnesses against constant 0
}

TEST_CASE("parity separation on random depth-2 circuits") {
    Prng rng(151);
    for (int trial = 0; trial < 8; ++trial) {
        const uint32_t n = 16;
        LayeredAC0 c;
        c.num_inputs = n;
        c.first_layer_and = false;  // CNF shape
        c.layers.resize(2);
        const std::size_t clauses = 8 + rng.below(2 * n);
        std::vector<int32_t> feeds;
        for (std::size_t ci = 0; ci < clauses; ++ci) {
            LayeredGate g;
            const std::size_t w = 1 + rng.below(3);
            std::set<uint32_t> used;
            for (std::size_t j = 0; j < w; ++j) {
                uint32_t v = 1 + static_cast<uint32_t>(rng.below(n));
                if (!used.insert(v).second) continue;
                g.feeds.push_back(rng.bit() ? static_cast<int32_t>(v) : -static_cast<int32_t>(v));
            }
            c.layers[0].push_back(std::move(g));
            feeds.push_back(static_cast<int32_t>(ci));
        }
        c.layers[1].push_back(LayeredGate{feeds});
        ParitySeparation sep = parity_separating_input(c, 2);
        Circuit flat = c.to_circuit();
        int par = 0;
        for (uint8_t bit : sep.witness) par ^= bit;
        CHECK((flat.eval1(sep.witness) ? 1 : 0) != par);
    }
}

TEST_CASE("agreement fraction") {
    ExactOracle oracle;
    const Precision prec{100};
    CHECK(agreement_fraction(Circuit::parity(6), oracle, prec) == Rational(1));
    CHECK(agreement_fraction(Circuit::null_circuit(6), oracle, prec) == Rational(1, 2));
}
