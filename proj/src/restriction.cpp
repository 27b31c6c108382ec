#include "apx/restriction.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "apx/config.hpp"

namespace apx {

std::size_t SetSystem::size_bound() const {
    std::size_t c = 0;
    for (const auto& s : sets) c = std::max(c, s.size());
    return c;
}

void SetSystem::validate() const {
    for (const auto& s : sets)
        for (uint32_t v : s)
            if (v < 1 || v > n) throw std::invalid_argument("set system: element out of range");
}

namespace {

// Survival probability of one set: chance that S ends up inside the circle
// region when the unmarked coordinates are extended (circle w.p. 1-p).
Rational cover_probability(const std::set<uint32_t>& s, const StarString& x, const Rational& p) {
    std::size_t uncircled = 0;
    for (uint32_t v : s) {
        if (v <= x.size()) {
            if (x[v - 1] == StarMark::Star) return 0;
            continue;  // circled already
        }
        ++uncircled;
    }
    return (Rational(1) - p).pow(static_cast<unsigned long>(uncircled));
}

} // namespace

Rational phi_small_sets(const StarString& x, const SetSystem& sys, std::size_t s,
                        const Rational& p) {
    sys.validate();
    if (x.size() > sys.n) throw std::invalid_argument("phi_small_sets: prefix longer than n");
    for (std::size_t i = 0; i < sys.sets.size(); ++i)
        for (std::size_t j = i + 1; j < sys.sets.size(); ++j) {
            std::vector<uint32_t> inter;
            std::set_intersection(sys.sets[i].begin(), sys.sets[i].end(), sys.sets[j].begin(),
                                  sys.sets[j].end(), std::back_inserter(inter));
            if (!inter.empty()) throw std::invalid_argument("phi_small_sets: sets must be disjoint");
        }
    const std::size_t m = sys.sets.size();
    // Coverage events are independent for disjoint sets, so the subset-sum
    // formula collapses to a Poisson-binomial tail.
    std::vector<Rational> dp(m + 1);
    dp[0] = 1;
    std::size_t active = 0;
    for (const auto& set : sys.sets) {
        Rational rho = cover_probability(set, x, p);
        ++active;
        for (std::size_t c = active; c-- > 0;) {
            Rational hit = dp[c] * rho;
            dp[c + 1] += hit;
            dp[c] -= hit;
        }
    }
    Rational total = 0;
    for (std::size_t c = 0; c < s && c <= m; ++c) total += dp[c];
    return total;
}

std::vector<DisjointFamily> disjoint_decomposition(const SetSystem& sys) {
    sys.validate();
    std::vector<std::pair<std::set<uint32_t>, std::size_t>> work;  // (residue, origin)
    for (std::size_t i = 0; i < sys.sets.size(); ++i)
        if (!sys.sets[i].empty()) work.emplace_back(sys.sets[i], i);
    std::vector<DisjointFamily> families;
    while (!work.empty()) {
        DisjointFamily fam;
        std::set<uint32_t> used;
        std::vector<std::pair<std::set<uint32_t>, std::size_t>> rest;
        for (auto& [set, origin] : work) {
            bool disjoint = true;
            for (uint32_t v : set)
                if (used.count(v)) { disjoint = false; break; }
            if (disjoint) {
                used.insert(set.begin(), set.end());
                fam.sets.push_back(set);
                fam.origin.push_back(origin);
            } else {
                rest.emplace_back(std::move(set), origin);
            }
        }
        std::vector<std::pair<std::set<uint32_t>, std::size_t>> next;
        for (auto& [set, origin] : rest) {
            std::set<uint32_t> residue;
            for (uint32_t v : set)
                if (!used.count(v)) residue.insert(v);
            if (!residue.empty()) next.emplace_back(std::move(residue), origin);
        }
        families.push_back(std::move(fam));
        work = std::move(next);
    }
    return families;
}

Rational GeneralPotential::eval(const StarString& x, const Rational& p, uint32_t n) const {
    if (mode == PotentialCase::Wide) return phi_small_sets(x, wide_sets, wide_threshold, p);
    // Narrow: probability that more than b variables of the union stay live.
    std::size_t q_star = 0, q_circle = 0;
    for (uint32_t v : narrow_union) {
        if (v <= x.size()) {
            if (x[v - 1] == StarMark::Star) ++q_star;
            else ++q_circle;
        }
    }
    const std::size_t total = narrow_union.size();
    const std::size_t undecided = total - q_star - q_circle;
    // Pr[q_star + Bin(undecided, p) >= b+1].
    Rational sum = 0;
    for (std::size_t j = 0; j <= undecided; ++j) {
        if (q_star + j < narrow_bound + 1) continue;
        mpz_class bc;
        mpz_bin_uiui(bc.get_mpz_t(), undecided, j);
        sum += Rational(bc, mpz_class(1)) * p.pow(static_cast<unsigned long>(j)) *
               (Rational(1) - p).pow(static_cast<unsigned long>(undecided - j));
    }
    return sum;
}

GeneralPotential phi_general(const SetSystem& sys, std::size_t k, std::size_t b) {
    GeneralPotential pot;
    const long ell = ceil_mul_ln(static_cast<long>(2 * k), static_cast<long>(sys.n));
    auto families = disjoint_decomposition(sys);
    for (const DisjointFamily& fam : families) {
        if (static_cast<long>(fam.sets.size()) >= ell && ell > 0) {
            pot.mode = PotentialCase::Wide;
            pot.wide_sets.n = sys.n;
            for (std::size_t j = 0; j < static_cast<std::size_t>(ell); ++j) {
                pot.wide_sets.sets.push_back(fam.sets[j]);
                pot.wide_origin.push_back(fam.origin[j]);
            }
            pot.wide_threshold = static_cast<std::size_t>((ell + 1) / 2);
            return pot;
        }
    }
    pot.mode = PotentialCase::Narrow;
    for (const auto& s : sys.sets) pot.narrow_union.insert(s.begin(), s.end());
    pot.narrow_bound = b;
    return pot;
}

namespace {

SetSystem clause_system(const Knf& f, uint32_t n) {
    SetSystem sys;
    sys.n = n;
    for (const KnfClause& c : f.clauses) {
        auto sup = c.support();
        if (!sup.empty()) sys.sets.push_back(std::move(sup));
    }
    return sys;
}

std::size_t wide_witness_threshold(uint32_t n, std::size_t k) {
    return static_cast<std::size_t>(ceil_mul_ln(static_cast<long>(k), static_cast<long>(n)));
}

} // namespace

SelectionResult select_subset(const std::vector<Knf>& formulas, uint32_t n, uint32_t t,
                              const RestrictionConfig& cfg) {
    if (t < 1 || t > n) throw std::invalid_argument("select_subset: need 1 <= t <= n");
    const Rational p(static_cast<long>(t), static_cast<long>(n));

    std::vector<SetSystem> systems;
    for (const Knf& f : formulas) systems.push_back(clause_system(f, n));

    // Pick b; with adaptive_b the smallest b making the greedy budget
    // n * sum Phi_i(eps) < 1 work, which guarantees success below.
    std::size_t b = cfg.b;
    std::vector<GeneralPotential> pots;
    Rational initial_sum;
    while (true) {
        pots.clear();
        initial_sum = 0;
        StarString empty;
        for (const SetSystem& sys : systems) {
            pots.push_back(phi_general(sys, cfg.k, b));
            initial_sum += pots.back().eval(empty, p, n);
        }
        if (!cfg.adaptive_b || initial_sum * Rational(static_cast<long>(n)) < 1 || b >= cfg.b_max)
            break;
        ++b;
    }

    auto total_potential = [&](const StarString& x) {
        std::size_t q_circle = 0;
        for (StarMark mark : x)
            if (mark == StarMark::Circle) ++q_circle;
        Rational phi(static_cast<long>(q_circle));
        phi += (Rational(1) - p) * Rational(static_cast<long>(n - x.size()));
        Rational sum = 0;
        for (const GeneralPotential& pot : pots) sum += pot.eval(x, p, n);
        return phi + sum * Rational(static_cast<long>(n));
    };

    SelectionResult result;
    StarString x;
    result.initial_potential = total_potential(x);
    for (uint32_t i = 0; i < n; ++i) {
        StarString xs = x, xc = x;
        xs.push_back(StarMark::Star);
        xc.push_back(StarMark::Circle);
        Rational vs = total_potential(xs);
        Rational vc = total_potential(xc);
        x = vs < vc ? std::move(xs) : std::move(xc);  // ties circle the variable
    }
    result.final_potential = total_potential(x);
    if (result.final_potential > (Rational(1) - p) * Rational(static_cast<long>(n)))
        throw std::runtime_error("select_subset: greedy failed (instance out of regime)");

    for (uint32_t i = 1; i <= n; ++i)
        if (x[i - 1] == StarMark::Circle) result.T.insert(i);
    result.path = std::move(x);

    const std::size_t wide_needed = wide_witness_threshold(n, cfg.k);
    for (std::size_t fi = 0; fi < formulas.size(); ++fi) {
        const GeneralPotential& pot = pots[fi];
        SelectionEntry entry;
        if (pot.mode == PotentialCase::Narrow) {
            NarrowWitness w;
            for (uint32_t v : pot.narrow_union)
                if (!result.T.count(v)) w.live_literals.insert(v);
            if (w.live_literals.size() > b)
                throw std::runtime_error("select_subset: narrow witness exceeded the bound");
            entry.witness = std::move(w);
        } else {
            WideWitness w;
            std::set<uint32_t> used;
            std::set<std::size_t> origins;
            for (std::size_t j = 0; j < pot.wide_sets.sets.size(); ++j) {
                const auto& v = pot.wide_sets.sets[j];
                bool inside = true;
                for (uint32_t e : v)
                    if (!result.T.count(e)) { inside = false; break; }
                if (!inside) continue;
                const KnfClause& orig = formulas[fi].clauses[pot.wide_origin[j]];
                KnfClause sub;
                for (uint32_t e : v) {
                    if (orig.pos.count(e)) sub.pos.insert(e);
                    else if (orig.neg.count(e)) sub.neg.insert(e);
                }
                for (uint32_t e : sub.support()) {
                    if (used.count(e)) throw std::runtime_error("select_subset: overlapping wide witness");
                    used.insert(e);
                }
                if (!origins.insert(pot.wide_origin[j]).second)
                    throw std::runtime_error("select_subset: duplicated clause in wide witness");
                w.subclauses.push_back(std::move(sub));
            }
            if (w.subclauses.size() < wide_needed)
                throw std::runtime_error("select_subset: wide witness below k ln n subclauses");
            entry.witness = std::move(w);
        }
        result.entries.push_back(std::move(entry));
    }
    return result;
}

namespace {

struct WideFormulaState {
    Connective connective;
    std::vector<KnfClause> subclauses;
};

// phi_ij of the derandomized restriction: 2^-d when the subclause is d away
// from being positively determined, 0 once negatively determined.
Rational clause_weight(const KnfClause& sub, Connective conn, const Restriction& rho) {
    std::size_t unfixed = 0;
    for (uint32_t v : sub.pos) {
        if (!rho.is_set(v)) { ++unfixed; continue; }
        const int bit = rho.value(v);
        const bool wants = conn == Connective::Dnf;  // AND terms want literals true
        if ((bit == 1) != wants) return 0;
    }
    for (uint32_t v : sub.neg) {
        if (!rho.is_set(v)) { ++unfixed; continue; }
        const int bit = rho.value(v);
        const bool wants = conn == Connective::Dnf;
        if ((bit == 0) != wants) return 0;
    }
    return Rational::pow2(-static_cast<long>(unfixed));
}

Rational derand_total(const std::vector<WideFormulaState>& states, const Restriction& rho) {
    Rational total = 0;
    for (const WideFormulaState& st : states) {
        Rational prod = 1;
        for (const KnfClause& sub : st.subclauses)
            prod *= Rational(1) - clause_weight(sub, st.connective, rho);
        total += prod;
    }
    return total;
}

} // namespace

Restriction derandomized_restriction(const std::vector<Knf>& formulas,
                                     const std::vector<SelectionEntry>& witnesses,
                                     const std::set<uint32_t>& T, uint32_t n, std::size_t b,
                                     const RestrictionConfig& cfg) {
    if (witnesses.size() != formulas.size())
        throw std::invalid_argument("derandomized_restriction: one witness per formula required");
    std::vector<WideFormulaState> wide;
    std::size_t max_width = 0;
    for (std::size_t i = 0; i < formulas.size(); ++i) {
        const auto* w = std::get_if<WideWitness>(&witnesses[i].witness);
        if (w == nullptr) continue;
        WideFormulaState st;
        st.connective = formulas[i].connective;
        st.subclauses = w->subclauses;
        for (const KnfClause& sub : st.subclauses) {
            max_width = std::max(max_width, sub.width());
            for (uint32_t v : sub.support())
                if (!T.count(v))
                    throw std::invalid_argument("derandomized_restriction: witness leaves T");
        }
        wide.push_back(std::move(st));
    }

    if (!wide.empty()) {
        // Hypothesis ell * (1 - 2^-c)^(ceil(k ln n)) < 1, checked exactly.
        const std::size_t exponent = wide_witness_threshold(n, cfg.k);
        Rational base = Rational(1) - Rational::pow2(-static_cast<long>(std::max<std::size_t>(max_width, 1)));
        Rational bound = Rational(static_cast<long>(wide.size())) *
                         base.pow(static_cast<unsigned long>(exponent));
        if (bound >= 1)
            throw std::invalid_argument("derandomized_restriction: hypothesis l(1-2^-c)^(k ln n) < 1 unmet");
    }

    Restriction rho(n);
    for (uint32_t v : T) {
        rho.set(v, 0);
        Rational phi0 = derand_total(wide, rho);
        rho.set(v, 1);
        Rational phi1 = derand_total(wide, rho);
        rho.set(v, phi0 <= phi1 ? 0 : 1);  // ties fix the variable to 0
    }

    // Postcondition: every formula trivialized or on at most b live literals.
    for (const Knf& f : formulas) {
        KnfSimplification simp = knf_apply_restriction(f, rho);
        if (!simp.trivialized && simp.live_vars.size() > b)
            throw std::runtime_error("derandomized_restriction: postcondition failed");
    }
    return rho;
}

Rational derand_prefix_potential(const std::vector<Knf>& formulas,
                                 const std::vector<SelectionEntry>& witnesses,
                                 const std::set<uint32_t>& T, uint32_t n,
                                 const std::vector<uint8_t>& prefix_bits) {
    std::vector<WideFormulaState> wide;
    for (std::size_t i = 0; i < formulas.size(); ++i) {
        const auto* w = std::get_if<WideWitness>(&witnesses[i].witness);
        if (w == nullptr) continue;
        wide.push_back({formulas[i].connective, w->subclauses});
    }
    Restriction rho(n);
    std::size_t idx = 0;
    for (uint32_t v : T) {
        if (idx >= prefix_bits.size()) break;
        rho.set(v, prefix_bits[idx++]);
    }
    return derand_total(wide, rho);
}

// --- depth reduction --------------------------------------------------------

namespace {

// Truth table of a restricted k-NF over its live variables (sorted order).
std::vector<uint8_t> knf_truth_table(const Knf& f, const std::vector<uint32_t>& vars, uint32_t n,
                                     const Restriction& rho) {
    std::vector<uint8_t> table(std::size_t{1} << vars.size());
    Circuit circ = f.to_circuit(n);
    for (uint64_t a = 0; a < table.size(); ++a) {
        Restriction full = rho;
        for (std::size_t j = 0; j < vars.size(); ++j) full.set(vars[j], (a >> j) & 1);
        Bits x(n, 0);
        for (uint32_t v = 1; v <= n; ++v)
            if (full.is_set(v)) x[v - 1] = static_cast<uint8_t>(full.value(v));
        table[a] = circ.eval1(x) ? 1 : 0;
    }
    return table;
}

// Rewrites a truth table over `vars` as clauses of the requested connective:
// CNF clauses exclude falsifying rows, DNF terms cover satisfying rows.
std::vector<KnfClause> table_to_clauses(const std::vector<uint8_t>& table,
                                        const std::vector<uint32_t>& vars, Connective conn) {
    std::vector<KnfClause> clauses;
    for (uint64_t a = 0; a < table.size(); ++a) {
        const bool row = table[a] != 0;
        if (conn == Connective::Cnf ? row : !row) continue;
        KnfClause c;
        for (std::size_t j = 0; j < vars.size(); ++j) {
            const bool bit = (a >> j) & 1;
            if (conn == Connective::Cnf) {
                // Exclude this row: clause true everywhere except at `a`.
                if (bit) c.neg.insert(vars[j]);
                else c.pos.insert(vars[j]);
            } else {
                if (bit) c.pos.insert(vars[j]);
                else c.neg.insert(vars[j]);
            }
        }
        clauses.push_back(std::move(c));
    }
    return clauses;
}

LayeredGate clause_to_gate(const KnfClause& c) {
    LayeredGate g;
    for (uint32_t v : c.pos) g.feeds.push_back(static_cast<int32_t>(v));
    for (uint32_t v : c.neg) g.feeds.push_back(-static_cast<int32_t>(v));
    return g;
}

} // namespace

LayeredAC0 depth_reduce(const LayeredAC0& c, const Restriction& rho, std::size_t b2) {
    c.validate();
    if (c.depth() < 2) throw std::invalid_argument("depth_reduce: needs depth >= 2");
    const uint32_t n = c.num_inputs;

    // Status of every layer-2 gate under rho.
    struct GateStatus {
        std::optional<int> constant;
        Knf simplified;
        std::vector<uint32_t> live;
    };
    std::vector<GateStatus> statuses;
    for (std::size_t gi = 0; gi < c.layers[1].size(); ++gi) {
        Knf f = c.layer2_gate_as_knf(gi);
        KnfSimplification simp = knf_apply_restriction(f, rho);
        GateStatus st;
        if (simp.trivialized) {
            st.constant = *simp.trivialized;
        } else {
            if (simp.live_vars.size() > b2)
                throw std::invalid_argument("depth_reduce: a layer-2 gate depends on more than b2 literals");
            st.simplified = std::move(simp.simplified);
            st.live.assign(simp.live_vars.begin(), simp.live_vars.end());
        }
        statuses.push_back(std::move(st));
    }

    LayeredAC0 out;
    out.num_inputs = n;

    if (c.depth() == 2) {
        // The output gate itself must collapse to depth 1.
        const GateStatus& st = statuses[0];
        if (st.constant) {
            out.first_layer_and = *st.constant == 1;  // empty AND = 1, empty OR = 0
            out.layers = {{LayeredGate{}}};
            return out;
        }
        if (st.simplified.clauses.size() == 1) {
            out.first_layer_and = st.simplified.connective == Connective::Dnf;
            out.layers = {{clause_to_gate(st.simplified.clauses[0])}};
            return out;
        }
        // Last resort: a single AND/OR of literals may still match the table.
        std::vector<uint8_t> table = knf_truth_table(st.simplified, st.live, n, rho);
        for (Connective conn : {Connective::Cnf, Connective::Dnf}) {
            std::vector<KnfClause> clauses = table_to_clauses(table, st.live, conn);
            if (clauses.size() == 1) {
                out.first_layer_and = conn == Connective::Cnf;
                out.layers = {{clause_to_gate(clauses[0])}};
                return out;
            }
        }
        throw std::invalid_argument("depth_reduce: depth-2 gate did not collapse to a single gate");
    }

    // d >= 3: rewrite each surviving layer-2 gate as a CNF/DNF matching the
    // layer-3 connective and merge its clauses straight into layer 3.
    const bool parent_and = c.layer_is_and(2);
    const Connective rewrite_conn = parent_and ? Connective::Cnf : Connective::Dnf;
    std::vector<LayeredGate> new_first;
    std::vector<std::vector<int32_t>> replacement(statuses.size());
    for (std::size_t gi = 0; gi < statuses.size(); ++gi) {
        const GateStatus& st = statuses[gi];
        if (st.constant) {
            const int v = *st.constant;
            if (parent_and ? v == 1 : v == 0) continue;  // absorbed
            // Forces the parent: encode as an empty clause of the first layer.
            new_first.push_back(LayeredGate{});
            replacement[gi].push_back(static_cast<int32_t>(new_first.size() - 1));
            continue;
        }
        std::vector<uint8_t> table = knf_truth_table(st.simplified, st.live, n, rho);
        for (const KnfClause& cl : table_to_clauses(table, st.live, rewrite_conn)) {
            new_first.push_back(clause_to_gate(cl));
            replacement[gi].push_back(static_cast<int32_t>(new_first.size() - 1));
        }
    }
    out.first_layer_and = !parent_and;
    out.layers.push_back(std::move(new_first));
    std::vector<LayeredGate> merged_layer3;
    for (const LayeredGate& g : c.layers[2]) {
        LayeredGate ng;
        for (int32_t f : g.feeds) {
            const auto& rep = replacement[static_cast<std::size_t>(f)];
            const GateStatus& st = statuses[static_cast<std::size_t>(f)];
            if (st.constant && rep.empty()) continue;  // absorbed constant
            ng.feeds.insert(ng.feeds.end(), rep.begin(), rep.end());
        }
        merged_layer3.push_back(std::move(ng));
    }
    out.layers.push_back(std::move(merged_layer3));
    for (std::size_t li = 3; li < c.layers.size(); ++li) out.layers.push_back(c.layers[li]);
    out.validate();
    return out;
}

// --- parity counterexample pipeline ------------------------------------------

namespace {

uint32_t integer_sqrt(uint32_t n) {
    uint32_t r = 0;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

int parity_of(const Bits& x) {
    int p = 0;
    for (uint8_t b : x) p ^= b;
    return p;
}

std::optional<Bits> scan_for_disagreement(const Circuit& circ, uint32_t n) {
    if (n > 26) return std::nullopt;
    for (uint64_t v = 0; v < (uint64_t{1} << n); ++v) {
        Bits x = index_to_bits(v, n);
        if ((circ.eval1(x) ? 1 : 0) != parity_of(x)) return x;
    }
    return std::nullopt;
}

// Renumbers a formula from original variable ids into 1..n_free over the
// free variables of rho (increasing order).
Knf project_formula(const Knf& f, const std::vector<uint32_t>& free_list) {
    std::map<uint32_t, uint32_t> to_reduced;
    for (std::size_t j = 0; j < free_list.size(); ++j)
        to_reduced[free_list[j]] = static_cast<uint32_t>(j + 1);
    Knf out;
    out.connective = f.connective;
    for (const KnfClause& c : f.clauses) {
        KnfClause nc;
        for (uint32_t v : c.pos) nc.pos.insert(to_reduced.at(v));
        for (uint32_t v : c.neg) nc.neg.insert(to_reduced.at(v));
        out.clauses.push_back(std::move(nc));
    }
    return out;
}

} // namespace

ParitySeparation parity_separating_input(const LayeredAC0& c, std::size_t k) {
    c.validate();
    if (c.depth() > 2)
        throw std::invalid_argument("parity_separating_input: only depth <= 2 is supported");
    const uint32_t n = c.num_inputs;
    const Circuit circ = c.to_circuit();
    ParitySeparation result;

    auto finish = [&](const Bits& x) {
        if ((circ.eval1(x) ? 1 : 0) == parity_of(x))
            throw std::logic_error("parity_separating_input: produced witness failed verification");
        result.witness = x;
        return result;
    };

    // Degenerate shapes go straight to enumeration.
    if (c.depth() == 1 || n <= 12) {
        auto x = scan_for_disagreement(circ, n);
        if (!x) throw std::runtime_error("parity_separating_input: circuit agrees with parity everywhere");
        return finish(*x);
    }

    RestrictionConfig cfg;
    cfg.k = std::max<std::size_t>(k, 1);
    cfg.adaptive_b = true;

    // Stage 1: first-layer gates as 1-NFs.
    std::vector<Knf> stage1;
    for (const LayeredGate& g : c.layers[0]) {
        Knf f;
        f.connective = c.layer_is_and(0) ? Connective::Cnf : Connective::Dnf;
        for (int32_t lit : g.feeds) {
            KnfClause cl;
            if (lit > 0) cl.pos.insert(static_cast<uint32_t>(lit));
            else cl.neg.insert(static_cast<uint32_t>(-lit));
            f.clauses.push_back(std::move(cl));
        }
        stage1.push_back(std::move(f));
    }
    const uint32_t t1 = std::max<uint32_t>(1, integer_sqrt(n));
    SelectionResult sel1 = select_subset(stage1, n, t1, cfg);
    std::size_t b1 = cfg.b;
    for (const SelectionEntry& e : sel1.entries)
        if (const auto* w = std::get_if<NarrowWitness>(&e.witness))
            b1 = std::max(b1, w->live_literals.size());
    Restriction rho1 = derandomized_restriction(stage1, sel1.entries, sel1.T, n, b1, cfg);
    result.stages.push_back({sel1.T, rho1, b1});

    // Stage 2: the output gate as a k-NF over the surviving variables.
    Knf top = c.layer2_gate_as_knf(0);
    KnfSimplification simp = knf_apply_restriction(top, rho1);
    Restriction rho_total = rho1;
    if (!simp.trivialized) {
        std::vector<uint32_t> free1 = rho1.free_vars();
        const uint32_t n1 = static_cast<uint32_t>(free1.size());
        Knf reduced = project_formula(simp.simplified, free1);
        const uint32_t t2 = std::max<uint32_t>(1, integer_sqrt(n1));
        SelectionResult sel2 = select_subset({reduced}, n1, t2, cfg);
        std::size_t b2 = cfg.b;
        for (const SelectionEntry& e : sel2.entries)
            if (const auto* w = std::get_if<NarrowWitness>(&e.witness))
                b2 = std::max(b2, w->live_literals.size());
        Restriction rho2_red = derandomized_restriction({reduced}, sel2.entries, sel2.T, n1, b2, cfg);
        Restriction rho2(n);
        std::set<uint32_t> T2;
        for (uint32_t rv = 1; rv <= n1; ++rv) {
            if (rho2_red.is_set(rv)) {
                rho2.set(free1[rv - 1], rho2_red.value(rv));
                T2.insert(free1[rv - 1]);
            }
        }
        rho_total = rho1.merged_with(rho2);
        result.stages.push_back({T2, rho2, b2});
    }

    // Exhaust the survivors.
    std::vector<uint32_t> free_vars = rho_total.free_vars();
    if (free_vars.size() > 20)
        throw std::runtime_error("parity_separating_input: too many free variables after restrictions");
    for (uint64_t a = 0; a < (uint64_t{1} << free_vars.size()); ++a) {
        Bits free_bits(free_vars.size());
        for (std::size_t j = 0; j < free_vars.size(); ++j) free_bits[j] = (a >> j) & 1;
        Bits x = rho_total.complete(free_bits);
        if ((circ.eval1(x) ? 1 : 0) != parity_of(x)) return finish(x);
    }
    throw std::runtime_error(
        "parity_separating_input: restricted circuit matched parity on every free assignment");
}

Rational agreement_fraction(const Circuit& c, CountingOracle& oracle, Precision prec) {
    return oracle.query(c.parity_tester(), prec);
}

} // namespace apx
