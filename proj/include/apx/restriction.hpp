#ifndef APX_RESTRICTION_HPP
#define APX_RESTRICTION_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "apx/knf.hpp"
#include "apx/oracle.hpp"
#include "apx/rational.hpp"

namespace apx {

enum class StarMark : uint8_t { Star, Circle };  // star = stays free, circle = joins T

// Prefix of a star/circle assignment over [n].
using StarString = std::vector<StarMark>;

struct SetSystem {
    uint32_t n = 0;
    std::vector<std::set<uint32_t>> sets;

    std::size_t size_bound() const;
    void validate() const;
};

// Potential for disjoint sets: the probability that fewer than `s` of the
// sets end up inside the circle region when the unmarked positions are
// extended independently (star with probability p).
Rational phi_small_sets(const StarString& x, const SetSystem& sys, std::size_t s,
                        const Rational& p);

// Peeled decomposition into families of pairwise disjoint residues; family i
// holds subsets of distinct original sets.
struct DisjointFamily {
    std::vector<std::set<uint32_t>> sets;
    std::vector<std::size_t> origin;  // index of the original set each came from
};

std::vector<DisjointFamily> disjoint_decomposition(const SetSystem& sys);

enum class PotentialCase { Wide, Narrow };

struct GeneralPotential {
    PotentialCase mode = PotentialCase::Narrow;
    // Wide mode: the chosen disjoint witness sets and their origins.
    SetSystem wide_sets;
    std::vector<std::size_t> wide_origin;
    std::size_t wide_threshold = 0;  // s = ceil(ell/2)
    // Narrow mode: union of all sets.
    std::set<uint32_t> narrow_union;
    std::size_t narrow_bound = 0;    // b

    Rational eval(const StarString& x, const Rational& p, uint32_t n) const;
};

// Branches between the wide (disjoint subfamily of >= ceil(2k ln n) sets) and
// narrow (binomial tail over the union) potentials.
GeneralPotential phi_general(const SetSystem& sys, std::size_t k, std::size_t b);

struct NarrowWitness {
    std::set<uint32_t> live_literals;  // at most b variables stay live
};

struct WideWitness {
    std::vector<KnfClause> subclauses;  // disjoint subclauses of distinct clauses
};

struct SelectionEntry {
    std::variant<NarrowWitness, WideWitness> witness;
};

struct SelectionResult {
    std::set<uint32_t> T;
    std::vector<SelectionEntry> entries;  // one per formula
    StarString path;
    Rational initial_potential;
    Rational final_potential;
};

struct RestrictionConfig {
    std::size_t k = 2;   // size-bound exponent of the lemma
    std::size_t b = 4;   // narrow width target
    bool adaptive_b = false;  // raise b until the greedy initial bound holds
    std::size_t b_max = 16;
};

// Greedy star/circle selection minimizing q_circle + (1-p)(n-i) + n*sum Phi_i;
// returns T (the circled positions) plus verified per-formula witnesses.
// Throws when the final potential exceeds (1-p)n (out of regime).
SelectionResult select_subset(const std::vector<Knf>& formulas, uint32_t n, uint32_t t,
                              const RestrictionConfig& cfg = {});

// Greedy assignment to the variables of T driving every wide-witnessed
// formula to a trivialized state; narrow formulas are unconstrained. The
// hypothesis ell * (1 - 2^-c)^(k ln n) < 1 is checked exactly.
Restriction derandomized_restriction(const std::vector<Knf>& formulas,
                                     const std::vector<SelectionEntry>& witnesses,
                                     const std::set<uint32_t>& T, uint32_t n, std::size_t b,
                                     const RestrictionConfig& cfg = {});

// Potential of the derandomized restriction after fixing a prefix of T's
// variables (in increasing order); exposed for the recursion-identity checks.
Rational derand_prefix_potential(const std::vector<Knf>& formulas,
                                 const std::vector<SelectionEntry>& witnesses,
                                 const std::set<uint32_t>& T, uint32_t n,
                                 const std::vector<uint8_t>& prefix_bits);

// Gate-merging depth reduction once every layer-2 gate is trivialized or
// depends on at most b2 literals under rho.
LayeredAC0 depth_reduce(const LayeredAC0& c, const Restriction& rho, std::size_t b2);

struct ParityPipelineStage {
    std::set<uint32_t> T;
    Restriction rho;
    std::size_t b_used = 0;
};

struct ParitySeparation {
    Bits witness;                 // input with c(x) != parity(x)
    std::vector<ParityPipelineStage> stages;
};

// End-to-end counterexample finder for depth <= 2 circuits within the n^k
// size bound: alternates subset selection and derandomized restriction, then
// exhausts the surviving variables; the output is verified by evaluation.
ParitySeparation parity_separating_input(const LayeredAC0& c, std::size_t k);

// Oracle probability that the circuit agrees with parity.
Rational agreement_fraction(const Circuit& c, CountingOracle& oracle, Precision prec);

} // namespace apx

#endif
