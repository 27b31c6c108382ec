#ifndef APX_RANDVAR_HPP
#define APX_RANDVAR_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "apx/circuit.hpp"
#include "apx/oracle.hpp"
#include "apx/rational.hpp"

namespace apx {

// Fixed-point output encoding of a sampler circuit: an optional sign bit,
// `int_bits` integer bits (bit j weighs 2^j) and `frac_bits` fraction bits
// (bit j weighs 2^-(j+1)), in that output order.
struct ValueCodec {
    bool has_sign = false;
    uint32_t int_bits = 1;
    uint32_t frac_bits = 0;

    std::size_t total_bits() const { return (has_sign ? 1u : 0u) + int_bits + frac_bits; }
    Rational decode(const Bits& pattern) const;
    std::optional<Bits> encode(const Rational& v) const;
    // Smallest codec able to represent every value in `values`.
    static ValueCodec fitting(const std::vector<Rational>& values);
};

// Feasible random variable: explicit support, seed length, sampler circuit.
class RandomVariable {
public:
    RandomVariable(std::vector<Rational> support, uint32_t seed_length, Circuit sampler,
                   ValueCodec codec, uint64_t spot_check_seed = 1);

    const std::vector<Rational>& support() const { return support_; }
    uint32_t seed_length() const { return seed_length_; }
    const Circuit& sampler() const { return sampler_; }
    const ValueCodec& codec() const { return codec_; }

    Rational support_norm() const;  // sum of |v| over the support
    // Circuit accepting seeds x with decoded sampler output == v; Null when v
    // is not representable (so its probability is exactly 0).
    Circuit indicator(const Rational& v) const;
    // Value on one seed.
    Rational value_at(const Bits& seed) const;
    // Restriction of the rightmost bits of the seed.
    RandomVariable restricted(const Bits& suffix) const;

    // Convenience constructors.
    static RandomVariable indicator_of(const Circuit& event);  // 0/1 over the event circuit
    static RandomVariable constant(uint32_t seed_length, const Rational& v);

private:
    std::vector<Rational> support_;
    uint32_t seed_length_;
    Circuit sampler_;
    ValueCodec codec_;
};

Rational approx_expectation(const RandomVariable& x, CountingOracle& oracle, Precision prec);

struct LinearCombination {
    std::vector<RandomVariable> variables;
    std::vector<Rational> coefficients;

    uint32_t seed_length() const;
    Rational coefficient_norm() const;
    Rational support_norm() const;  // over the union of supports
    Rational mu(CountingOracle& oracle, Precision prec) const;
    Rational mu_restricted(const Bits& suffix, CountingOracle& oracle, Precision prec) const;
};

// Greedy seed fixing: extends a suffix bit by bit, keeping the combination's
// value from dropping; with an exact oracle mu|_z >= mu exactly.
Bits avg_sampler(const LinearCombination& combo, std::size_t k, CountingOracle& oracle,
                 Precision prec);

Rational variance(const RandomVariable& x, CountingOracle& oracle, Precision prec);
Rational covariance(const RandomVariable& x, const RandomVariable& y, CountingOracle& oracle,
                    Precision prec);
Rational expectation_of_product(const RandomVariable& x, const RandomVariable& y,
                                CountingOracle& oracle, Precision prec);

// Builds the sampler of f(X_1,...,X_m) pointwise from the samplers of the
// X_i (which must share a seed); the result's support is f over the support
// product. Used for linear combinations, products and threshold events.
RandomVariable combine_pointwise(const std::vector<RandomVariable>& xs,
                                 const std::function<Rational(const std::vector<Rational>&)>& f,
                                 uint64_t spot_check_seed = 1);

// Explicit independence: samplers read disjoint parts of the shared seed.
bool explicitly_independent(const RandomVariable& x, const RandomVariable& y);

// --- probability-inequality verification -------------------------------

enum class IneqSuite {
    Complementation,
    Linearity,
    UnionBound,
    Markov,
    Chebyshev,
    VarianceIdentity,
    PairwiseSum,
    Multiplication,
    OneSided,
    ChernoffLogLog,
};

const char* suite_name(IneqSuite suite);
IneqSuite suite_from_name(const std::string& name);

struct IneqInstance {
    IneqSuite suite;
    // Population depends on the suite; unused members stay empty.
    std::vector<RandomVariable> variables;
    std::vector<Rational> coefficients;
    Rational gamma_offset;          // linearity: additive constant
    std::optional<Circuit> event;   // complementation / one-sided / chernoff base
    Rational k_factor;              // markov / chebyshev / one-sided repetitions
    std::size_t repetitions = 0;    // one-sided k, chernoff m
    Rational t_param;               // chernoff t
    std::size_t threshold = 0;      // chernoff k
};

struct IneqReport {
    IneqSuite suite;
    bool hypothesis_ok = true;
    std::string hypothesis_note;
    Rational lhs;
    Rational rhs;       // rational part of the bound
    bool rhs_is_exact = true;  // false when the bound involves e^x brackets
    Rational slack;     // rhs - lhs when both rational
    bool pass = false;
    std::string note;
};

IneqReport verify_inequality(const IneqInstance& instance, CountingOracle& oracle, Precision prec,
                             Precision beta);

} // namespace apx

#endif
