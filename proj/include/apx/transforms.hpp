#ifndef APX_TRANSFORMS_HPP
#define APX_TRANSFORMS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "apx/circuit.hpp"
#include "apx/oracle.hpp"
#include "apx/randvar.hpp"
#include "apx/rational.hpp"

namespace apx {

// Next-bit predictor: guesses bit `index` from bits 1..index-1.
struct Predictor {
    uint32_t index = 1;
    Circuit circuit;      // index-1 inputs, single output
    Rational advantage;   // measured success probability minus 1/2
};

// Hybrid-argument distinguisher-to-predictor transform. `g` maps m seed bits
// to n output bits, `c` distinguishes g's output distribution from uniform.
// Throws when the measured distinguishing gap is <= 2*delta.
Predictor yao_predictor(const Circuit& g, const Circuit& c, CountingOracle& oracle, Precision prec,
                        Precision beta);

// Builds the hybrid circuit C_i(u, x) = c(g(u)_{<=i} . x_{>i}) over m+n bits.
Circuit yao_hybrid(const Circuit& g, const Circuit& c, uint32_t i);

// Predictor extraction from a local-consistency failure of the empirical
// counting oracle over D: case analysis on the measured gap at the top bit of
// `c`. Throws when |gap| <= tau.
Predictor extract_predictor(const FlatDistribution& dist, const Circuit& c, const Rational& tau);

// Measured success rate of a predictor over a flat distribution.
Rational predictor_success(const Predictor& p, const FlatDistribution& dist);

// --- BLR linearity testing ---------------------------------------------

// Test circuit on 2n bits accepting iff C(x) xor C(y) != C(x xor y).
Circuit blr_test_circuit(const Circuit& c);
// Failure rate of the test as reported by the oracle.
Rational blr_test(const Circuit& c, CountingOracle& oracle, Precision prec);
// Majority-vote circuit D_{x,b}(r) = [C(x xor r) xor C(r) = b].
Circuit blr_vote_circuit(const Circuit& c, const Bits& x, int b);
// Self-corrected bit at x, when one vote circuit clears 1-4eps-(4delta+beta).
std::optional<int> blr_self_correct(const Circuit& c, const Bits& x, CountingOracle& oracle,
                                    Precision prec, const Rational& eps,
                                    const Rational& beta = Rational(0));

struct BlrDecodeResult {
    std::optional<Bits> z;
    Rational test_rate;
    std::optional<Rational> disagreement;  // P(T_{C,z}) when z was recovered
};

// Decodes the nearest linear function coordinate by coordinate; requires the
// measured test rate <= eps with eps, delta < 0.01.
BlrDecodeResult blr_decode(const Circuit& c, CountingOracle& oracle, Precision prec,
                           const Rational& eps, const Rational& beta = Rational(0));

// Circuit accepting x iff C(x) != <x,z> mod 2.
Circuit linear_disagreement_circuit(const Circuit& c, const Bits& z);
Circuit linear_function_circuit(const Bits& z);  // x -> <x,z> mod 2

// --- Schwartz-Zippel -----------------------------------------------------

struct PolyTerm {
    std::vector<uint32_t> exponents;  // one per variable
    uint64_t coefficient = 0;         // in F_p
};

// Explicit multivariate polynomial over a small prime field; the evaluation
// circuit works over fixed-width encodings of field elements.
class FieldPoly {
public:
    FieldPoly(uint64_t p, uint32_t num_vars, uint32_t degree_bound, std::vector<PolyTerm> terms);

    uint64_t p() const { return p_; }
    uint32_t num_vars() const { return m_; }
    uint32_t degree_bound() const { return d_; }
    uint32_t bits_per_element() const { return b_; }
    uint64_t evaluate(const std::vector<uint64_t>& point) const;
    bool is_zero_poly() const;
    // Accepts (x_1..x_m) iff every coordinate encodes a field element and the
    // polynomial evaluates to 0.
    Circuit zero_test_circuit() const;

    std::string to_json() const;
    static FieldPoly from_json(const std::string& text);

private:
    uint64_t p_;
    uint32_t m_;
    uint32_t d_;
    uint32_t b_;
    std::vector<PolyTerm> terms_;
};

struct SchwartzZippelReport {
    Rational zero_fraction;     // among valid field points
    Rational raw_probability;   // oracle answer over raw bit patterns
    Rational bound;             // m*d/p
    bool pass = false;
};

// Requires a witness point with f(z) != 0.
SchwartzZippelReport schwartz_zippel_check(const FieldPoly& f, const std::vector<uint64_t>& witness,
                                           CountingOracle& oracle, Precision prec);

// --- one-way communication protocols ------------------------------------

enum class CoinMode { Public, Private };

struct OneWayProtocol {
    CoinMode mode = CoinMode::Public;
    uint32_t n = 0;  // input length per party
    uint32_t m = 0;  // message length
    uint32_t r = 0;  // seed length
    Circuit alice;   // n + r -> m
    Circuit bob;     // n + m + r -> 1

    void validate() const;
    // Error-event circuit over the seed for a fixed pair (x, y).
    Circuit error_circuit(const Bits& x, const Bits& y, const Circuit& f) const;
};

struct ProtocolReport {
    Rational max_error;
    Bits worst_x;
    Bits worst_y;
};

ProtocolReport simulate_protocol(const OneWayProtocol& proto, const Circuit& f,
                                 CountingOracle& oracle, Precision prec);

// Public-coin equality protocol via linear hashing with an m x n matrix.
OneWayProtocol equality_protocol(uint32_t n, uint32_t m);
Circuit equality_function(uint32_t n);

// --- linear hashing ------------------------------------------------------

// Circuit over the nm matrix bits accepting iff Ax = Ay (mod 2).
Circuit linear_hash_collision_circuit(uint32_t n, uint32_t m, const Bits& x, const Bits& y);

struct CollisionReport {
    Rational probability;
    Rational bound;  // delta + beta + (1/2 + beta)^m
    bool pass = false;
};

CollisionReport linear_hash_collision_bound(uint32_t n, uint32_t m, const Bits& x, const Bits& y,
                                            CountingOracle& oracle, Precision prec, Precision beta);

} // namespace apx

#endif
