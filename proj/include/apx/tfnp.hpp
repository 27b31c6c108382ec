#ifndef APX_TFNP_HPP
#define APX_TFNP_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "apx/circuit.hpp"
#include "apx/oracle.hpp"
#include "apx/prng.hpp"
#include "apx/rational.hpp"

namespace apx {

// --- constant-weight enumerative coding -----------------------------------

// Bijective lexicographic ranking of all m-bit strings of Hamming weight at
// most k; codewords are ceil(log2 #strings) bits.
class WeightCode {
public:
    WeightCode(std::size_t m, std::size_t k);

    std::size_t m() const { return m_; }
    std::size_t k() const { return k_; }
    std::size_t codeword_bits() const { return codeword_bits_; }
    mpz_class num_strings() const;  // sum of C(m, j) for j <= k

    Bits encode(const Bits& y) const;           // requires weight(y) <= k
    Bits decode(const Bits& codeword) const;    // inverse
    mpz_class rank(const Bits& y) const;
    Bits unrank(const mpz_class& rank) const;

private:
    std::size_t m_;
    std::size_t k_;
    std::size_t codeword_bits_;
    // counts_[len][cap] = number of len-bit strings of weight <= cap.
    std::vector<std::vector<mpz_class>> counts_;
};

// --- Refuter(Yao) -----------------------------------------------------------

// Deterministic predictor generator: maps a flat distribution to an index and
// a predictor circuit on index-1 inputs. Represented as a program object; the
// builtin registry gives stable, serializable generators.
using PredictorGenerator = std::function<std::pair<uint32_t, Circuit>(const FlatDistribution&)>;

PredictorGenerator builtin_generator(const std::string& name);
std::vector<std::string> builtin_generator_names();

struct RefuterInstance {
    uint32_t n = 0;       // string length
    uint32_t m = 0;       // distribution size
    uint32_t s = 0;       // predictor description size in bits
    Rational delta;       // advantage
    std::string generator_name;
    PredictorGenerator generator;

    // The theorem's parameter regime (delta^2/10) m >= s + ceil(log n) + 1.
    bool parameter_condition() const;
    // weight cap floor((1/2 - delta) m) used by the reduction's error coding.
    std::size_t weight_cap() const;
    // Exact tuple length of the compressed form; the reduction needs it < nm.
    std::size_t tuple_bits() const;

    static RefuterInstance with_builtin(uint32_t n, uint32_t m, uint32_t s, Rational delta,
                                        const std::string& generator_name);
};

// Runs G and evaluates the strict success-rate test; throws on malformed D or
// an oversized predictor description.
bool check_refuter_solution(const RefuterInstance& inst, const FlatDistribution& dist);

struct RefuterSolveResult {
    std::optional<FlatDistribution> solution;
    uint64_t tries = 0;
};

RefuterSolveResult solve_refuter_randomized(const RefuterInstance& inst, uint64_t seed,
                                            uint64_t max_tries);

// --- LossyCode ---------------------------------------------------------------

struct LossyCodeInstance {
    uint32_t n = 0;  // input length; compressor n -> n-1, decompressor n-1 -> n
    std::function<Bits(const Bits&)> compress;
    std::function<Bits(const Bits&)> decompress;
    std::optional<Circuit> compressor_circuit;
    std::optional<Circuit> decompressor_circuit;

    static LossyCodeInstance from_circuits(Circuit compressor, Circuit decompressor);
};

bool check_lossycode_solution(const LossyCodeInstance& inst, const Bits& x);

struct LossySolveResult {
    std::optional<Bits> solution;
    uint64_t tries = 0;
};

LossySolveResult solve_lossycode_randomized(const LossyCodeInstance& inst, uint64_t seed,
                                            uint64_t max_tries);

// --- the reduction ------------------------------------------------------------

struct RefuterReduction {
    LossyCodeInstance lossy;  // over nm bits
    // Maps any LossyCode solution back to a verified Refuter solution.
    std::function<FlatDistribution(const Bits&)> solution_mapper;
    std::size_t tuple_bits;
    std::size_t codeword_bits;
};

// Requires the theorem regime and the exact tuple-length check; the compressor
// aborts to the all-zero string whenever G's predictor misses the advantage.
RefuterReduction refuter_to_lossycode(const RefuterInstance& inst);

// Parses/serializes nm bits <-> a flat distribution of m n-bit strings.
FlatDistribution bits_to_distribution(const Bits& x, uint32_t n, uint32_t m);
Bits distribution_to_bits(const FlatDistribution& dist);

// --- iterated compression schemes ---------------------------------------------

// Block-compression scheme over ell + d*r bits built from a seeded base
// compressor (n + r -> n - 1) and decompressor (n - 1 -> n).
struct CompressionScheme {
    std::size_t input_bits = 0;   // ell + d*r (the seeds ride along)
    std::size_t output_bits = 0;  // exact recurrence value
    std::size_t rounds = 0;
    uint32_t block_n = 0;
    uint32_t seed_r = 0;
    std::size_t ell = 0;
    std::function<Bits(const Bits&)> compress;    // input_bits -> output_bits
    std::function<Bits(const Bits&)> decompress;  // output_bits -> input_bits
};

CompressionScheme stretch_amplify(const Circuit& base_compress, const Circuit& base_decompress,
                                  std::size_t ell, std::size_t rounds);

// Worst-case-from-average variant: the base pair is unseeded (n -> n-1) and
// every round XORs the blocks with a fresh n-bit mask before compressing.
CompressionScheme worstcase_from_average(const Circuit& base_compress,
                                         const Circuit& base_decompress, std::size_t ell,
                                         std::size_t rounds);

// Exact output length of the d-round recurrence (shared by both schemes).
std::size_t iterated_output_bits(std::size_t ell, uint32_t n, uint32_t r, std::size_t rounds);

} // namespace apx

#endif
