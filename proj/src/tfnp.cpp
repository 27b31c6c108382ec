#include "apx/tfnp.hpp"

#include <algorithm>
#include <stdexcept>

#include "apx/bits.hpp"

namespace apx {

// --- WeightCode --------------------------------------------------------------

WeightCode::WeightCode(std::size_t m, std::size_t k) : m_(m), k_(std::min(k, m)) {
    counts_.assign(m_ + 1, std::vector<mpz_class>(k_ + 1));
    for (std::size_t cap = 0; cap <= k_; ++cap) counts_[0][cap] = 1;
    for (std::size_t len = 1; len <= m_; ++len) {
        for (std::size_t cap = 0; cap <= k_; ++cap) {
            counts_[len][cap] = counts_[len - 1][cap];  // leading 0
            if (cap > 0) counts_[len][cap] += counts_[len - 1][cap - 1];  // leading 1
        }
    }
    mpz_class total = counts_[m_][k_];
    std::size_t bits = 0;
    mpz_class p = 1;
    while (p < total) { p <<= 1; ++bits; }
    codeword_bits_ = bits;
}

mpz_class WeightCode::num_strings() const { return counts_[m_][k_]; }

mpz_class WeightCode::rank(const Bits& y) const {
    if (y.size() != m_) throw std::invalid_argument("weight code: wrong string length");
    if (hamming_weight(y) > k_) throw std::invalid_argument("weight code: weight above the cap");
    mpz_class r = 0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < m_; ++i) {
        if (y[i]) {
            // All strings with this prefix and a 0 here come first.
            r += counts_[m_ - i - 1][k_ - used];
            ++used;
        }
    }
    return r;
}

Bits WeightCode::unrank(const mpz_class& rank_in) const {
    if (rank_in < 0 || rank_in >= num_strings()) throw std::out_of_range("weight code: rank out of range");
    mpz_class r = rank_in;
    Bits y(m_, 0);
    std::size_t used = 0;
    for (std::size_t i = 0; i < m_; ++i) {
        const mpz_class zeros = counts_[m_ - i - 1][k_ - used];
        if (r < zeros) continue;
        if (used == k_) throw std::logic_error("weight code: unrank overflow");
        r -= zeros;
        y[i] = 1;
        ++used;
    }
    return y;
}

Bits WeightCode::encode(const Bits& y) const {
    mpz_class r = rank(y);
    Bits cw(codeword_bits_, 0);
    for (std::size_t j = 0; j < codeword_bits_; ++j)
        cw[j] = mpz_tstbit(r.get_mpz_t(), j) != 0 ? 1 : 0;
    return cw;
}

Bits WeightCode::decode(const Bits& codeword) const {
    if (codeword.size() != codeword_bits_) throw std::invalid_argument("weight code: bad codeword length");
    mpz_class r = 0;
    for (std::size_t j = codeword.size(); j-- > 0;) {
        r <<= 1;
        if (codeword[j]) r += 1;
    }
    return unrank(r);
}

// --- builtin predictor generators ---------------------------------------------

namespace {

// Constant-0 prediction of the first bit.
std::pair<uint32_t, Circuit> gen_const0(const FlatDistribution&) {
    return {1, Circuit::constant(0, 0)};
}

// Majority vote for the last bit: scans D and outputs the more common value
// as a constant predictor (ties predict 0).
std::pair<uint32_t, Circuit> gen_last_bit_majority(const FlatDistribution& dist) {
    const uint32_t n = static_cast<uint32_t>(dist.width);
    std::size_t ones = 0;
    for (const Bits& u : dist.strings) ones += u[n - 1];
    const int guess = 2 * ones > dist.strings.size() ? 1 : 0;
    return {n, Circuit::constant(n - 1, guess)};
}

// Predicts the last bit as the parity of the previous bits, or its negation,
// whichever matches D better.
std::pair<uint32_t, Circuit> gen_prefix_parity(const FlatDistribution& dist) {
    const uint32_t n = static_cast<uint32_t>(dist.width);
    std::size_t parity_hits = 0;
    for (const Bits& u : dist.strings) {
        int par = 0;
        for (uint32_t j = 0; j + 1 < n; ++j) par ^= u[j];
        parity_hits += (par == u[n - 1]);
    }
    Circuit par = Circuit::parity(n - 1);
    if (2 * parity_hits >= dist.strings.size()) return {n, par};
    return {n, par.negate()};
}

// Copies the previous bit.
std::pair<uint32_t, Circuit> gen_copy_previous(const FlatDistribution& dist) {
    const uint32_t n = static_cast<uint32_t>(dist.width);
    if (n < 2) return {1, Circuit::constant(0, 0)};
    return {n, Circuit::input_bit(n - 1, n - 1)};
}

} // namespace

PredictorGenerator builtin_generator(const std::string& name) {
    if (name == "const0") return gen_const0;
    if (name == "last_bit_majority") return gen_last_bit_majority;
    if (name == "prefix_parity") return gen_prefix_parity;
    if (name == "copy_previous") return gen_copy_previous;
    throw std::invalid_argument("unknown builtin generator: " + name);
}

std::vector<std::string> builtin_generator_names() {
    return {"const0", "last_bit_majority", "prefix_parity", "copy_previous"};
}

// --- Refuter(Yao) ---------------------------------------------------------------

bool RefuterInstance::parameter_condition() const {
    const Rational lhs = delta * delta / 10 * Rational(static_cast<long>(m));
    const Rational rhs(static_cast<long>(s) + static_cast<long>(ceil_log2(n)) + 1);
    return lhs >= rhs;
}

std::size_t RefuterInstance::weight_cap() const {
    Rational cap = (Rational(1, 2) - delta) * Rational(static_cast<long>(m));
    if (cap < 0) return 0;
    return static_cast<std::size_t>(cap.floor().get_ui());
}

std::size_t RefuterInstance::tuple_bits() const {
    WeightCode code(m, weight_cap());
    return ceil_log2(n) + s + code.codeword_bits() +
           static_cast<std::size_t>(n - 1) * static_cast<std::size_t>(m);
}

RefuterInstance RefuterInstance::with_builtin(uint32_t n, uint32_t m, uint32_t s, Rational delta,
                                              const std::string& generator_name) {
    RefuterInstance inst;
    inst.n = n;
    inst.m = m;
    inst.s = s;
    inst.delta = std::move(delta);
    inst.generator_name = generator_name;
    inst.generator = builtin_generator(generator_name);
    return inst;
}

namespace {

Rational generator_success(const RefuterInstance& inst, const FlatDistribution& dist,
                           uint32_t* index_out = nullptr) {
    auto [i, pred] = inst.generator(dist);
    if (i < 1 || i > inst.n) throw std::runtime_error("generator returned an index out of range");
    if (pred.num_inputs() != i - 1 || !pred.single_output())
        throw std::runtime_error("generator returned a predictor with the wrong arity");
    if (pred.description_bits() > inst.s)
        throw std::runtime_error("generator output exceeds the size budget s");
    if (index_out != nullptr) *index_out = i;
    uint64_t hits = 0;
    for (const Bits& u : dist.strings) {
        Bits prefix(u.begin(), u.begin() + (i - 1));
        if ((pred.eval1(prefix) ? 1 : 0) == u[i - 1]) ++hits;
    }
    return Rational(static_cast<long>(hits), static_cast<long>(dist.strings.size()));
}

} // namespace

bool check_refuter_solution(const RefuterInstance& inst, const FlatDistribution& dist) {
    dist.validate();
    if (dist.width != inst.n || dist.strings.size() != inst.m)
        throw std::invalid_argument("refuter: distribution shape mismatch");
    Rational success = generator_success(inst, dist);
    return success < Rational(1, 2) + inst.delta;
}

RefuterSolveResult solve_refuter_randomized(const RefuterInstance& inst, uint64_t seed,
                                            uint64_t max_tries) {
    Prng rng(seed);
    RefuterSolveResult result;
    for (uint64_t t = 0; t < max_tries; ++t) {
        ++result.tries;
        FlatDistribution dist;
        dist.width = inst.n;
        for (uint32_t j = 0; j < inst.m; ++j) dist.strings.push_back(rng.bits(inst.n));
        if (check_refuter_solution(inst, dist)) {
            result.solution = std::move(dist);
            return result;
        }
    }
    return result;
}

// --- LossyCode --------------------------------------------------------------------

LossyCodeInstance LossyCodeInstance::from_circuits(Circuit compressor, Circuit decompressor) {
    if (compressor.num_outputs() != compressor.num_inputs() - 1)
        throw std::invalid_argument("lossycode: compressor must map n bits to n-1");
    if (decompressor.num_inputs() != compressor.num_inputs() - 1 ||
        decompressor.num_outputs() != compressor.num_inputs())
        throw std::invalid_argument("lossycode: decompressor must map n-1 bits to n");
    LossyCodeInstance inst;
    inst.n = compressor.num_inputs();
    Circuit comp = compressor;
    Circuit decomp = decompressor;
    inst.compress = [comp](const Bits& x) { return comp.eval(x); };
    inst.decompress = [decomp](const Bits& w) { return decomp.eval(w); };
    inst.compressor_circuit = std::move(compressor);
    inst.decompressor_circuit = std::move(decompressor);
    return inst;
}

bool check_lossycode_solution(const LossyCodeInstance& inst, const Bits& x) {
    if (x.size() != inst.n) throw std::invalid_argument("lossycode: input length mismatch");
    return inst.decompress(inst.compress(x)) != x;
}

LossySolveResult solve_lossycode_randomized(const LossyCodeInstance& inst, uint64_t seed,
                                            uint64_t max_tries) {
    Prng rng(seed);
    LossySolveResult result;
    for (uint64_t t = 0; t < max_tries; ++t) {
        ++result.tries;
        Bits x = rng.bits(inst.n);
        if (check_lossycode_solution(inst, x)) {
            result.solution = std::move(x);
            return result;
        }
    }
    return result;
}

// --- the reduction ------------------------------------------------------------------

FlatDistribution bits_to_distribution(const Bits& x, uint32_t n, uint32_t m) {
    if (x.size() != static_cast<std::size_t>(n) * m)
        throw std::invalid_argument("bits_to_distribution: length mismatch");
    FlatDistribution dist;
    dist.width = n;
    for (uint32_t j = 0; j < m; ++j)
        dist.strings.emplace_back(x.begin() + static_cast<std::size_t>(j) * n,
                                  x.begin() + static_cast<std::size_t>(j + 1) * n);
    return dist;
}

Bits distribution_to_bits(const FlatDistribution& dist) {
    Bits x;
    for (const Bits& s : dist.strings) x.insert(x.end(), s.begin(), s.end());
    return x;
}

RefuterReduction refuter_to_lossycode(const RefuterInstance& inst) {
    if (!inst.parameter_condition())
        throw std::invalid_argument("reduction: parameter regime (delta^2/10)m >= s + ceil(log n) + 1 unmet");
    const std::size_t nm = static_cast<std::size_t>(inst.n) * inst.m;
    const std::size_t tuple = inst.tuple_bits();
    if (tuple >= nm)
        throw std::invalid_argument("reduction: tuple encoding does not fit below nm bits");

    const uint32_t n = inst.n;
    const uint32_t m = inst.m;
    const std::size_t idx_bits = ceil_log2(n);
    const std::size_t s = inst.s;
    WeightCode code(m, inst.weight_cap());
    const std::size_t cw_bits = code.codeword_bits();
    const Rational need = Rational(1, 2) + inst.delta;
    const RefuterInstance instance = inst;  // captured by the closures

    auto compress = [=](const Bits& x) -> Bits {
        const Bits abort_output(nm - 1, 0);
        FlatDistribution dist = bits_to_distribution(x, n, m);
        std::pair<uint32_t, Circuit> out;
        try {
            out = instance.generator(dist);
        } catch (...) {
            return abort_output;
        }
        const auto& [i, pred] = out;
        if (i < 1 || i > n || pred.num_inputs() != i - 1 || !pred.single_output() ||
            pred.description_bits() > s)
            return abort_output;
        Bits errors(m, 0);
        uint64_t hits = 0;
        for (uint32_t j = 0; j < m; ++j) {
            const Bits& u = dist.strings[j];
            Bits prefix(u.begin(), u.begin() + (i - 1));
            const uint8_t guess = pred.eval1(prefix) ? 1 : 0;
            errors[j] = guess ^ u[i - 1];
            hits += (errors[j] == 0);
        }
        if (Rational(static_cast<long>(hits), static_cast<long>(m)) < need) return abort_output;
        // Pack (i, P, encoded errors, D minus bit i), zero-padded to nm-1.
        Bits packed;
        packed.reserve(nm - 1);
        for (std::size_t b = 0; b < idx_bits; ++b) packed.push_back(((i - 1) >> b) & 1);
        Bits pd = pred.pack();
        pd.resize(s, 0);
        packed.insert(packed.end(), pd.begin(), pd.end());
        Bits cw = code.encode(errors);
        packed.insert(packed.end(), cw.begin(), cw.end());
        for (const Bits& u : dist.strings)
            for (uint32_t b = 0; b < n; ++b)
                if (b != i - 1) packed.push_back(u[b]);
        packed.resize(nm - 1, 0);
        return packed;
    };

    auto decompress = [=](const Bits& w) -> Bits {
        try {
            std::size_t pos = 0;
            uint32_t i = 0;
            for (std::size_t b = 0; b < idx_bits; ++b) i |= static_cast<uint32_t>(w[pos++]) << b;
            i += 1;
            Bits pd(w.begin() + pos, w.begin() + pos + s);
            pos += s;
            Circuit pred = Circuit::unpack(pd);
            Bits cw(w.begin() + pos, w.begin() + pos + cw_bits);
            pos += cw_bits;
            Bits errors = code.decode(cw);
            Bits x;
            x.reserve(nm);
            for (uint32_t j = 0; j < m; ++j) {
                Bits reduced(w.begin() + pos + static_cast<std::size_t>(j) * (n - 1),
                             w.begin() + pos + static_cast<std::size_t>(j + 1) * (n - 1));
                Bits full(n);
                for (uint32_t b = 0; b < i - 1; ++b) full[b] = reduced[b];
                for (uint32_t b = i; b < n; ++b) full[b] = reduced[b - 1];
                Bits prefix(full.begin(), full.begin() + (i - 1));
                full[i - 1] = (pred.eval1(prefix) ? 1 : 0) ^ errors[j];
                x.insert(x.end(), full.begin(), full.end());
            }
            return x;
        } catch (...) {
            return Bits(nm, 0);
        }
    };

    RefuterReduction red;
    red.lossy.n = static_cast<uint32_t>(nm);
    red.lossy.compress = compress;
    red.lossy.decompress = decompress;
    red.tuple_bits = tuple;
    red.codeword_bits = cw_bits;
    red.solution_mapper = [=](const Bits& x) {
        FlatDistribution dist = bits_to_distribution(x, n, m);
        if (!check_refuter_solution(instance, dist))
            throw std::logic_error("reduction: lossy solution did not map to a refuter solution");
        return dist;
    };
    return red;
}

// --- iterated compression schemes ----------------------------------------------------

std::size_t iterated_output_bits(std::size_t ell, uint32_t n, uint32_t r, std::size_t rounds) {
    std::size_t len = ell;
    std::size_t remainders = 0;
    for (std::size_t i = 0; i < rounds; ++i) {
        const std::size_t blocks = len / n;
        remainders += len - blocks * n;
        len = blocks * static_cast<std::size_t>(n - 1);
    }
    return len + remainders + rounds * static_cast<std::size_t>(r);
}

namespace {

struct RoundShapes {
    std::vector<std::size_t> z_len;  // z_0 .. z_d
    std::vector<std::size_t> y_len;  // y_1 .. y_d
};

RoundShapes round_shapes(std::size_t ell, uint32_t n, std::size_t rounds) {
    RoundShapes s;
    s.z_len.push_back(ell);
    std::size_t len = ell;
    for (std::size_t i = 0; i < rounds; ++i) {
        const std::size_t blocks = len / n;
        s.y_len.push_back(len - blocks * n);
        len = blocks * static_cast<std::size_t>(n - 1);
        s.z_len.push_back(len);
    }
    return s;
}

} // namespace

CompressionScheme stretch_amplify(const Circuit& base_compress, const Circuit& base_decompress,
                                  std::size_t ell, std::size_t rounds) {
    const uint32_t total_in = base_compress.num_inputs();
    const uint32_t n_out = static_cast<uint32_t>(base_compress.num_outputs());
    const uint32_t n = n_out + 1;
    if (total_in <= n - 1 || n < 2)
        throw std::invalid_argument("stretch_amplify: base compressor must map n+r bits to n-1");
    const uint32_t r = total_in - n;
    if (base_decompress.num_inputs() != n - 1 || base_decompress.num_outputs() != n)
        throw std::invalid_argument("stretch_amplify: base decompressor must map n-1 bits to n");
    if (ell == 0) throw std::invalid_argument("stretch_amplify: ell must be positive");

    CompressionScheme scheme;
    scheme.input_bits = ell + rounds * static_cast<std::size_t>(r);
    scheme.output_bits = iterated_output_bits(ell, n, r, rounds);
    scheme.rounds = rounds;
    scheme.block_n = n;
    scheme.seed_r = r;
    scheme.ell = ell;
    const Circuit comp = base_compress;
    const Circuit decomp = base_decompress;
    const RoundShapes shapes = round_shapes(ell, n, rounds);

    scheme.compress = [=](const Bits& input) -> Bits {
        if (input.size() != scheme.input_bits) throw std::invalid_argument("compress: length mismatch");
        Bits z(input.begin(), input.begin() + static_cast<std::ptrdiff_t>(ell));
        std::vector<Bits> seeds;
        std::size_t pos = ell;
        for (std::size_t i = 0; i < rounds; ++i) {
            seeds.emplace_back(input.begin() + pos, input.begin() + pos + r);
            pos += r;
        }
        std::vector<Bits> remainders;
        for (std::size_t i = 0; i < rounds; ++i) {
            const std::size_t blocks = z.size() / n;
            Bits next;
            for (std::size_t j = 0; j < blocks; ++j) {
                Bits block(z.begin() + static_cast<std::ptrdiff_t>(j * n),
                           z.begin() + static_cast<std::ptrdiff_t>((j + 1) * n));
                Bits out = comp.eval(concat(block, seeds[i]));
                next.insert(next.end(), out.begin(), out.end());
            }
            remainders.emplace_back(z.begin() + static_cast<std::ptrdiff_t>(blocks * n), z.end());
            z = std::move(next);
        }
        Bits out = z;
        for (const Bits& y : remainders) out.insert(out.end(), y.begin(), y.end());
        for (const Bits& sd : seeds) out.insert(out.end(), sd.begin(), sd.end());
        return out;
    };

    scheme.decompress = [=](const Bits& packed) -> Bits {
        if (packed.size() != scheme.output_bits) throw std::invalid_argument("decompress: length mismatch");
        std::size_t pos = shapes.z_len[rounds];
        Bits z(packed.begin(), packed.begin() + static_cast<std::ptrdiff_t>(pos));
        std::vector<Bits> remainders;
        for (std::size_t i = 0; i < rounds; ++i) {
            remainders.emplace_back(packed.begin() + pos, packed.begin() + pos + shapes.y_len[i]);
            pos += shapes.y_len[i];
        }
        std::vector<Bits> seeds;
        for (std::size_t i = 0; i < rounds; ++i) {
            seeds.emplace_back(packed.begin() + pos, packed.begin() + pos + r);
            pos += r;
        }
        for (std::size_t step = 0; step < rounds; ++step) {
            const std::size_t i = rounds - 1 - step;  // undo round i
            const std::size_t blocks = z.size() / (n - 1);
            Bits prev;
            for (std::size_t j = 0; j < blocks; ++j) {
                Bits block(z.begin() + static_cast<std::ptrdiff_t>(j * (n - 1)),
                           z.begin() + static_cast<std::ptrdiff_t>((j + 1) * (n - 1)));
                Bits out = decomp.eval(block);
                prev.insert(prev.end(), out.begin(), out.end());
            }
            prev.insert(prev.end(), remainders[i].begin(), remainders[i].end());
            z = std::move(prev);
        }
        Bits out = z;
        for (const Bits& sd : seeds) out.insert(out.end(), sd.begin(), sd.end());
        return out;
    };
    return scheme;
}

CompressionScheme worstcase_from_average(const Circuit& base_compress,
                                         const Circuit& base_decompress, std::size_t ell,
                                         std::size_t rounds) {
    const uint32_t n = base_compress.num_inputs();
    if (n < 2 || base_compress.num_outputs() != n - 1)
        throw std::invalid_argument("w2a: base compressor must map n bits to n-1");
    if (base_decompress.num_inputs() != n - 1 || base_decompress.num_outputs() != n)
        throw std::invalid_argument("w2a: base decompressor must map n-1 bits to n");
    if (ell == 0) throw std::invalid_argument("w2a: ell must be positive");

    CompressionScheme scheme;
    scheme.input_bits = ell + rounds * static_cast<std::size_t>(n);
    scheme.output_bits = iterated_output_bits(ell, n, n, rounds);
    scheme.rounds = rounds;
    scheme.block_n = n;
    scheme.seed_r = n;
    scheme.ell = ell;
    const Circuit comp = base_compress;
    const Circuit decomp = base_decompress;
    const RoundShapes shapes = round_shapes(ell, n, rounds);

    scheme.compress = [=](const Bits& input) -> Bits {
        if (input.size() != scheme.input_bits) throw std::invalid_argument("compress: length mismatch");
        Bits z(input.begin(), input.begin() + static_cast<std::ptrdiff_t>(ell));
        std::vector<Bits> seeds;
        std::size_t pos = ell;
        for (std::size_t i = 0; i < rounds; ++i) {
            seeds.emplace_back(input.begin() + pos, input.begin() + pos + n);
            pos += n;
        }
        std::vector<Bits> remainders;
        for (std::size_t i = 0; i < rounds; ++i) {
            const std::size_t blocks = z.size() / n;
            Bits next;
            for (std::size_t j = 0; j < blocks; ++j) {
                Bits block(z.begin() + static_cast<std::ptrdiff_t>(j * n),
                           z.begin() + static_cast<std::ptrdiff_t>((j + 1) * n));
                Bits out = comp.eval(xor_bits(block, seeds[i]));
                next.insert(next.end(), out.begin(), out.end());
            }
            remainders.emplace_back(z.begin() + static_cast<std::ptrdiff_t>(blocks * n), z.end());
            z = std::move(next);
        }
        Bits out = z;
        for (const Bits& y : remainders) out.insert(out.end(), y.begin(), y.end());
        for (const Bits& sd : seeds) out.insert(out.end(), sd.begin(), sd.end());
        return out;
    };

    scheme.decompress = [=](const Bits& packed) -> Bits {
        if (packed.size() != scheme.output_bits) throw std::invalid_argument("decompress: length mismatch");
        std::size_t pos = shapes.z_len[rounds];
        Bits z(packed.begin(), packed.begin() + static_cast<std::ptrdiff_t>(pos));
        std::vector<Bits> remainders;
        for (std::size_t i = 0; i < rounds; ++i) {
            remainders.emplace_back(packed.begin() + pos, packed.begin() + pos + shapes.y_len[i]);
            pos += shapes.y_len[i];
        }
        std::vector<Bits> seeds;
        for (std::size_t i = 0; i < rounds; ++i) {
            seeds.emplace_back(packed.begin() + pos, packed.begin() + pos + n);
            pos += n;
        }
        for (std::size_t step = 0; step < rounds; ++step) {
            const std::size_t i = rounds - 1 - step;
            const std::size_t blocks = z.size() / (n - 1);
            Bits prev;
            for (std::size_t j = 0; j < blocks; ++j) {
                Bits block(z.begin() + static_cast<std::ptrdiff_t>(j * (n - 1)),
                           z.begin() + static_cast<std::ptrdiff_t>((j + 1) * (n - 1)));
                Bits out = xor_bits(decomp.eval(block), seeds[i]);
                prev.insert(prev.end(), out.begin(), out.end());
            }
            prev.insert(prev.end(), remainders[i].begin(), remainders[i].end());
            z = std::move(prev);
        }
        Bits out = z;
        for (const Bits& sd : seeds) out.insert(out.end(), sd.begin(), sd.end());
        return out;
    };
    return scheme;
}

} // namespace apx
