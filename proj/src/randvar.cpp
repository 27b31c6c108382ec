#include "apx/randvar.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "apx/config.hpp"
#include "apx/prng.hpp"

namespace apx {

Rational ValueCodec::decode(const Bits& pattern) const {
    if (pattern.size() != total_bits()) throw std::invalid_argument("codec: pattern width mismatch");
    std::size_t pos = 0;
    bool negative = false;
    if (has_sign) negative = pattern[pos++] != 0;
    Rational v = 0;
    for (uint32_t j = 0; j < int_bits; ++j)
        if (pattern[pos++]) v += Rational::pow2(static_cast<long>(j));
    for (uint32_t j = 0; j < frac_bits; ++j)
        if (pattern[pos++]) v += Rational::pow2(-static_cast<long>(j) - 1);
    return negative ? -v : v;
}

std::optional<Bits> ValueCodec::encode(const Rational& v) const {
    if (v < 0 && !has_sign) return std::nullopt;
    Rational scaled = v.abs() * Rational::pow2(static_cast<long>(frac_bits));
    if (!scaled.is_integer()) return std::nullopt;
    mpz_class m = scaled.numerator();
    if (m != 0 && mpz_sizeinbase(m.get_mpz_t(), 2) > static_cast<std::size_t>(int_bits) + frac_bits)
        return std::nullopt;
    Bits pattern(total_bits(), 0);
    std::size_t pos = 0;
    if (has_sign) pattern[pos++] = v < 0 ? 1 : 0;
    // Integer bit j weighs 2^j, i.e. bit (j + frac_bits) of m; fraction bit j
    // weighs 2^-(j+1), i.e. bit (frac_bits - 1 - j) of m.
    for (uint32_t j = 0; j < int_bits; ++j)
        pattern[pos + j] = mpz_tstbit(m.get_mpz_t(), j + frac_bits) != 0 ? 1 : 0;
    for (uint32_t j = 0; j < frac_bits; ++j)
        pattern[pos + int_bits + j] = mpz_tstbit(m.get_mpz_t(), frac_bits - 1 - j) != 0 ? 1 : 0;
    return pattern;
}

ValueCodec ValueCodec::fitting(const std::vector<Rational>& values) {
    ValueCodec c{false, 1, 0};
    for (const Rational& v : values) {
        if (v < 0) c.has_sign = true;
        mpz_class den = v.denominator();
        uint32_t frac = 0;
        mpz_class d = den;
        while (d > 1) {
            if (mpz_tstbit(d.get_mpz_t(), 0) != 0)
                throw std::invalid_argument("codec: value not dyadic: " + v.str());
            d >>= 1;
            ++frac;
        }
        c.frac_bits = std::max(c.frac_bits, frac);
    }
    for (const Rational& v : values) {
        mpz_class scaled = (v.abs() * Rational::pow2(c.frac_bits)).numerator();
        uint32_t need = scaled == 0 ? 1 : static_cast<uint32_t>(mpz_sizeinbase(scaled.get_mpz_t(), 2));
        if (need > c.frac_bits) c.int_bits = std::max(c.int_bits, need - c.frac_bits);
    }
    return c;
}

RandomVariable::RandomVariable(std::vector<Rational> support, uint32_t seed_length, Circuit sampler,
                               ValueCodec codec, uint64_t spot_check_seed)
    : support_(std::move(support)), seed_length_(seed_length), sampler_(std::move(sampler)),
      codec_(codec) {
    std::sort(support_.begin(), support_.end());
    support_.erase(std::unique(support_.begin(), support_.end()), support_.end());
    if (support_.empty()) throw std::invalid_argument("random variable needs a non-empty support");
    if (sampler_.num_inputs() != seed_length_)
        throw std::invalid_argument("sampler input length must equal the seed length");
    if (sampler_.num_outputs() != codec_.total_bits())
        throw std::invalid_argument("sampler output width must match the codec");
    auto in_support = [&](const Bits& seed) {
        Rational v = codec_.decode(sampler_.eval(seed));
        return std::binary_search(support_.begin(), support_.end(), v);
    };
    if (seed_length_ <= enumeration_cap()) {
        for (uint64_t s = 0; s < (uint64_t{1} << seed_length_); ++s)
            if (!in_support(index_to_bits(s, seed_length_)))
                throw std::invalid_argument("sampler output outside the declared support");
    } else {
        Prng rng(spot_check_seed);
        for (int trial = 0; trial < 1000; ++trial)
            if (!in_support(rng.bits(seed_length_)))
                throw std::invalid_argument("sampler output outside the declared support");
    }
}

Rational RandomVariable::support_norm() const {
    Rational s = 0;
    for (const Rational& v : support_) s += v.abs();
    return s;
}

Circuit RandomVariable::indicator(const Rational& v) const {
    auto pattern = codec_.encode(v);
    if (!pattern) return Circuit::null_circuit(seed_length_);
    return sampler_.indicator_eq(*pattern);
}

Rational RandomVariable::value_at(const Bits& seed) const {
    return codec_.decode(sampler_.eval(seed));
}

RandomVariable RandomVariable::restricted(const Bits& suffix) const {
    return RandomVariable(support_, seed_length_ - static_cast<uint32_t>(suffix.size()),
                          sampler_.fix_suffix(suffix), codec_);
}

RandomVariable RandomVariable::indicator_of(const Circuit& event) {
    if (!event.single_output()) throw std::invalid_argument("indicator_of needs a single-output event");
    return RandomVariable({Rational(0), Rational(1)}, event.num_inputs(), event,
                          ValueCodec{false, 1, 0});
}

RandomVariable RandomVariable::constant(uint32_t seed_length, const Rational& v) {
    ValueCodec codec = ValueCodec::fitting({v});
    Bits pattern = *codec.encode(v);
    CircuitBuilder b(seed_length);
    std::vector<uint32_t> outs;
    for (uint8_t bit : pattern) outs.push_back(b.add_const(bit));
    return RandomVariable({v}, seed_length, std::move(b).build(std::move(outs)), codec);
}

Rational approx_expectation(const RandomVariable& x, CountingOracle& oracle, Precision prec) {
    Rational e = 0;
    for (const Rational& v : x.support()) {
        if (v == 0) continue;  // zero values cannot move the sum
        e += v * oracle.query(x.indicator(v), prec);
    }
    return e;
}

uint32_t LinearCombination::seed_length() const {
    if (variables.empty()) return 0;
    const uint32_t n = variables.front().seed_length();
    for (const RandomVariable& x : variables)
        if (x.seed_length() != n) throw std::invalid_argument("combination needs a shared seed length");
    return n;
}

Rational LinearCombination::coefficient_norm() const {
    Rational s = 0;
    for (const Rational& l : coefficients) s += l.abs();
    return s;
}

Rational LinearCombination::support_norm() const {
    std::set<Rational> values;
    Rational s = 0;
    for (const RandomVariable& x : variables)
        for (const Rational& v : x.support())
            if (values.insert(v).second) s += v.abs();
    return s;
}

Rational LinearCombination::mu(CountingOracle& oracle, Precision prec) const {
    if (variables.size() != coefficients.size())
        throw std::invalid_argument("combination arity mismatch");
    Rational m = 0;
    for (std::size_t i = 0; i < variables.size(); ++i)
        m += coefficients[i] * approx_expectation(variables[i], oracle, prec);
    return m;
}

Rational LinearCombination::mu_restricted(const Bits& suffix, CountingOracle& oracle,
                                          Precision prec) const {
    Rational m = 0;
    for (std::size_t i = 0; i < variables.size(); ++i)
        m += coefficients[i] * approx_expectation(variables[i].restricted(suffix), oracle, prec);
    return m;
}

Bits avg_sampler(const LinearCombination& combo, std::size_t k, CountingOracle& oracle,
                 Precision prec) {
    const uint32_t n = combo.seed_length();
    if (combo.variables.empty()) return Bits(k, 0);
    if (k > n) throw std::invalid_argument("avg_sampler: suffix longer than the seed");
    Bits z;
    for (std::size_t step = 0; step < k; ++step) {
        Bits z0 = z, z1 = z;
        z0.insert(z0.begin(), 0);
        z1.insert(z1.begin(), 1);
        Rational mu0 = combo.mu_restricted(z0, oracle, prec);
        Rational mu1 = combo.mu_restricted(z1, oracle, prec);
        z = mu1 > mu0 ? std::move(z1) : std::move(z0);  // ties fix the bit to 0
    }
    return z;
}

namespace {

// Inline several samplers over one shared seed; returns, per variable, the
// equality-indicator gate for each of its support values.
struct InlinedFamily {
    CircuitBuilder builder;
    std::vector<std::map<Rational, uint32_t>> eq_gates;

    explicit InlinedFamily(const std::vector<RandomVariable>& xs)
        : builder(xs.empty() ? 0 : xs.front().seed_length()) {
        const uint32_t n = builder.num_inputs();
        std::vector<uint32_t> inputs(n);
        for (uint32_t i = 1; i <= n; ++i) inputs[i - 1] = builder.add_input(i);
        for (const RandomVariable& x : xs) {
            if (x.seed_length() != n) throw std::invalid_argument("family needs one seed length");
            std::vector<uint32_t> outs = builder.inline_circuit(x.sampler(), inputs);
            std::map<Rational, uint32_t> eq;
            for (const Rational& v : x.support()) {
                auto pattern = x.codec().encode(v);
                if (!pattern) { eq[v] = builder.add_const(0); continue; }
                std::vector<uint32_t> conj;
                for (std::size_t j = 0; j < outs.size(); ++j)
                    conj.push_back((*pattern)[j] ? outs[j] : builder.add_not(outs[j]));
                eq[v] = builder.add_and(std::move(conj));
            }
            eq_gates.push_back(std::move(eq));
        }
    }
};

std::vector<std::vector<Rational>> support_tuples(const std::vector<RandomVariable>& xs) {
    std::vector<std::vector<Rational>> tuples{{}};
    for (const RandomVariable& x : xs) {
        std::vector<std::vector<Rational>> next;
        for (const auto& t : tuples) {
            for (const Rational& v : x.support()) {
                auto e = t;
                e.push_back(v);
                next.push_back(std::move(e));
            }
        }
        tuples = std::move(next);
    }
    return tuples;
}

} // namespace

RandomVariable combine_pointwise(const std::vector<RandomVariable>& xs,
                                 const std::function<Rational(const std::vector<Rational>&)>& f,
                                 uint64_t spot_check_seed) {
    if (xs.empty()) throw std::invalid_argument("combine_pointwise needs at least one variable");
    InlinedFamily fam(xs);
    auto tuples = support_tuples(xs);
    std::vector<Rational> out_support;
    std::vector<std::pair<Rational, uint32_t>> terms;  // (value, tuple-AND gate)
    for (const auto& tuple : tuples) {
        Rational w = f(tuple);
        out_support.push_back(w);
        std::vector<uint32_t> conj;
        for (std::size_t i = 0; i < xs.size(); ++i) conj.push_back(fam.eq_gates[i].at(tuple[i]));
        terms.emplace_back(w, fam.builder.add_and(std::move(conj)));
    }
    ValueCodec codec = ValueCodec::fitting(out_support);
    const std::size_t width = codec.total_bits();
    std::vector<std::vector<uint32_t>> bit_terms(width);
    for (const auto& [w, gate] : terms) {
        Bits pattern = *codec.encode(w);
        for (std::size_t j = 0; j < width; ++j)
            if (pattern[j]) bit_terms[j].push_back(gate);
    }
    std::vector<uint32_t> outs;
    for (std::size_t j = 0; j < width; ++j) outs.push_back(fam.builder.add_or(bit_terms[j]));
    Circuit sampler = std::move(fam.builder).build(std::move(outs));
    return RandomVariable(out_support, xs.front().seed_length(), std::move(sampler), codec,
                          spot_check_seed);
}

Rational expectation_of_product(const RandomVariable& x, const RandomVariable& y,
                                CountingOracle& oracle, Precision prec) {
    if (x.seed_length() != y.seed_length())
        throw std::invalid_argument("product needs a shared seed length");
    InlinedFamily fam({x, y});
    // Group the pair events by product value and query one OR circuit each.
    std::map<Rational, std::vector<uint32_t>> by_value;
    for (const Rational& vx : x.support())
        for (const Rational& vy : y.support())
            by_value[vx * vy].push_back(
                fam.builder.add_and({fam.eq_gates[0].at(vx), fam.eq_gates[1].at(vy)}));
    Rational e = 0;
    std::vector<std::pair<Rational, uint32_t>> outs;
    for (auto& [w, gates] : by_value) {
        if (w == 0) continue;
        outs.emplace_back(w, fam.builder.add_or(gates));
    }
    if (outs.empty()) return 0;
    std::vector<uint32_t> out_ids;
    for (auto& [w, id] : outs) out_ids.push_back(id);
    Circuit all = std::move(fam.builder).build(out_ids);
    for (std::size_t j = 0; j < outs.size(); ++j)
        e += outs[j].first * oracle.query(all.select_output(static_cast<uint32_t>(j)), prec);
    return e;
}

Rational variance(const RandomVariable& x, CountingOracle& oracle, Precision prec) {
    const Rational mu = approx_expectation(x, oracle, prec);
    // E[(X-mu)^2] over the derived support (V-mu)^2; the event (X-mu)^2 = w
    // is the union of the matching X = v events.
    std::map<Rational, std::vector<Rational>> grouping;
    for (const Rational& v : x.support()) grouping[(v - mu) * (v - mu)].push_back(v);
    Rational var = 0;
    for (const auto& [w, vs] : grouping) {
        if (w == 0) continue;
        InlinedFamily fam({x});
        std::vector<uint32_t> parts;
        for (const Rational& v : vs) parts.push_back(fam.eq_gates[0].at(v));
        uint32_t gate = fam.builder.add_or(std::move(parts));
        var += w * oracle.query(std::move(fam.builder).build({gate}), prec);
    }
    return var;
}

Rational covariance(const RandomVariable& x, const RandomVariable& y, CountingOracle& oracle,
                    Precision prec) {
    Rational exy = expectation_of_product(x, y, oracle, prec);
    return exy - approx_expectation(x, oracle, prec) * approx_expectation(y, oracle, prec);
}

bool explicitly_independent(const RandomVariable& x, const RandomVariable& y) {
    if (x.seed_length() != y.seed_length()) return false;
    std::vector<uint32_t> a = x.sampler().live_inputs();
    std::vector<uint32_t> b = y.sampler().live_inputs();
    std::vector<uint32_t> inter;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
    return inter.empty();
}

} // namespace apx
