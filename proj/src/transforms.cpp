#include "apx/transforms.hpp"

#include <stdexcept>

#include <nlohmann/json.hpp>

#include "apx/config.hpp"

namespace apx {

Circuit yao_hybrid(const Circuit& g, const Circuit& c, uint32_t i) {
    const uint32_t m = g.num_inputs();
    const uint32_t n = c.num_inputs();
    if (g.num_outputs() != n) throw std::invalid_argument("yao: generator arity mismatch");
    if (i > n) throw std::invalid_argument("yao: hybrid index out of range");
    CircuitBuilder b(m + n);
    std::vector<uint32_t> u(m), x(n);
    for (uint32_t j = 1; j <= m; ++j) u[j - 1] = b.add_input(j);
    for (uint32_t j = 1; j <= n; ++j) x[j - 1] = b.add_input(m + j);
    std::vector<uint32_t> gu = b.inline_circuit(g, u);
    std::vector<uint32_t> z(n);
    for (uint32_t j = 0; j < n; ++j) z[j] = j < i ? gu[j] : x[j];
    uint32_t out = b.inline_circuit(c, z)[0];
    return std::move(b).build({out});
}

namespace {

// T(u, x) = 1 iff c(g(u)_{<i} . x_i . x_{>i}) xor x_i = g(u)_i, i.e. the
// predictor P_x(v) = c(v . x_{>=i}) xor x_i guesses bit i of g(u).
Circuit yao_success_circuit(const Circuit& g, const Circuit& c, uint32_t i) {
    const uint32_t m = g.num_inputs();
    const uint32_t n = c.num_inputs();
    CircuitBuilder b(m + n);
    std::vector<uint32_t> u(m), x(n);
    for (uint32_t j = 1; j <= m; ++j) u[j - 1] = b.add_input(j);
    for (uint32_t j = 1; j <= n; ++j) x[j - 1] = b.add_input(m + j);
    std::vector<uint32_t> gu = b.inline_circuit(g, u);
    std::vector<uint32_t> z(n);
    for (uint32_t j = 0; j < n; ++j) z[j] = j < i - 1 ? gu[j] : x[j];
    uint32_t w = b.inline_circuit(c, z)[0];
    uint32_t diff = b.add_xor({w, x[i - 1], gu[i - 1]});
    uint32_t out = b.add_not(diff);
    return std::move(b).build({out});
}

} // namespace

Predictor yao_predictor(const Circuit& g, const Circuit& c, CountingOracle& oracle, Precision prec,
                        Precision beta) {
    if (!c.single_output()) throw std::invalid_argument("yao: distinguisher must be single-output");
    const uint32_t m = g.num_inputs();
    const uint32_t n = c.num_inputs();
    if (g.num_outputs() != n) throw std::invalid_argument("yao: generator arity mismatch");

    const Rational p_real = oracle.query(c.compose(g), prec);
    const Rational p_uniform = oracle.query(c, prec);
    const Rational gap = (p_real - p_uniform).abs();
    const Rational two_delta = prec.delta() * 2;
    if (gap <= two_delta)
        throw std::runtime_error("yao: insufficient advantage (gap <= 2*delta)");

    // Hybrid walk: locate the largest step.
    std::vector<Rational> hybrid(n + 1);
    for (uint32_t i = 0; i <= n; ++i) hybrid[i] = oracle.query(yao_hybrid(g, c, i), prec);
    uint32_t best_i = 1;
    Rational best_step = -1;
    for (uint32_t i = 1; i <= n; ++i) {
        Rational step = (hybrid[i - 1] - hybrid[i]).abs();
        if (step > best_step) {
            best_step = step;
            best_i = i;
        }
    }

    // Fix the auxiliary string x (the last n seed bits of T) greedily so the
    // success probability stays away from 1/2.
    Circuit success = yao_success_circuit(g, c, best_i);
    Rational p_t = oracle.query(success, prec);
    LinearCombination combo{{RandomVariable::indicator_of(success)},
                            {p_t >= Rational(1, 2) ? Rational(1) : Rational(-1)}};
    Bits x = avg_sampler(combo, n, oracle, prec);

    // P(v) = c(v . x_i . x_{>i}) xor x_i.
    Bits suffix(x.begin() + (best_i - 1), x.end());
    Circuit predictor = c.fix_suffix(suffix);
    if (x[best_i - 1]) predictor = predictor.negate();

    // Success event over u alone, with the fixed x.
    Circuit t_fixed = success.fix_suffix(x);
    Rational rate;
    if (m <= enumeration_cap()) rate = exact_count(t_fixed);
    else rate = oracle.query(t_fixed, prec);
    Rational advantage = rate - Rational(1, 2);
    if (advantage < 0) {
        predictor = predictor.negate();
        advantage = -advantage;
    }
    (void)beta;
    return Predictor{best_i, std::move(predictor), advantage};
}

Rational predictor_success(const Predictor& p, const FlatDistribution& dist) {
    const uint32_t i = p.index;
    if (dist.width < i) throw std::invalid_argument("predictor index beyond distribution width");
    uint64_t hits = 0;
    for (const Bits& u : dist.strings) {
        Bits prefix(u.begin(), u.begin() + (i - 1));
        if ((p.circuit.eval1(prefix) ? 1 : 0) == u[i - 1]) ++hits;
    }
    return Rational(static_cast<long>(hits), static_cast<long>(dist.strings.size()));
}

namespace {

Rational bit_frequency(const FlatDistribution& dist, uint32_t index) {
    uint64_t ones = 0;
    for (const Bits& u : dist.strings) ones += u[index - 1];
    return Rational(static_cast<long>(ones), static_cast<long>(dist.strings.size()));
}

// Probability that pred(u_{<t}) agrees with u_t over D.
Rational agreement(const FlatDistribution& dist, const Circuit& pred, uint32_t t) {
    uint64_t hits = 0;
    for (const Bits& u : dist.strings) {
        Bits prefix(u.begin(), u.begin() + (t - 1));
        if ((pred.eval1(prefix) ? 1 : 0) == u[t - 1]) ++hits;
    }
    return Rational(static_cast<long>(hits), static_cast<long>(dist.strings.size()));
}

} // namespace

Predictor extract_predictor(const FlatDistribution& dist, const Circuit& c, const Rational& tau) {
    dist.validate();
    const uint32_t t = c.num_inputs();
    if (t == 0 || t > dist.width)
        throw std::invalid_argument("extract_predictor: circuit width out of range");
    const Rational parent = empirical_count(c, dist);
    const Rational p0 = empirical_count(c.fix_last(0), dist);
    const Rational p1 = empirical_count(c.fix_last(1), dist);
    const Rational gap = parent - (p0 + p1) / 2;
    if (gap.abs() <= tau) throw std::runtime_error("extract_predictor: no local violation");

    // Work with the positive direction: Pr[C'(u_{<t} u_t)] - Pr[C'(u_{<t}
    // !u_t)] = 2|gap| > 2tau for C' = c or its negation.
    const Circuit work = gap > 0 ? c : c.negate();
    const Rational q1 = bit_frequency(dist, t);
    const Rational half = Rational(1, 2);
    // term1 = Pr[!C'(u_{<t}0) = u_t] - Pr[u_t = 1]
    // term2 = Pr[C'(u_{<t}1) = u_t] - Pr[u_t = 0]; term1 + term2 = 2|gap|.
    Circuit cand_a = work.fix_last(0).negate();  // v -> !C'(v0)
    Circuit cand_b = work.fix_last(1);           // v -> C'(v1)
    Rational term1 = agreement(dist, cand_a, t) - q1;
    Rational term2 = agreement(dist, cand_b, t) - (Rational(1) - q1);

    Predictor result;
    result.index = t;
    if (term1 >= tau) {
        if (q1 <= half - tau / 2) result.circuit = Circuit::constant(t - 1, 0);
        else result.circuit = std::move(cand_a);
    } else if (term2 >= tau) {
        if (Rational(1) - q1 <= half - tau / 2) result.circuit = Circuit::constant(t - 1, 1);
        else result.circuit = std::move(cand_b);
    } else {
        throw std::logic_error("extract_predictor: case analysis exhausted");
    }
    result.advantage = agreement(dist, result.circuit, t) - half;
    if (result.advantage < tau / 2)
        throw std::logic_error("extract_predictor: advantage below tau/2");
    return result;
}

// --- BLR -----------------------------------------------------------------

Circuit blr_test_circuit(const Circuit& c) {
    if (!c.single_output()) throw std::invalid_argument("blr: circuit must be single-output");
    const uint32_t n = c.num_inputs();
    CircuitBuilder b(2 * n);
    std::vector<uint32_t> x(n), y(n), xy(n);
    for (uint32_t j = 1; j <= n; ++j) x[j - 1] = b.add_input(j);
    for (uint32_t j = 1; j <= n; ++j) y[j - 1] = b.add_input(n + j);
    for (uint32_t j = 0; j < n; ++j) xy[j] = b.add_xor({x[j], y[j]});
    uint32_t cx = b.inline_circuit(c, x)[0];
    uint32_t cy = b.inline_circuit(c, y)[0];
    uint32_t cxy = b.inline_circuit(c, xy)[0];
    uint32_t out = b.add_xor({cx, cy, cxy});  // 1 iff C(x)+C(y) != C(x+y)
    return std::move(b).build({out});
}

Rational blr_test(const Circuit& c, CountingOracle& oracle, Precision prec) {
    return oracle.query(blr_test_circuit(c), prec);
}

Circuit blr_vote_circuit(const Circuit& c, const Bits& x, int bit) {
    const uint32_t n = c.num_inputs();
    if (x.size() != n) throw std::invalid_argument("blr: point length mismatch");
    CircuitBuilder b(n);
    std::vector<uint32_t> r(n), xr(n);
    for (uint32_t j = 1; j <= n; ++j) r[j - 1] = b.add_input(j);
    for (uint32_t j = 0; j < n; ++j) xr[j] = x[j] ? b.add_not(r[j]) : r[j];
    uint32_t cr = b.inline_circuit(c, r)[0];
    uint32_t cxr = b.inline_circuit(c, xr)[0];
    uint32_t vote = b.add_xor({cxr, cr});
    uint32_t out = bit ? vote : b.add_not(vote);
    return std::move(b).build({out});
}

std::optional<int> blr_self_correct(const Circuit& c, const Bits& x, CountingOracle& oracle,
                                    Precision prec, const Rational& eps, const Rational& beta) {
    const Rational delta = oracle.is_exact() ? Rational(0) : prec.delta();
    const Rational threshold = Rational(1) - eps * 4 - (delta * 4 + beta);
    for (int bit : {0, 1}) {
        Rational p = oracle.query(blr_vote_circuit(c, x, bit), prec);
        if (p >= threshold) return bit;
    }
    return std::nullopt;
}

Circuit linear_function_circuit(const Bits& z) {
    const uint32_t n = static_cast<uint32_t>(z.size());
    CircuitBuilder b(n);
    std::vector<uint32_t> sel;
    for (uint32_t j = 1; j <= n; ++j) {
        uint32_t in = b.add_input(j);
        if (z[j - 1]) sel.push_back(in);
    }
    uint32_t out = b.add_xor(std::move(sel));
    return std::move(b).build({out});
}

Circuit linear_disagreement_circuit(const Circuit& c, const Bits& z) {
    const uint32_t n = c.num_inputs();
    if (z.size() != n) throw std::invalid_argument("blr: z length mismatch");
    CircuitBuilder b(n);
    std::vector<uint32_t> x(n);
    for (uint32_t j = 1; j <= n; ++j) x[j - 1] = b.add_input(j);
    uint32_t cx = b.inline_circuit(c, x)[0];
    std::vector<uint32_t> sel;
    for (uint32_t j = 0; j < n; ++j)
        if (z[j]) sel.push_back(x[j]);
    uint32_t lin = b.add_xor(std::move(sel));
    uint32_t out = b.add_xor({cx, lin});
    return std::move(b).build({out});
}

BlrDecodeResult blr_decode(const Circuit& c, CountingOracle& oracle, Precision prec,
                           const Rational& eps, const Rational& beta) {
    BlrDecodeResult result;
    result.test_rate = blr_test(c, oracle, prec);
    const Rational hundredth(1, 100);
    if (eps >= hundredth || prec.delta() >= hundredth)
        throw std::invalid_argument("blr_decode: needs eps, delta < 0.01");
    if (result.test_rate > eps) return result;  // precondition unmet; no z
    const uint32_t n = c.num_inputs();
    Bits z(n, 0);
    for (uint32_t i = 1; i <= n; ++i) {
        Bits e(n, 0);
        e[i - 1] = 1;
        auto bit = blr_self_correct(c, e, oracle, prec, eps, beta);
        if (!bit) return result;
        z[i - 1] = static_cast<uint8_t>(*bit);
    }
    result.disagreement = oracle.query(linear_disagreement_circuit(c, z), prec);
    result.z = std::move(z);
    return result;
}

// --- Schwartz-Zippel ------------------------------------------------------

FieldPoly::FieldPoly(uint64_t p, uint32_t num_vars, uint32_t degree_bound,
                     std::vector<PolyTerm> terms)
    : p_(p), m_(num_vars), d_(degree_bound), terms_(std::move(terms)) {
    if (p_ < 2) throw std::invalid_argument("field order must be >= 2");
    for (uint64_t q = 2; q * q <= p_; ++q)
        if (p_ % q == 0) throw std::invalid_argument("field order must be prime");
    b_ = static_cast<uint32_t>(ceil_log2(p_));
    if (b_ == 0) b_ = 1;
    for (const PolyTerm& t : terms_) {
        if (t.exponents.size() != m_) throw std::invalid_argument("term arity mismatch");
        if (t.coefficient >= p_) throw std::invalid_argument("coefficient outside the field");
        for (uint32_t e : t.exponents)
            if (e > d_) throw std::invalid_argument("term exceeds the individual degree bound");
    }
}

uint64_t FieldPoly::evaluate(const std::vector<uint64_t>& point) const {
    if (point.size() != m_) throw std::invalid_argument("evaluate: wrong point arity");
    for (uint64_t v : point)
        if (v >= p_) throw std::invalid_argument("evaluate: point outside the field");
    uint64_t acc = 0;
    for (const PolyTerm& t : terms_) {
        uint64_t term = t.coefficient % p_;
        for (uint32_t j = 0; j < m_; ++j) {
            for (uint32_t e = 0; e < t.exponents[j]; ++e) term = (term * point[j]) % p_;
        }
        acc = (acc + term) % p_;
    }
    return acc;
}

bool FieldPoly::is_zero_poly() const {
    // Coefficients can cancel; decide by full evaluation (fields here are tiny).
    std::vector<uint64_t> point(m_, 0);
    while (true) {
        if (evaluate(point) != 0) return false;
        uint32_t j = 0;
        while (j < m_ && ++point[j] == p_) point[j++] = 0;
        if (j == m_) return true;
    }
}

Circuit FieldPoly::zero_test_circuit() const {
    const uint32_t width = b_ * m_;
    CircuitBuilder bld(width);
    std::vector<uint32_t> inputs(width);
    for (uint32_t j = 1; j <= width; ++j) inputs[j - 1] = bld.add_input(j);
    // Coordinate j occupies inputs [j*b, (j+1)*b); bit i weighs 2^i.
    std::vector<std::vector<uint32_t>> coords(m_);
    for (uint32_t j = 0; j < m_; ++j)
        coords[j] = std::vector<uint32_t>(inputs.begin() + j * b_, inputs.begin() + (j + 1) * b_);
    auto equals_const = [&](const std::vector<uint32_t>& bits, uint64_t value) {
        std::vector<uint32_t> conj;
        for (uint32_t i = 0; i < bits.size(); ++i)
            conj.push_back(((value >> i) & 1) ? bits[i] : bld.add_not(bits[i]));
        return bld.add_and(std::move(conj));
    };
    // Validity: every coordinate decodes below p.
    std::vector<uint32_t> valid_parts;
    std::vector<std::vector<uint32_t>> coord_eq(m_);  // equality gates per field value
    for (uint32_t j = 0; j < m_; ++j) {
        std::vector<uint32_t> any;
        for (uint64_t v = 0; v < p_; ++v) {
            uint32_t eq = equals_const(coords[j], v);
            coord_eq[j].push_back(eq);
            any.push_back(eq);
        }
        valid_parts.push_back(bld.add_or(std::move(any)));
    }
    uint32_t valid = bld.add_and(std::move(valid_parts));
    // Zero set: union over all points with f = 0 of the coordinate equalities.
    std::vector<uint32_t> zero_terms;
    std::vector<uint64_t> point(m_, 0);
    while (true) {
        if (evaluate(point) == 0) {
            std::vector<uint32_t> conj;
            for (uint32_t j = 0; j < m_; ++j) conj.push_back(coord_eq[j][point[j]]);
            zero_terms.push_back(bld.add_and(std::move(conj)));
        }
        uint32_t j = 0;
        while (j < m_ && ++point[j] == p_) point[j++] = 0;
        if (j == m_) break;
    }
    uint32_t zero = bld.add_or(std::move(zero_terms));
    uint32_t out = bld.add_and({valid, zero});
    return std::move(bld).build({out});
}

std::string FieldPoly::to_json() const {
    nlohmann::ordered_json j;
    j["p"] = p_;
    j["vars"] = m_;
    j["degree"] = d_;
    nlohmann::ordered_json terms = nlohmann::ordered_json::array();
    for (const PolyTerm& t : terms_) {
        nlohmann::ordered_json item;
        item["exps"] = t.exponents;
        item["coeff"] = t.coefficient;
        terms.push_back(std::move(item));
    }
    j["terms"] = std::move(terms);
    return j.dump();
}

FieldPoly FieldPoly::from_json(const std::string& text) {
    auto j = nlohmann::ordered_json::parse(text);
    std::vector<PolyTerm> terms;
    for (const auto& item : j.at("terms")) {
        PolyTerm t;
        t.exponents = item.at("exps").get<std::vector<uint32_t>>();
        t.coefficient = item.at("coeff").get<uint64_t>();
        terms.push_back(std::move(t));
    }
    return FieldPoly(j.at("p").get<uint64_t>(), j.at("vars").get<uint32_t>(),
                     j.at("degree").get<uint32_t>(), std::move(terms));
}

SchwartzZippelReport schwartz_zippel_check(const FieldPoly& f, const std::vector<uint64_t>& witness,
                                           CountingOracle& oracle, Precision prec) {
    if (f.evaluate(witness) == 0)
        throw std::invalid_argument("schwartz-zippel: witness must be a non-zero point");
    SchwartzZippelReport rep;
    rep.raw_probability = oracle.query(f.zero_test_circuit(), prec);
    // Rescale from raw bit patterns to the valid-point space: the encoding
    // guard accepts exactly (p / 2^b)^m of the patterns.
    Rational valid = Rational(static_cast<long>(f.p()), 1) /
                     Rational::pow2(static_cast<long>(f.bits_per_element()));
    rep.zero_fraction = rep.raw_probability / valid.pow(f.num_vars());
    rep.bound = Rational(static_cast<long>(f.num_vars()) * static_cast<long>(f.degree_bound()),
                         static_cast<long>(f.p()));
    const Rational slack = oracle.is_exact() ? Rational(0) : prec.delta();
    rep.pass = rep.zero_fraction <= rep.bound + slack;
    return rep;
}

// --- protocols -------------------------------------------------------------

void OneWayProtocol::validate() const {
    if (alice.num_inputs() != n + r || alice.num_outputs() != m)
        throw std::invalid_argument("protocol: alice circuit arity mismatch");
    if (bob.num_inputs() != n + m + r || !bob.single_output())
        throw std::invalid_argument("protocol: bob circuit arity mismatch");
}

Circuit OneWayProtocol::error_circuit(const Bits& x, const Bits& y, const Circuit& f) const {
    validate();
    if (x.size() != n || y.size() != n) throw std::invalid_argument("protocol: input length mismatch");
    if (f.num_inputs() != 2 * n || !f.single_output())
        throw std::invalid_argument("protocol: target function arity mismatch");
    const int truth = f.eval1(concat(x, y)) ? 1 : 0;
    CircuitBuilder b(r);
    std::vector<uint32_t> sd(r);
    for (uint32_t j = 1; j <= r; ++j) sd[j - 1] = b.add_input(j);
    std::vector<uint32_t> alice_in;
    for (uint8_t bit : x) alice_in.push_back(b.add_const(bit));
    for (uint32_t s : sd) alice_in.push_back(s);
    std::vector<uint32_t> msg = b.inline_circuit(alice, alice_in);
    std::vector<uint32_t> bob_in;
    for (uint8_t bit : y) bob_in.push_back(b.add_const(bit));
    for (uint32_t g : msg) bob_in.push_back(g);
    if (mode == CoinMode::Public) {
        for (uint32_t s : sd) bob_in.push_back(s);
    } else {
        for (uint32_t j = 0; j < r; ++j) bob_in.push_back(b.add_const(0));
    }
    uint32_t decision = b.inline_circuit(bob, bob_in)[0];
    uint32_t out = truth ? b.add_not(decision) : decision;
    return std::move(b).build({out});
}

ProtocolReport simulate_protocol(const OneWayProtocol& proto, const Circuit& f,
                                 CountingOracle& oracle, Precision prec) {
    proto.validate();
    if (2 * static_cast<std::size_t>(proto.n) > enumeration_cap())
        throw std::invalid_argument("simulate_protocol: input pairs exceed enumeration cap");
    ProtocolReport rep;
    rep.max_error = -1;
    for (uint64_t xv = 0; xv < (uint64_t{1} << proto.n); ++xv) {
        for (uint64_t yv = 0; yv < (uint64_t{1} << proto.n); ++yv) {
            Bits x = index_to_bits(xv, proto.n);
            Bits y = index_to_bits(yv, proto.n);
            Rational err = oracle.query(proto.error_circuit(x, y, f), prec);
            if (err > rep.max_error) {
                rep.max_error = err;
                rep.worst_x = std::move(x);
                rep.worst_y = std::move(y);
            }
        }
    }
    return rep;
}

Circuit equality_function(uint32_t n) {
    CircuitBuilder b(2 * n);
    std::vector<uint32_t> diffs;
    for (uint32_t j = 1; j <= n; ++j) {
        uint32_t xj = b.add_input(j);
        uint32_t yj = b.add_input(n + j);
        diffs.push_back(b.add_xor({xj, yj}));
    }
    uint32_t any = b.add_or(std::move(diffs));
    uint32_t out = b.add_not(any);
    return std::move(b).build({out});
}

OneWayProtocol equality_protocol(uint32_t n, uint32_t m) {
    OneWayProtocol proto;
    proto.mode = CoinMode::Public;
    proto.n = n;
    proto.m = m;
    proto.r = n * m;  // the public seed is the hashing matrix
    {
        // Alice sends Ax: row i of A sits at seed bits [i*n, (i+1)*n).
        CircuitBuilder b(n + proto.r);
        std::vector<uint32_t> x(n);
        for (uint32_t j = 1; j <= n; ++j) x[j - 1] = b.add_input(j);
        std::vector<uint32_t> outs;
        for (uint32_t row = 0; row < m; ++row) {
            std::vector<uint32_t> terms;
            for (uint32_t j = 0; j < n; ++j) {
                uint32_t a = b.add_input(n + row * n + j + 1);
                terms.push_back(b.add_gate(GateOp::And, {a, x[j]}));
            }
            outs.push_back(b.add_xor(std::move(terms)));
        }
        proto.alice = std::move(b).build(std::move(outs));
    }
    {
        // Bob accepts iff Ay equals the message.
        CircuitBuilder b(n + m + proto.r);
        std::vector<uint32_t> y(n), msg(m);
        for (uint32_t j = 1; j <= n; ++j) y[j - 1] = b.add_input(j);
        for (uint32_t j = 1; j <= m; ++j) msg[j - 1] = b.add_input(n + j);
        std::vector<uint32_t> diffs;
        for (uint32_t row = 0; row < m; ++row) {
            std::vector<uint32_t> terms;
            for (uint32_t j = 0; j < n; ++j) {
                uint32_t a = b.add_input(n + m + row * n + j + 1);
                terms.push_back(b.add_gate(GateOp::And, {a, y[j]}));
            }
            uint32_t ay = b.add_xor(std::move(terms));
            diffs.push_back(b.add_xor({ay, msg[row]}));
        }
        uint32_t any = b.add_or(std::move(diffs));
        uint32_t out = b.add_not(any);
        proto.bob = std::move(b).build({out});
    }
    proto.validate();
    return proto;
}

// --- linear hashing --------------------------------------------------------

Circuit linear_hash_collision_circuit(uint32_t n, uint32_t m, const Bits& x, const Bits& y) {
    if (x.size() != n || y.size() != n) throw std::invalid_argument("hash: input length mismatch");
    // Ax = Ay iff A(x xor y) = 0; row i occupies inputs [i*n, (i+1)*n).
    Bits diff = xor_bits(x, y);
    CircuitBuilder b(n * m);
    std::vector<uint32_t> rows;
    for (uint32_t row = 0; row < m; ++row) {
        std::vector<uint32_t> terms;
        for (uint32_t j = 0; j < n; ++j)
            if (diff[j]) terms.push_back(b.add_input(row * n + j + 1));
        uint32_t parity = b.add_xor(std::move(terms));
        rows.push_back(b.add_not(parity));
    }
    uint32_t out = b.add_and(std::move(rows));
    return std::move(b).build({out});
}

CollisionReport linear_hash_collision_bound(uint32_t n, uint32_t m, const Bits& x, const Bits& y,
                                            CountingOracle& oracle, Precision prec, Precision beta) {
    if (x == y) throw std::invalid_argument("collision bound needs distinct inputs");
    CollisionReport rep;
    rep.probability = oracle.query(linear_hash_collision_circuit(n, m, x, y), prec);
    const Rational d = oracle.is_exact() ? Rational(0) : prec.delta();
    const Rational bb = oracle.is_exact() ? Rational(0) : beta.delta();
    rep.bound = d + bb + (Rational(1, 2) + bb).pow(m);
    rep.pass = rep.probability <= rep.bound;
    return rep;
}

} // namespace apx
