#include <map>
#include <set>
#include <stdexcept>

#include "apx/randvar.hpp"

namespace apx {

const char* suite_name(IneqSuite suite) {
    switch (suite) {
        case IneqSuite::Complementation: return "complementation";
        case IneqSuite::Linearity: return "linearity";
        case IneqSuite::UnionBound: return "union_bound";
        case IneqSuite::Markov: return "markov";
        case IneqSuite::Chebyshev: return "chebyshev";
        case IneqSuite::VarianceIdentity: return "variance_identity";
        case IneqSuite::PairwiseSum: return "pairwise_sum";
        case IneqSuite::Multiplication: return "multiplication";
        case IneqSuite::OneSided: return "one_sided";
        case IneqSuite::ChernoffLogLog: return "chernoff_loglog";
    }
    return "?";
}

IneqSuite suite_from_name(const std::string& name) {
    for (int i = 0; i <= static_cast<int>(IneqSuite::ChernoffLogLog); ++i)
        if (name == suite_name(static_cast<IneqSuite>(i))) return static_cast<IneqSuite>(i);
    throw std::invalid_argument("unknown inequality suite: " + name);
}

namespace {

Rational union_support_norm(const std::vector<RandomVariable>& xs) {
    std::set<Rational> seen;
    Rational s = 0;
    for (const RandomVariable& x : xs)
        for (const Rational& v : x.support())
            if (seen.insert(v).second) s += v.abs();
    return s;
}

// Event circuit for C(x) in `good` built as a union of equality indicators.
Circuit support_event(const RandomVariable& x, const std::vector<Rational>& good) {
    CircuitBuilder b(x.seed_length());
    std::vector<uint32_t> inputs(x.seed_length());
    for (uint32_t i = 1; i <= x.seed_length(); ++i) inputs[i - 1] = b.add_input(i);
    std::vector<uint32_t> outs = b.inline_circuit(x.sampler(), inputs);
    std::vector<uint32_t> parts;
    for (const Rational& v : good) {
        auto pattern = x.codec().encode(v);
        if (!pattern) continue;
        std::vector<uint32_t> conj;
        for (std::size_t j = 0; j < outs.size(); ++j)
            conj.push_back((*pattern)[j] ? outs[j] : b.add_not(outs[j]));
        parts.push_back(b.add_and(std::move(conj)));
    }
    uint32_t gate = b.add_or(std::move(parts));
    return std::move(b).build({gate});
}

IneqReport fail_hypothesis(IneqSuite suite, std::string note) {
    IneqReport r;
    r.suite = suite;
    r.hypothesis_ok = false;
    r.hypothesis_note = std::move(note);
    return r;
}

} // namespace

IneqReport verify_inequality(const IneqInstance& inst, CountingOracle& oracle, Precision prec,
                             Precision beta) {
    IneqReport rep;
    rep.suite = inst.suite;
    const bool exact = oracle.is_exact();
    const Rational d = exact ? Rational(0) : prec.delta();
    const Rational b = exact ? Rational(0) : beta.delta();

    switch (inst.suite) {
        case IneqSuite::Complementation: {
            if (!inst.event) return fail_hypothesis(inst.suite, "needs an event circuit");
            Rational p = oracle.query(*inst.event, prec);
            Rational q = oracle.query(inst.event->negate(), prec);
            rep.lhs = (p + q - 1).abs();
            rep.rhs = d * 2 + b;
            break;
        }
        case IneqSuite::Linearity: {
            if (inst.variables.empty() || inst.variables.size() != inst.coefficients.size())
                return fail_hypothesis(inst.suite, "needs matching variables and coefficients");
            const auto& lam = inst.coefficients;
            RandomVariable y = combine_pointwise(inst.variables, [&](const std::vector<Rational>& vals) {
                Rational s = inst.gamma_offset;
                for (std::size_t i = 0; i < vals.size(); ++i) s += lam[i] * vals[i];
                return s;
            });
            Rational sum = inst.gamma_offset;
            for (std::size_t i = 0; i < inst.variables.size(); ++i)
                sum += lam[i] * approx_expectation(inst.variables[i], oracle, prec);
            rep.lhs = (approx_expectation(y, oracle, prec) - sum).abs();
            std::vector<RandomVariable> all = inst.variables;
            all.push_back(y);
            Rational lam_norm = 0;
            for (const Rational& l : lam) lam_norm += l.abs();
            rep.rhs = (d * 2 + b) * union_support_norm(all) * lam_norm;
            break;
        }
        case IneqSuite::UnionBound: {
            if (inst.variables.empty()) return fail_hypothesis(inst.suite, "needs indicator variables");
            for (const RandomVariable& x : inst.variables)
                for (const Rational& v : x.support())
                    if (v != 0 && v != 1)
                        return fail_hypothesis(inst.suite, "union bound needs 0/1 variables");
            RandomVariable y = combine_pointwise(inst.variables, [](const std::vector<Rational>& vals) {
                for (const Rational& v : vals)
                    if (v != 0) return Rational(1);
                return Rational(0);
            });
            rep.lhs = approx_expectation(y, oracle, prec);
            Rational sum = 0;
            for (const RandomVariable& x : inst.variables) sum += approx_expectation(x, oracle, prec);
            rep.rhs = sum + (d * 2 + b) * Rational(static_cast<long>(inst.variables.size()));
            break;
        }
        case IneqSuite::Markov: {
            if (inst.variables.size() != 1) return fail_hypothesis(inst.suite, "needs one variable");
            const RandomVariable& x = inst.variables[0];
            for (const Rational& v : x.support())
                if (v < 0) return fail_hypothesis(inst.suite, "markov needs a non-negative support");
            if (inst.k_factor <= 0) return fail_hypothesis(inst.suite, "needs k > 0");
            Rational mu = approx_expectation(x, oracle, prec);
            if (mu <= 0) return fail_hypothesis(inst.suite, "needs a positive expectation");
            std::vector<Rational> tail;
            for (const Rational& v : x.support())
                if (v >= inst.k_factor * mu) tail.push_back(v);
            rep.lhs = oracle.query(support_event(x, tail), prec);
            Rational vn = x.support_norm();
            rep.rhs = d + (Rational(1) / inst.k_factor) * (Rational(1) + d / mu * vn) +
                      b * (vn / mu + 1);
            break;
        }
        case IneqSuite::Chebyshev: {
            if (inst.variables.size() != 1) return fail_hypothesis(inst.suite, "needs one variable");
            if (inst.k_factor <= 0) return fail_hypothesis(inst.suite, "needs k > 0");
            const RandomVariable& x = inst.variables[0];
            Rational mu = approx_expectation(x, oracle, prec);
            Rational sigma2 = variance(x, oracle, prec);
            if (sigma2 <= 0) return fail_hypothesis(inst.suite, "needs positive variance");
            std::vector<Rational> tail;
            Rational vhat_norm = 0;
            std::set<Rational> seen;
            for (const Rational& v : x.support()) {
                Rational w = (v - mu) * (v - mu);
                if (seen.insert(w).second) vhat_norm += w;
                if (w >= inst.k_factor * sigma2) tail.push_back(v);
            }
            rep.lhs = oracle.query(support_event(x, tail), prec);
            rep.rhs = d + (Rational(1) / inst.k_factor) * (Rational(1) + d / sigma2 * vhat_norm) +
                      b * (vhat_norm / sigma2 + 1);
            break;
        }
        case IneqSuite::VarianceIdentity: {
            if (inst.variables.size() != 1) return fail_hypothesis(inst.suite, "needs one variable");
            const RandomVariable& x = inst.variables[0];
            Rational mu = approx_expectation(x, oracle, prec);
            Rational var = variance(x, oracle, prec);
            Rational ex2 = expectation_of_product(x, x, oracle, prec);
            rep.lhs = (var - (ex2 - mu * mu)).abs();
            std::set<Rational> vhat;
            Rational vhat_norm = 0;
            for (const Rational& v : x.support()) {
                for (const Rational& w : {v, (v - mu) * (v - mu), v * v})
                    if (vhat.insert(w).second) vhat_norm += w.abs();
            }
            if (vhat.insert(Rational(1)).second) vhat_norm += 1;
            rep.rhs = (d * 2 + b) * (Rational(1) + mu.abs()) * vhat_norm;
            break;
        }
        case IneqSuite::PairwiseSum: {
            if (inst.variables.size() < 2) return fail_hypothesis(inst.suite, "needs >= 2 variables");
            const auto& xs = inst.variables;
            Rational eps = 0;  // measured almost-independence
            for (std::size_t i = 0; i < xs.size(); ++i)
                for (std::size_t j = i + 1; j < xs.size(); ++j) {
                    Rational c = covariance(xs[i], xs[j], oracle, prec).abs();
                    if (c > eps) eps = c;
                }
            RandomVariable y = combine_pointwise(xs, [](const std::vector<Rational>& vals) {
                Rational s = 0;
                for (const Rational& v : vals) s += v;
                return s;
            });
            Rational sum_var = 0;
            for (const RandomVariable& x : xs) sum_var += variance(x, oracle, prec);
            rep.lhs = (variance(y, oracle, prec) - sum_var).abs();
            std::vector<RandomVariable> all = xs;
            all.push_back(y);
            Rational vn = union_support_norm(all);
            const Rational m(static_cast<long>(xs.size()));
            rep.rhs = (eps + d * 3 * vn * vn) * m * m + b * (vn + 1).pow(3);
            break;
        }
        case IneqSuite::Multiplication: {
            if (inst.variables.size() != 2) return fail_hypothesis(inst.suite, "needs two variables");
            const RandomVariable& x1 = inst.variables[0];
            const RandomVariable& x2 = inst.variables[1];
            if (!explicitly_independent(x1, x2))
                return fail_hypothesis(inst.suite, "samplers must read disjoint seed bits");
            Rational exy = expectation_of_product(x1, x2, oracle, prec);
            rep.lhs = (exy - approx_expectation(x1, oracle, prec) *
                                 approx_expectation(x2, oracle, prec)).abs();
            std::set<Rational> vhat;
            Rational vn = 0;
            for (const Rational& v : x1.support())
                if (vhat.insert(v).second) vn += v.abs();
            for (const Rational& v : x2.support())
                if (vhat.insert(v).second) vn += v.abs();
            for (const Rational& v1 : x1.support())
                for (const Rational& v2 : x2.support())
                    if (vhat.insert(v1 * v2).second) vn += (v1 * v2).abs();
            rep.rhs = (d * 2 + b) * vn + (d * 4 + b) * vn * vn;
            break;
        }
        case IneqSuite::OneSided: {
            if (!inst.event) return fail_hypothesis(inst.suite, "needs a base event circuit");
            if (inst.repetitions == 0) return fail_hypothesis(inst.suite, "needs k >= 1");
            const Circuit& c = *inst.event;
            Rational eps = oracle.query(c.negate(), prec);
            Circuit amplified = c.or_amplify(inst.repetitions);
            rep.lhs = oracle.query(amplified.negate(), prec);
            rep.rhs = (d + b + eps).pow(static_cast<unsigned long>(inst.repetitions)) + d + b;
            break;
        }
        case IneqSuite::ChernoffLogLog: {
            if (!inst.event) return fail_hypothesis(inst.suite, "needs a base Bernoulli circuit");
            const std::size_t m = inst.repetitions;
            if (m == 0 || m > 24) return fail_hypothesis(inst.suite, "needs 1 <= m <= 24");
            if (inst.t_param < 0 || inst.t_param > 1)
                return fail_hypothesis(inst.suite, "needs 0 <= t <= 1");
            const Circuit& c = *inst.event;
            const uint32_t n = c.num_inputs();
            // Explicitly i.i.d. copies over an nm-bit seed.
            std::vector<RandomVariable> copies;
            for (std::size_t i = 0; i < m; ++i) {
                CircuitBuilder bld(static_cast<uint32_t>(n * m));
                std::vector<uint32_t> block(n);
                for (uint32_t j = 0; j < n; ++j)
                    block[j] = bld.add_input(static_cast<uint32_t>(i * n + j + 1));
                uint32_t out = bld.inline_circuit(c, block)[0];
                copies.push_back(RandomVariable::indicator_of(std::move(bld).build({out})));
            }
            Rational p = approx_expectation(copies[0], oracle, prec);
            if (Rational(static_cast<long>(inst.threshold)) <
                (Rational(1) + inst.t_param) * p * Rational(static_cast<long>(m)))
                return fail_hypothesis(inst.suite, "needs k >= (1+t)pm");
            RandomVariable tail = combine_pointwise(copies, [&](const std::vector<Rational>& vals) {
                Rational s = 0;
                for (const Rational& v : vals) s += v;
                return s >= Rational(static_cast<long>(inst.threshold)) ? Rational(1) : Rational(0);
            });
            rep.lhs = approx_expectation(tail, oracle, prec);
            // rhs = (e^{-t^2 p/4} + (4d+b) 2^{-pt(1+t)})^m + d + b, decided
            // through rational brackets of the transcendental part.
            Rational expo = inst.t_param * inst.t_param * p / 4;
            const Rational ln2_scale = inst.t_param * (Rational(1) + inst.t_param) * p;
            rep.rhs_is_exact = false;
            auto rhs_bounds = [&](unsigned terms) {
                auto [elo, ehi] = exp_bounds(-expo, terms);
                Rational corr_lo = 0, corr_hi = 0;
                if (d * 4 + b > 0) {
                    auto [llo, lhi] = ln_bounds(Rational(2), terms);
                    auto [plo, phi] = exp_bounds(-(ln2_scale * lhi), terms);
                    auto [plo2, phi2] = exp_bounds(-(ln2_scale * llo), terms);
                    corr_lo = (d * 4 + b) * plo;
                    corr_hi = (d * 4 + b) * phi2;
                }
                Rational lo = (elo + corr_lo).pow(static_cast<unsigned long>(m)) + d + b;
                Rational hi = (ehi + corr_hi).pow(static_cast<unsigned long>(m)) + d + b;
                return std::make_pair(lo, hi);
            };
            rep.pass = leq_by_brackets(rep.lhs, rhs_bounds);
            auto [lo, hi] = rhs_bounds(64);
            rep.rhs = hi;  // reported as an upper bracket
            rep.slack = rep.rhs - rep.lhs;
            rep.note = "rhs reported as a rational upper bracket of the exponential bound";
            return rep;
        }
    }
    rep.slack = rep.rhs - rep.lhs;
    rep.pass = rep.lhs <= rep.rhs;
    return rep;
}

} // namespace apx
