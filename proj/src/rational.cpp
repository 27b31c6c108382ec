#include "apx/rational.hpp"

#include <stdexcept>

namespace apx {

Rational::Rational(long num, long den) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    v_ = mpq_class(num, den);
    v_.canonicalize();
}

Rational::Rational(const mpz_class& num, const mpz_class& den) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    v_ = mpq_class(num) / mpq_class(den);
    v_.canonicalize();
}

Rational Rational::parse(const std::string& s) {
    mpq_class v;
    if (v.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
    v.canonicalize();
    return Rational(v);
}

Rational Rational::pow2(long e) {
    mpz_class p = 1;
    mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(e < 0 ? -e : e));
    if (e >= 0) return Rational(p, mpz_class(1));
    return Rational(mpz_class(1), p);
}

std::string Rational::str() const {
    if (v_.get_den() == 1) return v_.get_num().get_str() + "/1";
    return v_.get_str();
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.v_ == 0) throw std::invalid_argument("division by zero");
    v_ /= o.v_;
    return *this;
}

Rational Rational::pow(unsigned long e) const {
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), v_.get_num().get_mpz_t(), e);
    mpz_pow_ui(den.get_mpz_t(), v_.get_den().get_mpz_t(), e);
    return Rational(num, den);
}

mpz_class Rational::floor() const {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), v_.get_num().get_mpz_t(), v_.get_den().get_mpz_t());
    return q;
}

mpz_class Rational::ceil() const {
    mpz_class q;
    mpz_cdiv_q(q.get_mpz_t(), v_.get_num().get_mpz_t(), v_.get_den().get_mpz_t());
    return q;
}

namespace {

// Taylor bracket for e^x with x >= 0: partial sums are lower bounds and the
// Lagrange tail is dominated by a geometric series once terms > x.
std::pair<Rational, Rational> exp_bounds_nonneg(const Rational& x, unsigned terms) {
    Rational sum = 1;
    Rational term = 1;
    unsigned n = terms;
    while (Rational(static_cast<long>(n) + 2) <= x * 2) n *= 2;  // ensure x/(n+2) <= 1/2
    for (unsigned i = 1; i <= n; ++i) {
        term = term * x / Rational(static_cast<long>(i));
        sum += term;
    }
    Rational next = term * x / Rational(static_cast<long>(n) + 1);
    Rational ratio = x / Rational(static_cast<long>(n) + 2);
    Rational tail = next / (Rational(1) - ratio);
    return {sum, sum + tail};
}

} // namespace

std::pair<Rational, Rational> exp_bounds(const Rational& x, unsigned terms) {
    if (x >= 0) return exp_bounds_nonneg(x, terms);
    auto [lo, hi] = exp_bounds_nonneg(-x, terms);
    return {Rational(1) / hi, Rational(1) / lo};
}

std::pair<Rational, Rational> ln_bounds(const Rational& x, unsigned terms) {
    if (x <= 0) throw std::invalid_argument("ln of non-positive value");
    if (x < 1) {
        auto [lo, hi] = ln_bounds(Rational(1) / x, terms);
        return {-hi, -lo};
    }
    // ln x = 2 atanh(z), z = (x-1)/(x+1) in [0,1).
    Rational z = (x - 1) / (x + 1);
    if (z == 0) return {0, 0};
    Rational z2 = z * z;
    Rational sum = 0;
    Rational p = z;
    for (unsigned i = 0; i < terms; ++i) {
        sum += p / Rational(2 * static_cast<long>(i) + 1);
        p *= z2;
    }
    Rational lo = sum * 2;
    Rational tail = p / (Rational(2 * static_cast<long>(terms) + 1) * (Rational(1) - z2));
    Rational hi = (sum + tail) * 2;
    return {lo, hi};
}

long ceil_mul_ln(long a, long n) {
    if (n <= 1 || a <= 0) return 0;
    for (unsigned terms = 16;; terms *= 2) {
        auto [lo, hi] = ln_bounds(Rational(n), terms);
        mpz_class cl = (Rational(a) * lo).ceil();
        mpz_class ch = (Rational(a) * hi).ceil();
        if (cl == ch) return cl.get_si();
        if (terms > 1 << 16) throw std::runtime_error("ceil_mul_ln failed to converge");
    }
}

} // namespace apx
