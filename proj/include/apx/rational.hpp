#ifndef APX_RATIONAL_HPP
#define APX_RATIONAL_HPP

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <utility>

namespace apx {

// Exact rational arithmetic. Thin value wrapper over GMP's mpq_class; every
// probability, expectation and potential in the library is one of these.
class Rational {
public:
    Rational() : v_(0) {}
    Rational(long n) : v_(n) {}                      // NOLINT(google-explicit-constructor)
    Rational(long num, long den);
    explicit Rational(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }
    explicit Rational(const mpz_class& num, const mpz_class& den);

    // Parses "p/q" or "p".
    static Rational parse(const std::string& s);
    // 2^e for any integer e (negative exponents allowed).
    static Rational pow2(long e);

    std::string str() const;
    double to_double() const { return v_.get_d(); }

    bool is_integer() const { return v_.get_den() == 1; }
    mpz_class numerator() const { return v_.get_num(); }
    mpz_class denominator() const { return v_.get_den(); }

    Rational operator-() const { return Rational(mpq_class(-v_)); }
    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

    Rational abs() const { return Rational(mpq_class(::abs(v_))); }
    Rational pow(unsigned long e) const;

    mpz_class floor() const;
    mpz_class ceil() const;

    const mpq_class& raw() const { return v_; }

private:
    mpq_class v_;
};

// Rational brackets for the elementary functions used in tail bounds. Each
// returns (lo, hi) with lo <= f(x) <= hi; `terms` controls tightness.
std::pair<Rational, Rational> exp_bounds(const Rational& x, unsigned terms = 24);
std::pair<Rational, Rational> ln_bounds(const Rational& x, unsigned terms = 24);

// Smallest integer L with L >= a * ln(n); exact despite ln being irrational.
long ceil_mul_ln(long a, long n);

// Decides `lhs <= rhs_fn` where rhs_fn is given by refinable brackets.
// Returns true when provably <=, false when provably >.
template <typename BoundsFn>
bool leq_by_brackets(const Rational& lhs, BoundsFn rhs_bounds) {
    for (unsigned terms = 16; terms < 4096; terms *= 2) {
        auto [lo, hi] = rhs_bounds(terms);
        if (lhs <= lo) return true;
        if (lhs > hi) return false;
    }
    // Brackets failed to separate; treat as not provably <=.
    return false;
}

} // namespace apx

#endif
