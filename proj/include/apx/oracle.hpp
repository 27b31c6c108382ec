#ifndef APX_ORACLE_HPP
#define APX_ORACLE_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "apx/circuit.hpp"
#include "apx/prng.hpp"
#include "apx/rational.hpp"

namespace apx {

// Counting precision delta = 1/inverse.
struct Precision {
    uint64_t inverse = 1;
    Rational delta() const { return Rational(1, static_cast<long>(inverse)); }
};

// Uniform distribution over an explicit multiset of equal-length strings.
struct FlatDistribution {
    std::size_t width = 0;
    std::vector<Bits> strings;

    static FlatDistribution from_text(const std::string& text);
    std::string to_text() const;
    void validate() const;
};

struct QueryRecord {
    Circuit circuit;
    Precision precision;
    Rational answer;
};

class QueryTrace {
public:
    void record(const Circuit& c, Precision prec, const Rational& answer) {
        records_.push_back({c, prec, answer});
    }
    const std::vector<QueryRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }

private:
    std::vector<QueryRecord> records_;
};

// The approximate-counting interface: acceptance probabilities of
// single-output circuits at a requested precision.
class CountingOracle {
public:
    virtual ~CountingOracle() = default;

    Rational query(const Circuit& c, Precision prec);

    virtual std::string name() const = 0;
    virtual bool is_exact() const { return false; }
    uint64_t query_count() const { return queries_; }
    void attach_trace(QueryTrace* trace) { trace_ = trace; }

protected:
    virtual Rational answer(const Circuit& c, Precision prec) = 0;

private:
    QueryTrace* trace_ = nullptr;
    uint64_t queries_ = 0;
};

// Exact acceptance probability |C^{-1}(1)| / 2^n by enumeration. Fails on
// circuits wider than the enumeration cap.
class ExactOracle : public CountingOracle {
public:
    ExactOracle() = default;
    explicit ExactOracle(std::size_t cap) : cap_(cap) {}
    std::string name() const override { return "exact"; }
    bool is_exact() const override { return true; }

protected:
    Rational answer(const Circuit& c, Precision prec) override;

private:
    std::size_t cap_ = 0;  // 0 -> global cap
};

Rational exact_count(const Circuit& c);

// Empirical mean over N = ceil(ln(2/gamma) * inverse^2 / 2) seeded samples.
// Syntactically constant circuits are answered exactly.
class SampleOracle : public CountingOracle {
public:
    SampleOracle(const Rational& gamma, uint64_t seed);
    std::string name() const override { return "sample"; }
    uint64_t samples_per_query(Precision prec) const;

protected:
    Rational answer(const Circuit& c, Precision prec) override;

private:
    Rational gamma_;
    uint64_t seed_;
    uint64_t invocation_ = 0;
};

Rational sample_count(const Circuit& c, Precision prec, const Rational& gamma, uint64_t seed);

// Answers Pr_{u ~ D}[C(u_{<=t})]; ignores the precision parameter.
class EmpiricalOracle : public CountingOracle {
public:
    explicit EmpiricalOracle(FlatDistribution dist);
    std::string name() const override { return "empirical"; }
    const FlatDistribution& distribution() const { return dist_; }

protected:
    Rational answer(const Circuit& c, Precision prec) override;

private:
    FlatDistribution dist_;
};

Rational empirical_count(const Circuit& c, const FlatDistribution& dist);

// Test hook: forwards to an inner oracle but skews answers on circuits with
// an odd number of inputs, which breaks Local Consistency detectably.
class SkewedOracle : public CountingOracle {
public:
    explicit SkewedOracle(std::unique_ptr<CountingOracle> inner) : inner_(std::move(inner)) {}
    std::string name() const override { return inner_->name() + "+skew"; }

protected:
    Rational answer(const Circuit& c, Precision prec) override;

private:
    std::unique_ptr<CountingOracle> inner_;
};

enum class AxiomKind { Basic, Boundary, PrecisionConsistency, LocalConsistency };

const char* axiom_name(AxiomKind kind);

struct AxiomViolation {
    AxiomKind axiom;
    std::string detail;
    std::vector<std::size_t> record_indices;
    Rational measured;
    Rational allowed;
};

struct AxiomReport {
    std::vector<AxiomViolation> violations;
    std::size_t checked_basic = 0;
    std::size_t checked_boundary = 0;
    std::size_t checked_precision_pairs = 0;
    std::size_t checked_local_triples = 0;
    bool ok() const { return violations.empty(); }
};

// Replays a trace against the four axioms with slack beta.
AxiomReport check_axioms(const QueryTrace& trace, Precision beta);

struct LocalViolation {
    Circuit where;
    Rational gap;        // measured deviation
    Rational threshold;  // allowed slack at the probe precision
    bool at_constant;    // boundary failure at a constant descendant
};

// Descent from the admissibility theorem: probes at precision
// |Xi| = 10*(n+1)*beta.inverse and walks toward the child with the larger
// deviation from exact counting until a local (or boundary) violation shows.
std::optional<LocalViolation> find_local_violation(CountingOracle& oracle, const Circuit& c,
                                                   Precision delta, Precision beta);

} // namespace apx

#endif
