#ifndef APX_KNF_HPP
#define APX_KNF_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "apx/circuit.hpp"

namespace apx {

// Partial assignment over [n]; unset positions are stars.
class Restriction {
public:
    explicit Restriction(uint32_t n) : assign_(n, kStar) {}

    uint32_t n() const { return static_cast<uint32_t>(assign_.size()); }
    bool is_set(uint32_t var) const { return assign_[var - 1] != kStar; }
    int value(uint32_t var) const { return assign_[var - 1]; }
    void set(uint32_t var, int bit) { assign_[var - 1] = static_cast<int8_t>(bit & 1); }
    void unset(uint32_t var) { assign_[var - 1] = kStar; }

    std::size_t num_fixed() const;
    std::vector<uint32_t> fixed_vars() const;
    std::vector<uint32_t> free_vars() const;
    // Fills the free positions from `free_bits` (in increasing variable order).
    Bits complete(const Bits& free_bits) const;
    // Merge; positions set in both must agree.
    Restriction merged_with(const Restriction& other) const;
    int parity_of_fixed() const;

    std::string str() const;  // e.g. "01**1"

private:
    static constexpr int8_t kStar = -1;
    std::vector<int8_t> assign_;
};

struct KnfClause {
    std::set<uint32_t> pos;  // variables appearing positively
    std::set<uint32_t> neg;  // variables appearing negated

    std::set<uint32_t> support() const;
    std::size_t width() const { return pos.size() + neg.size(); }
};

enum class Connective { Cnf, Dnf };

// c-NF: conjunction of clauses (CNF) or disjunction of terms (DNF), every
// clause of width at most `width_bound()`.
struct Knf {
    Connective connective = Connective::Cnf;
    std::vector<KnfClause> clauses;

    std::size_t width_bound() const;
    std::set<uint32_t> support() const;
    Circuit to_circuit(uint32_t n) const;
    std::string to_json() const;
    static Knf from_json(const std::string& text);
};

// Result of exact clause-by-clause simplification under a restriction.
struct KnfSimplification {
    std::optional<int> trivialized;   // constant value when the formula collapsed
    std::set<uint32_t> live_vars;     // otherwise: variables still feeding it
    Knf simplified;                   // surviving clauses, restricted literals
};

KnfSimplification knf_apply_restriction(const Knf& f, const Restriction& rho);

// Well-formed bounded-depth circuit: layered, alternating AND/OR, negations
// only at the literal feeds of layer 1.
struct LayeredGate {
    std::vector<int32_t> feeds;  // layer 1: signed 1-based literals; else gate indices of previous layer
};

struct LayeredAC0 {
    uint32_t num_inputs = 0;
    bool first_layer_and = false;           // gate type of layer 1; alternates upward
    std::vector<std::vector<LayeredGate>> layers;

    uint32_t depth() const { return static_cast<uint32_t>(layers.size()); }
    std::size_t size() const;
    bool layer_is_and(std::size_t layer_idx) const {
        return (layer_idx % 2 == 0) == first_layer_and;
    }
    Circuit to_circuit() const;
    // Views a gate of layer 2 (index into layers[1]) as a k-NF over the input
    // variables; requires the layer-1 gates feeding it to be depth-1.
    Knf layer2_gate_as_knf(std::size_t gate_idx) const;
    void validate() const;
    std::string to_json() const;
    static LayeredAC0 from_json(const std::string& text);
};

} // namespace apx

#endif
