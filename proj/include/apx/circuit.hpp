#ifndef APX_CIRCUIT_HPP
#define APX_CIRCUIT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "apx/bits.hpp"

namespace apx {

enum class GateOp : uint8_t { Input, Const0, Const1, Not, And, Or, Xor };

const char* gate_op_name(GateOp op);
GateOp gate_op_from_name(const std::string& name);

struct Gate {
    GateOp op = GateOp::Const0;
    std::vector<uint32_t> args;  // references to earlier gates
    uint32_t input = 0;          // 1-based input index, Input gates only

    bool operator==(const Gate&) const = default;
};

// Immutable multi-output Boolean DAG. Gates reference strictly earlier gates;
// input bit n (the last one) is the "rightmost" bit that fix_last eliminates.
class Circuit {
public:
    Circuit() = default;
    Circuit(uint32_t num_inputs, std::vector<Gate> gates, std::vector<uint32_t> outputs);

    uint32_t num_inputs() const { return num_inputs_; }
    std::size_t num_gates() const { return gates_.size(); }
    std::size_t num_outputs() const { return outputs_.size(); }
    const std::vector<Gate>& gates() const { return gates_; }
    const std::vector<uint32_t>& outputs() const { return outputs_; }
    bool single_output() const { return outputs_.size() == 1; }

    bool operator==(const Circuit&) const = default;

    // --- evaluation ---------------------------------------------------
    Bits eval(const Bits& x) const;
    bool eval1(const Bits& x) const;  // single-output convenience
    // Number of accepting inputs of a single-output circuit, by bit-parallel
    // enumeration of all 2^n inputs. n is capped by the caller.
    uint64_t count_accepting() const;
    // Set of input indices with a path to some output.
    std::vector<uint32_t> live_inputs() const;

    // --- constructors -------------------------------------------------
    static Circuit null_circuit(uint32_t n);               // constant 0
    static Circuit true_circuit(uint32_t n);               // constant 1
    static Circuit constant(uint32_t n, int bit);
    static Circuit input_bit(uint32_t n, uint32_t i);      // projection to bit i
    static Circuit parity(uint32_t n);                     // XOR of all bits
    static Circuit identity(uint32_t n);                   // n outputs = inputs
    static Circuit threshold_less_than(uint32_t n, uint64_t t);

    // --- transformations ----------------------------------------------
    Circuit fix_last(int bit) const;
    Circuit fix_suffix(const Bits& z) const;
    std::optional<int> syntactically_constant() const;
    Circuit swap_adjacent(uint32_t i) const;               // swaps inputs i, i+1
    Circuit permute(const std::vector<uint32_t>& pi) const;
    Circuit compose(const Circuit& g) const;               // this after g
    Circuit or_amplify(std::size_t k) const;
    Circuit negate() const;
    Circuit parity_tester() const;                         // accepts iff C(x)=parity(x)
    Circuit indicator_eq(const Bits& pattern) const;       // accepts iff outputs == pattern
    Circuit xor_shift(const Bits& x) const;                // r -> C(x xor r)
    Circuit select_output(uint32_t idx) const;

    // Exhaustive function equality; both circuits must have <= cap inputs.
    static bool function_equal(const Circuit& a, const Circuit& b);
    // Pointwise a(x) <= b(x) for single-output circuits.
    static bool pointwise_leq(const Circuit& a, const Circuit& b);

    // --- serialization ------------------------------------------------
    std::string to_json() const;
    static Circuit from_json(const std::string& text);
    // Compact bit-level encoding; description length in bits is what the
    // refuter instances measure against their size budget s.
    Bits pack() const;
    static Circuit unpack(const Bits& bits);
    static Circuit unpack_prefix(BitReader& reader);
    std::size_t description_bits() const { return pack().size(); }

private:
    void validate() const;

    uint32_t num_inputs_ = 0;
    std::vector<Gate> gates_;
    std::vector<uint32_t> outputs_;
};

// Builder used by the transformation passes; keeps the "gates reference
// earlier gates" invariant by construction.
class CircuitBuilder {
public:
    explicit CircuitBuilder(uint32_t num_inputs) : num_inputs_(num_inputs) {}

    uint32_t add_input(uint32_t i);
    uint32_t add_const(int bit);
    uint32_t add_not(uint32_t a);
    uint32_t add_gate(GateOp op, std::vector<uint32_t> args);
    uint32_t add_and(std::vector<uint32_t> args);  // empty -> const 1
    uint32_t add_or(std::vector<uint32_t> args);   // empty -> const 0
    uint32_t add_xor(std::vector<uint32_t> args);  // empty -> const 0
    // Appends all gates of `c` with inputs taken from `input_map` (gate ids
    // in this builder, one per input of c); returns the ids of c's outputs.
    std::vector<uint32_t> inline_circuit(const Circuit& c, const std::vector<uint32_t>& input_map);
    Circuit build(std::vector<uint32_t> outputs) &&;
    uint32_t num_inputs() const { return num_inputs_; }

private:
    uint32_t num_inputs_;
    std::vector<Gate> gates_;
};

} // namespace apx

#endif
