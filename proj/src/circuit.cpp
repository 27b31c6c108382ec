#include "apx/circuit.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "apx/config.hpp"

namespace apx {

using ordered_json = nlohmann::ordered_json;

const char* gate_op_name(GateOp op) {
    switch (op) {
        case GateOp::Input: return "INPUT";
        case GateOp::Const0: return "CONST0";
        case GateOp::Const1: return "CONST1";
        case GateOp::Not: return "NOT";
        case GateOp::And: return "AND";
        case GateOp::Or: return "OR";
        case GateOp::Xor: return "XOR";
    }
    return "?";
}

GateOp gate_op_from_name(const std::string& name) {
    if (name == "INPUT") return GateOp::Input;
    if (name == "CONST0") return GateOp::Const0;
    if (name == "CONST1") return GateOp::Const1;
    if (name == "NOT") return GateOp::Not;
    if (name == "AND") return GateOp::And;
    if (name == "OR") return GateOp::Or;
    if (name == "XOR") return GateOp::Xor;
    throw std::invalid_argument("unknown gate op: " + name);
}

Circuit::Circuit(uint32_t num_inputs, std::vector<Gate> gates, std::vector<uint32_t> outputs)
    : num_inputs_(num_inputs), gates_(std::move(gates)), outputs_(std::move(outputs)) {
    validate();
}

void Circuit::validate() const {
    if (outputs_.empty()) throw std::invalid_argument("circuit needs at least one output");
    for (std::size_t j = 0; j < gates_.size(); ++j) {
        const Gate& g = gates_[j];
        switch (g.op) {
            case GateOp::Input:
                if (g.input < 1 || g.input > num_inputs_)
                    throw std::invalid_argument("input index out of range");
                if (!g.args.empty()) throw std::invalid_argument("INPUT gate takes no args");
                break;
            case GateOp::Const0:
            case GateOp::Const1:
                if (!g.args.empty()) throw std::invalid_argument("CONST gate takes no args");
                break;
            case GateOp::Not:
                if (g.args.size() != 1) throw std::invalid_argument("NOT gate takes one arg");
                break;
            case GateOp::And:
            case GateOp::Or:
            case GateOp::Xor:
                break;
        }
        for (uint32_t a : g.args)
            if (a >= j) throw std::invalid_argument("gate argument must reference an earlier gate");
    }
    for (uint32_t o : outputs_)
        if (o >= gates_.size()) throw std::invalid_argument("output references missing gate");
}

namespace {

// Evaluates all gates over a 64-wide slab of inputs; word[i] carries the
// value of input i+1 across the 64 evaluation points.
void eval_words(const std::vector<Gate>& gates, const std::vector<uint64_t>& input_words,
                std::vector<uint64_t>& vals) {
    vals.resize(gates.size());
    for (std::size_t j = 0; j < gates.size(); ++j) {
        const Gate& g = gates[j];
        uint64_t v = 0;
        switch (g.op) {
            case GateOp::Input: v = input_words[g.input - 1]; break;
            case GateOp::Const0: v = 0; break;
            case GateOp::Const1: v = ~uint64_t{0}; break;
            case GateOp::Not: v = ~vals[g.args[0]]; break;
            case GateOp::And:
                v = ~uint64_t{0};
                for (uint32_t a : g.args) v &= vals[a];
                break;
            case GateOp::Or:
                v = 0;
                for (uint32_t a : g.args) v |= vals[a];
                break;
            case GateOp::Xor:
                v = 0;
                for (uint32_t a : g.args) v ^= vals[a];
                break;
        }
        vals[j] = v;
    }
}

} // namespace

Bits Circuit::eval(const Bits& x) const {
    if (x.size() != num_inputs_) throw std::invalid_argument("eval: input length mismatch");
    std::vector<uint64_t> input_words(num_inputs_);
    for (uint32_t i = 0; i < num_inputs_; ++i) input_words[i] = x[i] ? ~uint64_t{0} : 0;
    std::vector<uint64_t> vals;
    eval_words(gates_, input_words, vals);
    Bits out(outputs_.size());
    for (std::size_t i = 0; i < outputs_.size(); ++i) out[i] = vals[outputs_[i]] & 1;
    return out;
}

bool Circuit::eval1(const Bits& x) const {
    if (!single_output()) throw std::logic_error("eval1 requires a single-output circuit");
    return eval(x)[0] != 0;
}

uint64_t Circuit::count_accepting() const {
    if (!single_output()) throw std::logic_error("count_accepting requires a single-output circuit");
    const uint32_t n = num_inputs_;
    static constexpr uint64_t kMask[6] = {
        0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
        0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull};
    std::vector<uint64_t> input_words(n);
    std::vector<uint64_t> vals;
    uint64_t total = 0;
    const uint64_t blocks = n > 6 ? (uint64_t{1} << (n - 6)) : 1;
    for (uint64_t b = 0; b < blocks; ++b) {
        for (uint32_t i = 0; i < n; ++i) {
            if (i < 6) input_words[i] = kMask[i];
            else input_words[i] = ((b >> (i - 6)) & 1) ? ~uint64_t{0} : 0;
        }
        eval_words(gates_, input_words, vals);
        uint64_t word = vals[outputs_[0]];
        if (n < 6) word &= (uint64_t{1} << (uint64_t{1} << n)) - 1;
        total += static_cast<uint64_t>(std::popcount(word));
    }
    return total;
}

std::vector<uint32_t> Circuit::live_inputs() const {
    std::vector<uint8_t> live(gates_.size(), 0);
    for (uint32_t o : outputs_) live[o] = 1;
    for (std::size_t j = gates_.size(); j-- > 0;) {
        if (!live[j]) continue;
        for (uint32_t a : gates_[j].args) live[a] = 1;
    }
    std::vector<uint32_t> result;
    for (std::size_t j = 0; j < gates_.size(); ++j)
        if (live[j] && gates_[j].op == GateOp::Input) result.push_back(gates_[j].input);
    std::sort(result.begin(), result.end());
    result.erase(std::unique(result.begin(), result.end()), result.end());
    return result;
}

Circuit Circuit::null_circuit(uint32_t n) { return constant(n, 0); }
Circuit Circuit::true_circuit(uint32_t n) { return constant(n, 1); }

Circuit Circuit::constant(uint32_t n, int bit) {
    return Circuit(n, {Gate{bit ? GateOp::Const1 : GateOp::Const0, {}, 0}}, {0});
}

Circuit Circuit::input_bit(uint32_t n, uint32_t i) {
    if (i < 1 || i > n) throw std::invalid_argument("input_bit: index out of range");
    return Circuit(n, {Gate{GateOp::Input, {}, i}}, {0});
}

Circuit Circuit::parity(uint32_t n) {
    if (n == 0) return constant(0, 0);
    std::vector<Gate> gates;
    std::vector<uint32_t> args;
    for (uint32_t i = 1; i <= n; ++i) {
        gates.push_back(Gate{GateOp::Input, {}, i});
        args.push_back(i - 1);
    }
    gates.push_back(Gate{GateOp::Xor, std::move(args), 0});
    return Circuit(n, std::move(gates), {n});
}

Circuit Circuit::identity(uint32_t n) {
    if (n == 0) throw std::invalid_argument("identity needs n >= 1");
    std::vector<Gate> gates;
    std::vector<uint32_t> outs;
    for (uint32_t i = 1; i <= n; ++i) {
        gates.push_back(Gate{GateOp::Input, {}, i});
        outs.push_back(i - 1);
    }
    return Circuit(n, std::move(gates), std::move(outs));
}

Circuit Circuit::threshold_less_than(uint32_t n, uint64_t t) {
    if (n > 63) throw std::invalid_argument("threshold_less_than: n too large");
    const uint64_t full = uint64_t{1} << n;
    if (t > full) throw std::invalid_argument("threshold_less_than: t out of range");
    if (t == full) return true_circuit(n);
    if (t == 0) return null_circuit(n);
    // x < t, MSB = bit n. Scan from the most significant bit down.
    CircuitBuilder b(n);
    std::vector<uint32_t> in(n), notin(n);
    for (uint32_t i = 0; i < n; ++i) {
        in[i] = b.add_input(i + 1);
        notin[i] = b.add_not(in[i]);
    }
    std::vector<uint32_t> terms;
    std::vector<uint32_t> eq_prefix;  // x_j == t_j for all j > current
    for (uint32_t pos = n; pos >= 1; --pos) {
        const int tbit = static_cast<int>((t >> (pos - 1)) & 1);
        if (tbit == 1) {
            std::vector<uint32_t> conj = eq_prefix;
            conj.push_back(notin[pos - 1]);
            terms.push_back(b.add_and(std::move(conj)));
        }
        eq_prefix.push_back(tbit ? in[pos - 1] : notin[pos - 1]);
    }
    uint32_t out = b.add_or(std::move(terms));
    return std::move(b).build({out});
}

Circuit Circuit::fix_last(int bit) const {
    if (num_inputs_ == 0) throw std::invalid_argument("fix_last on zero-input circuit");
    std::vector<Gate> gates = gates_;
    for (Gate& g : gates) {
        if (g.op == GateOp::Input && g.input == num_inputs_) {
            g.op = bit ? GateOp::Const1 : GateOp::Const0;
            g.input = 0;
        }
    }
    return Circuit(num_inputs_ - 1, std::move(gates), outputs_);
}

Circuit Circuit::fix_suffix(const Bits& z) const {
    if (z.size() > num_inputs_) throw std::invalid_argument("fix_suffix: suffix too long");
    const uint32_t keep = num_inputs_ - static_cast<uint32_t>(z.size());
    std::vector<Gate> gates = gates_;
    for (Gate& g : gates) {
        if (g.op == GateOp::Input && g.input > keep) {
            g.op = z[g.input - keep - 1] ? GateOp::Const1 : GateOp::Const0;
            g.input = 0;
        }
    }
    return Circuit(keep, std::move(gates), outputs_);
}

std::optional<int> Circuit::syntactically_constant() const {
    if (!single_output()) throw std::logic_error("syntactically_constant requires a single output");
    if (!live_inputs().empty()) return std::nullopt;
    return eval1(Bits(num_inputs_, 0)) ? 1 : 0;
}

Circuit Circuit::swap_adjacent(uint32_t i) const {
    if (i < 1 || i + 1 > num_inputs_) throw std::invalid_argument("swap_adjacent: index out of range");
    std::vector<uint32_t> pi(num_inputs_);
    for (uint32_t j = 0; j < num_inputs_; ++j) pi[j] = j + 1;
    std::swap(pi[i - 1], pi[i]);
    return permute(pi);
}

Circuit Circuit::permute(const std::vector<uint32_t>& pi) const {
    if (pi.size() != num_inputs_) throw std::invalid_argument("permute: wrong permutation size");
    std::vector<uint8_t> seen(num_inputs_ + 1, 0);
    for (uint32_t v : pi) {
        if (v < 1 || v > num_inputs_ || seen[v]) throw std::invalid_argument("permute: not a bijection");
        seen[v] = 1;
    }
    std::vector<Gate> gates = gates_;
    for (Gate& g : gates)
        if (g.op == GateOp::Input) g.input = pi[g.input - 1];
    return Circuit(num_inputs_, std::move(gates), outputs_);
}

Circuit Circuit::compose(const Circuit& g) const {
    if (g.num_outputs() != num_inputs_)
        throw std::invalid_argument("compose: inner output count must match outer input count");
    CircuitBuilder b(g.num_inputs());
    std::vector<uint32_t> inputs(g.num_inputs());
    for (uint32_t i = 1; i <= g.num_inputs(); ++i) inputs[i - 1] = b.add_input(i);
    std::vector<uint32_t> mids = b.inline_circuit(g, inputs);
    std::vector<uint32_t> outs = b.inline_circuit(*this, mids);
    return std::move(b).build(std::move(outs));
}

Circuit Circuit::or_amplify(std::size_t k) const {
    if (!single_output()) throw std::logic_error("or_amplify requires a single-output circuit");
    if (k == 0) throw std::invalid_argument("or_amplify: k must be >= 1");
    const uint32_t n = num_inputs_;
    CircuitBuilder b(static_cast<uint32_t>(n * k));
    std::vector<uint32_t> copies;
    for (std::size_t c = 0; c < k; ++c) {
        std::vector<uint32_t> block(n);
        for (uint32_t i = 0; i < n; ++i) block[i] = b.add_input(static_cast<uint32_t>(c * n + i + 1));
        copies.push_back(b.inline_circuit(*this, block)[0]);
    }
    uint32_t out = b.add_or(std::move(copies));
    return std::move(b).build({out});
}

Circuit Circuit::negate() const {
    if (!single_output()) throw std::logic_error("negate requires a single-output circuit");
    std::vector<Gate> gates = gates_;
    gates.push_back(Gate{GateOp::Not, {outputs_[0]}, 0});
    return Circuit(num_inputs_, std::move(gates), {static_cast<uint32_t>(gates_.size())});
}

Circuit Circuit::parity_tester() const {
    if (!single_output()) throw std::logic_error("parity_tester requires a single-output circuit");
    CircuitBuilder b(num_inputs_);
    std::vector<uint32_t> inputs(num_inputs_);
    for (uint32_t i = 1; i <= num_inputs_; ++i) inputs[i - 1] = b.add_input(i);
    uint32_t c_out = b.inline_circuit(*this, inputs)[0];
    uint32_t par = b.add_xor(inputs);
    uint32_t diff = b.add_xor({c_out, par});
    uint32_t out = b.add_not(diff);
    return std::move(b).build({out});
}

Circuit Circuit::indicator_eq(const Bits& pattern) const {
    if (pattern.size() != outputs_.size())
        throw std::invalid_argument("indicator_eq: pattern length must match output count");
    CircuitBuilder b(num_inputs_);
    std::vector<uint32_t> inputs(num_inputs_);
    for (uint32_t i = 1; i <= num_inputs_; ++i) inputs[i - 1] = b.add_input(i);
    std::vector<uint32_t> outs = b.inline_circuit(*this, inputs);
    std::vector<uint32_t> conj;
    for (std::size_t j = 0; j < outs.size(); ++j)
        conj.push_back(pattern[j] ? outs[j] : b.add_not(outs[j]));
    uint32_t out = b.add_and(std::move(conj));
    return std::move(b).build({out});
}

Circuit Circuit::xor_shift(const Bits& x) const {
    if (x.size() != num_inputs_) throw std::invalid_argument("xor_shift: shift length mismatch");
    CircuitBuilder b(num_inputs_);
    std::vector<uint32_t> inputs(num_inputs_);
    for (uint32_t i = 1; i <= num_inputs_; ++i) {
        uint32_t raw = b.add_input(i);
        inputs[i - 1] = x[i - 1] ? b.add_not(raw) : raw;
    }
    std::vector<uint32_t> outs = b.inline_circuit(*this, inputs);
    return std::move(b).build(std::move(outs));
}

Circuit Circuit::select_output(uint32_t idx) const {
    if (idx >= outputs_.size()) throw std::invalid_argument("select_output: index out of range");
    return Circuit(num_inputs_, gates_, {outputs_[idx]});
}

bool Circuit::function_equal(const Circuit& a, const Circuit& b) {
    if (a.num_inputs() != b.num_inputs() || a.num_outputs() != b.num_outputs()) return false;
    const uint32_t n = a.num_inputs();
    if (n > enumeration_cap())
        throw std::invalid_argument("function_equal: inputs exceed enumeration cap");
    for (uint64_t v = 0; v < (uint64_t{1} << n); ++v) {
        Bits x = index_to_bits(v, n);
        if (a.eval(x) != b.eval(x)) return false;
    }
    return true;
}

bool Circuit::pointwise_leq(const Circuit& a, const Circuit& b) {
    if (a.num_inputs() != b.num_inputs()) return false;
    const uint32_t n = a.num_inputs();
    if (n > enumeration_cap())
        throw std::invalid_argument("pointwise_leq: inputs exceed enumeration cap");
    for (uint64_t v = 0; v < (uint64_t{1} << n); ++v) {
        Bits x = index_to_bits(v, n);
        if (a.eval1(x) && !b.eval1(x)) return false;
    }
    return true;
}

std::string Circuit::to_json() const {
    ordered_json j;
    j["inputs"] = num_inputs_;
    ordered_json gates = ordered_json::array();
    for (const Gate& g : gates_) {
        ordered_json item;
        item["op"] = gate_op_name(g.op);
        if (g.op == GateOp::Input) item["input"] = g.input;
        else item["args"] = g.args;
        gates.push_back(std::move(item));
    }
    j["gates"] = std::move(gates);
    j["outputs"] = outputs_;
    return j.dump();
}

Circuit Circuit::from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    uint32_t n = j.at("inputs").get<uint32_t>();
    std::vector<Gate> gates;
    for (const auto& item : j.at("gates")) {
        Gate g;
        g.op = gate_op_from_name(item.at("op").get<std::string>());
        if (g.op == GateOp::Input) g.input = item.at("input").get<uint32_t>();
        else if (item.contains("args")) g.args = item.at("args").get<std::vector<uint32_t>>();
        gates.push_back(std::move(g));
    }
    std::vector<uint32_t> outputs = j.at("outputs").get<std::vector<uint32_t>>();
    return Circuit(n, std::move(gates), std::move(outputs));
}

namespace {

std::size_t ref_width(std::size_t gate_index) {
    return gate_index <= 1 ? 0 : ceil_log2(gate_index);
}

} // namespace

Bits Circuit::pack() const {
    BitWriter w;
    w.put_gamma(num_inputs_ + 1);
    w.put_gamma(gates_.size());
    const std::size_t input_width = num_inputs_ <= 1 ? 0 : ceil_log2(num_inputs_);
    for (std::size_t j = 0; j < gates_.size(); ++j) {
        const Gate& g = gates_[j];
        w.put_bits(static_cast<uint64_t>(g.op), 3);
        const std::size_t rw = ref_width(j);
        switch (g.op) {
            case GateOp::Input: w.put_bits(g.input - 1, input_width); break;
            case GateOp::Const0:
            case GateOp::Const1: break;
            case GateOp::Not: w.put_bits(g.args[0], rw); break;
            case GateOp::And:
            case GateOp::Or:
            case GateOp::Xor:
                w.put_gamma(g.args.size() + 1);
                for (uint32_t a : g.args) w.put_bits(a, rw);
                break;
        }
    }
    w.put_gamma(outputs_.size());
    const std::size_t ow = ref_width(gates_.size());
    for (uint32_t o : outputs_) w.put_bits(o, ow);
    return w.bits();
}

Circuit Circuit::unpack_prefix(BitReader& r) {
    const uint32_t n = static_cast<uint32_t>(r.get_gamma() - 1);
    const std::size_t num_gates = static_cast<std::size_t>(r.get_gamma());
    const std::size_t input_width = n <= 1 ? 0 : ceil_log2(n);
    std::vector<Gate> gates;
    for (std::size_t j = 0; j < num_gates; ++j) {
        Gate g;
        g.op = static_cast<GateOp>(r.get_bits(3));
        const std::size_t rw = ref_width(j);
        switch (g.op) {
            case GateOp::Input: g.input = static_cast<uint32_t>(r.get_bits(input_width)) + 1; break;
            case GateOp::Const0:
            case GateOp::Const1: break;
            case GateOp::Not: g.args = {static_cast<uint32_t>(r.get_bits(rw))}; break;
            case GateOp::And:
            case GateOp::Or:
            case GateOp::Xor: {
                const std::size_t arity = static_cast<std::size_t>(r.get_gamma() - 1);
                for (std::size_t t = 0; t < arity; ++t)
                    g.args.push_back(static_cast<uint32_t>(r.get_bits(rw)));
                break;
            }
            default: throw std::invalid_argument("unpack: bad op code");
        }
        gates.push_back(std::move(g));
    }
    const std::size_t num_outputs = static_cast<std::size_t>(r.get_gamma());
    const std::size_t ow = ref_width(num_gates);
    std::vector<uint32_t> outputs;
    for (std::size_t t = 0; t < num_outputs; ++t)
        outputs.push_back(static_cast<uint32_t>(r.get_bits(ow)));
    return Circuit(n, std::move(gates), std::move(outputs));
}

Circuit Circuit::unpack(const Bits& bits) {
    BitReader r(bits);
    return unpack_prefix(r);
}

uint32_t CircuitBuilder::add_input(uint32_t i) {
    if (i < 1 || i > num_inputs_) throw std::invalid_argument("builder: input index out of range");
    gates_.push_back(Gate{GateOp::Input, {}, i});
    return static_cast<uint32_t>(gates_.size() - 1);
}

uint32_t CircuitBuilder::add_const(int bit) {
    gates_.push_back(Gate{bit ? GateOp::Const1 : GateOp::Const0, {}, 0});
    return static_cast<uint32_t>(gates_.size() - 1);
}

uint32_t CircuitBuilder::add_not(uint32_t a) {
    gates_.push_back(Gate{GateOp::Not, {a}, 0});
    return static_cast<uint32_t>(gates_.size() - 1);
}

uint32_t CircuitBuilder::add_gate(GateOp op, std::vector<uint32_t> args) {
    gates_.push_back(Gate{op, std::move(args), 0});
    return static_cast<uint32_t>(gates_.size() - 1);
}

uint32_t CircuitBuilder::add_and(std::vector<uint32_t> args) {
    if (args.empty()) return add_const(1);
    if (args.size() == 1) return args[0];
    return add_gate(GateOp::And, std::move(args));
}

uint32_t CircuitBuilder::add_or(std::vector<uint32_t> args) {
    if (args.empty()) return add_const(0);
    if (args.size() == 1) return args[0];
    return add_gate(GateOp::Or, std::move(args));
}

uint32_t CircuitBuilder::add_xor(std::vector<uint32_t> args) {
    if (args.empty()) return add_const(0);
    if (args.size() == 1) return args[0];
    return add_gate(GateOp::Xor, std::move(args));
}

std::vector<uint32_t> CircuitBuilder::inline_circuit(const Circuit& c,
                                                     const std::vector<uint32_t>& input_map) {
    if (input_map.size() != c.num_inputs())
        throw std::invalid_argument("inline_circuit: input map size mismatch");
    std::vector<uint32_t> remap(c.num_gates());
    for (std::size_t j = 0; j < c.num_gates(); ++j) {
        const Gate& g = c.gates()[j];
        if (g.op == GateOp::Input) {
            remap[j] = input_map[g.input - 1];
            continue;
        }
        Gate copy = g;
        for (uint32_t& a : copy.args) a = remap[a];
        gates_.push_back(std::move(copy));
        remap[j] = static_cast<uint32_t>(gates_.size() - 1);
    }
    std::vector<uint32_t> outs;
    for (uint32_t o : c.outputs()) outs.push_back(remap[o]);
    return outs;
}

Circuit CircuitBuilder::build(std::vector<uint32_t> outputs) && {
    return Circuit(num_inputs_, std::move(gates_), std::move(outputs));
}

} // namespace apx
