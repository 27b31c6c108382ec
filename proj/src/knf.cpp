#include "apx/knf.hpp"

#include <algorithm>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace apx {

using ordered_json = nlohmann::ordered_json;

std::size_t Restriction::num_fixed() const {
    std::size_t c = 0;
    for (int8_t v : assign_) c += (v != kStar);
    return c;
}

std::vector<uint32_t> Restriction::fixed_vars() const {
    std::vector<uint32_t> r;
    for (uint32_t i = 1; i <= n(); ++i)
        if (is_set(i)) r.push_back(i);
    return r;
}

std::vector<uint32_t> Restriction::free_vars() const {
    std::vector<uint32_t> r;
    for (uint32_t i = 1; i <= n(); ++i)
        if (!is_set(i)) r.push_back(i);
    return r;
}

Bits Restriction::complete(const Bits& free_bits) const {
    Bits full(n());
    std::size_t k = 0;
    for (uint32_t i = 1; i <= n(); ++i) {
        if (is_set(i)) {
            full[i - 1] = static_cast<uint8_t>(value(i));
        } else {
            if (k >= free_bits.size()) throw std::invalid_argument("complete: not enough free bits");
            full[i - 1] = free_bits[k++];
        }
    }
    if (k != free_bits.size()) throw std::invalid_argument("complete: too many free bits");
    return full;
}

Restriction Restriction::merged_with(const Restriction& other) const {
    if (other.n() != n()) throw std::invalid_argument("merge: size mismatch");
    Restriction r(n());
    for (uint32_t i = 1; i <= n(); ++i) {
        if (is_set(i) && other.is_set(i) && value(i) != other.value(i))
            throw std::invalid_argument("merge: conflicting assignments");
        if (is_set(i)) r.set(i, value(i));
        else if (other.is_set(i)) r.set(i, other.value(i));
    }
    return r;
}

int Restriction::parity_of_fixed() const {
    int p = 0;
    for (int8_t v : assign_)
        if (v == 1) p ^= 1;
    return p;
}

std::string Restriction::str() const {
    std::string s;
    for (int8_t v : assign_) s.push_back(v == kStar ? '*' : static_cast<char>('0' + v));
    return s;
}

std::set<uint32_t> KnfClause::support() const {
    std::set<uint32_t> s = pos;
    s.insert(neg.begin(), neg.end());
    return s;
}

std::size_t Knf::width_bound() const {
    std::size_t w = 0;
    for (const KnfClause& c : clauses) w = std::max(w, c.width());
    return w;
}

std::set<uint32_t> Knf::support() const {
    std::set<uint32_t> s;
    for (const KnfClause& c : clauses) {
        s.insert(c.pos.begin(), c.pos.end());
        s.insert(c.neg.begin(), c.neg.end());
    }
    return s;
}

Circuit Knf::to_circuit(uint32_t n) const {
    CircuitBuilder b(n);
    std::vector<uint32_t> literal_pos(n, UINT32_MAX), literal_neg(n, UINT32_MAX);
    auto lit = [&](uint32_t var, bool negated) {
        if (literal_pos[var - 1] == UINT32_MAX) literal_pos[var - 1] = b.add_input(var);
        if (!negated) return literal_pos[var - 1];
        if (literal_neg[var - 1] == UINT32_MAX) literal_neg[var - 1] = b.add_not(literal_pos[var - 1]);
        return literal_neg[var - 1];
    };
    const bool cnf = connective == Connective::Cnf;
    std::vector<uint32_t> clause_ids;
    for (const KnfClause& c : clauses) {
        std::vector<uint32_t> lits;
        for (uint32_t v : c.pos) lits.push_back(lit(v, false));
        for (uint32_t v : c.neg) lits.push_back(lit(v, true));
        clause_ids.push_back(cnf ? b.add_or(std::move(lits)) : b.add_and(std::move(lits)));
    }
    uint32_t out = cnf ? b.add_and(std::move(clause_ids)) : b.add_or(std::move(clause_ids));
    return std::move(b).build({out});
}

std::string Knf::to_json() const {
    ordered_json j;
    j["connective"] = connective == Connective::Cnf ? "CNF" : "DNF";
    ordered_json cl = ordered_json::array();
    for (const KnfClause& c : clauses) {
        ordered_json item;
        item["pos"] = std::vector<uint32_t>(c.pos.begin(), c.pos.end());
        item["neg"] = std::vector<uint32_t>(c.neg.begin(), c.neg.end());
        cl.push_back(std::move(item));
    }
    j["clauses"] = std::move(cl);
    return j.dump();
}

Knf Knf::from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    Knf f;
    std::string conn = j.at("connective").get<std::string>();
    if (conn == "CNF") f.connective = Connective::Cnf;
    else if (conn == "DNF") f.connective = Connective::Dnf;
    else throw std::invalid_argument("bad connective: " + conn);
    for (const auto& item : j.at("clauses")) {
        KnfClause c;
        for (uint32_t v : item.at("pos").get<std::vector<uint32_t>>()) c.pos.insert(v);
        for (uint32_t v : item.at("neg").get<std::vector<uint32_t>>()) c.neg.insert(v);
        for (uint32_t v : c.pos)
            if (c.neg.count(v)) throw std::invalid_argument("clause with both polarities of a variable");
        f.clauses.push_back(std::move(c));
    }
    return f;
}

KnfSimplification knf_apply_restriction(const Knf& f, const Restriction& rho) {
    // CNF clause semantics: OR of literals; a true literal satisfies (drops)
    // the clause, an all-false clause kills the formula. DNF is dual.
    const bool cnf = f.connective == Connective::Cnf;
    KnfSimplification result;
    result.simplified.connective = f.connective;
    for (const KnfClause& c : f.clauses) {
        KnfClause live;
        // CNF: a true literal satisfies the clause (drops it); DNF: a false
        // literal falsifies the term (drops it).
        bool dropped = false;
        for (uint32_t v : c.pos) {
            if (!rho.is_set(v)) { live.pos.insert(v); continue; }
            const bool lit_true = rho.value(v) == 1;
            if (lit_true == cnf) { dropped = true; break; }
        }
        if (!dropped) {
            for (uint32_t v : c.neg) {
                if (!rho.is_set(v)) { live.neg.insert(v); continue; }
                const bool lit_true = rho.value(v) == 0;
                if (lit_true == cnf) { dropped = true; break; }
            }
        }
        if (dropped) continue;
        if (live.pos.empty() && live.neg.empty()) {
            // Every literal resolved the other way: an all-false CNF clause
            // or an all-true DNF term decides the formula.
            result.trivialized = cnf ? 0 : 1;
            result.live_vars.clear();
            result.simplified.clauses.clear();
            return result;
        }
        result.simplified.clauses.push_back(std::move(live));
    }
    if (result.simplified.clauses.empty()) {
        result.trivialized = cnf ? 1 : 0;
        return result;
    }
    result.live_vars = result.simplified.support();
    return result;
}

std::size_t LayeredAC0::size() const {
    std::size_t s = 0;
    for (const auto& layer : layers) s += layer.size();
    return s;
}

void LayeredAC0::validate() const {
    if (layers.empty()) throw std::invalid_argument("layered circuit needs at least one layer");
    if (layers.back().size() != 1) throw std::invalid_argument("layered circuit needs a single output gate");
    for (std::size_t li = 0; li < layers.size(); ++li) {
        for (const LayeredGate& g : layers[li]) {
            for (int32_t f : g.feeds) {
                if (li == 0) {
                    uint32_t var = static_cast<uint32_t>(f < 0 ? -f : f);
                    if (f == 0 || var > num_inputs)
                        throw std::invalid_argument("layer-1 literal out of range");
                } else {
                    if (f < 0 || static_cast<std::size_t>(f) >= layers[li - 1].size())
                        throw std::invalid_argument("layered feed out of range");
                }
            }
        }
    }
}

Circuit LayeredAC0::to_circuit() const {
    validate();
    CircuitBuilder b(num_inputs);
    std::vector<uint32_t> input_ids(num_inputs), not_ids(num_inputs, UINT32_MAX);
    for (uint32_t i = 0; i < num_inputs; ++i) input_ids[i] = b.add_input(i + 1);
    std::vector<uint32_t> prev;
    for (std::size_t li = 0; li < layers.size(); ++li) {
        std::vector<uint32_t> cur;
        const bool is_and = layer_is_and(li);
        for (const LayeredGate& g : layers[li]) {
            std::vector<uint32_t> args;
            for (int32_t f : g.feeds) {
                if (li == 0) {
                    uint32_t var = static_cast<uint32_t>(f < 0 ? -f : f);
                    if (f > 0) {
                        args.push_back(input_ids[var - 1]);
                    } else {
                        if (not_ids[var - 1] == UINT32_MAX) not_ids[var - 1] = b.add_not(input_ids[var - 1]);
                        args.push_back(not_ids[var - 1]);
                    }
                } else {
                    args.push_back(prev[static_cast<std::size_t>(f)]);
                }
            }
            cur.push_back(is_and ? b.add_and(std::move(args)) : b.add_or(std::move(args)));
        }
        prev = std::move(cur);
    }
    return std::move(b).build({prev[0]});
}

Knf LayeredAC0::layer2_gate_as_knf(std::size_t gate_idx) const {
    if (layers.size() < 2) throw std::invalid_argument("layer2_gate_as_knf needs depth >= 2");
    const LayeredGate& g = layers[1][gate_idx];
    Knf f;
    f.connective = layer_is_and(1) ? Connective::Cnf : Connective::Dnf;
    for (int32_t feed : g.feeds) {
        const LayeredGate& child = layers[0][static_cast<std::size_t>(feed)];
        KnfClause c;
        for (int32_t lit : child.feeds) {
            if (lit > 0) c.pos.insert(static_cast<uint32_t>(lit));
            else c.neg.insert(static_cast<uint32_t>(-lit));
        }
        if (!c.pos.empty() || !c.neg.empty()) {
            for (uint32_t v : c.pos)
                if (c.neg.count(v)) throw std::invalid_argument("layer-1 gate with both polarities");
        }
        f.clauses.push_back(std::move(c));
    }
    return f;
}

std::string LayeredAC0::to_json() const {
    ordered_json j;
    j["inputs"] = num_inputs;
    j["first_layer"] = first_layer_and ? "AND" : "OR";
    ordered_json ls = ordered_json::array();
    for (const auto& layer : layers) {
        ordered_json gl = ordered_json::array();
        for (const LayeredGate& g : layer) gl.push_back(g.feeds);
        ls.push_back(std::move(gl));
    }
    j["layers"] = std::move(ls);
    return j.dump();
}

LayeredAC0 LayeredAC0::from_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    LayeredAC0 c;
    c.num_inputs = j.at("inputs").get<uint32_t>();
    c.first_layer_and = j.at("first_layer").get<std::string>() == "AND";
    for (const auto& layer : j.at("layers")) {
        std::vector<LayeredGate> gl;
        for (const auto& feeds : layer) gl.push_back(LayeredGate{feeds.get<std::vector<int32_t>>()});
        c.layers.push_back(std::move(gl));
    }
    c.validate();
    return c;
}

} // namespace apx
