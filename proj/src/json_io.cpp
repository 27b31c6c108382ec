#include "apx/json_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace apx {

using ordered_json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

Circuit load_circuit(const std::string& path) { return Circuit::from_json(read_file(path)); }

FlatDistribution load_distribution(const std::string& path) {
    return FlatDistribution::from_text(read_file(path));
}

namespace {

std::string join_path(const std::string& base, const std::string& rel) {
    if (rel.empty() || rel.front() == '/' || base.empty()) return rel;
    return base + "/" + rel;
}

Circuit circuit_from_spec(const ordered_json& j, const std::string& base_dir) {
    if (j.contains("circuit_file"))
        return load_circuit(join_path(base_dir, j.at("circuit_file").get<std::string>()));
    return Circuit::from_json(j.at("circuit").dump());
}

RandomVariable rv_from_json(const ordered_json& j, const std::string& base_dir) {
    Circuit sampler = circuit_from_spec(j, base_dir);
    std::vector<Rational> support;
    for (const auto& s : j.at("support")) support.push_back(Rational::parse(s.get<std::string>()));
    ValueCodec codec;
    if (j.contains("decoder")) {
        const auto& d = j.at("decoder");
        codec.has_sign = d.value("sign", false);
        codec.int_bits = d.value("int_bits", 1u);
        codec.frac_bits = d.value("frac_bits", 0u);
    } else {
        codec = ValueCodec::fitting(support);
    }
    return RandomVariable(std::move(support), sampler.num_inputs(), std::move(sampler), codec);
}

} // namespace

RandomVariable load_random_variable(const std::string& text, const std::string& base_dir) {
    return rv_from_json(ordered_json::parse(text), base_dir);
}

IneqInstance load_inequality_instance(const std::string& text, const std::string& base_dir) {
    ordered_json j = ordered_json::parse(text);
    IneqInstance inst;
    inst.suite = suite_from_name(j.at("suite").get<std::string>());
    if (j.contains("variables"))
        for (const auto& v : j.at("variables")) inst.variables.push_back(rv_from_json(v, base_dir));
    if (j.contains("coefficients"))
        for (const auto& c : j.at("coefficients"))
            inst.coefficients.push_back(Rational::parse(c.get<std::string>()));
    if (j.contains("gamma")) inst.gamma_offset = Rational::parse(j.at("gamma").get<std::string>());
    if (j.contains("event")) inst.event = Circuit::from_json(j.at("event").dump());
    if (j.contains("event_file"))
        inst.event = load_circuit(join_path(base_dir, j.at("event_file").get<std::string>()));
    if (j.contains("k")) inst.k_factor = Rational::parse(j.at("k").get<std::string>());
    if (j.contains("repetitions")) inst.repetitions = j.at("repetitions").get<std::size_t>();
    if (j.contains("t")) inst.t_param = Rational::parse(j.at("t").get<std::string>());
    if (j.contains("threshold")) inst.threshold = j.at("threshold").get<std::size_t>();
    return inst;
}

RefuterInstance load_refuter_instance(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    return RefuterInstance::with_builtin(
        j.at("n").get<uint32_t>(), j.at("m").get<uint32_t>(), j.at("s").get<uint32_t>(),
        Rational::parse(j.at("delta").get<std::string>()), j.at("generator").get<std::string>());
}

std::string refuter_instance_json(const RefuterInstance& inst) {
    ordered_json j;
    j["n"] = inst.n;
    j["m"] = inst.m;
    j["s"] = inst.s;
    j["delta"] = inst.delta.str();
    j["generator"] = inst.generator_name;
    return j.dump();
}

LossyCodeInstance load_lossycode_instance(const std::string& text, const std::string& base_dir) {
    ordered_json j = ordered_json::parse(text);
    const std::string kind = j.value("kind", std::string("circuits"));
    if (kind == "circuits") {
        Circuit comp = j.contains("compressor_file")
                           ? load_circuit(join_path(base_dir, j.at("compressor_file").get<std::string>()))
                           : Circuit::from_json(j.at("compressor").dump());
        Circuit decomp =
            j.contains("decompressor_file")
                ? load_circuit(join_path(base_dir, j.at("decompressor_file").get<std::string>()))
                : Circuit::from_json(j.at("decompressor").dump());
        return LossyCodeInstance::from_circuits(std::move(comp), std::move(decomp));
    }
    if (kind == "refuter_reduction") {
        RefuterInstance inst = load_refuter_instance(text);
        return refuter_to_lossycode(inst).lossy;
    }
    throw std::invalid_argument("unknown lossycode instance kind: " + kind);
}

OneWayProtocol load_protocol(const std::string& text, const std::string& base_dir) {
    ordered_json j = ordered_json::parse(text);
    OneWayProtocol proto;
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "public") proto.mode = CoinMode::Public;
    else if (mode == "private") proto.mode = CoinMode::Private;
    else throw std::invalid_argument("protocol mode must be public or private");
    proto.n = j.at("n").get<uint32_t>();
    proto.m = j.at("m").get<uint32_t>();
    proto.r = j.at("r").get<uint32_t>();
    proto.alice = j.contains("alice_file")
                      ? load_circuit(join_path(base_dir, j.at("alice_file").get<std::string>()))
                      : Circuit::from_json(j.at("alice").dump());
    proto.bob = j.contains("bob_file")
                    ? load_circuit(join_path(base_dir, j.at("bob_file").get<std::string>()))
                    : Circuit::from_json(j.at("bob").dump());
    proto.validate();
    return proto;
}

} // namespace apx
