#ifndef APX_JSON_IO_HPP
#define APX_JSON_IO_HPP

#include <memory>
#include <string>

#include "apx/oracle.hpp"
#include "apx/randvar.hpp"
#include "apx/tfnp.hpp"
#include "apx/transforms.hpp"

namespace apx {

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

Circuit load_circuit(const std::string& path);
FlatDistribution load_distribution(const std::string& path);

// RV spec: {"circuit": {...} | "circuit_file": path, "support": ["p/q", ...],
//           "decoder": {"sign": bool, "int_bits": a, "frac_bits": f}}
RandomVariable load_random_variable(const std::string& text, const std::string& base_dir);

// Inequality spec: {"suite": name, ...suite-specific fields...}
IneqInstance load_inequality_instance(const std::string& text, const std::string& base_dir);

// Refuter instance: {"n":..,"m":..,"s":..,"delta":"p/q","generator":name}
RefuterInstance load_refuter_instance(const std::string& text);
std::string refuter_instance_json(const RefuterInstance& inst);

// LossyCode instance: {"kind":"circuits","compressor":{...},"decompressor":{...}}
// or {"kind":"refuter_reduction", ...refuter fields...}
LossyCodeInstance load_lossycode_instance(const std::string& text, const std::string& base_dir);

// Protocol: {"mode":"public"|"private","n":..,"m":..,"r":..,
//            "alice": {...circuit...}, "bob": {...circuit...}}
OneWayProtocol load_protocol(const std::string& text, const std::string& base_dir);

} // namespace apx

#endif
