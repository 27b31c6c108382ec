#include <chrono>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "apx/config.hpp"
#include "apx/json_io.hpp"
#include "apx/restriction.hpp"
#include "apx/selftest.hpp"

using ordered_json = nlohmann::ordered_json;
using namespace apx;

namespace {

struct CommonOpts {
    uint64_t delta_inv = 100;
    uint64_t beta_inv = 1000;
    uint64_t seed = 1;
    std::string out_path;
    bool timing = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--delta", o.delta_inv, "inverse counting precision (delta = 1/K)");
    cmd->add_option("--beta", o.beta_inv, "inverse slack parameter (beta = 1/K)");
    cmd->add_option("--seed", o.seed, "PRNG seed");
    cmd->add_option("--out", o.out_path, "write the JSON report to a file instead of stdout");
    cmd->add_flag("--timing", o.timing, "include wall-clock timing in the report");
}

std::unique_ptr<CountingOracle> make_oracle(const std::string& kind, const CommonOpts& o,
                                            const std::string& dist_path, const std::string& gamma) {
    if (kind == "exact") return std::make_unique<ExactOracle>();
    if (kind == "sample") return std::make_unique<SampleOracle>(Rational::parse(gamma), o.seed);
    if (kind == "empirical") {
        if (dist_path.empty()) throw std::runtime_error("empirical oracle needs --dist");
        return std::make_unique<EmpiricalOracle>(load_distribution(dist_path));
    }
    throw std::runtime_error("unknown oracle kind: " + kind);
}

std::string base_dir_of(const std::string& path) {
    auto slash = path.find_last_of('/');
    return slash == std::string::npos ? std::string() : path.substr(0, slash);
}

int emit(const CommonOpts& o, ordered_json report, int exit_code,
         std::chrono::steady_clock::time_point started, const std::string& command_echo) {
    ordered_json out;
    out["command"] = command_echo;
    out["prng"] = Prng::kAlgorithm;
    out["seed"] = o.seed;
    for (auto& [key, value] : report.items()) out[key] = std::move(value);
    if (o.timing) {
        auto elapsed = std::chrono::steady_clock::now() - started;
        out["timing_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
    }
    const std::string text = out.dump(2) + "\n";
    if (o.out_path.empty()) std::cout << text;
    else write_file(o.out_path, text);
    return exit_code;
}

ordered_json bits_json(const Bits& b) { return to_string(b); }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"approximate-counting toolkit: circuits, oracles, transforms, reductions"};
    app.require_subcommand(1);

    std::string command_echo;
    for (int i = 0; i < argc; ++i) {
        if (i > 0) command_echo += ' ';
        command_echo += argv[i];
    }
    const auto started = std::chrono::steady_clock::now();

    // --- count -------------------------------------------------------------
    auto* count_cmd = app.add_subcommand("count", "acceptance probability of a circuit");
    CommonOpts count_o;
    std::string count_circuit, count_oracle = "exact", count_dist, count_gamma = "1/100";
    count_cmd->add_option("--circuit", count_circuit, "circuit JSON file")->required();
    count_cmd->add_option("--oracle", count_oracle, "exact | sample | empirical");
    count_cmd->add_option("--dist", count_dist, "flat distribution file (empirical oracle)");
    count_cmd->add_option("--gamma", count_gamma, "failure probability for the sampling oracle");
    add_common(count_cmd, count_o);

    // --- rv ------------------------------------------------------------------
    auto* rv_cmd = app.add_subcommand("rv", "random-variable operations");
    rv_cmd->require_subcommand(1);
    CommonOpts rv_o;
    std::string rv_spec, rv_oracle = "exact", rv_dist, rv_gamma = "1/100";
    std::size_t rv_suffix = 1;
    auto add_rv_opts = [&](CLI::App* sub) {
        sub->add_option("--spec", rv_spec, "spec JSON file")->required();
        sub->add_option("--oracle", rv_oracle, "exact | sample | empirical");
        sub->add_option("--dist", rv_dist, "flat distribution file (empirical oracle)");
        sub->add_option("--gamma", rv_gamma, "failure probability for the sampling oracle");
        add_common(sub, rv_o);
    };
    auto* rv_expect = rv_cmd->add_subcommand("expect", "approximate expectation");
    add_rv_opts(rv_expect);
    auto* rv_var = rv_cmd->add_subcommand("var", "approximate variance");
    add_rv_opts(rv_var);
    auto* rv_avgs = rv_cmd->add_subcommand("avgsample", "greedy seed fixing");
    add_rv_opts(rv_avgs);
    rv_avgs->add_option("--k", rv_suffix, "suffix length to fix");
    auto* rv_verify = rv_cmd->add_subcommand("verify", "probability-inequality check");
    add_rv_opts(rv_verify);

    // --- yao --------------------------------------------------------------------
    auto* yao_cmd = app.add_subcommand("yao", "distinguisher-to-predictor transform");
    CommonOpts yao_o;
    std::string yao_gen, yao_dist_circuit;
    yao_cmd->add_option("--gen", yao_gen, "generator circuit JSON file")->required();
    yao_cmd->add_option("--dist", yao_dist_circuit, "distinguisher circuit JSON file")->required();
    add_common(yao_cmd, yao_o);

    // --- blr -----------------------------------------------------------------------
    auto* blr_cmd = app.add_subcommand("blr", "linearity testing and decoding");
    blr_cmd->require_subcommand(1);
    CommonOpts blr_o;
    std::string blr_circuit, blr_point, blr_eps = "1/200";
    auto add_blr_opts = [&](CLI::App* sub) {
        sub->add_option("--circuit", blr_circuit, "circuit JSON file")->required();
        sub->add_option("--eps", blr_eps, "closeness parameter epsilon");
        add_common(sub, blr_o);
    };
    auto* blr_test_cmd = blr_cmd->add_subcommand("test", "failure rate of the linearity test");
    add_blr_opts(blr_test_cmd);
    auto* blr_correct_cmd = blr_cmd->add_subcommand("correct", "self-correct one point");
    add_blr_opts(blr_correct_cmd);
    blr_correct_cmd->add_option("--x", blr_point, "point to correct (bit string)")->required();
    auto* blr_decode_cmd = blr_cmd->add_subcommand("decode", "recover the nearest linear function");
    add_blr_opts(blr_decode_cmd);

    // --- sz --------------------------------------------------------------------------
    auto* sz_cmd = app.add_subcommand("sz", "polynomial zero-fraction bound");
    CommonOpts sz_o;
    std::string sz_poly, sz_witness;
    sz_cmd->add_option("--poly", sz_poly, "polynomial JSON file")->required();
    sz_cmd->add_option("--witness", sz_witness, "non-zero point, comma separated")->required();
    add_common(sz_cmd, sz_o);

    // --- protocol -----------------------------------------------------------------------
    auto* proto_cmd = app.add_subcommand("protocol", "one-way protocol simulation");
    proto_cmd->require_subcommand(1);
    CommonOpts proto_o;
    std::string proto_file, proto_fn;
    auto* proto_sim = proto_cmd->add_subcommand("simulate", "max error over all input pairs");
    proto_sim->add_option("--proto", proto_file, "protocol JSON file")->required();
    proto_sim->add_option("--fn", proto_fn, "target function circuit JSON file")->required();
    add_common(proto_sim, proto_o);

    // --- refuter -------------------------------------------------------------------------
    auto* ref_cmd = app.add_subcommand("refuter", "predictor-generator refutation problem");
    ref_cmd->require_subcommand(1);
    CommonOpts ref_o;
    std::string ref_instance, ref_dist_file;
    uint64_t ref_tries = 1000;
    auto* ref_check = ref_cmd->add_subcommand("check", "verify a candidate distribution");
    ref_check->add_option("--instance", ref_instance, "instance JSON file")->required();
    ref_check->add_option("--dist", ref_dist_file, "flat distribution file")->required();
    add_common(ref_check, ref_o);
    auto* ref_solve = ref_cmd->add_subcommand("solve", "randomized solver");
    ref_solve->add_option("--instance", ref_instance, "instance JSON file")->required();
    ref_solve->add_option("--max-tries", ref_tries, "sampling budget");
    add_common(ref_solve, ref_o);
    auto* ref_reduce = ref_cmd->add_subcommand("reduce", "mapping reduction to the lossy-code problem");
    ref_reduce->add_option("--instance", ref_instance, "instance JSON file")->required();
    add_common(ref_reduce, ref_o);

    // --- lossycode ------------------------------------------------------------------------
    auto* lossy_cmd = app.add_subcommand("lossycode", "compressor/decompressor counterexamples");
    lossy_cmd->require_subcommand(1);
    CommonOpts lossy_o;
    std::string lossy_instance, lossy_x;
    uint64_t lossy_tries = 1000;
    auto* lossy_check = lossy_cmd->add_subcommand("check", "verify a candidate input");
    lossy_check->add_option("--instance", lossy_instance, "instance JSON file")->required();
    lossy_check->add_option("--x", lossy_x, "candidate input (bit string)")->required();
    add_common(lossy_check, lossy_o);
    auto* lossy_solve = lossy_cmd->add_subcommand("solve", "randomized solver");
    lossy_solve->add_option("--instance", lossy_instance, "instance JSON file")->required();
    lossy_solve->add_option("--max-tries", lossy_tries, "sampling budget");
    add_common(lossy_solve, lossy_o);

    // --- compress --------------------------------------------------------------------------
    auto* comp_cmd = app.add_subcommand("compress", "iterated block-compression schemes");
    comp_cmd->require_subcommand(1);
    CommonOpts comp_o;
    std::string comp_c, comp_d, comp_input;
    std::size_t comp_ell = 16, comp_rounds = 2;
    auto add_comp_opts = [&](CLI::App* sub) {
        sub->add_option("--compressor", comp_c, "base compressor circuit JSON")->required();
        sub->add_option("--decompressor", comp_d, "base decompressor circuit JSON")->required();
        sub->add_option("--ell", comp_ell, "payload length");
        sub->add_option("--rounds", comp_rounds, "number of rounds");
        sub->add_option("--input", comp_input, "optional input bit string to round-trip");
        add_common(sub, comp_o);
    };
    auto* comp_amplify = comp_cmd->add_subcommand("amplify", "stretch-amplifying scheme");
    add_comp_opts(comp_amplify);
    auto* comp_w2a = comp_cmd->add_subcommand("w2a", "worst-case-from-average scheme");
    add_comp_opts(comp_w2a);

    // --- restrict -----------------------------------------------------------------------------
    auto* restr_cmd = app.add_subcommand("restrict", "subset selection and derandomized restriction");
    restr_cmd->require_subcommand(1);
    CommonOpts restr_o;
    std::string restr_formulas;
    uint32_t restr_n = 0, restr_t = 0;
    std::size_t restr_k = 2, restr_b = 4;
    bool restr_adaptive = false;
    auto add_restr_opts = [&](CLI::App* sub) {
        sub->add_option("--formulas", restr_formulas, "formula list JSON file")->required();
        sub->add_option("--n", restr_n, "number of variables")->required();
        sub->add_option("--t", restr_t, "target free-variable count");
        sub->add_option("--k", restr_k, "size-bound exponent");
        sub->add_option("--b", restr_b, "narrow width bound");
        sub->add_flag("--adaptive-b", restr_adaptive, "raise b until the greedy budget holds");
        add_common(sub, restr_o);
    };
    auto* restr_select = restr_cmd->add_subcommand("select", "narrow-or-wide subset selection");
    add_restr_opts(restr_select);
    auto* restr_apply = restr_cmd->add_subcommand("apply", "selection plus derandomized restriction");
    add_restr_opts(restr_apply);
    auto* restr_pipeline = restr_cmd->add_subcommand("pipeline", "selection, restriction and report");
    add_restr_opts(restr_pipeline);

    // --- parity ---------------------------------------------------------------------------------
    auto* parity_cmd = app.add_subcommand("parity", "parity counterexamples for shallow circuits");
    parity_cmd->require_subcommand(1);
    CommonOpts parity_o;
    std::string parity_circuit;
    std::size_t parity_k = 2;
    auto* parity_sep = parity_cmd->add_subcommand("separate", "find x with C(x) != parity(x)");
    parity_sep->add_option("--circuit", parity_circuit, "layered circuit JSON file")->required();
    parity_sep->add_option("--k", parity_k, "size-bound exponent");
    add_common(parity_sep, parity_o);

    // --- selftest -------------------------------------------------------------------------------
    auto* self_cmd = app.add_subcommand("selftest", "run the invariant suites");
    CommonOpts self_o;
    std::string self_level = "quick";
    bool self_fault = false;
    self_cmd->add_option("--level", self_level, "quick | full");
    self_cmd->add_flag("--inject-fault", self_fault, "corrupt the oracle to observe failures");
    add_common(self_cmd, self_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (count_cmd->parsed()) {
            auto oracle = make_oracle(count_oracle, count_o, count_dist, count_gamma);
            Circuit c = load_circuit(count_circuit);
            Rational p = oracle->query(c, Precision{count_o.delta_inv});
            ordered_json rep;
            rep["probability"] = p.str();
            rep["oracle"] = oracle->name();
            rep["queries"] = oracle->query_count();
            return emit(count_o, std::move(rep), 0, started, command_echo);
        }

        if (rv_cmd->parsed()) {
            auto oracle = make_oracle(rv_oracle, rv_o, rv_dist, rv_gamma);
            const Precision prec{rv_o.delta_inv};
            const std::string spec = read_file(rv_spec);
            const std::string base = base_dir_of(rv_spec);
            ordered_json rep;
            if (rv_expect->parsed()) {
                RandomVariable x = load_random_variable(spec, base);
                rep["expectation"] = approx_expectation(x, *oracle, prec).str();
            } else if (rv_var->parsed()) {
                RandomVariable x = load_random_variable(spec, base);
                rep["variance"] = variance(x, *oracle, prec).str();
            } else if (rv_avgs->parsed()) {
                RandomVariable x = load_random_variable(spec, base);
                LinearCombination combo{{x}, {Rational(1)}};
                Rational mu = combo.mu(*oracle, prec);
                Bits z = avg_sampler(combo, rv_suffix, *oracle, prec);
                rep["mu"] = mu.str();
                rep["suffix"] = to_string(z);
                rep["mu_restricted"] = combo.mu_restricted(z, *oracle, prec).str();
            } else {
                IneqInstance inst = load_inequality_instance(spec, base);
                IneqReport r = verify_inequality(inst, *oracle, prec, Precision{rv_o.beta_inv});
                rep["suite"] = suite_name(r.suite);
                rep["hypothesis_ok"] = r.hypothesis_ok;
                if (!r.hypothesis_note.empty()) rep["hypothesis_note"] = r.hypothesis_note;
                rep["lhs"] = r.lhs.str();
                rep["rhs"] = r.rhs.str();
                rep["slack"] = r.slack.str();
                rep["pass"] = r.pass;
                if (!r.note.empty()) rep["note"] = r.note;
                return emit(rv_o, std::move(rep), r.hypothesis_ok && r.pass ? 0 : 1, started,
                            command_echo);
            }
            rep["oracle"] = oracle->name();
            rep["queries"] = oracle->query_count();
            return emit(rv_o, std::move(rep), 0, started, command_echo);
        }

        if (yao_cmd->parsed()) {
            ExactOracle oracle;
            Circuit g = load_circuit(yao_gen);
            Circuit c = load_circuit(yao_dist_circuit);
            const Precision prec{yao_o.delta_inv};
            Predictor p = yao_predictor(g, c, oracle, prec, Precision{yao_o.beta_inv});
            ordered_json rep;
            rep["index"] = p.index;
            rep["advantage"] = p.advantage.str();
            rep["predictor"] = ordered_json::parse(p.circuit.to_json());
            return emit(yao_o, std::move(rep), 0, started, command_echo);
        }

        if (blr_cmd->parsed()) {
            ExactOracle oracle;
            Circuit c = load_circuit(blr_circuit);
            const Precision prec{blr_o.delta_inv};
            const Rational eps = Rational::parse(blr_eps);
            ordered_json rep;
            if (blr_test_cmd->parsed()) {
                rep["failure_rate"] = blr_test(c, oracle, prec).str();
                return emit(blr_o, std::move(rep), 0, started, command_echo);
            }
            if (blr_correct_cmd->parsed()) {
                auto bit = blr_self_correct(c, bits_from_string(blr_point), oracle, prec, eps);
                rep["corrected"] = bit ? ordered_json(*bit) : ordered_json(nullptr);
                return emit(blr_o, std::move(rep), bit ? 0 : 1, started, command_echo);
            }
            BlrDecodeResult r = blr_decode(c, oracle, prec, eps);
            rep["test_rate"] = r.test_rate.str();
            rep["z"] = r.z ? ordered_json(to_string(*r.z)) : ordered_json(nullptr);
            if (r.disagreement) rep["disagreement"] = r.disagreement->str();
            return emit(blr_o, std::move(rep), r.z ? 0 : 1, started, command_echo);
        }

        if (sz_cmd->parsed()) {
            ExactOracle oracle;
            FieldPoly poly = FieldPoly::from_json(read_file(sz_poly));
            std::vector<uint64_t> witness;
            std::string tok;
            for (char ch : sz_witness + ",") {
                if (ch == ',') {
                    if (!tok.empty()) witness.push_back(std::stoull(tok));
                    tok.clear();
                } else {
                    tok.push_back(ch);
                }
            }
            SchwartzZippelReport r = schwartz_zippel_check(poly, witness, oracle,
                                                           Precision{sz_o.delta_inv});
            ordered_json rep;
            rep["zero_fraction"] = r.zero_fraction.str();
            rep["bound"] = r.bound.str();
            rep["pass"] = r.pass;
            return emit(sz_o, std::move(rep), r.pass ? 0 : 1, started, command_echo);
        }

        if (proto_cmd->parsed()) {
            ExactOracle oracle;
            OneWayProtocol proto = load_protocol(read_file(proto_file), base_dir_of(proto_file));
            Circuit f = load_circuit(proto_fn);
            ProtocolReport r = simulate_protocol(proto, f, oracle, Precision{proto_o.delta_inv});
            ordered_json rep;
            rep["max_error"] = r.max_error.str();
            rep["worst_x"] = bits_json(r.worst_x);
            rep["worst_y"] = bits_json(r.worst_y);
            return emit(proto_o, std::move(rep), 0, started, command_echo);
        }

        if (ref_cmd->parsed()) {
            RefuterInstance inst = load_refuter_instance(read_file(ref_instance));
            ordered_json rep;
            rep["instance"] = ordered_json::parse(refuter_instance_json(inst));
            rep["parameter_condition"] = inst.parameter_condition();
            if (ref_check->parsed()) {
                bool ok = check_refuter_solution(inst, load_distribution(ref_dist_file));
                rep["solution"] = ok;
                return emit(ref_o, std::move(rep), ok ? 0 : 1, started, command_echo);
            }
            if (ref_solve->parsed()) {
                RefuterSolveResult r = solve_refuter_randomized(inst, ref_o.seed, ref_tries);
                rep["tries"] = r.tries;
                rep["found"] = r.solution.has_value();
                if (r.solution) rep["distribution"] = r.solution->to_text();
                return emit(ref_o, std::move(rep), r.solution ? 0 : 1, started, command_echo);
            }
            RefuterReduction red = refuter_to_lossycode(inst);
            rep["lossy_bits"] = red.lossy.n;
            rep["tuple_bits"] = red.tuple_bits;
            rep["codeword_bits"] = red.codeword_bits;
            ordered_json bundle;
            bundle["kind"] = "refuter_reduction";
            for (auto& [k, v] : ordered_json::parse(refuter_instance_json(inst)).items()) bundle[k] = v;
            rep["lossycode_instance"] = std::move(bundle);
            return emit(ref_o, std::move(rep), 0, started, command_echo);
        }

        if (lossy_cmd->parsed()) {
            LossyCodeInstance inst =
                load_lossycode_instance(read_file(lossy_instance), base_dir_of(lossy_instance));
            ordered_json rep;
            rep["bits"] = inst.n;
            if (lossy_check->parsed()) {
                bool ok = check_lossycode_solution(inst, bits_from_string(lossy_x));
                rep["solution"] = ok;
                return emit(lossy_o, std::move(rep), ok ? 0 : 1, started, command_echo);
            }
            LossySolveResult r = solve_lossycode_randomized(inst, lossy_o.seed, lossy_tries);
            rep["tries"] = r.tries;
            rep["found"] = r.solution.has_value();
            if (r.solution) rep["x"] = to_string(*r.solution);
            return emit(lossy_o, std::move(rep), r.solution ? 0 : 1, started, command_echo);
        }

        if (comp_cmd->parsed()) {
            Circuit base_c = load_circuit(comp_c);
            Circuit base_d = load_circuit(comp_d);
            CompressionScheme scheme = comp_amplify->parsed()
                                           ? stretch_amplify(base_c, base_d, comp_ell, comp_rounds)
                                           : worstcase_from_average(base_c, base_d, comp_ell, comp_rounds);
            ordered_json rep;
            rep["scheme"] = comp_amplify->parsed() ? "amplify" : "w2a";
            rep["input_bits"] = scheme.input_bits;
            rep["output_bits"] = scheme.output_bits;
            rep["rounds"] = scheme.rounds;
            int code = 0;
            if (!comp_input.empty()) {
                Bits input = bits_from_string(comp_input);
                Bits packed = scheme.compress(input);
                Bits back = scheme.decompress(packed);
                rep["compressed"] = to_string(packed);
                rep["roundtrip_ok"] = back == input;
                code = back == input ? 0 : 1;
            }
            return emit(comp_o, std::move(rep), code, started, command_echo);
        }

        if (restr_cmd->parsed()) {
            ordered_json spec = ordered_json::parse(read_file(restr_formulas));
            std::vector<Knf> formulas;
            for (const auto& f : spec) formulas.push_back(Knf::from_json(f.dump()));
            if (restr_t == 0) restr_t = std::max<uint32_t>(1, static_cast<uint32_t>(std::sqrt(restr_n)));
            RestrictionConfig cfg{restr_k, restr_b, restr_adaptive, 16};
            SelectionResult sel = select_subset(formulas, restr_n, restr_t, cfg);
            ordered_json rep;
            rep["T"] = std::vector<uint32_t>(sel.T.begin(), sel.T.end());
            rep["initial_potential"] = sel.initial_potential.str();
            rep["final_potential"] = sel.final_potential.str();
            ordered_json wlist = ordered_json::array();
            for (const SelectionEntry& e : sel.entries) {
                ordered_json w;
                if (const auto* narrow = std::get_if<NarrowWitness>(&e.witness)) {
                    w["kind"] = "narrow";
                    w["live"] = std::vector<uint32_t>(narrow->live_literals.begin(),
                                                      narrow->live_literals.end());
                } else {
                    const auto& wide = std::get<WideWitness>(e.witness);
                    w["kind"] = "wide";
                    w["subclauses"] = wide.subclauses.size();
                }
                wlist.push_back(std::move(w));
            }
            rep["witnesses"] = std::move(wlist);
            if (!restr_select->parsed()) {
                std::size_t b_used = cfg.b;
                for (const SelectionEntry& e : sel.entries)
                    if (const auto* narrow = std::get_if<NarrowWitness>(&e.witness))
                        b_used = std::max(b_used, narrow->live_literals.size());
                Restriction rho =
                    derandomized_restriction(formulas, sel.entries, sel.T, restr_n, b_used, cfg);
                rep["restriction"] = rho.str();
                ordered_json outcome = ordered_json::array();
                for (const Knf& f : formulas) {
                    KnfSimplification simp = knf_apply_restriction(f, rho);
                    ordered_json st;
                    if (simp.trivialized) st["trivialized"] = *simp.trivialized;
                    else st["live"] = std::vector<uint32_t>(simp.live_vars.begin(), simp.live_vars.end());
                    outcome.push_back(std::move(st));
                }
                rep["formulas_after"] = std::move(outcome);
            }
            return emit(restr_o, std::move(rep), 0, started, command_echo);
        }

        if (parity_cmd->parsed()) {
            LayeredAC0 c = LayeredAC0::from_json(read_file(parity_circuit));
            ParitySeparation sep = parity_separating_input(c, parity_k);
            ordered_json rep;
            rep["witness"] = to_string(sep.witness);
            ordered_json stages = ordered_json::array();
            for (const ParityPipelineStage& st : sep.stages) {
                ordered_json s;
                s["T"] = std::vector<uint32_t>(st.T.begin(), st.T.end());
                s["restriction"] = st.rho.str();
                s["b"] = st.b_used;
                stages.push_back(std::move(s));
            }
            rep["stages"] = std::move(stages);
            return emit(parity_o, std::move(rep), 0, started, command_echo);
        }

        if (self_cmd->parsed()) {
            if (self_level != "quick" && self_level != "full")
                throw std::runtime_error("selftest level must be quick or full");
            SelftestResult r = run_selftest(self_level == "full", self_fault, self_o.seed);
            ordered_json rep;
            ordered_json checks = ordered_json::array();
            for (const SelftestCheck& c : r.checks) {
                ordered_json item;
                item["name"] = c.name;
                item["pass"] = c.pass;
                checks.push_back(std::move(item));
            }
            rep["checks"] = std::move(checks);
            rep["all_pass"] = r.all_pass();
            return emit(self_o, std::move(rep), r.all_pass() ? 0 : 1, started, command_echo);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    std::cerr << "usage error: no subcommand\n";
    return 2;
}
