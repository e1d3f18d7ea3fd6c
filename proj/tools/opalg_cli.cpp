#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "opalg/cli.hpp"
#include "opalg/field.hpp"
#include "opalg/simplicial.hpp"

namespace {

int emit(const nlohmann::json& j, const std::string& output) {
    const std::string text = j.dump(2) + "\n";
    if (output.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream out(output, std::ios::binary);
    if (!out) {
        std::cout << opalg::error_report("io", "cannot write '" + output + "'").dump(2) << "\n";
        return 4;
    }
    out << text;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Operads, Hochschild cohomology and blown-up intersection cochains over prime fields"};
    app.require_subcommand(1);
    opalg::JobConfig cfg;
    std::string window = "0:4", output;

    auto common = [&](CLI::App* sub, bool with_input) {
        if (with_input) sub->add_option("input", cfg.input, "Input JSON file")->required();
        sub->add_option("--field", cfg.field, "Prime characteristic");
        sub->add_option("--output", output, "Write the JSON report to this file");
    };
    auto* homology = app.add_subcommand("homology", "Betti numbers of a simplicial complex");
    common(homology, true);
    for (const char* name : {"hochschild", "bv"}) {
        auto* sub = app.add_subcommand(name, std::string(name) == "bv"
                                                 ? "BV operator and relation check on a Frobenius model"
                                                 : "Truncated Hochschild cohomology HH(A, A)");
        common(sub, true);
        sub->add_option("--max-bar-length", cfg.max_bar_length, "Bar length truncation L");
        sub->add_option("--window", window, "Degree window lo:hi");
        if (std::string(name) == "hochschild") {
            sub->add_option("--env-arity", cfg.env_arity, "Enveloping algebra arity bound (0 skips it)");
            sub->add_option("--env-degree", cfg.env_degree, "Enveloping algebra BE degree bound");
        }
    }
    for (const char* name : {"intersection", "blowup"}) {
        auto* sub = app.add_subcommand(name, std::string(name) == "blowup"
                                                 ? "Blown-up cochains, duality with intersection chains"
                                                 : "Intersection homology per perversity");
        common(sub, true);
        sub->add_option("--perversity", cfg.perversities, "GM perversity as comma-separated values, or 'all'");
    }
    auto* verify = app.add_subcommand("verify-operads", "Permutation and Barratt-Eccles operad identities");
    common(verify, false);
    verify->add_option("--samples", cfg.samples, "Random samples per identity family");
    verify->add_option("--seed", cfg.seed, "Random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cout << opalg::error_report("usage", e.what()).dump(2) << "\n";
        return 1;
    }
    cfg.command = app.get_subcommands().front()->get_name();
    try {
        opalg::parse_window(window, cfg.window_lo, cfg.window_hi);
        return emit(opalg::run_job(cfg), output);
    } catch (const opalg::InputError& e) {
        emit(opalg::error_report("input", e.what()), output);
        return 2;
    } catch (const opalg::MathError& e) {
        emit(opalg::error_report("math", e.what()), output);
        return 3;
    }
}
