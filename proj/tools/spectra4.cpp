#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

#include "spectra4/spectra4.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Periodic eigenvalues of d^4 + 2 d p d + q"};
    std::string command, config_path, out, format, engine;
    int nmax = -1, modes = -1;

    std::string names;
    for (auto n : spectra4::kCommandNames) names += (names.empty() ? "" : "|") + std::string(n);
    app.add_option("command", command, names)->required();
    app.add_option("--config", config_path, "config file")->required();
    app.add_option("--out", out, "report path (default stdout)");
    app.add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--nmax", nmax, "highest index n")->check(CLI::NonNegativeNumber);
    app.add_option("--modes", modes, "Galerkin truncation N (0 = automatic)")->check(CLI::NonNegativeNumber);
    app.add_option("--engine", engine, "galerkin|monodromy|both")
        ->check(CLI::IsMember({"galerkin", "monodromy", "both"}));
    CLI11_PARSE(app, argc, argv);

    const auto cmd = spectra4::parse_command(command);
    if (!cmd) {
        std::cerr << "unknown command '" << command << "', expected one of " << names << '\n';
        return 2;
    }
    spectra4::RunConfig cfg;
    try {
        cfg = spectra4::load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    if (nmax >= 0) cfg.n_max = nmax;
    if (modes >= 0) cfg.modes = modes;
    if (!format.empty()) cfg.format = *spectra4::parse_format(format);
    if (!engine.empty()) cfg.engine = *spectra4::parse_engine(engine);
    if (!out.empty()) cfg.output = out;

    spectra4::Report report;
    try {
        report = spectra4::run(*cmd, cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    if (cfg.output.empty()) {
        spectra4::write_report(std::cout, report, cfg);
    } else {
        std::ofstream f(cfg.output, std::ios::binary);
        if (!f) {
            std::cerr << "cannot write '" << cfg.output << "'\n";
            return 2;
        }
        spectra4::write_report(f, report, cfg);
    }
    for (const auto& e : report.errors) std::cerr << "error: " << e << '\n';
    for (const auto& f : report.failures) std::cerr << "check failed: " << f << '\n';
    return report.ok() ? 0 : 1;
}
