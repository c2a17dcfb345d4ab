#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qslab/acceptance.hpp"
#include "qslab/experiments.hpp"

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream body;
    body << in.rdbuf();
    return body.str();
}

void write_file(const fs::path& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << body;
}

int run_cli_experiment(const std::string& name, const std::string& config_path,
                       const std::string& out_dir, std::int64_t seed_override,
                       int precision_override) {
    qslab::ExperimentConfig cfg;
    if (!config_path.empty()) {
        cfg = qslab::ExperimentConfig::from_json_text(read_file(config_path));
        if (cfg.experiment != name)
            std::cerr << "note: config experiment '" << cfg.experiment
                      << "' overridden by subcommand '" << name << "'\n";
    }
    cfg.experiment = name;
    if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
    if (precision_override > 0) cfg.precision_bits = static_cast<unsigned>(precision_override);
    if (!out_dir.empty()) cfg.out_dir = out_dir;

    qslab::Report rep = qslab::run_experiment(cfg);
    std::cout << rep.to_json_text() << "\n";
    if (!cfg.out_dir.empty()) {
        fs::create_directories(cfg.out_dir);
        write_file(fs::path(cfg.out_dir) / "report.json", rep.to_json_text());
        write_file(fs::path(cfg.out_dir) / "config.json", cfg.to_json_text());
        if (!rep.series_csv.empty())
            write_file(fs::path(cfg.out_dir) / "series.csv", rep.series_csv);
    }
    return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quasisturmian cellular-automata lab"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::int64_t seed = -1;
    int precision = 0;

    const std::vector<std::string> experiments = {
        "chopping", "rigidity", "expansiveness", "nonrandomization", "suites"};
    for (const std::string& name : experiments) {
        auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("--config", config_path, "experiment config (json)");
        sub->add_option("--out", out_dir, "output directory for report.json / series.csv");
        sub->add_option("--seed", seed, "seed override");
        sub->add_option("--precision", precision, "precision budget override (bits)");
    }
    auto* selftest = app.add_subcommand("selftest", "run the acceptance suite");
    (void)selftest;

    CLI11_PARSE(app, argc, argv);

    try {
        auto* sub = app.get_subcommands().front();
        if (sub->get_name() == "selftest") return qslab::run_acceptance(std::cout) == 0 ? 0 : 1;
        return run_cli_experiment(sub->get_name(), config_path, out_dir, seed, precision);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
