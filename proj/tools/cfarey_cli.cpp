#include <cstdio>
#include <exception>
#include <fstream>
#include <string>

#include <CLI11.hpp>

#include "cfarey/cli.hpp"

using namespace cfarey;

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// key=value file; entries whose flag already appeared on the command line
// are skipped (flags take precedence)
void merge_config_file(CLI::App* cmd, RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file " + path);
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("bad config line '" + line + "', expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const CLI::Option* opt = cmd->get_option_no_throw("--" + key);
        if (opt != nullptr && opt->count() > 0) continue;
        apply_config_kv(cfg, key, value);
    }
}

void add_common(CLI::App* cmd, RunConfig& cfg, std::string& configFile) {
    cmd->add_option("--disc", cfg.disc, "fundamental discriminant D < 0");
    cmd->add_option("--height", cfg.height, "height bound e^{t/2}");
    cmd->add_option("--t", cfg.t, "time parameter t (height e^{t/2})");
    cmd->add_option("--region", cfg.region, "anchor region u0,u1,v0,v1 in basis coordinates");
    cmd->add_option("--delta-grid", cfg.deltaGrid, "delta grid min:max:step");
    cmd->add_option("--tail-deltas", cfg.tailDeltas, "tail decomposition grid min:max:step");
    cmd->add_option("--mc-grid", cfg.quad.mcGridN, "Monte Carlo grid size N (N x N samples)");
    cmd->add_option("--mc-grid-tail", cfg.quad.mcGridTailN, "Monte Carlo grid for tail numbers");
    cmd->add_option("--seed", cfg.quad.seed, "Monte Carlo seed");
    cmd->add_option("--tol", cfg.quad.quadTol, "quadrature tolerance per delta");
    cmd->add_option("--out", cfg.outDir, "output directory");
    cmd->add_option("--format", cfg.formats, "comma list of csv,json,svg");
    cmd->add_option("--threads", cfg.threads, "worker thread cap (0 = runtime default)");
    cmd->add_option("--max-points", cfg.maxPoints, "enumeration memory budget in points");
    cmd->add_option("--config", configFile, "config file (key=value lines, flags take precedence)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"complex Farey fractions: enumeration, gap statistics and the limit law"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("cfarey ") + kVersion);

    RunConfig cfg;
    std::string suite = "full";
    std::string empirical;
    std::string configFile;

    CLI::App* enumCmd = app.add_subcommand("enumerate", "enumerate F_t and write the point set");
    add_common(enumCmd, cfg, configFile);

    CLI::App* gapsCmd = app.add_subcommand("gaps", "nearest-neighbour gap statistics");
    add_common(gapsCmd, cfg, configFile);

    CLI::App* limitCmd = app.add_subcommand("limit", "limiting gap distribution and tail");
    add_common(limitCmd, cfg, configFile);
    limitCmd->add_option("--empirical-cdf", empirical,
                         "cdf csv from a gaps run, overlaid in the svg output");

    CLI::App* verifyCmd = app.add_subcommand("verify", "run the verification suite");
    add_common(verifyCmd, cfg, configFile);
    verifyCmd->add_option("--suite", suite, "full | ring");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    cfg.empiricalCdf = empirical;
    try {
        CLI::App* active = enumCmd->parsed()   ? enumCmd
                           : gapsCmd->parsed() ? gapsCmd
                           : limitCmd->parsed() ? limitCmd
                                                : verifyCmd;
        if (!configFile.empty()) merge_config_file(active, cfg, configFile);
        if (enumCmd->parsed()) return cmd_enumerate(cfg);
        if (gapsCmd->parsed()) return cmd_gaps(cfg);
        if (limitCmd->parsed()) return cmd_limit(cfg);
        if (verifyCmd->parsed()) return cmd_verify(cfg, suite);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "computation failed: %s\n", e.what());
        return 2;
    }
    return 1;
}
