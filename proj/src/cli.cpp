#include "cfarey/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "cfarey/svg.hpp"
#include "cfarey/verify.hpp"

namespace cfarey {

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    return out;
}

void write_meta_lines(std::ofstream& out, const std::string& meta) {
    std::istringstream in(meta);
    std::string line;
    while (std::getline(in, line)) out << "# " << line << "\n";
}

struct SetupResult {
    RingSpec ring;
    FareySet set;
};

SetupResult enumerate_from_config(const RunConfig& cfg) {
    const RingSpec ring = make_ring(cfg.disc);
    if (cfg.height > 0)
        return {ring, enumerate_farey_height(ring, cfg.height, cfg.maxPoints)};
    if (cfg.t >= 0) return {ring, enumerate_farey(ring, cfg.t, cfg.maxPoints)};
    throw std::invalid_argument("either --height or --t is required");
}

std::string tag(const RunConfig& cfg) {
    std::ostringstream os;
    os << "D" << -cfg.disc;
    if (cfg.height > 0) {
        os << "_H";
        if (cfg.height == std::floor(cfg.height))
            os << static_cast<long long>(cfg.height);
        else
            os << cfg.height;
    } else if (cfg.t >= 0) {
        os << "_t" << cfg.t;
    }
    return os.str();
}

} // namespace

std::vector<double> parse_grid_spec(const std::string& spec) {
    double lo, hi, step;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0 || hi < lo)
        throw std::invalid_argument("bad grid spec '" + spec + "', expected min:max:step");
    std::vector<double> grid;
    const long long n = llround(std::floor((hi - lo) / step + 1e-9));
    for (long long i = 0; i <= n; ++i) grid.push_back(lo + static_cast<double>(i) * step);
    return grid;
}

void apply_config_kv(RunConfig& cfg, const std::string& key, const std::string& value) {
    const auto asInt = [&] { return std::stoll(value); };
    const auto asFloat = [&] { return std::stod(value); };
    if (key == "disc") cfg.disc = asInt();
    else if (key == "height") cfg.height = asFloat();
    else if (key == "t") cfg.t = asFloat();
    else if (key == "region") cfg.region = value;
    else if (key == "delta-grid") cfg.deltaGrid = value;
    else if (key == "tail-deltas") cfg.tailDeltas = value;
    else if (key == "empirical-cdf") cfg.empiricalCdf = value;
    else if (key == "mc-grid") cfg.quad.mcGridN = static_cast<int>(asInt());
    else if (key == "mc-grid-tail") cfg.quad.mcGridTailN = static_cast<int>(asInt());
    else if (key == "seed") cfg.quad.seed = static_cast<std::uint64_t>(asInt());
    else if (key == "tol") cfg.quad.quadTol = asFloat();
    else if (key == "out") cfg.outDir = value;
    else if (key == "format") cfg.formats = value;
    else if (key == "threads") cfg.threads = static_cast<int>(asInt());
    else if (key == "max-points") cfg.maxPoints = asInt();
    else throw std::invalid_argument("unknown config key '" + key + "'");
}

Region parse_region(const std::string& spec) {
    if (spec.empty()) return Region::whole();
    double u0, u1, v0, v1;
    if (std::sscanf(spec.c_str(), "%lf,%lf,%lf,%lf", &u0, &u1, &v0, &v1) != 4)
        throw std::invalid_argument("bad region spec '" + spec + "', expected u0,u1,v0,v1");
    return Region::rect(u0, u1, v0, v1);
}

bool format_enabled(const RunConfig& cfg, const std::string& fmt) {
    std::istringstream in(cfg.formats);
    std::string item;
    while (std::getline(in, item, ','))
        if (item == fmt) return true;
    return false;
}

std::string metadata_header(const RunConfig& cfg, const std::string& command) {
    std::ostringstream os;
    os << "cfarey " << kVersion << "\n";
    os << "command=" << command << "\n";
    os << "disc=" << cfg.disc << "\n";
    if (cfg.height > 0) os << "height=" << num(cfg.height) << "\n";
    if (cfg.t >= 0) os << "t=" << num(cfg.t) << "\n";
    os << "region=" << (cfg.region.empty() ? "whole" : cfg.region) << "\n";
    os << "delta-grid=" << cfg.deltaGrid << "\n";
    if (!cfg.tailDeltas.empty()) os << "tail-deltas=" << cfg.tailDeltas << "\n";
    os << "mc-grid=" << cfg.quad.mcGridN << "\n";
    os << "mc-grid-tail=" << cfg.quad.mcGridTailN << "\n";
    os << "seed=" << cfg.quad.seed << "\n";
    os << "tol=" << num(cfg.quad.quadTol) << "\n";
    os << "threads=" << cfg.threads << "\n";
    os << "format=" << cfg.formats;
    return os.str();
}

void apply_threads(int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
}

int cmd_enumerate(const RunConfig& cfg) {
    apply_threads(cfg.threads);
    std::filesystem::create_directories(cfg.outDir);
    const auto [ring, set] = enumerate_from_config(cfg);
    const std::string meta = metadata_header(cfg, "enumerate");
    const std::string base = cfg.outDir + "/farey_" + tag(cfg);

    if (format_enabled(cfg, "csv")) save_farey_csv(set, base + ".csv", meta);
    save_farey_cache(set, base + ".bin");
    if (format_enabled(cfg, "svg")) {
        std::ostringstream title;
        title << "Farey fractions, D = " << cfg.disc << ", card " << set.card();
        svg::scatter(base + ".svg", set, title.str(), meta);
    }
    std::printf("enumerate: card %lld -> %s.{csv,bin%s}\n",
                static_cast<long long>(set.card()), base.c_str(),
                format_enabled(cfg, "svg") ? ",svg" : "");
    return 0;
}

int cmd_gaps(const RunConfig& cfg) {
    apply_threads(cfg.threads);
    std::filesystem::create_directories(cfg.outDir);
    const auto [ring, set] = enumerate_from_config(cfg);
    const Region region = parse_region(cfg.region);
    const GapSample sample = nearest_gaps(set, region);
    const std::string meta = metadata_header(cfg, "gaps");
    const std::string base = cfg.outDir + "/gaps_" + tag(cfg);

    const std::vector<double> grid = parse_grid_spec(cfg.deltaGrid);
    const auto cdf = empirical_cdf(sample, grid);
    const GapHistogram hist = empirical_tail_histogram(sample, 0.05);

    if (format_enabled(cfg, "csv")) {
        {
            std::ofstream out = open_out(base + "_points.csv");
            write_meta_lines(out, meta);
            out << "u,v,gap\n";
            for (std::size_t i = 0; i < sample.anchors.size(); ++i) {
                const TorusPoint& p =
                    set.fractions[static_cast<std::size_t>(sample.anchors[i])].point;
                out << num(p.u) << "," << num(p.v) << "," << num(sample.rescaledGaps[i]) << "\n";
            }
        }
        {
            std::ofstream out = open_out(base + "_cdf.csv");
            write_meta_lines(out, meta);
            out << "delta,cdf\n";
            for (const auto& [d, F] : cdf) out << num(d) << "," << num(F) << "\n";
        }
        {
            std::ofstream out = open_out(base + "_hist.csv");
            write_meta_lines(out, meta);
            out << "bin_lo,bin_hi,density\n";
            for (std::size_t b = 0; b < hist.density.size(); ++b)
                out << num(hist.edges[b]) << "," << num(hist.edges[b + 1]) << ","
                    << num(hist.density[b]) << "\n";
        }
        {
            std::ofstream out = open_out(base + "_tail.csv");
            write_meta_lines(out, meta);
            out << "delta,tail\n";
            for (std::size_t k = 0; k < hist.tailDelta.size(); ++k)
                out << num(hist.tailDelta[k]) << "," << num(hist.tailValue[k]) << "\n";
        }
    }

    if (format_enabled(cfg, "svg")) {
        std::ostringstream title;
        title << "Rescaled gap density, D = " << cfg.disc << ", card " << set.card();
        svg::histogram(base + "_density.svg", hist.edges, hist.density, title.str(),
                       "rescaled gap", meta);

        // logarithmic tail against the slope -4 line
        svg::Series emp{"ln tail", {}, {}, "#1f4fd0"};
        svg::Series ref{"-4 ln delta", {}, {}, "#d02020"};
        for (std::size_t k = 0; k < hist.tailDelta.size(); ++k) {
            const double d = hist.tailDelta[k];
            if (d < 1.0 || hist.tailValue[k] <= 0) continue;
            emp.x.push_back(std::log(d));
            emp.y.push_back(std::log(hist.tailValue[k]));
            ref.x.push_back(std::log(d));
            ref.y.push_back(-4.0 * std::log(d));
        }
        svg::lines(base + "_tail_loglog.svg", {emp, ref}, "Empirical tail (log-log)",
                   "ln delta", "ln tail", meta);
    }

    std::printf("gaps: %zu anchors, min %.6f max %.6f -> %s_*\n", sample.rescaledGaps.size(),
                sample.minGap, sample.maxGap, base.c_str());
    return 0;
}

int cmd_limit(const RunConfig& cfg) {
    apply_threads(cfg.threads);
    std::filesystem::create_directories(cfg.outDir);
    const RingSpec ring = make_ring(cfg.disc);
    const std::string meta = metadata_header(cfg, "limit");
    const std::string base = cfg.outDir + "/limit_D" + std::to_string(-cfg.disc);

    const std::vector<double> grid = parse_grid_spec(cfg.deltaGrid);
    const LimitCdf cdf = limit_cdf(ring, grid, cfg.quad);

    std::vector<TailReport> tails;
    if (!cfg.tailDeltas.empty()) {
        for (double d : parse_grid_spec(cfg.tailDeltas)) tails.push_back(limit_tail(ring, d, cfg.quad));
    }

    if (format_enabled(cfg, "csv")) {
        std::ofstream out = open_out(base + ".csv");
        write_meta_lines(out, meta);
        out << "delta,F,tail,term1,term2,term3,residual,stderr\n";
        // merge the cdf grid with the tail grid (tails may sit off-grid)
        std::size_t ti = 0;
        for (std::size_t i = 0; i < cdf.deltas.size(); ++i) {
            while (ti < tails.size() && tails[ti].delta < cdf.deltas[i] - 1e-12) ++ti;
            out << num(cdf.deltas[i]) << "," << num(cdf.F[i]);
            if (ti < tails.size() && std::abs(tails[ti].delta - cdf.deltas[i]) <= 1e-12) {
                const TailReport& r = tails[ti];
                out << "," << num(r.tail) << "," << num(r.term1) << "," << num(r.term2) << ","
                    << num(r.term3) << "," << num(r.residual) << ","
                    << num(std::sqrt(r.stderrEst * r.stderrEst +
                                     cdf.stderrEst[i] * cdf.stderrEst[i]));
            } else {
                out << ",,,,,," << num(cdf.stderrEst[i]);
            }
            out << "\n";
        }
        for (const TailReport& r : tails) {
            const bool onGrid =
                std::any_of(cdf.deltas.begin(), cdf.deltas.end(),
                            [&](double d) { return std::abs(d - r.delta) <= 1e-12; });
            if (onGrid) continue;
            out << num(r.delta) << ",," << num(r.tail) << "," << num(r.term1) << ","
                << num(r.term2) << "," << num(r.term3) << "," << num(r.residual) << ","
                << num(r.stderrEst) << "\n";
        }
    }

    if (format_enabled(cfg, "json")) {
        nlohmann::ordered_json j;
        j["tool"] = std::string("cfarey ") + kVersion;
        j["config"] = nlohmann::ordered_json::object();
        {
            std::istringstream in(metadata_header(cfg, "limit"));
            std::string line;
            while (std::getline(in, line)) {
                const auto eq = line.find('=');
                if (eq != std::string::npos)
                    j["config"][line.substr(0, eq)] = line.substr(eq + 1);
            }
        }
        j["cdf"] = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < cdf.deltas.size(); ++i) {
            j["cdf"].push_back({{"delta", cdf.deltas[i]},
                                {"F", cdf.F[i]},
                                {"errEst", cdf.errEst[i]},
                                {"stderr", cdf.stderrEst[i]}});
        }
        j["tails"] = nlohmann::ordered_json::array();
        for (const TailReport& r : tails) {
            j["tails"].push_back({{"delta", r.delta},
                                  {"tail", r.tail},
                                  {"residual", r.residual},
                                  {"term1", r.term1},
                                  {"term2", r.term2},
                                  {"term3", r.term3},
                                  {"scaled_tail", r.tail * std::pow(r.delta, 4.0)},
                                  {"stderr", r.stderrEst},
                                  {"errEst", r.errEst}});
        }
        std::ofstream out = open_out(base + ".json");
        out << j.dump(2) << "\n";
    }

    if (format_enabled(cfg, "svg")) {
        std::vector<svg::Series> series;
        svg::Series lim{"limit cdf", cdf.deltas, cdf.F, "#d02020"};
        series.push_back(lim);
        if (!cfg.empiricalCdf.empty()) {
            svg::Series emp{"empirical cdf", {}, {}, "#1f4fd0"};
            std::ifstream in(cfg.empiricalCdf);
            if (!in) throw std::runtime_error("cannot open " + cfg.empiricalCdf);
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty() || line[0] == '#' || line.rfind("delta", 0) == 0) continue;
                double d, F;
                if (std::sscanf(line.c_str(), "%lf,%lf", &d, &F) == 2) {
                    emp.x.push_back(d);
                    emp.y.push_back(F);
                }
            }
            series.push_back(emp);
        }
        svg::lines(base + "_cdf.svg", series, "Limit gap distribution", "delta", "F", meta);

        if (!tails.empty()) {
            svg::Series lt{"ln tail", {}, {}, "#1f4fd0"};
            svg::Series lr{"-4 ln delta", {}, {}, "#d02020"};
            for (const TailReport& r : tails) {
                if (r.tail <= 0) continue;
                lt.x.push_back(std::log(r.delta));
                lt.y.push_back(std::log(r.tail));
                lr.x.push_back(std::log(r.delta));
                lr.y.push_back(-4.0 * std::log(r.delta));
            }
            svg::lines(base + "_tail_loglog.svg", {lt, lr}, "Limit tail (log-log)", "ln delta",
                       "ln tail", meta);
        }
    }

    std::printf("limit: %zu grid points, %zu tail points -> %s.*\n", cdf.deltas.size(),
                tails.size(), base.c_str());
    return 0;
}

int cmd_verify(const RunConfig& cfg, const std::string& suite) {
    apply_threads(cfg.threads);
    std::filesystem::create_directories(cfg.outDir);
    AcceptanceReport report;
    if (suite == "ring") {
        report = run_ring_suite(cfg.disc);
    } else if (suite == "full") {
        report = run_acceptance(cfg.quad, cfg.outDir + "/determinism");
    } else {
        std::fprintf(stderr, "unknown suite '%s' (use full or ring)\n", suite.c_str());
        return 1;
    }
    for (const CriterionResult& r : report.results)
        std::printf("[%s] criterion %d: %s (%.2fs) %s\n", r.pass ? "PASS" : "FAIL", r.id,
                    r.name.c_str(), r.seconds, r.details.c_str());
    write_report_json(report, cfg.outDir + "/verify_report.json", metadata_header(cfg, "verify"));
    return report.allPass() ? 0 : 3;
}

} // namespace cfarey
