#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "projlab/errors.hpp"
#include "projlab/ldp.hpp"
#include "projlab/ratefn.hpp"
#include "projlab/zonotope.hpp"

namespace {

using namespace projlab;

constexpr const char* kToolVersion = "projlab 0.1.0";

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct RunConfig {
    std::string command;
    std::string nu = "gaussian";
    std::size_t d = 1;
    std::size_t n = 0;
    std::vector<std::size_t> n_list;
    std::size_t k = 1;
    std::int64_t samples = 100000;
    std::size_t trials = 1;
    std::optional<std::uint64_t> seed;
    std::string region;
    std::string estimators = "mc_uniform";
    double umax = 0.0;  // 0 = choose per law
    std::size_t grid = 0;  // 0 = default for the dimension
    std::string x;
    std::string out;
    std::string format = "csv";

    std::map<std::string, std::string> resolved() const;
};

std::map<std::string, std::string> RunConfig::resolved() const {
    std::map<std::string, std::string> kv;
    kv["command"] = command;
    kv["nu"] = nu;
    kv["d"] = std::to_string(d);
    if (n > 0) kv["n"] = std::to_string(n);
    if (!n_list.empty()) {
        std::string s;
        for (std::size_t i = 0; i < n_list.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(n_list[i]);
        }
        kv["n_list"] = s;
    }
    kv["k"] = std::to_string(k);
    kv["samples"] = std::to_string(samples);
    kv["trials"] = std::to_string(trials);
    kv["seed"] = seed ? std::to_string(*seed) : "";
    if (!region.empty()) kv["region"] = region;
    kv["estimators"] = estimators;
    if (umax > 0.0) kv["umax"] = fmt(umax);
    if (grid > 0) kv["grid"] = std::to_string(grid);
    if (!x.empty()) kv["x"] = x;
    kv["format"] = format;
    return kv;
}

std::vector<std::string> metadataLines(const RunConfig& cfg) {
    std::vector<std::string> lines;
    lines.push_back(std::string("tool=") + kToolVersion);
    for (const auto& [key, value] : cfg.resolved()) lines.push_back(key + "=" + value);
    return lines;
}

nlohmann::json metadataJson(const RunConfig& cfg) {
    nlohmann::json j;
    j["tool"] = kToolVersion;
    nlohmann::json c;
    for (const auto& [key, value] : cfg.resolved()) c[key] = value;
    j["config"] = c;
    return j;
}

std::vector<double> parseCsvDoubles(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw ConfigError("invalid number '" + item + "'");
        }
        if (used != item.size()) throw ConfigError("invalid number '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("empty number list");
    return out;
}

NuDistribution parseNu(const std::string& text) {
    if (text == "gaussian") return NuDistribution::gaussian();
    if (text == "rademacher") return NuDistribution::rademacher();
    if (text == "uniform") return NuDistribution::uniformSymmetric();
    if (text.rfind("discrete:", 0) == 0) {
        try {
            return NuDistribution::fromJsonFile(text.substr(9));
        } catch (const DimensionError& e) {
            throw ConfigError(e.what());
        }
    }
    throw ConfigError("unknown nu '" + text + "' (gaussian|rademacher|uniform|discrete:<path>)");
}

EventRegion parseRegion(const std::string& text, std::size_t expected_d) {
    const auto fail = [&] { throw ConfigError("invalid region '" + text + "'"); };
    if (text.rfind("half:", 0) == 0) {
        const std::string rest = text.substr(5);
        const std::size_t sep = rest.rfind(':');
        if (sep == std::string::npos) fail();
        std::vector<double> dir = parseCsvDoubles(rest.substr(0, sep));
        double a;
        try {
            a = std::stod(rest.substr(sep + 1));
        } catch (const std::exception&) {
            fail();
            a = 0.0;
        }
        double norm = 0.0;
        for (double c : dir) norm += c * c;
        norm = std::sqrt(norm);
        if (norm == 0.0) throw ConfigError("region direction must be nonzero");
        for (double& c : dir) c /= norm;
        if (expected_d != 0 && dir.size() != expected_d)
            throw ConfigError("region dimension does not match --d");
        return EventRegion::halfSpace(std::move(dir), a);
    }
    if (text.rfind("ballc:", 0) == 0) {
        double r;
        try {
            r = std::stod(text.substr(6));
        } catch (const std::exception&) {
            fail();
            r = 0.0;
        }
        if (expected_d == 0) throw ConfigError("ballc region needs --d");
        return EventRegion::ballComplement(expected_d, r);
    }
    fail();
    throw ConfigError("unreachable");
}

std::vector<Estimator> parseEstimators(const std::string& text) {
    std::vector<Estimator> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item == "mc_uniform") out.push_back(Estimator::mc_uniform);
        else if (item == "mc_gaussian") out.push_back(Estimator::mc_gaussian);
        else if (item == "exact_enum") out.push_back(Estimator::exact_enum);
        else throw ConfigError("unknown estimator '" + item + "'");
    }
    if (out.empty()) throw ConfigError("no estimators given");
    return out;
}

void writeOutput(const RunConfig& cfg, const std::string& payload) {
    if (cfg.out.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file " + cfg.out);
    f << payload;
}

double medianOf(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size();
    return m % 2 == 1 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

// --- config file merge ---------------------------------------------------

void mergeConfigFile(const std::string& path, RunConfig& cfg, const CLI::App& cmd) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config file: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config file: top level must be an object");

    auto flagGiven = [&](const std::string& flag) {
        const CLI::Option* opt = cmd.get_option_no_throw("--" + flag);
        return opt != nullptr && opt->count() > 0;
    };

    for (const auto& [key, value] : doc.items()) {
        if (flagGiven(key)) continue;  // flags override the file
        try {
            if (key == "nu") cfg.nu = value.get<std::string>();
            else if (key == "d") cfg.d = value.get<std::size_t>();
            else if (key == "n") cfg.n = value.get<std::size_t>();
            else if (key == "n_list") cfg.n_list = value.get<std::vector<std::size_t>>();
            else if (key == "k") cfg.k = value.get<std::size_t>();
            else if (key == "samples") cfg.samples = value.get<std::int64_t>();
            else if (key == "trials") cfg.trials = value.get<std::size_t>();
            else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
            else if (key == "region") cfg.region = value.get<std::string>();
            else if (key == "estimators") cfg.estimators = value.get<std::string>();
            else if (key == "umax") cfg.umax = value.get<double>();
            else if (key == "grid") cfg.grid = value.get<std::size_t>();
            else if (key == "x") cfg.x = value.get<std::string>();
            else if (key == "out") cfg.out = value.get<std::string>();
            else if (key == "format") cfg.format = value.get<std::string>();
            else throw ConfigError("config file: unknown field '" + key + "'");
        } catch (const nlohmann::json::exception&) {
            throw ConfigError("config file: bad value for '" + key + "'");
        }
    }
}

void validateCommon(const RunConfig& cfg) {
    if (!cfg.seed) throw ConfigError("--seed is required (no nondeterministic default)");
    if (cfg.format != "csv" && cfg.format != "json")
        throw ConfigError("--format must be csv or json");
    if (cfg.d < 1 || cfg.trials < 1 || cfg.k < 1 || cfg.samples < 1)
        throw ConfigError("counts must be >= 1");
}

// --- commands -------------------------------------------------------------

int cmdSlln(RunConfig cfg) {
    cfg.command = "slln";
    validateCommon(cfg);
    if (cfg.n_list.empty() && cfg.n > 0) cfg.n_list = {cfg.n};
    if (cfg.n_list.empty()) throw ConfigError("slln: need --n or --n-list");
    for (std::size_t n : cfg.n_list)
        if (n < cfg.d) throw ConfigError("slln: every n must be >= d");

    const DirectionGrid grid = makeDirectionGrid(cfg.d, cfg.grid);
    const LimitBall ball = limitBall(cfg.d);
    const RngStream base(*cfg.seed, 0);

    struct Row {
        std::size_t n;
        std::size_t trial;
        double dh;
    };
    std::vector<Row> rows;
    std::vector<std::pair<std::size_t, double>> medians;
    for (std::size_t idx = 0; idx < cfg.n_list.size(); ++idx) {
        const std::size_t n = cfg.n_list[idx];
        std::vector<double> values;
        for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
            RngStream stream = base.substream(idx * 1000003 + trial);
            const StiefelFrame frame = sampleFrame(stream, cfg.d, n);
            const double dh = hausdorffToBall(fromFrame(frame),
                                              1.0 / std::sqrt(static_cast<double>(n)), ball, grid);
            rows.push_back({n, trial, dh});
            values.push_back(dh);
        }
        medians.emplace_back(n, medianOf(values));
    }

    std::ostringstream out;
    if (cfg.format == "csv") {
        for (const auto& line : metadataLines(cfg)) out << "# " << line << "\n";
        out << "# direction_grid=" << grid.descriptor << "\n";
        out << "n,trial,hausdorff\n";
        for (const Row& r : rows) out << r.n << "," << r.trial << "," << fmt(r.dh) << "\n";
        for (const auto& [n, med] : medians) out << n << ",median," << fmt(med) << "\n";
    } else {
        nlohmann::json j = metadataJson(cfg);
        j["direction_grid"] = grid.descriptor;
        j["rows"] = nlohmann::json::array();
        for (const Row& r : rows)
            j["rows"].push_back({{"n", r.n}, {"trial", r.trial}, {"hausdorff", r.dh}});
        j["medians"] = nlohmann::json::array();
        for (const auto& [n, med] : medians)
            j["medians"].push_back({{"n", n}, {"hausdorff", med}});
        out << j.dump(2) << "\n";
    }
    writeOutput(cfg, out.str());
    return 0;
}

int cmdRate(RunConfig cfg) {
    cfg.command = "rate";
    validateCommon(cfg);
    const NuDistribution nu = parseNu(cfg.nu);
    const RateFunction rate(nu);
    double umax = cfg.umax;
    if (umax <= 0.0)
        umax = rate.recessionSlope().finite ? rate.recessionSlope().value + 0.2 : 3.0;
    cfg.umax = umax;
    const RateProfile profile = buildRateProfile(rate, umax, 200);

    std::ostringstream out;
    if (cfg.format == "csv") {
        writeRateTableCsv(out, profile, metadataLines(cfg));
    } else {
        nlohmann::json j = metadataJson(cfg);
        j["recession_slope"] =
            profile.recession_slope.finite ? nlohmann::json(profile.recession_slope.value)
                                           : nlohmann::json("inf");
        if (profile.recession_slope.finite)
            j["boundary_value"] = profile.boundary_value.finite
                                      ? nlohmann::json(profile.boundary_value.value)
                                      : nlohmann::json("inf");
        j["table"] = nlohmann::json::array();
        for (const auto& point : profile.table)
            j["table"].push_back(
                {{"u", point.u},
                 {"psi_star", point.psi_star.finite ? nlohmann::json(point.psi_star.value)
                                                    : nlohmann::json("inf")},
                 {"finite_flag", point.psi_star.finite}});
        out << j.dump(2) << "\n";
    }
    writeOutput(cfg, out.str());
    return 0;
}

int cmdLdpCheck(RunConfig cfg) {
    cfg.command = "ldp-check";
    validateCommon(cfg);
    if (cfg.n_list.empty() && cfg.n > 0) cfg.n_list = {cfg.n};
    if (cfg.n_list.empty()) throw ConfigError("ldp-check: need --n or --n-list");
    if (cfg.region.empty()) throw ConfigError("ldp-check: need --region");
    const NuDistribution nu = parseNu(cfg.nu);
    const EventRegion region = parseRegion(cfg.region, cfg.d);
    if (cfg.d != region.dim) throw ConfigError("ldp-check: region dimension != d");
    const std::vector<Estimator> estimators = parseEstimators(cfg.estimators);
    if (cfg.samples < 1000) throw ConfigError("ldp-check: need samples >= 1000");

    std::vector<LdpReport> reports;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const std::uint64_t master =
            t == 0 ? *cfg.seed : splitmix64(*cfg.seed + 0x7452 + t);
        reports.push_back(rateConvergenceScan(nu, cfg.d, region, cfg.n_list, cfg.samples,
                                              estimators, master));
    }

    std::ostringstream out;
    if (cfg.format == "csv") {
        writeLdpReportCsv(out, reports[0], metadataLines(cfg));
        if (reports.size() > 1) {
            // extra trials append a trailing trial column
            char buf[40];
            for (std::size_t t = 1; t < reports.size(); ++t)
                for (const LdpRow& row : reports[t].rows) {
                    std::snprintf(buf, sizeof buf, "%.17g", row.mu_hat);
                    out << row.n << "," << estimatorName(row.estimator) << "," << buf << ","
                        << row.empirical_rate.str() << "," << fmt(row.std_err) << ","
                        << (row.reliable ? "true" : "false") << "," << t << "\n";
                }
        }
    } else {
        nlohmann::json j = metadataJson(cfg);
        std::ostringstream first;
        writeLdpReportJson(first, reports[0], "");
        nlohmann::json body = nlohmann::json::parse(first.str());
        for (auto& [key, value] : body.items()) j[key] = value;
        if (reports.size() > 1) {
            j["extra_trials"] = nlohmann::json::array();
            for (std::size_t t = 1; t < reports.size(); ++t) {
                std::ostringstream tmp;
                writeLdpReportJson(tmp, reports[t], "");
                j["extra_trials"].push_back(nlohmann::json::parse(tmp.str())["rows"]);
            }
        }
        out << j.dump(2) << "\n";
    }
    writeOutput(cfg, out.str());
    return 0;
}

int cmdIntrinsic(RunConfig cfg) {
    cfg.command = "intrinsic";
    validateCommon(cfg);
    if (cfg.n == 0 && cfg.n_list.size() == 1) cfg.n = cfg.n_list[0];
    if (cfg.n == 0) throw ConfigError("intrinsic: need --n");
    if (cfg.k > cfg.d) throw ConfigError("intrinsic: k must be <= d");
    if (cfg.n < cfg.d) throw ConfigError("intrinsic: n must be >= d");

    const bool exact = binomialCoefficient(cfg.n, cfg.k) <= 1e7;
    const double limit = intrinsicVolumeLimit(cfg.d, cfg.k);
    const double norm = std::pow(static_cast<double>(cfg.n), 0.5 * static_cast<double>(cfg.k));
    const RngStream base(*cfg.seed, 0);

    struct Row {
        std::size_t trial;
        double scaled;
        double scaled_err;
    };
    std::vector<Row> rows;
    std::vector<double> values;
    for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
        RngStream stream = base.substream(trial);
        const StiefelFrame frame = sampleFrame(stream, cfg.d, cfg.n);
        const Zonotope z = fromFrame(frame);
        double value, err = 0.0;
        if (exact) {
            value = intrinsicVolumeExact(z, cfg.k);
        } else {
            RngStream mc_stream = base.substream(0xAC0000 + trial);
            const McEstimate e = intrinsicVolumeMC(z, cfg.k, cfg.samples, mc_stream);
            value = e.value;
            err = e.std_err;
        }
        rows.push_back({trial, value / norm, err / norm});
        values.push_back(value / norm);
    }
    const double median = medianOf(values);
    const char* estimator = exact ? "exact" : "mc";

    std::ostringstream out;
    if (cfg.format == "csv") {
        for (const auto& line : metadataLines(cfg)) out << "# " << line << "\n";
        out << "# limit_constant=" << fmt(limit) << "\n";
        out << "n,k,trial,estimator,scaled_value,scaled_std_err\n";
        for (const Row& r : rows)
            out << cfg.n << "," << cfg.k << "," << r.trial << "," << estimator << ","
                << fmt(r.scaled) << "," << fmt(r.scaled_err) << "\n";
        out << cfg.n << "," << cfg.k << ",median," << estimator << "," << fmt(median) << ",\n";
    } else {
        nlohmann::json j = metadataJson(cfg);
        j["limit_constant"] = limit;
        j["estimator"] = estimator;
        j["rows"] = nlohmann::json::array();
        for (const Row& r : rows)
            j["rows"].push_back({{"n", cfg.n},
                                 {"k", cfg.k},
                                 {"trial", r.trial},
                                 {"scaled_value", r.scaled},
                                 {"scaled_std_err", r.scaled_err}});
        j["median"] = median;
        out << j.dump(2) << "\n";
    }
    writeOutput(cfg, out.str());
    return 0;
}

int cmdProject(RunConfig cfg) {
    cfg.command = "project";
    validateCommon(cfg);
    if (cfg.n == 0) throw ConfigError("project: need --n");
    if (cfg.x.empty()) throw ConfigError("project: need --x (comma-separated, length n)");
    const std::vector<double> x = parseCsvDoubles(cfg.x);
    if (x.size() != cfg.n) throw ConfigError("project: --x must have length n");

    RngStream stream(*cfg.seed, 0);
    const StiefelFrame frame = sampleFrame(stream, cfg.d, cfg.n);
    const std::vector<double> yu = projectUniform(frame, x);
    const std::vector<double> yg = projectGaussian(frame, x);

    std::ostringstream out;
    if (cfg.format == "csv") {
        for (const auto& line : metadataLines(cfg)) out << "# " << line << "\n";
        out << "mode";
        for (std::size_t i = 0; i < cfg.d; ++i) out << ",y" << (i + 1);
        out << "\n";
        out << "uniform";
        for (double v : yu) out << "," << fmt(v);
        out << "\ngaussian";
        for (double v : yg) out << "," << fmt(v);
        out << "\n";
    } else {
        nlohmann::json j = metadataJson(cfg);
        j["uniform"] = yu;
        j["gaussian"] = yg;
        out << j.dump(2) << "\n";
    }
    writeOutput(cfg, out.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for random projections of product measures"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    std::string n_list_text;

    auto addCommon = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file (flags override it)");
        cmd->add_option("--nu", cfg.nu, "gaussian|rademacher|uniform|discrete:<path>");
        cmd->add_option("--d", cfg.d, "projection dimension");
        cmd->add_option("--n", cfg.n, "ambient dimension");
        cmd->add_option("--n-list", n_list_text, "comma-separated ambient dimensions");
        cmd->add_option("--k", cfg.k, "intrinsic volume index");
        cmd->add_option("--samples", cfg.samples, "Monte Carlo sample count");
        cmd->add_option("--trials", cfg.trials, "number of repeated trials");
        cmd->add_option("--seed", cfg.seed, "master seed (required)");
        cmd->add_option("--region", cfg.region, "half:<u_csv>:<a> or ballc:<r>");
        cmd->add_option("--estimators", cfg.estimators,
                        "comma list of mc_uniform,mc_gaussian,exact_enum");
        cmd->add_option("--umax", cfg.umax, "rate table upper endpoint");
        cmd->add_option("--grid", cfg.grid, "direction grid size");
        cmd->add_option("--x", cfg.x, "vector to project (comma-separated)");
        cmd->add_option("--out", cfg.out, "output path (default stdout)");
        cmd->add_option("--format", cfg.format, "csv|json");
        return cmd;
    };

    CLI::App* slln = addCommon(app.add_subcommand("slln", "Hausdorff distances of the scaled projected cube to its limit ball"));
    CLI::App* rate = addCommon(app.add_subcommand("rate", "rate function table from the log-MGF"));
    CLI::App* ldp = addCommon(app.add_subcommand("ldp-check", "empirical decay rates vs the rate function"));
    CLI::App* intr = addCommon(app.add_subcommand("intrinsic", "intrinsic volumes of the projected cube"));
    CLI::App* proj = addCommon(app.add_subcommand("project", "sample one frame and project a vector"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    CLI::App* active = slln->parsed() ? slln
                       : rate->parsed() ? rate
                       : ldp->parsed() ? ldp
                       : intr->parsed() ? intr
                                        : proj;
    try {
        if (!config_path.empty()) mergeConfigFile(config_path, cfg, *active);
        if (!n_list_text.empty()) {
            cfg.n_list.clear();
            for (double v : parseCsvDoubles(n_list_text)) {
                if (v < 1 || v != std::floor(v)) throw ConfigError("--n-list: bad entry");
                cfg.n_list.push_back(static_cast<std::size_t>(v));
            }
        }
        if (slln->parsed()) return cmdSlln(cfg);
        if (rate->parsed()) return cmdRate(cfg);
        if (ldp->parsed()) return cmdLdpCheck(cfg);
        if (intr->parsed()) return cmdIntrinsic(cfg);
        return cmdProject(cfg);
    } catch (const BudgetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
