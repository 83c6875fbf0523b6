// Command-line front end: reproducible quench experiments and the data
// behind each figure-style dataset (correlation grids, scans, fits).
//
// Exit codes: 0 ok, 1 usage, 2 domain error, 3 verification failure.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>

#include "tfim/acceptance.hpp"
#include "tfim/analysis.hpp"
#include "tfim/ed.hpp"
#include "tfim/ensemble.hpp"
#include "tfim/errors.hpp"
#include "tfim/fermion.hpp"
#include "tfim/io.hpp"
#include "tfim/quench_spec.hpp"

namespace {

using namespace tfim;

struct DtwaFlags {
    int order = 1;
    std::string scheme = "s8";
    long samples = 10000;
    std::uint64_t seed = 12345;
    double tol = 1e-8;
    int threads = 0;
    bool fixed_step = false;
    std::string checkpoint;

    dtwa::EnsembleOptions to_options() const {
        dtwa::EnsembleOptions o;
        o.order = order;
        o.scheme = scheme == "s4" ? dtwa::Scheme::S4 : dtwa::Scheme::S8;
        o.samples = samples;
        o.seed = seed;
        o.tol = tol;
        o.threads = threads;
        o.fixed_step = fixed_step;
        o.checkpoint_path = checkpoint;
        return o;
    }
};

void add_dtwa_flags(CLI::App* cmd, DtwaFlags& f) {
    cmd->add_option("--order", f.order, "truncation order")->check(CLI::IsMember({1, 2}));
    cmd->add_option("--scheme", f.scheme, "sampling scheme")->check(CLI::IsMember({"s4", "s8"}));
    cmd->add_option("--samples", f.samples, "trajectory count R");
    cmd->add_option("--seed", f.seed, "base RNG seed");
    cmd->add_option("--tol", f.tol, "integrator relative tolerance");
    cmd->add_option("--threads", f.threads, "worker threads (0 = all cores)");
    cmd->add_flag("--fixed-step", f.fixed_step, "fixed-step RK4 cross-check mode");
    cmd->add_option("--checkpoint", f.checkpoint, "resumable moment checkpoint file");
}

std::vector<std::pair<std::string, std::string>> dtwa_meta(const DtwaFlags& f) {
    return {{"order", std::to_string(f.order)},
            {"scheme", f.scheme},
            {"samples", std::to_string(f.samples)},
            {"seed", std::to_string(f.seed)},
            {"tol", io::format_double(f.tol)},
            {"fixed_step", f.fixed_step ? "1" : "0"}};
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open output file: " + path);
    out << content;
}

CorrelationSeries approx_series(const QuenchSpec& spec) {
    CorrelationSeries s;
    s.times = spec.t_grid;
    for (int d = 1; d <= spec.n / 2; ++d) s.distances.push_back(d);
    s.values.resize(s.times.size() * s.distances.size());
    for (std::size_t it = 0; it < s.times.size(); ++it)
        for (std::size_t id = 0; id < s.distances.size(); ++id)
            s.values[s.index(it, id)] =
                fermion::approx_correlator(spec, s.times[it], s.distances[id]);
    return s;
}

CorrelationSeries solve_series(const QuenchSpec& spec, const std::string& method,
                               const DtwaFlags& flags) {
    if (method == "exact") return fermion::ExactSolver(spec).series();
    if (method == "approx") return approx_series(spec);
    if (method == "ed") return ed::EdSolver(spec).series();
    if (method == "dtwa") return dtwa::run_ensemble(spec, flags.to_options()).series;
    throw Error("unknown method: " + method);
}

int cmd_correlate(const std::string& config, const std::string& method, const DtwaFlags& flags,
                  const std::string& residuals_vs, bool light_cone, const std::string& out_path,
                  bool json) {
    QuenchSpec spec = parse_spec_file(config);
    io::CsvMeta meta;
    meta.command = "correlate";
    meta.spec = spec;
    meta.options.emplace_back("method", method);
    if (method == "dtwa") {
        auto extra = dtwa_meta(flags);
        meta.options.insert(meta.options.end(), extra.begin(), extra.end());
    }
    CorrelationSeries series = solve_series(spec, method, flags);

    std::ostringstream csv;
    if (!residuals_vs.empty()) {
        if (residuals_vs == "dtwa") throw Error("--residuals-vs expects a deterministic reference");
        meta.options.emplace_back("residuals_vs", residuals_vs);
        CorrelationSeries ref = solve_series(spec, residuals_vs, flags);
        analysis::Residuals res = analysis::residuals(series, ref);
        io::write_header(csv, meta, "t,d,value,stderr,method,delta,ratio,ref_zero");
        for (std::size_t it = 0; it < series.times.size(); ++it) {
            for (std::size_t id = 0; id < series.distances.size(); ++id) {
                std::size_t i = series.index(it, id);
                csv << io::format_double(series.times[it]) << ',' << series.distances[id] << ','
                    << io::format_double(series.values[i]) << ','
                    << io::format_double(series.stderr_at(it, id)) << ',' << method << ','
                    << io::format_double(res.delta[i]) << ','
                    << (res.flagged[i] ? "nan" : io::format_double(res.ratio[i])) << ','
                    << int(res.flagged[i]) << "\n";
            }
        }
    } else {
        io::write_correlation_csv(csv, meta, series, method);
    }
    if (light_cone) {
        try {
            analysis::FitResult lc = analysis::light_cone_velocity(series);
            csv << "# light-cone-velocity v_lc=" << io::format_double(lc.value("v_lc"))
                << " sigma=" << io::format_double(lc.sigma("v_lc")) << "\n";
        } catch (const FitError& e) {
            csv << "# light-cone-velocity error=" << e.what() << "\n";
        }
    }
    write_file(out_path, csv.str());
    if (json) write_file(out_path + ".json", io::correlation_json(meta, series, method));
    return 0;
}

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    if (out.empty()) throw Error("scan list must be non-empty");
    return out;
}

bool wants(const std::vector<std::string>& analyses, const std::string& name) {
    for (const auto& a : analyses)
        if (a == name) return true;
    return false;
}

std::string sanitize(std::string msg) {
    for (char& c : msg)
        if (c == ',' || c == '\n') c = ';';
    return msg;
}

int cmd_scan(const std::string& config, const std::string& scan_type,
             const std::string& values_csv, const std::string& method,
             const std::vector<std::string>& analyses, const DtwaFlags& flags,
             const std::string& out_path, bool json) {
    QuenchSpec base = parse_spec_file(config);
    std::vector<double> values = parse_values(values_csv);

    io::CsvMeta meta;
    meta.command = "scan";
    meta.spec = base;
    meta.options.emplace_back("method", method);
    meta.options.emplace_back("scan", scan_type);
    meta.options.emplace_back("values", values_csv);
    if (method == "dtwa") {
        auto extra = dtwa_meta(flags);
        meta.options.insert(meta.options.end(), extra.begin(), extra.end());
    }

    io::ScanTable table;
    table.columns = {scan_type == "epsilon" ? "epsilon"
                     : scan_type == "time"  ? "t"
                                            : "samples"};
    bool do_xi1 = wants(analyses, "xi1"), do_xi2 = wants(analyses, "xi2");
    bool do_plateau = wants(analyses, "plateau"), do_gge = wants(analyses, "gge");
    if (do_xi1) {
        table.columns.push_back("xi1");
        table.columns.push_back("xi1_err");
    }
    if (do_xi2) {
        table.columns.push_back("xi2");
        table.columns.push_back("xi2_err");
    }
    if (do_plateau) {
        table.columns.push_back("plateau");
        table.columns.push_back("plateau_std");
    }
    if (do_gge) table.columns.push_back("xi_gge");
    table.columns.push_back("status");

    std::vector<std::pair<double, double>> plateau_points;
    for (double v : values) {
        std::vector<std::string> row;
        row.push_back(io::format_double(v));
        QuenchSpec spec = base;
        DtwaFlags f = flags;
        double t_eval = base.t_grid.back();
        if (scan_type == "epsilon") spec.h_f = 1.0 + v;
        else if (scan_type == "time") spec.t_grid = {v}, t_eval = v;
        else if (scan_type == "samples") f.samples = static_cast<long>(v);
        else throw Error("unknown scan type: " + scan_type);

        std::string status = "ok";
        try {
            validate_spec(spec);
            CorrelationSeries series;
            if (method == "exact") series = fermion::ExactSolver(spec).series();
            else if (method == "dtwa") series = dtwa::run_ensemble(spec, f.to_options()).series;
            else throw Error("scan supports methods exact and dtwa");

            if (do_xi1) {
                analysis::FitResult fit = analysis::fit_xi1(series, t_eval);
                row.push_back(io::format_double(fit.value("xi1")));
                row.push_back(io::format_double(fit.sigma("xi1")));
            }
            if (do_xi2) {
                try {
                    analysis::FitResult fit = analysis::fit_xi2_envelope(series, t_eval);
                    row.push_back(io::format_double(fit.value("xi2")));
                    row.push_back(io::format_double(fit.sigma("xi2")));
                } catch (const FitError& e) {
                    row.push_back("nan");
                    row.push_back("nan");
                    status = sanitize(std::string("xi2: ") + e.what());
                }
            }
            if (do_plateau) {
                auto [mean, sd] = analysis::plateau_value(series, t_eval, 20, 24);
                row.push_back(io::format_double(mean));
                row.push_back(io::format_double(sd));
                if (scan_type == "samples") plateau_points.emplace_back(v, mean);
            }
            if (do_gge) {
                double eps = scan_type == "epsilon" ? v : spec.h_f - 1.0;
                row.push_back(io::format_double(fermion::xi_gge(eps)));
            }
        } catch (const std::exception& e) {
            while (row.size() + 1 < table.columns.size()) row.push_back("nan");
            status = sanitize(e.what());
        }
        row.push_back(status);
        table.rows.push_back(std::move(row));
    }

    std::ostringstream csv;
    io::write_scan_csv(csv, meta, table);
    if (scan_type == "samples" && do_plateau && plateau_points.size() >= 3) {
        analysis::FitResult fit = analysis::fit_power_law(plateau_points);
        csv << "# power-law-fit a=" << io::format_double(fit.value("a"))
            << " b=" << io::format_double(fit.value("b"))
            << " sigma_a=" << io::format_double(fit.sigma("a"))
            << " sigma_b=" << io::format_double(fit.sigma("b")) << "\n";
    }
    write_file(out_path, csv.str());
    if (json) write_file(out_path + ".json", io::scan_json(meta, table));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transverse-field Ising quench simulator and benchmark harness"};
    app.require_subcommand(1);

    std::string config, method = "exact", out_path, scan_type = "epsilon", values;
    std::string residuals_vs;
    std::vector<std::string> analyses;
    bool json = false, quick = false, light_cone = false;
    DtwaFlags flags;

    CLI::App* correlate = app.add_subcommand("correlate", "emit C^xx_d(t) on the spec grid");
    correlate->add_option("--config", config, "spec file")->required();
    correlate->add_option("--method", method, "solver")
        ->check(CLI::IsMember({"exact", "approx", "ed", "dtwa"}));
    correlate->add_option("--out", out_path, "output CSV path")->required();
    correlate->add_flag("--json", json, "also write a JSON mirror next to the CSV");
    correlate->add_option("--residuals-vs", residuals_vs,
                          "append residual columns against this reference method")
        ->check(CLI::IsMember({"exact", "approx", "ed"}));
    correlate->add_flag("--light-cone", light_cone,
                        "append the fitted front velocity as a trailing comment");
    add_dtwa_flags(correlate, flags);

    CLI::App* scan = app.add_subcommand("scan", "sweep a parameter and fit derived quantities");
    scan->add_option("--config", config, "spec file")->required();
    scan->add_option("--scan", scan_type, "scan variable")
        ->check(CLI::IsMember({"epsilon", "time", "samples"}));
    scan->add_option("--values", values, "comma-separated scan points")->required();
    scan->add_option("--method", method, "solver")->check(CLI::IsMember({"exact", "dtwa"}));
    scan->add_option("--analysis", analyses, "requested outputs: xi1, xi2, plateau, gge")
        ->delimiter(',');
    scan->add_option("--out", out_path, "output CSV path")->required();
    scan->add_flag("--json", json, "also write a JSON mirror next to the CSV");
    add_dtwa_flags(scan, flags);

    CLI::App* verify = app.add_subcommand("verify", "run the verification suite");
    verify->add_flag("--quick", quick, "fast subset (about two minutes)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    // second-order runs default to the smaller standard sample count
    if (flags.order == 2 && correlate->count("--samples") == 0 && scan->count("--samples") == 0)
        flags.samples = 1000;

    try {
        if (correlate->parsed())
            return cmd_correlate(config, method, flags, residuals_vs, light_cone, out_path, json);
        if (scan->parsed())
            return cmd_scan(config, scan_type, values, method, analyses, flags, out_path, json);
        if (verify->parsed()) {
            acceptance::Report report = acceptance::run(quick, &std::cout);
            std::cout << (report.all_passed() ? "all criteria passed" : "criteria FAILED")
                      << std::endl;
            return report.all_passed() ? 0 : 3;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    }
    return 1;
}
