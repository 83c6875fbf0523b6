#include "tfim/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "tfim/analysis.hpp"
#include "tfim/ed.hpp"
#include "tfim/ensemble.hpp"
#include "tfim/eom.hpp"
#include "tfim/errors.hpp"
#include "tfim/fermion.hpp"
#include "tfim/philox.hpp"
#include "tfim/trajectory.hpp"

namespace tfim::acceptance {

namespace {

constexpr std::uint64_t kSeed = 12345;

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

struct Runner {
    Report report;
    std::ostream* os;

    template <class F>
    void criterion(const std::string& id, F&& body) {
        CriterionResult r;
        r.id = id;
        auto start = std::chrono::steady_clock::now();
        try {
            body(r);
        } catch (const std::exception& e) {
            r.passed = false;
            r.detail += std::string(r.detail.empty() ? "" : "; ") + "exception: " + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (os)
            *os << (r.passed ? "[PASS] " : "[FAIL] ") << r.id << "  " << r.detail << "  ("
                << fmt(r.seconds) << " s)" << std::endl;
        report.results.push_back(std::move(r));
    }
};

QuenchSpec make_spec(int n, double h_i, double h_f, std::vector<double> ts) {
    QuenchSpec s;
    s.n = n;
    s.j = 1.0;
    s.h_i = h_i;
    s.h_f = h_f;
    s.t_grid = std::move(ts);
    return validate_spec(s);
}

void a1_oracle_equivalence(CriterionResult& r) {
    double worst = 0.0;
    for (int n : {8, 10}) {
        QuenchSpec spec = make_spec(n, 1000.0, 1.1, {0.5, 1.0, 2.0});
        fermion::ExactSolver exact(spec);
        ed::EdSolver oracle(spec);
        for (double t : spec.t_grid)
            for (int d = 0; d <= 4; ++d)
                worst = std::max(worst, std::abs(exact.correlator(t, d) - oracle.correlate(t, d)));
    }
    r.passed = worst < 1e-8;
    r.detail = "free-fermion vs ED, N in {8,10}: max |diff| = " + fmt(worst) + " (bound 1e-8)";
}

void a2_stationarity(CriterionResult& r) {
    QuenchSpec spec = make_spec(64, 2.0, 2.0, uniform_grid(0.0, 5.0, 0.25));
    fermion::ExactSolver exact(spec);
    CorrelationSeries s = exact.series();
    double worst = 0.0;
    for (std::size_t it = 0; it < s.times.size(); ++it)
        for (std::size_t id = 0; id < s.distances.size(); ++id)
            if (s.distances[id] <= 10)
                worst = std::max(worst, std::abs(s.value(it, id) - s.value(0, id)));
    r.passed = worst < 1e-10;
    r.detail = "h_i=h_f=2, N=64, t<=5: max |C(t,d)-C(0,d)| = " + fmt(worst) + " (bound 1e-10)";
}

void a3_xi1_closed_form(CriterionResult& r) {
    QuenchSpec spec = make_spec(100, 1000.0, 1.1, {18.0});
    fermion::ExactSolver exact(spec);
    analysis::FitResult fit = analysis::fit_xi1(exact.series(), 18.0);
    double xi_formula = fermion::xi1_closed(1000.0, 1.1);
    double rel_formula = std::abs(fit.value("xi1") - xi_formula) / xi_formula;
    double rel_quoted = std::abs(fit.value("xi1") - 1.2714) / 1.2714;
    r.passed = rel_formula < 0.05 && rel_quoted < 0.05;
    r.detail = "N=100 t=18 fitted xi1 = " + fmt(fit.value("xi1")) + ", closed form " +
               fmt(xi_formula) + ", rel " + fmt(rel_formula) + " (bound 0.05)";
}

void a4_gge_crossover(CriterionResult& r) {
    double g0 = fermion::xi_gge(0.0);
    bool pass = std::abs(g0 - 1.4427) <= 1e-4;
    std::string detail = "xi_GGE(0) = " + fmt(g0);
    for (double eps : {1e-3, 10.0}) {
        QuenchSpec spec = make_spec(100, 1000.0, 1.0 + eps, {18.0});
        fermion::ExactSolver exact(spec);
        analysis::FitResult fit = analysis::fit_xi1(exact.series(), 18.0);
        double gge = fermion::xi_gge(eps);
        double rel = std::abs(fit.value("xi1") - gge) / gge;
        pass = pass && rel < 0.10;
        detail += "; eps=" + fmt(eps) + ": fit " + fmt(fit.value("xi1")) + " vs xi_GGE " +
                  fmt(gge) + " rel " + fmt(rel);
    }
    r.passed = pass;
    r.detail = detail + " (bounds 1e-4 / 10%)";
}

void a5_light_cone(CriterionResult& r) {
    bool pass = true;
    double worst_v = 0.0;
    for (double h : {1.1, 2.0, 5.0}) {
        double v = fermion::max_group_velocity(h);
        worst_v = std::max(worst_v, std::abs(v - 2.0));
        pass = pass && std::abs(v - 2.0) < 1e-9;
    }
    QuenchSpec spec = make_spec(100, 1000.0, 1.1, uniform_grid(0.5, 25.0, 0.5));
    fermion::ExactSolver exact(spec);
    analysis::FitResult lc = analysis::light_cone_velocity(exact.series());
    double v_meas = lc.value("v_lc");
    pass = pass && std::abs(v_meas - 2.0) <= 0.2;
    r.passed = pass;
    r.detail = "analytic max|v-2| = " + fmt(worst_v) + " (bound 1e-9); measured cone velocity " +
               fmt(v_meas) + " (bound 2 +- 0.2)";
}

void a6_initial_state(CriterionResult& r) {
    QuenchSpec spec = make_spec(20, 1000.0, 1.0001, {0.0});
    dtwa::EnsembleOptions opts;
    opts.samples = 10000;
    opts.scheme = dtwa::Scheme::S8;
    opts.seed = kSeed;
    dtwa::EnsembleResult res = dtwa::run_ensemble(spec, opts);
    bool pass = res.series.value(0, 0) == 1.0;
    double bound = 3.0 / std::sqrt(static_cast<double>(opts.samples));
    double worst_c = 0.0;
    for (std::size_t id = 1; id < res.series.distances.size(); ++id)
        worst_c = std::max(worst_c, std::abs(res.series.value(0, id)));
    pass = pass && worst_c < bound;
    double worst_sz = 0.0;
    for (double m : res.sz[0]) worst_sz = std::max(worst_sz, std::abs(m - 1.0));
    pass = pass && worst_sz == 0.0;
    r.passed = pass;
    r.detail = "C(0,0)=" + fmt(res.series.value(0, 0)) + "; max|C(0,d>0)| = " + fmt(worst_c) +
               " (bound " + fmt(bound) + "); max|<sz>-1| = " + fmt(worst_sz);
}

void a7_floor_scaling(CriterionResult& r) {
    QuenchSpec spec = make_spec(50, 1000.0, 1.0001, {0.0});
    std::vector<std::pair<double, double>> points;
    for (long samples : {100L, 1000L, 10000L, 100000L}) {
        dtwa::EnsembleOptions opts;
        opts.samples = samples;
        opts.scheme = dtwa::Scheme::S8;
        opts.seed = kSeed;
        dtwa::EnsembleResult res = dtwa::run_ensemble(spec, opts);
        auto [mean, sd] = analysis::plateau_value(res.series, 0.0, 20, 24);
        (void)sd;
        points.emplace_back(static_cast<double>(samples), mean);
    }
    analysis::FitResult fit = analysis::fit_power_law(points);
    double b = fit.value("b");
    double sb = fit.sigma("b");
    double margin = 0.07 + sb;
    r.passed = std::abs(b - (-0.335)) <= margin;
    r.detail = "plateau exponent b = " + fmt(b) + " +- " + fmt(sb) +
               ", target -0.335 +- (0.07 + sigma_b) = +- " + fmt(margin);
}

void a8_first_order_conservation(CriterionResult& r) {
    QuenchSpec spec = make_spec(20, 1000.0, 1.1, uniform_grid(0.0, 3.0, 0.1));
    dtwa::TrajectoryIntegrator integ(spec, dtwa::TrajectoryOptions{1, 1e-8, false});
    double worst_norm = 0.0, worst_energy = 0.0;
    for (std::uint64_t traj = 0; traj < 100; ++traj) {
        PhiloxRng rng(kSeed, traj);
        dtwa::SpinConfiguration init = dtwa::sample_initial(spec.n, dtwa::Scheme::S8, rng);
        dtwa::Trajectory t = integ.run(init);
        if (t.valid_count != spec.t_grid.size()) {
            r.passed = false;
            r.detail = "trajectory " + std::to_string(traj) + " did not complete";
            return;
        }
        double e0 = dtwa::classical_energy(t.states[0], spec.h_f, spec.j);
        for (const auto& s : t.states) {
            for (int i = 0; i < spec.n; ++i) {
                const double* p = &s[static_cast<std::size_t>(i) * 3];
                double n2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
                worst_norm = std::max(worst_norm, std::abs(n2 - 3.0));
            }
            worst_energy =
                std::max(worst_energy, std::abs(dtwa::classical_energy(s, spec.h_f, spec.j) - e0));
        }
    }
    r.passed = worst_norm < 1e-6 && worst_energy < 1e-6 * spec.n;
    r.detail = "100 trajectories, t<=3: max | |s|^2 - 3 | = " + fmt(worst_norm) +
               " (bound 1e-6); max |H_W drift| = " + fmt(worst_energy) + " (bound " +
               fmt(1e-6 * spec.n) + ")";
}

void a9_order_comparison(CriterionResult& r) {
    QuenchSpec spec = make_spec(12, 1000.0, 1.0001, {0.5});
    ed::EdSolver oracle(spec);
    CorrelationSeries ref = oracle.series();

    auto rms_error = [&](const CorrelationSeries& s) {
        double acc = 0.0;
        int cnt = 0;
        for (int d = 1; d <= 5; ++d) {
            std::size_t id = s.distance_index(d);
            double diff = s.value(0, id) - ref.value(0, ref.distance_index(d));
            acc += diff * diff;
            ++cnt;
        }
        return std::sqrt(acc / cnt);
    };

    dtwa::EnsembleOptions o1;
    o1.samples = 10000;
    o1.order = 1;
    o1.seed = kSeed;
    double rms1 = rms_error(dtwa::run_ensemble(spec, o1).series);

    dtwa::EnsembleOptions o2;
    o2.samples = 1000;
    o2.order = 2;
    o2.seed = kSeed;
    double rms2 = rms_error(dtwa::run_ensemble(spec, o2).series);

    r.passed = rms2 < rms1;
    r.detail = "N=12, t=0.5, d<=5 RMS vs ED: order2(R=1e3) = " + fmt(rms2) +
               " < order1(R=1e4) = " + fmt(rms1);
}

void a10_short_time_xi1(CriterionResult& r) {
    std::vector<double> ts = {0.25, 0.5, 0.75, 1.0};
    QuenchSpec spec = make_spec(20, 1000.0, 1.0001, ts);
    fermion::ExactSolver exact(spec);
    CorrelationSeries es = exact.series();

    dtwa::EnsembleOptions opts;
    opts.samples = 10000;
    opts.seed = kSeed;
    CorrelationSeries ds = dtwa::run_ensemble(spec, opts).series;

    bool pass = true;
    std::string detail = "N=20 h_f=1.0001 xi1(t) rel errs:";
    for (double t : ts) {
        double xe = analysis::fit_xi1(es, t).value("xi1");
        double xd = analysis::fit_xi1(ds, t).value("xi1");
        double rel = std::abs(xd - xe) / xe;
        pass = pass && rel < 0.10;
        detail += " t=" + fmt(t) + ": " + fmt(rel);
    }
    r.passed = pass;
    r.detail = detail + " (bound 0.10)";
}

// At h_f = 10 the t=2 correlator sits near an oscillation node of C_2 (the
// exact value crosses zero there), so the instantaneous d<3 fit is
// degenerate. The published comparison reports the spread over t in
// [1.3, 2]; the criterion therefore compares medians of the per-time fits
// over that window.
double median_xi1(const CorrelationSeries& series) {
    std::vector<double> fits;
    for (double t : series.times) {
        try {
            fits.push_back(analysis::fit_xi1(series, t).value("xi1"));
        } catch (const FitError&) {
        }
    }
    if (fits.empty()) throw FitError("no usable xi1 fits in the time window");
    std::nth_element(fits.begin(), fits.begin() + fits.size() / 2, fits.end());
    return fits[fits.size() / 2];
}

void a11_far_from_critical(CriterionResult& r) {
    QuenchSpec spec = make_spec(20, 1000.0, 10.0, uniform_grid(1.3, 2.0, 0.1));
    fermion::ExactSolver exact(spec);
    double xe = median_xi1(exact.series());

    dtwa::EnsembleOptions opts;
    opts.samples = 10000;
    opts.seed = kSeed;
    CorrelationSeries ds = dtwa::run_ensemble(spec, opts).series;
    double xd = median_xi1(ds);
    double rel = std::abs(xd - xe) / xe;
    r.passed = rel < 0.10;
    r.detail = "h_f=10, t in [1.3,2] median fits: dTWA xi1 = " + fmt(xd) + " vs exact " + fmt(xe) +
               ", rel " + fmt(rel) + " (bound 0.10)";
}

void a12_known_limitations(CriterionResult& r) {
    // second-order instabilities near the critical point
    QuenchSpec spec2 = make_spec(20, 1000.0, 1.0001, uniform_grid(0.5, 4.0, 0.5));
    dtwa::EnsembleOptions o2;
    o2.samples = 200;
    o2.order = 2;
    o2.seed = kSeed;
    std::vector<double> fractions;
    std::vector<double> times = spec2.t_grid;
    try {
        fractions = dtwa::run_ensemble(spec2, o2).unstable_fraction;
    } catch (const dtwa::EnsembleInstabilityError& e) {
        fractions = e.result.unstable_fraction;
    }
    double late_fraction = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i)
        if (times[i] >= 2.0) late_fraction = std::max(late_fraction, fractions[i]);
    bool pass_instab = late_fraction > 0.0;

    // xi2: resolvable in the exact series, invisible to sampled dTWA
    QuenchSpec spec_xi2 = make_spec(64, 1000.0, 5.0, {2.0});
    fermion::ExactSolver exact(spec_xi2);
    analysis::FitResult fe = analysis::fit_xi2_envelope(exact.series(), 2.0);
    bool exact_finite = fe.value("xi2") > 0.0 && fe.sigma("xi2") < fe.value("xi2");

    QuenchSpec spec_dtwa = make_spec(20, 1000.0, 5.0, {2.0});
    dtwa::EnsembleOptions od;
    od.samples = 10000;
    od.seed = kSeed;
    CorrelationSeries ds = dtwa::run_ensemble(spec_dtwa, od).series;
    bool dtwa_fails;
    std::string dtwa_msg;
    try {
        analysis::FitResult fd = analysis::fit_xi2_envelope(ds, 2.0);
        dtwa_fails = fd.sigma("xi2") > fd.value("xi2");
        dtwa_msg = "xi2 = " + fmt(fd.value("xi2")) + " +- " + fmt(fd.sigma("xi2"));
    } catch (const FitError& e) {
        dtwa_fails = true;
        dtwa_msg = std::string("fit error: ") + e.what();
    }

    r.passed = pass_instab && exact_finite && dtwa_fails;
    r.detail = "2nd-order unstable fraction (t>=2) = " + fmt(late_fraction) +
               " (>0); exact xi2 = " + fmt(fe.value("xi2")) + " +- " + fmt(fe.sigma("xi2")) +
               "; dTWA envelope: " + dtwa_msg;
}

}  // namespace

bool Report::all_passed() const {
    for (const auto& r : results)
        if (!r.passed) return false;
    return true;
}

Report run(bool quick, std::ostream* progress) {
    Runner runner;
    runner.os = progress;
    runner.criterion("A1 oracle equivalence", a1_oracle_equivalence);
    runner.criterion("A2 stationarity", a2_stationarity);
    runner.criterion("A3 xi1 closed form", a3_xi1_closed_form);
    runner.criterion("A4 GGE crossover", a4_gge_crossover);
    runner.criterion("A5 light cone", a5_light_cone);
    runner.criterion("A6 dTWA initial state", a6_initial_state);
    if (!quick) {
        runner.criterion("A7 statistical-floor scaling", a7_floor_scaling);
    }
    runner.criterion("A8 first-order conservation", a8_first_order_conservation);
    if (!quick) {
        runner.criterion("A9 order comparison", a9_order_comparison);
        runner.criterion("A10 short-time xi1 tracking", a10_short_time_xi1);
        runner.criterion("A11 far-from-critical accuracy", a11_far_from_critical);
        runner.criterion("A12 known limitations", a12_known_limitations);
    }
    return runner.report;
}

}  // namespace tfim::acceptance
