#include <doctest.h>

#include <cmath>

#include "ed_util.hpp"
#include "tfim/ed.hpp"
#include "tfim/eom.hpp"
#include "tfim/philox.hpp"
#include "tfim/trajectory.hpp"

using namespace tfim;
using dtwa::SecondOrderEom;
using dtwa::SecondOrderLayout;

TEST_CASE("first order: single spins precess about z at frequency 2h") {
    const double h = 1.7;
    std::vector<double> s{0.3, -0.8, 0.52};
    std::vector<double> ds;
    dtwa::eom_first_order(s, h, 0.0, ds);  // J = 0
    CHECK(ds[0] == doctest::Approx(2 * h * s[1]));
    CHECK(ds[1] == doctest::Approx(-2 * h * s[0]));
    CHECK(ds[2] == doctest::Approx(0.0));
}

TEST_CASE("first order: classical Ising fixed point") {
    // h = 0, all spins along x: every derivative vanishes
    const int n = 6;
    std::vector<double> s(3 * n, 0.0);
    for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i) * 3] = 1.0;
    std::vector<double> ds;
    dtwa::eom_first_order(s, 0.0, 1.0, ds);
    for (double v : ds) CHECK(v == 0.0);
}

TEST_CASE("first order conserves per-site spin length: s . ds/dt = 0") {
    const int n = 8;
    PhiloxRng rng(17, 0);
    std::vector<double> s(3 * n), ds;
    for (long trial = 0; trial < 1000000 / (3 * n); ++trial) {
        for (double& v : s) v = 2 * rng.uniform() - 1;
        dtwa::eom_first_order(s, 1.3, 0.7, ds);
        for (int i = 0; i < n; ++i) {
            double dot = 0;
            for (int a = 0; a < 3; ++a)
                dot += s[static_cast<std::size_t>(i) * 3 + a] *
                       ds[static_cast<std::size_t>(i) * 3 + a];
            CHECK(std::abs(dot) < 1e-12);
        }
    }
}

TEST_CASE("second order reduces to first order at the uncorrelated point") {
    for (int n : {2, 6}) {
        SecondOrderEom eom(n, 0.9, 1.0);
        SecondOrderLayout lay{n};
        PhiloxRng rng(23, 0);
        std::vector<double> y(lay.dim(), 0.0);
        for (int i = 0; i < n; ++i)
            for (int a = 0; a < 3; ++a) y[lay.mean_index(i, a)] = 2 * rng.uniform() - 1;
        std::vector<double> dy, s(y.begin(), y.begin() + 3 * n), ds;
        eom(y, dy);
        dtwa::eom_first_order(s, 0.9, 1.0, ds);
        for (std::size_t i = 0; i < ds.size(); ++i)
            CHECK(dy[i] == doctest::Approx(ds[i]).epsilon(1e-12));
    }
}

TEST_CASE("second order RHS matches numerical differentiation of brute-force dynamics") {
    // product states have vanishing connected three-point cumulants, so the
    // closure is exact at t = 0+ and the generated equations must agree
    // with the full quantum derivative
    for (auto [n, h, seed] : std::vector<std::tuple<int, double, int>>{
             {5, 1.3, 3}, {4, 0.3, 11}, {2, 1.0001, 7}}) {
        PhiloxRng rng(static_cast<std::uint64_t>(seed), 0);
        std::vector<ed_util::Vec> qubits;
        ed_util::Vec psi = ed_util::Vec::Ones(1);
        for (int i = 0; i < n; ++i) {
            ed_util::Vec q(2);
            q << std::complex<double>(2 * rng.uniform() - 1, 2 * rng.uniform() - 1),
                std::complex<double>(2 * rng.uniform() - 1, 2 * rng.uniform() - 1);
            q.normalize();
            ed_util::Vec next(psi.size() * 2);
            next << q(0) * psi, q(1) * psi;  // site i = factor i from the right
            psi = next;
        }

        SecondOrderLayout lay{n};
        std::vector<double> y(lay.dim(), 0.0);
        for (int i = 0; i < n; ++i)
            for (int a = 0; a < 3; ++a) {
                ed_util::Mat op = ed_util::op_on_sites(n, {{i, ed_util::pauli(a)}});
                y[lay.mean_index(i, a)] = (psi.adjoint() * op * psi)(0).real();
            }
        // product state: connected correlators are exactly zero

        SecondOrderEom eom(n, h, 1.0);
        std::vector<double> dy;
        eom(y, dy);

        ed_util::Evolver ev(n, h, 1.0);
        const double dt = 1e-5;
        ed_util::Vec plus = ev.evolve(psi, dt), minus = ev.evolve(psi, -dt);
        auto expect = [&](const ed_util::Vec& v, const std::map<int, ed_util::Mat>& ops) {
            return (v.adjoint() * ed_util::op_on_sites(n, ops) * v)(0).real();
        };

        std::vector<double> dm(static_cast<std::size_t>(n) * 3);
        for (int i = 0; i < n; ++i)
            for (int a = 0; a < 3; ++a) {
                double der = (expect(plus, {{i, ed_util::pauli(a)}}) -
                              expect(minus, {{i, ed_util::pauli(a)}})) /
                             (2 * dt);
                dm[lay.mean_index(i, a)] = der;
                CHECK(dy[lay.mean_index(i, a)] == doctest::Approx(der).epsilon(5e-7));
            }
        for (int i = 0; i < n; ++i)
            for (int jj = i + 1; jj < n; ++jj)
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b) {
                        double dab =
                            (expect(plus, {{i, ed_util::pauli(a)}, {jj, ed_util::pauli(b)}}) -
                             expect(minus, {{i, ed_util::pauli(a)}, {jj, ed_util::pauli(b)}})) /
                            (2 * dt);
                        double dc_ref = dab - dm[lay.mean_index(i, a)] * y[lay.mean_index(jj, b)] -
                                        y[lay.mean_index(i, a)] * dm[lay.mean_index(jj, b)];
                        CHECK(dy[lay.corr_index(i, jj, a, b)] ==
                              doctest::Approx(dc_ref).epsilon(1e-6).scale(1.0));
                    }
    }
}

TEST_CASE("J=0 hierarchy closes: second-order trajectory is exact precession") {
    SecondOrderEom eom(4, 2.0, 0.0);
    SecondOrderLayout lay{4};
    std::vector<double> y(lay.dim(), 0.0);
    PhiloxRng rng(31, 0);
    for (int i = 0; i < 4; ++i)
        for (int a = 0; a < 3; ++a) y[lay.mean_index(i, a)] = 2 * rng.uniform() - 1;
    std::vector<double> y0 = y;
    // integrate with classical RK4 well below the precession period
    std::vector<double> dy(lay.dim());
    const double dt = 1e-4, t_end = 0.5;
    std::vector<double> k1, k2, k3, k4, tmp(y.size());
    for (double t = 0; t < t_end - 1e-12; t += dt) {
        eom(y, dy); k1 = dy;
        for (std::size_t q = 0; q < y.size(); ++q) tmp[q] = y[q] + 0.5 * dt * k1[q];
        eom(tmp, dy); k2 = dy;
        for (std::size_t q = 0; q < y.size(); ++q) tmp[q] = y[q] + 0.5 * dt * k2[q];
        eom(tmp, dy); k3 = dy;
        for (std::size_t q = 0; q < y.size(); ++q) tmp[q] = y[q] + dt * k3[q];
        eom(tmp, dy); k4 = dy;
        for (std::size_t q = 0; q < y.size(); ++q)
            y[q] += dt / 6.0 * (k1[q] + 2 * k2[q] + 2 * k3[q] + k4[q]);
    }
    const double phi = 2.0 * 2.0 * t_end;  // 2 h t
    for (int i = 0; i < 4; ++i) {
        double sx0 = y0[lay.mean_index(i, 0)], sy0 = y0[lay.mean_index(i, 1)];
        CHECK(y[lay.mean_index(i, 0)] ==
              doctest::Approx(sx0 * std::cos(phi) + sy0 * std::sin(phi)).epsilon(1e-8));
        CHECK(y[lay.mean_index(i, 1)] ==
              doctest::Approx(-sx0 * std::sin(phi) + sy0 * std::cos(phi)).epsilon(1e-8));
        CHECK(y[lay.mean_index(i, 2)] == doctest::Approx(y0[lay.mean_index(i, 2)]).epsilon(1e-9));
    }
    // correlators stay zero when they start zero
    for (std::size_t q = 3 * 4; q < y.size(); ++q) CHECK(std::abs(y[q]) < 1e-10);
}

TEST_CASE("N=2: exhaustive second order beats first order against brute force") {
    QuenchSpec s;
    s.n = 2;
    s.h_i = 1000.0;
    s.h_f = 1.0001;
    s.t_grid = {0.5};
    ed::EdSolver oracle(s);
    double ref = oracle.correlate(0.5, 1);

    double avg[3] = {0.0, 0.0};
    for (int order : {1, 2}) {
        dtwa::TrajectoryIntegrator integ(s, dtwa::TrajectoryOptions{order, 1e-10, false});
        SecondOrderLayout lay{2};
        double acc = 0.0;
        for (int cfg = 0; cfg < 16; ++cfg) {  // all S8 corners of two sites
            dtwa::SpinConfiguration init;
            init.n = 2;
            init.s = {(cfg & 1) ? 1.0 : -1.0, (cfg & 2) ? 1.0 : -1.0, 1.0,
                      (cfg & 4) ? 1.0 : -1.0, (cfg & 8) ? 1.0 : -1.0, 1.0};
            auto tr = integ.run(init);
            REQUIRE(tr.valid_count == 1);
            const auto& y = tr.states[0];
            double v = y[0] * y[3];
            if (order == 2) v += y[lay.corr_index(0, 1, 0, 0)];
            acc += v;
        }
        avg[order] = acc / 16.0;
    }
    CHECK(std::abs(avg[2] - ref) < std::abs(avg[1] - ref));
}

TEST_CASE("classical interaction energy") {
    std::vector<double> s{1.0, 0.0, 0.5, -1.0, 0.0, 0.25};
    // n=2: the periodic bond sum counts the single pair twice
    double e = dtwa::classical_energy(s, 0.5, 1.0);
    CHECK(e == doctest::Approx(-1.0 * (1.0 * -1.0) * 2 - 0.5 * (0.5 + 0.25)));
}
