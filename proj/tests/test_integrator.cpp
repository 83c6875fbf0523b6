#include <doctest.h>

#include <cmath>

#include "tfim/dopri5.hpp"
#include "tfim/philox.hpp"
#include "tfim/trajectory.hpp"

using namespace tfim;

TEST_CASE("adaptive pair integrates precession to tolerance") {
    // J = 0 limit via a single-site chain equivalent: du/dt rotation
    const double h = 1.9;
    QuenchSpec s;
    s.n = 2;
    s.h_i = 1000.0;
    s.h_f = h;
    s.t_grid = uniform_grid(0.0, 3.0, 0.1);
    // zero out the coupling through the equations directly
    auto rhs = [&](const std::vector<double>& y, std::vector<double>& dy) {
        dy.resize(2);
        dy[0] = 2 * h * y[1];
        dy[1] = -2 * h * y[0];
    };
    Dopri5Options opts;
    Dopri5 integ(rhs, 2, opts);
    std::vector<double> y{1.0, -0.5};
    double worst = 0.0;
    auto st = integ.run(y, 0.0, s.t_grid, [&](std::size_t i, const std::vector<double>& v) {
        double t = s.t_grid[i];
        double ex = std::cos(2 * h * t) - 0.5 * std::sin(2 * h * t);
        double ey = -std::sin(2 * h * t) - 0.5 * std::cos(2 * h * t);
        worst = std::max({worst, std::abs(v[0] - ex), std::abs(v[1] - ey)});
    });
    CHECK(st.completed);
    CHECK(worst < 1e-7);  // dense output between accepted steps
}

TEST_CASE("trajectory at J=0-like fixed point stays constant") {
    // h = 0 with all spins on x is stationary under the full equations
    QuenchSpec s;
    s.n = 4;
    s.h_i = 5.0;
    s.h_f = 0.0;
    s.t_grid = {0.0, 1.0, 2.0};
    dtwa::SpinConfiguration init;
    init.n = 4;
    init.s.assign(12, 0.0);
    for (int i = 0; i < 4; ++i) init.s[static_cast<std::size_t>(i) * 3] = 1.0;
    auto tr = dtwa::integrate_trajectory(init, s, 1);
    REQUIRE(tr.valid_count == 3);
    for (const auto& state : tr.states)
        for (std::size_t q = 0; q < state.size(); ++q)
            CHECK(state[q] == doctest::Approx(init.s[q]).epsilon(1e-12));
}

TEST_CASE("fixed-step RK4 cross-check agrees with the adaptive pair") {
    QuenchSpec s;
    s.n = 8;
    s.h_i = 1000.0;
    s.h_f = 1.3;
    s.t_grid = {0.5, 1.0, 2.0};
    PhiloxRng rng(12345, 0);
    auto init = dtwa::sample_initial(8, dtwa::Scheme::S8, rng);
    auto a = dtwa::integrate_trajectory(init, s, 1, 1e-10, false);
    auto b = dtwa::integrate_trajectory(init, s, 1, 1e-10, true);
    REQUIRE(a.valid_count == b.valid_count);
    for (std::size_t it = 0; it < a.valid_count; ++it)
        for (std::size_t q = 0; q < a.states[it].size(); ++q)
            CHECK(a.states[it][q] == doctest::Approx(b.states[it][q]).epsilon(1e-6));
}

TEST_CASE("spin length is preserved along first-order trajectories") {
    QuenchSpec s;
    s.n = 12;
    s.h_i = 1000.0;
    s.h_f = 1.1;
    s.t_grid = uniform_grid(0.0, 3.0, 0.25);
    for (std::uint64_t stream = 0; stream < 5; ++stream) {
        PhiloxRng rng(777, stream);
        auto init = dtwa::sample_initial(12, dtwa::Scheme::S8, rng);
        auto tr = dtwa::integrate_trajectory(init, s, 1);
        REQUIRE(tr.valid_count == s.t_grid.size());
        for (const auto& state : tr.states)
            for (int i = 0; i < 12; ++i) {
                const double* p = &state[static_cast<std::size_t>(i) * 3];
                CHECK(std::abs(p[0] * p[0] + p[1] * p[1] + p[2] * p[2] - 3.0) < 1e-6);
            }
    }
}

TEST_CASE("blow-up is truncated and flagged, not discarded") {
    // dy/dt = y^2 diverges at t = 1; the guard stops at |y| = 1e3
    auto rhs = [](const std::vector<double>& y, std::vector<double>& dy) {
        dy.resize(1);
        dy[0] = y[0] * y[0];
    };
    std::vector<double> times = {0.5, 0.9, 0.99, 1.5, 2.0};
    Dopri5Options opts;
    Dopri5 integ(rhs, 1, opts);
    std::vector<double> y{1.0};
    std::size_t delivered = 0;
    auto st = integ.run(y, 0.0, times, [&](std::size_t, const std::vector<double>&) {
        ++delivered;
    });
    CHECK_FALSE(st.completed);
    CHECK(st.t_reached < 1.01);
    CHECK(delivered >= 2);  // t = 0.5 and 0.9 lie before the divergence
    CHECK(delivered <= 3);
}
