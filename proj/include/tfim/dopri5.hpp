#ifndef TFIM_DOPRI5_HPP
#define TFIM_DOPRI5_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace tfim {

// Dormand-Prince 5(4) embedded pair with the standard quartic dense-output
// interpolant (Hairer/Norsett/Wanner coefficients). The RHS signature is
// f(y, dy); state vectors are plain double arrays.
//
// Control hooks:
//   accept_state(y): extra per-step acceptance test (e.g. invariant drift);
//                    returning false rejects the step and halves h.
//   Blow-up guard: any non-finite value or |y_i| > blow_up_limit stops the
//   integration; `completed` reports false and `t_reached` the last good t.
struct Dopri5Options {
    double rtol = 1e-8;
    double atol = 1e-10;
    double h_initial = 1e-3;
    double h_max = 0.25;
    double blow_up_limit = 1e3;
    std::function<bool(const std::vector<double>&)> accept_state;
};

struct Dopri5Status {
    bool completed = true;
    double t_reached = 0.0;
    long steps = 0;
    long rejected = 0;
};

template <class Rhs>
class Dopri5 {
  public:
    Dopri5(Rhs rhs, std::size_t dim, Dopri5Options opts)
        : rhs_(std::move(rhs)), dim_(dim), opts_(opts) {
        for (auto* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &ytmp_, &y5_, &err_})
            v->assign(dim_, 0.0);
    }

    // Integrates y from t0, writing dense output at each requested time.
    // `times` must be ascending and start at >= t0. on_sample(index, y) is
    // called for every grid point reached before any blow-up.
    template <class Sampler>
    Dopri5Status run(std::vector<double>& y, double t0, const std::vector<double>& times,
                     Sampler&& on_sample) {
        Dopri5Status st;
        st.t_reached = t0;
        double t = t0;
        std::size_t next = 0;
        while (next < times.size() && times[next] <= t) {
            on_sample(next, y);
            ++next;
        }
        if (next >= times.size()) return st;
        double t_end = times.back();
        double h = std::min(opts_.h_initial, opts_.h_max);
        rhs_(y, k1_);  // FSAL seed
        while (t < t_end) {
            if (t_end - t < 1e-12) {  // numerically at the end already
                while (next < times.size()) {
                    on_sample(next, y);
                    ++next;
                }
                break;
            }
            h = std::min(h, t_end - t);
            if (!step(y, t, h)) {
                ++st.rejected;
                h *= 0.5;
                if (h < 1e-13) {
                    st.completed = false;
                    return st;
                }
                continue;
            }
            // y5_ holds the accepted solution at t + h
            bool bad = false;
            for (std::size_t i = 0; i < dim_; ++i) {
                double v = y5_[i];
                if (!std::isfinite(v) || std::abs(v) > opts_.blow_up_limit) { bad = true; break; }
            }
            if (!bad && opts_.accept_state && !opts_.accept_state(y5_)) {
                ++st.rejected;
                h *= 0.5;
                if (h < 1e-13) { st.completed = false; return st; }
                continue;
            }
            if (bad) {
                st.completed = false;
                return st;
            }
            // dense output across (t, t+h]
            while (next < times.size() && times[next] <= t + h + 1e-14) {
                double theta = (times[next] - t) / h;
                theta = std::clamp(theta, 0.0, 1.0);
                interpolate(y, h, theta, ytmp_);
                on_sample(next, ytmp_);
                ++next;
            }
            y = y5_;
            k1_ = k7_;  // FSAL
            t += h;
            st.t_reached = t;
            ++st.steps;
            double grow = 0.9 * std::pow(std::max(err_norm_, 1e-10), -0.2);
            h *= std::clamp(grow, 0.2, 5.0);
            h = std::min(h, opts_.h_max);
            if (next >= times.size()) break;
        }
        return st;
    }

  private:
    // One trial step; fills y5_ (5th order), k's, and err_norm_. Returns
    // acceptance of the embedded error test.
    bool step(const std::vector<double>& y, double /*t*/, double h) {
        for (std::size_t i = 0; i < dim_; ++i) ytmp_[i] = y[i] + h * (a21 * k1_[i]);
        rhs_(ytmp_, k2_);
        for (std::size_t i = 0; i < dim_; ++i)
            ytmp_[i] = y[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
        rhs_(ytmp_, k3_);
        for (std::size_t i = 0; i < dim_; ++i)
            ytmp_[i] = y[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
        rhs_(ytmp_, k4_);
        for (std::size_t i = 0; i < dim_; ++i)
            ytmp_[i] = y[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
        rhs_(ytmp_, k5_);
        for (std::size_t i = 0; i < dim_; ++i)
            ytmp_[i] = y[i] + h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] +
                                   a65 * k5_[i]);
        rhs_(ytmp_, k6_);
        for (std::size_t i = 0; i < dim_; ++i)
            y5_[i] = y[i] + h * (a71 * k1_[i] + a73 * k3_[i] + a74 * k4_[i] + a75 * k5_[i] +
                                 a76 * k6_[i]);
        rhs_(y5_, k7_);
        double acc = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) {
            double e = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] + e6 * k6_[i] +
                            e7 * k7_[i]);
            double sc = opts_.atol + opts_.rtol * std::max(std::abs(y[i]), std::abs(y5_[i]));
            double q = e / sc;
            acc += q * q;
            err_[i] = e;
        }
        err_norm_ = std::sqrt(acc / static_cast<double>(dim_));
        if (!std::isfinite(err_norm_)) return false;
        return err_norm_ <= 1.0;
    }

    // Quartic interpolant on the accepted step (y at t, y5_ at t+h).
    void interpolate(const std::vector<double>& y0, double h, double theta,
                     std::vector<double>& out) const {
        for (std::size_t i = 0; i < dim_; ++i) {
            double ydiff = y5_[i] - y0[i];
            double r1 = y0[i];
            double r2 = ydiff;
            double r3 = h * k1_[i] - ydiff;
            double r4 = ydiff - h * k7_[i] - r3;
            double r5 = h * (d1 * k1_[i] + d3 * k3_[i] + d4 * k4_[i] + d5 * k5_[i] + d6 * k6_[i] +
                             d7 * k7_[i]);
            out[i] = r1 + theta * (r2 + (1.0 - theta) * (r3 + theta * (r4 + (1.0 - theta) * r5)));
        }
    }

    Rhs rhs_;
    std::size_t dim_;
    Dopri5Options opts_;
    std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, k7_, ytmp_, y5_, err_;
    double err_norm_ = 0.0;

    static constexpr double a21 = 1.0 / 5.0;
    static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                            a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
    static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                            a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
    static constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                            a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
    // b - bhat
    static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                            e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
    static constexpr double d1 = -12715105075.0 / 11282082432.0,
                            d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0,
                            d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
};

// Fixed-step classical RK4; cross-check mode for the adaptive scheme.
template <class Rhs, class Sampler>
bool rk4_fixed(Rhs&& rhs, std::vector<double>& y, double t0, const std::vector<double>& times,
               double dt, double blow_up_limit, Sampler&& on_sample) {
    std::size_t dim = y.size();
    std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
    double t = t0;
    auto do_step = [&](double h) {
        rhs(y, k1);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        rhs(tmp, k2);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        rhs(tmp, k3);
        for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + h * k3[i];
        rhs(tmp, k4);
        for (std::size_t i = 0; i < dim; ++i)
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    };
    for (std::size_t next = 0; next < times.size(); ++next) {
        double target = times[next];
        while (t < target - 1e-13) {
            double h = std::min(dt, target - t);
            do_step(h);
            t += h;
            for (std::size_t i = 0; i < dim; ++i)
                if (!std::isfinite(y[i]) || std::abs(y[i]) > blow_up_limit) return false;
        }
        on_sample(next, y);
    }
    return true;
}

}  // namespace tfim

#endif
