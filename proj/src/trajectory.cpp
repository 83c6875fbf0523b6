#include "tfim/trajectory.hpp"

#include <cmath>

#include "tfim/dopri5.hpp"
#include "tfim/errors.hpp"

namespace tfim::dtwa {

struct TrajectoryIntegrator::Impl {
    QuenchSpec spec;
    TrajectoryOptions opts;
    SecondOrderLayout layout;
    std::unique_ptr<SecondOrderEom> second;

    Impl(const QuenchSpec& s, TrajectoryOptions o) : spec(s), opts(o) {
        validate_spec(spec);
        if (opts.order != 1 && opts.order != 2)
            throw DomainError("truncation order must be 1 or 2");
        layout.n = spec.n;
        if (opts.order == 2)
            second = std::make_unique<SecondOrderEom>(spec.n, spec.h_f, spec.j);
    }

    std::size_t dim() const {
        return opts.order == 1 ? static_cast<std::size_t>(spec.n) * 3 : layout.dim();
    }
};

TrajectoryIntegrator::TrajectoryIntegrator(const QuenchSpec& spec, TrajectoryOptions opts)
    : impl_(std::make_unique<Impl>(spec, opts)) {}
TrajectoryIntegrator::~TrajectoryIntegrator() = default;
TrajectoryIntegrator::TrajectoryIntegrator(TrajectoryIntegrator&&) noexcept = default;

std::size_t TrajectoryIntegrator::state_dim() const { return impl_->dim(); }
const SecondOrderLayout& TrajectoryIntegrator::second_order_layout() const {
    return impl_->layout;
}

Trajectory TrajectoryIntegrator::run(const SpinConfiguration& init) const {
    const Impl& im = *impl_;
    if (init.n != im.spec.n) throw DomainError("initial configuration size mismatch");

    Trajectory out;
    out.times = im.spec.t_grid;
    out.states.reserve(out.times.size());

    std::vector<double> y =
        im.opts.order == 1 ? init.s : second_order_init(init);

    auto rhs = [&](const std::vector<double>& state, std::vector<double>& dstate) {
        if (im.opts.order == 1)
            eom_first_order(state, im.spec.h_f, im.spec.j, dstate);
        else
            (*im.second)(state, dstate);
    };

    auto sample = [&](std::size_t, const std::vector<double>& state) {
        out.states.push_back(state);
    };

    bool completed;
    if (im.opts.fixed_step) {
        completed = rk4_fixed(rhs, y, 0.0, out.times, 1e-3, 1e3, sample);
    } else {
        Dopri5Options dopts;
        dopts.rtol = im.opts.tol;
        dopts.atol = 1e-10;
        dopts.blow_up_limit = 1e3;
        if (im.opts.order == 1) {
            // per-site spin length is conserved by the flow (3 for phase-space
            // samples); a step that drifts it retries at smaller size
            const int n = im.spec.n;
            std::vector<double> len0(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                const double* p = &init.s[static_cast<std::size_t>(i) * 3];
                len0[static_cast<std::size_t>(i)] = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
            }
            dopts.accept_state = [n, len0](const std::vector<double>& s) {
                for (int i = 0; i < n; ++i) {
                    const double* p = &s[static_cast<std::size_t>(i) * 3];
                    double norm2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
                    if (std::abs(norm2 - len0[static_cast<std::size_t>(i)]) > 1e-6) return false;
                }
                return true;
            };
        }
        Dopri5 integ(rhs, im.dim(), dopts);
        completed = integ.run(y, 0.0, out.times, sample).completed;
    }
    out.valid_count = out.states.size();
    out.unstable = !completed;
    return out;
}

Trajectory integrate_trajectory(const SpinConfiguration& init, const QuenchSpec& spec,
                                int order, double tol, bool fixed_step) {
    TrajectoryIntegrator integ(spec, TrajectoryOptions{order, tol, fixed_step});
    return integ.run(init);
}

}  // namespace tfim::dtwa
