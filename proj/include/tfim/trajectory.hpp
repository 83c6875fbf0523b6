#ifndef TFIM_TRAJECTORY_HPP
#define TFIM_TRAJECTORY_HPP

#include <memory>
#include <vector>

#include "tfim/eom.hpp"
#include "tfim/phase_point.hpp"
#include "tfim/quench_spec.hpp"

namespace tfim::dtwa {

struct TrajectoryOptions {
    int order = 1;           // 1: mean field, 2: pair-correlator truncation
    double tol = 1e-8;       // relative tolerance of the adaptive pair
    bool fixed_step = false; // classical RK4 at dt = 1e-3 (cross-check mode)
};

// States at the requested grid times. A trajectory that blows up (any
// component beyond 1e3, or step-size collapse) is truncated at the last
// grid point it reached and flagged, never discarded silently.
struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;  // one flat state per reached time
    std::size_t valid_count = 0;
    bool unstable = false;
};

// Reusable integrator: owns the generated second-order equations and the
// scratch buffers, so one instance per thread integrates many samples.
class TrajectoryIntegrator {
  public:
    TrajectoryIntegrator(const QuenchSpec& spec, TrajectoryOptions opts);
    ~TrajectoryIntegrator();
    TrajectoryIntegrator(TrajectoryIntegrator&&) noexcept;

    Trajectory run(const SpinConfiguration& init) const;

    std::size_t state_dim() const;
    const SecondOrderLayout& second_order_layout() const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Single-shot convenience wrapper.
Trajectory integrate_trajectory(const SpinConfiguration& init, const QuenchSpec& spec,
                                int order, double tol = 1e-8, bool fixed_step = false);

}  // namespace tfim::dtwa

#endif
