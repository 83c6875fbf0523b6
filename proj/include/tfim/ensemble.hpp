#ifndef TFIM_ENSEMBLE_HPP
#define TFIM_ENSEMBLE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "tfim/correlation_series.hpp"
#include "tfim/errors.hpp"
#include "tfim/phase_point.hpp"
#include "tfim/quench_spec.hpp"

namespace tfim::dtwa {

struct EnsembleOptions {
    long samples = 10000;
    int order = 1;
    Scheme scheme = Scheme::S8;
    std::uint64_t seed = 12345;
    double tol = 1e-8;
    bool fixed_step = false;
    int threads = 1;                // 0 = hardware concurrency
    std::string checkpoint_path;    // resume from / save to this file if set
};

struct EnsembleResult {
    CorrelationSeries series;                 // stderr from across-sample variance
    std::vector<std::vector<double>> sz;      // [time][site] magnetizations
    std::vector<double> unstable_fraction;    // [time], flagged-trajectory share
    long samples = 0;
    std::uint64_t seed = 0;
    Scheme scheme = Scheme::S8;
    int order = 1;
};

// Raised when more than half of the trajectories are unstable at some
// requested time; carries the (meaningless but inspectable) result.
struct EnsembleInstabilityError : Error {
    EnsembleInstabilityError(const std::string& msg, EnsembleResult r)
        : Error(msg), result(std::move(r)) {}
    EnsembleResult result;
};

// Monte Carlo ensemble over sampled initial configurations.
//
// C^xx_d(t) is the sample mean of the translation-averaged estimator
// (1/N) sum_i sx_i sx_{i+d} (plus the pair correlator at second order);
// the d=0 entry is pinned to 1. Trajectory i draws from Philox stream i,
// and the reduction is a sequential compensated sum in trajectory order,
// so the result is bitwise identical for any worker count and for
// checkpoint-resumed runs.
EnsembleResult run_ensemble(const QuenchSpec& spec, const EnsembleOptions& opts);

}  // namespace tfim::dtwa

#endif
