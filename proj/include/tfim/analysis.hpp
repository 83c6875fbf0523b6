#ifndef TFIM_ANALYSIS_HPP
#define TFIM_ANALYSIS_HPP

#include <string>
#include <utility>
#include <vector>

#include "tfim/correlation_series.hpp"

namespace tfim::analysis {

// Named fit parameters with one-sigma uncertainties, the fit window
// (d- or R-range), and the residual norm of the fitted model.
struct FitResult {
    std::vector<std::string> names;
    std::vector<double> values;
    std::vector<double> sigmas;
    double window_lo = 0.0, window_hi = 0.0;
    double residual_norm = 0.0;

    double value(const std::string& name) const;
    double sigma(const std::string& name) const;
};

// Short-distance correlation length: least squares of ln|C| against d over
// the window d in {1, 2} (d < 3, d = 0 excluded: it is pinned by
// normalization, not by the exponential law). Uncertainty propagated from
// the series stderr. Throws FitError on fewer than two usable points or a
// sign change inside the window.
FitResult fit_xi1(const CorrelationSeries& series, double t);

// Envelope length of the oscillatory regime: local maxima of |C_d| inside
// the sign-changing window (at least 3 sign changes required), fitted with
// an exponential. Throws FitError when no oscillations are present.
FitResult fit_xi2_envelope(const CorrelationSeries& series, double t);

// Pointwise differences and ratios on matching (t, d) grids. Entries where
// the reference vanishes are flagged rather than divided.
struct Residuals {
    std::vector<double> times;
    std::vector<int> distances;
    std::vector<double> delta;   // test - reference
    std::vector<double> ratio;   // delta / reference, NaN where flagged
    std::vector<char> flagged;   // reference == 0
};
Residuals residuals(const CorrelationSeries& test, const CorrelationSeries& reference);

// Mean and sample standard deviation of |C_d| over d_lo..d_hi at time t.
std::pair<double, double> plateau_value(const CorrelationSeries& series, double t,
                                        int d_lo = 20, int d_hi = 24);

// f(R) = a R^b by least squares on ln-ln axes; needs >= 3 positive points.
FitResult fit_power_law(const std::vector<std::pair<double, double>>& points);

// Correlation-spreading velocity. For each time the detector finds the
// largest d where |C| still exceeds 10x the plateau/noise floor, fits
// d*(t) linearly, and returns half the front slope (the front is built by
// counter-propagating mode pairs, so d* grows at twice the group velocity).
// Throws FitError when the grid cannot resolve the front.
FitResult light_cone_velocity(const CorrelationSeries& series);

}  // namespace tfim::analysis

#endif
