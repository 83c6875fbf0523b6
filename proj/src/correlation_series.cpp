#include "tfim/correlation_series.hpp"

#include <cmath>
#include <string>

#include "tfim/errors.hpp"

namespace tfim {

std::size_t CorrelationSeries::time_index(double t) const {
    for (std::size_t i = 0; i < times.size(); ++i)
        if (times[i] == t) return i;
    throw GridMismatchError("time " + std::to_string(t) + " not on the series grid");
}

std::size_t CorrelationSeries::distance_index(int d) const {
    for (std::size_t i = 0; i < distances.size(); ++i)
        if (distances[i] == d) return i;
    throw GridMismatchError("distance " + std::to_string(d) + " not on the series grid");
}

void CorrelationSeries::check_invariants() const {
    if (values.size() != times.size() * distances.size())
        throw Error("correlation series: value array shape mismatch");
    if (!stderrs.empty() && stderrs.size() != values.size())
        throw Error("correlation series: stderr array shape mismatch");
    for (std::size_t it = 0; it < times.size(); ++it) {
        for (std::size_t id = 0; id < distances.size(); ++id) {
            double v = value(it, id);
            double s = stderr_at(it, id);
            if (!std::isfinite(v))
                throw Error("correlation series: non-finite value");
            if (distances[id] == 0 && v != 1.0)
                throw Error("correlation series: C(t, d=0) must equal 1");
            if (std::abs(v) > 1.0 + 3.0 * s + 1e-9)
                throw Error("correlation series: |C| exceeds 1 + 3*stderr");
        }
    }
}

}  // namespace tfim
