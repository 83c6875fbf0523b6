#ifndef TFIM_CORRELATION_SERIES_HPP
#define TFIM_CORRELATION_SERIES_HPP

#include <cstddef>
#include <vector>

namespace tfim {

// C^xx_d(t) on a (time, distance) grid with optional per-point standard
// errors (empty for exact methods, where the error is identically zero).
// Row-major over times; distances are 0..N/2 by convention.
struct CorrelationSeries {
    std::vector<double> times;
    std::vector<int> distances;
    std::vector<double> values;  // times.size() * distances.size(), t-major
    std::vector<double> stderrs; // same shape, or empty

    std::size_t index(std::size_t it, std::size_t id) const {
        return it * distances.size() + id;
    }
    double value(std::size_t it, std::size_t id) const { return values[index(it, id)]; }
    double stderr_at(std::size_t it, std::size_t id) const {
        return stderrs.empty() ? 0.0 : stderrs[index(it, id)];
    }
    bool has_stderr() const { return !stderrs.empty(); }

    // Index of an exact grid entry; throws GridMismatchError if absent.
    std::size_t time_index(double t) const;
    std::size_t distance_index(int d) const;

    // Checks the structural invariants: shape consistency, values at d=0
    // equal to 1, |C| <= 1 + 3*stderr. Throws Error on violation.
    void check_invariants() const;
};

}  // namespace tfim

#endif
