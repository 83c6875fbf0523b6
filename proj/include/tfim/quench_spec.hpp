#ifndef TFIM_QUENCH_SPEC_HPP
#define TFIM_QUENCH_SPEC_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace tfim {

// Sudden-quench experiment on the periodic transverse-field Ising chain
//   H = -J sum_i sx_i sx_{i+1} - h sum_i sz_i ,
// prepared in the ground state at field h_i, evolved with h_f from t=0.
// All couplings are in units of J (h_c = J = 1); times in units of 1/J.
// Immutable value type; every solver consumes it unchanged.
struct QuenchSpec {
    int n = 20;                  // site count, even, >= 2
    double j = 1.0;              // coupling, > 0
    double h_i = 1000.0;         // initial transverse field, > 0
    double h_f = 1.1;            // final transverse field, >= 0
    std::vector<double> t_grid;  // strictly increasing, entries >= 0

    bool operator==(const QuenchSpec&) const = default;
};

// Distance from the quantum critical point h_c = 1.
struct Epsilon {
    double value;  // h_f - 1, > -1

    static Epsilon from_field(double h_f);
    double field() const { return value + 1.0; }
};

// Returns the spec unchanged if every invariant holds; throws
// ValidationError naming the first violated invariant otherwise.
// Idempotent by construction.
const QuenchSpec& validate_spec(const QuenchSpec& spec);

// Uniform grid helper: t_start, t_start+t_step, ..., up to t_end inclusive
// (within half a step of rounding).
std::vector<double> uniform_grid(double t_start, double t_end, double t_step);

// Plain-text key=value spec file.
//
//   # comment
//   n = 20
//   j = 1
//   h_i = 1000
//   h_f = 1.1
//   t_list = 0,0.5,1          (or t_start/t_end/t_step)
//
// Unknown keys are rejected. parse/serialize round-trip is the identity.
QuenchSpec parse_spec(std::istream& in);
QuenchSpec parse_spec_file(const std::string& path);
std::string serialize_spec(const QuenchSpec& spec);
void write_spec_file(const QuenchSpec& spec, const std::string& path);

// FNV-1a of the canonical serialization; used by checkpoint headers.
std::uint64_t spec_hash(const QuenchSpec& spec);

}  // namespace tfim

#endif
