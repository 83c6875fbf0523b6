#ifndef TFIM_PHASE_POINT_HPP
#define TFIM_PHASE_POINT_HPP

#include <array>
#include <complex>
#include <vector>

#include "tfim/philox.hpp"

namespace tfim::dtwa {

enum class Rep { A, APrime };
enum class Scheme { S4, S8 };

// 2x2 complex matrix, row-major.
using Mat2 = std::array<std::complex<double>, 4>;

// Discrete phase-point operator A_alpha (representation A) or A'_alpha:
//   A  = 1/2 [ (-1)^{a1} sx + (-1)^{a1+a2} sy + (-1)^{a2} sz + 1 ]
//   A' = 1/2 [ (-1)^{a1} sx - (-1)^{a1+a2} sy + (-1)^{a2} sz + 1 ]
// Each operator pins one corner of the spin cube; the two representations
// together cover all eight corners.
struct PhasePointOperator {
    Rep rep;
    int a1, a2;  // in {0, 1}

    double sx() const { return a1 ? -1.0 : 1.0; }
    double sy() const {
        double v = ((a1 + a2) % 2) ? -1.0 : 1.0;
        return rep == Rep::A ? v : -v;
    }
    double sz() const { return a2 ? -1.0 : 1.0; }

    Mat2 matrix() const;
};

// All four operators of one representation, alpha = (a1, a2) in row order
// (0,0), (1,0), (0,1), (1,1).
std::array<PhasePointOperator, 4> representation(Rep rep);

// Wigner weights w(alpha) = 1/2 tr(rho A_alpha) of a single-site density
// operator (Hermitian, unit trace). The weights of any valid rho sum to 1;
// a weight below -1e-12 makes the state unsampleable in this representation
// and throws DomainError when sampling is requested.
std::array<double, 4> wigner_weights(const Mat2& rho, Rep rep);

// Fully z-polarized single-site density operator (sz + 1)/2.
Mat2 z_polarized_site();

// Per-site classical spin triples (sx, sy, sz), flat layout [site*3 + comp].
struct SpinConfiguration {
    int n = 0;
    std::vector<double> s;
    double& at(int site, int comp) { return s[static_cast<std::size_t>(site) * 3 + comp]; }
    double at(int site, int comp) const { return s[static_cast<std::size_t>(site) * 3 + comp]; }
};

// Draws one initial configuration for the z-polarized product state.
// S4 samples representation A only; S8 picks A or A' per site with equal
// probability before drawing from that representation's weights. Every
// site consumes exactly two uniforms, keeping the stream layout fixed.
SpinConfiguration sample_initial(int n, Scheme scheme, PhiloxRng& rng);

// General form used by sample_initial: site density operator rho at every
// site. Throws on negative weights.
SpinConfiguration sample_initial_product(int n, const Mat2& rho, Scheme scheme, PhiloxRng& rng);

}  // namespace tfim::dtwa

#endif
