#ifndef TFIM_FERMION_HPP
#define TFIM_FERMION_HPP

#include <complex>
#include <vector>

#include "tfim/correlation_series.hpp"
#include "tfim/quench_spec.hpp"

namespace tfim::fermion {

// Bogoliubov mode frequency omega_BF(k; h) = 2 sqrt(h^2 + 1 - 2 h cos k),
// fields in units of J.
double dispersion(double k, double h);

// d omega_BF / dk, evaluated analytically.
double group_velocity(double k, double h);

// max over k in (0, pi): exactly 2 for h >= 1, 2h for h < 1.
double max_group_velocity(double h);

// Conserved occupation of the post-quench Bogoliubov modes,
//   n_BF(k) = 1/2 - 2 [h_i h_f + 1 - (h_i + h_f) cos k] / (omega_f omega_i).
// Throws DomainError when either dispersion vanishes (k=0 at h=1).
double mode_occupation(double k, double h_i, double h_f);

// Amplitude of the stationary exponential term, defined for h_i >= h_f,
// h_i > 1; equal fields give 0.
double amplitude_c0(double h_i, double h_f);

// Closed-form stationary short-distance correlation length
//   xi_1 = 1 / ln(2 h_i h_f / (h_i + h_f)).
double xi1_closed(double h_i, double h_f);

// h_1 = (1 + h_f h_i + sqrt((h_f^2-1)(h_i^2-1))) / (h_f + h_i).
double h1_field(double h_i, double h_f);

// xi_1 from its integral representation,
//   1/xi_1 = ln min(h_i, h_1) - (1/2pi) Int dk ln|1 - 2 n_BF(k)|,
// the step factors restricting the first term to h_i, h_f > 1.
double xi1_integral(double h_i, double h_f);

// Universal late-time crossover length 1/ln(2 eps + 2) for h_i -> inf.
double xi_gge(double epsilon);

// Even-fermion-parity (antiperiodic) momenta of an n-site ring:
// +-(2m-1) pi / n, m = 1..n/2, sorted ascending.
std::vector<double> ns_momenta(int n);

// Per-mode data for the positive-k half grid. Frequencies and occupations
// come from numerically diagonalized 2x2 Bogoliubov blocks; angles from the
// closed form. The two routes are cross-checked in the test suite.
struct ModeData {
    double k;
    double omega_i, omega_f;  // units of J
    double theta_i, theta_f;  // Bogoliubov angles, radians
    double n_bf;              // in [0, 1)
};
std::vector<ModeData> mode_data(const QuenchSpec& spec);

// Connected Majorana two-point matrix Gamma(t), real antisymmetric 2N x 2N.
// Ordering: index 2l is x_l = c_l + c+_l, index 2l+1 is y_l = i(c_l - c+_l).
struct MajoranaCorrMatrix {
    int n = 0;
    std::vector<double> gamma;  // (2n)^2 row-major
    double at(int mu, int nu) const { return gamma[static_cast<std::size_t>(mu) * 2 * n + nu]; }
};

// Numerically exact quench correlators. Each momentum block is a 2x2
// problem in the span of {|0>, |k,-k>}; the initial amplitudes are evolved
// with the final-field block exactly (eigendecomposition, no stepping).
// String correlators are Pfaffians of 2d x 2d submatrices of Gamma(t).
class ExactSolver {
  public:
    explicit ExactSolver(const QuenchSpec& spec);

    // <sx_0(t) sx_d(t)>; d=0 returns exactly 1. Requires 0 <= d <= N/2.
    double correlator(double t, int d) const;

    // Full series over spec.t_grid and d = 0..N/2 (stderr empty: exact).
    CorrelationSeries series() const;

    MajoranaCorrMatrix covariance(double t) const;

    const QuenchSpec& spec() const { return spec_; }

  private:
    struct Mode {
        double k;
        std::complex<double> a0, b0;    // initial pair amplitudes
        double lam0, lam1;              // final-block eigenvalues
        std::complex<double> v00, v10, v01, v11;  // final-block eigenvectors
    };
    struct Kernels {
        int rmax;
        std::vector<double> s, q;  // index r + rmax, r in [-rmax, rmax]
        double sk(int r) const { return s[static_cast<std::size_t>(r + rmax)]; }
        double qk(int r) const { return q[static_cast<std::size_t>(r + rmax)]; }
    };
    Kernels kernels(double t, int rmax) const;
    double correlator_from_kernels(const Kernels& ker, int d) const;

    QuenchSpec spec_;
    double hi_, hf_;  // fields in units of J
    std::vector<Mode> modes_;

    friend class ExactSolverTestHook;
};

// Approximate analytic correlator for quenches within the paramagnetic
// phase (h_i > h_f > 1): stationary exponential term plus the oscillatory
// mode integral with the light-cone exponent, via deterministic midpoint
// quadrature (4096 nodes, doubled until 1e-6 relative convergence).
double approx_correlator(const QuenchSpec& spec, double t, int d);

}  // namespace tfim::fermion

#endif
