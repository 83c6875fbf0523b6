#ifndef TFIM_ED_HPP
#define TFIM_ED_HPP

#include <complex>
#include <vector>

#include "tfim/correlation_series.hpp"
#include "tfim/quench_spec.hpp"

namespace tfim::ed {

// Brute-force diagonalization is ground truth only up to this size.
inline constexpr int kMaxSites = 14;

// Full 2^n amplitude vector in the sz product basis (bit i set = spin i down).
struct DenseState {
    int n = 0;
    std::vector<std::complex<double>> amp;
    double norm() const;
};

// Lowest eigenvector of the periodic chain at field h. The computation is
// restricted to the even-fermion-parity sector (even number of down spins),
// which contains the ground state for h > 0 and resolves the ferromagnetic
// near-degeneracy in favour of the even member.
DenseState ground_state(int n, double h, double j);

// Ground-state energy, same sector.
double ground_energy(int n, double h, double j);

// Quench evolution |psi(t)> = exp(-i H(h_f) t) |gs(h_i)> and correlators.
// Dense eigendecomposition (exact propagator) for n <= 10, Lanczos/Krylov
// stepping for n = 12, 14.
class EdSolver {
  public:
    explicit EdSolver(const QuenchSpec& spec);

    // <psi(t)| sx_origin sx_{origin+d} |psi(t)>; aborts if the evolved
    // norm drifts from 1 by more than 1e-9.
    double correlate(double t, int d, int origin = 0) const;

    // Series over spec.t_grid, d = 0..N/2, translation-averaged.
    CorrelationSeries series() const;

    // <psi(t)| H(h_f) |psi(t)> for conservation checks.
    double energy(double t) const;

    DenseState state(double t) const;

  private:
    std::vector<std::complex<double>> evolved(double t) const;

    QuenchSpec spec_;
    int dim_ = 0;                      // even-sector dimension
    std::vector<unsigned> basis_;      // sector index -> bit pattern
    std::vector<int> lookup_;          // bit pattern -> sector index or -1
    std::vector<double> psi0_;         // sector ground state of H(h_i), real
    bool dense_ = false;
    std::vector<double> evals_;        // dense path: spectrum of H(h_f)
    std::vector<double> evecs_;        // dense path: column-major eigenvectors
    std::vector<double> diag_;         // sector diagonal of H(h_f)
};

}  // namespace tfim::ed

#endif
