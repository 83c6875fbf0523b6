#ifndef TFIM_EOM_HPP
#define TFIM_EOM_HPP

#include <cstddef>
#include <vector>

#include "tfim/phase_point.hpp"

namespace tfim::dtwa {

// Mean-field (first-order truncation) equations of motion for classical
// spins on the periodic chain, flat state layout [site*3 + comp]:
//   dsx_i = 2 h sy_i
//   dsy_i = -2 h sx_i + 2 J sz_i (sx_{i-1} + sx_{i+1})
//   dsz_i = -2 J sy_i (sx_{i-1} + sx_{i+1})
void eom_first_order(const std::vector<double>& s, double h, double j,
                     std::vector<double>& ds);

// Classical interaction energy H_W = -J sum sx_i sx_{i+1} - h sum sz_i,
// conserved along first-order trajectories.
double classical_energy(const std::vector<double>& s, double h, double j);

// State layout at second order: per-site means followed by connected pair
// correlators c^{ab}_{ij} for ordered pairs i < j, nine components each.
struct SecondOrderLayout {
    int n = 0;

    std::size_t npairs() const { return static_cast<std::size_t>(n) * (n - 1) / 2; }
    std::size_t dim() const { return 3 * static_cast<std::size_t>(n) + 9 * npairs(); }
    std::size_t mean_index(int site, int comp) const {
        return static_cast<std::size_t>(site) * 3 + static_cast<std::size_t>(comp);
    }
    std::size_t pair_index(int i, int j) const {  // requires i < j
        return static_cast<std::size_t>(i) * n - static_cast<std::size_t>(i) * (i + 1) / 2 +
               static_cast<std::size_t>(j - i - 1);
    }
    std::size_t corr_index(int i, int j, int a, int b) const {
        if (i < j)
            return 3 * static_cast<std::size_t>(n) + 9 * pair_index(i, j) +
                   static_cast<std::size_t>(a) * 3 + static_cast<std::size_t>(b);
        return 3 * static_cast<std::size_t>(n) + 9 * pair_index(j, i) +
               static_cast<std::size_t>(b) * 3 + static_cast<std::size_t>(a);
    }
};

// Second-order truncation of the moment hierarchy. The equations for the
// means and pair correlators are produced at construction by symbolic
// commutator expansion of the Hamiltonian against each target moment;
// three-site expectations are closed by dropping the connected three-point
// cumulant, <ABC> -> <AB><C> + <AC><B> + <BC><A> - 2<A><B><C>. The test
// suite checks the generated right-hand side against numerical
// differentiation of the ED oracle on product states, where the closure is
// exact.
//
// An instance carries evaluation scratch space: share read-only across
// calls from one thread only (the ensemble runner builds one per worker).
class SecondOrderEom {
  public:
    SecondOrderEom(int n, double h, double j);

    void operator()(const std::vector<double>& y, std::vector<double>& dy) const;

    const SecondOrderLayout& layout() const { return layout_; }

  private:
    struct MeanRef {
        int site;
        int comp;
    };
    struct CorrRef {
        int si, sj, ai, aj;
    };
    struct Term {
        double coef;
        int nm = 0;
        MeanRef m[3];
        bool has_c = false;
        CorrRef c;
    };

    double eval_terms(const std::vector<Term>& terms, int shift,
                      const std::vector<double>& y) const;

    SecondOrderLayout layout_;
    double h_, j_;
    std::vector<Term> dmean_[3];            // target s^a_0, shifted per site
    std::vector<std::vector<Term>> dpair_;  // [(delta-1)*9 + a*3 + b], target s^a_0 s^b_delta
    mutable std::vector<double> dmean_cache_;
};

// Second-order initial condition from a sampled spin configuration:
// means take the sampled values, all connected correlators start at zero.
std::vector<double> second_order_init(const SpinConfiguration& cfg);

}  // namespace tfim::dtwa

#endif
