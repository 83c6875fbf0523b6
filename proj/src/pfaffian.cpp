#include "tfim/pfaffian.hpp"

#include <algorithm>
#include <cmath>

namespace tfim {

namespace {

void swap_rows_cols(std::vector<double>& a, std::size_t n, std::size_t i, std::size_t j) {
    for (std::size_t c = 0; c < n; ++c) std::swap(a[i * n + c], a[j * n + c]);
    for (std::size_t r = 0; r < n; ++r) std::swap(a[r * n + i], a[r * n + j]);
}

}  // namespace

double pfaffian_inplace(std::vector<double>& a, std::size_t n) {
    if (n % 2 != 0) return 0.0;
    double pf = 1.0;
    for (std::size_t k = 0; k + 1 < n; k += 2) {
        // largest |a(i,k)|, i > k, as pivot for row k+1
        std::size_t piv = k + 1;
        double best = std::abs(a[(k + 1) * n + k]);
        for (std::size_t i = k + 2; i < n; ++i) {
            double v = std::abs(a[i * n + k]);
            if (v > best) { best = v; piv = i; }
        }
        if (best == 0.0) return 0.0;
        if (piv != k + 1) {
            swap_rows_cols(a, n, k + 1, piv);
            pf = -pf;
        }
        double akk1 = a[k * n + k + 1];
        pf *= akk1;
        if (k + 2 < n) {
            // eliminate row/column k using Gauss congruence transforms:
            // A <- M A M^T leaves the Pfaffian unchanged
            for (std::size_t i = k + 2; i < n; ++i) {
                double tau = a[k * n + i] / akk1;
                if (tau == 0.0) continue;
                for (std::size_t jj = k + 2; jj < n; ++jj)
                    a[i * n + jj] += tau * a[jj * n + k + 1];
            }
            for (std::size_t i = k + 2; i < n; ++i) {
                double tau = a[k * n + i] / akk1;
                if (tau == 0.0) continue;
                for (std::size_t jj = k + 2; jj < n; ++jj)
                    a[jj * n + i] -= tau * a[jj * n + k + 1];
            }
        }
    }
    return pf;
}

double pfaffian(const std::vector<double>& a, std::size_t n) {
    std::vector<double> copy(a);
    return pfaffian_inplace(copy, n);
}

}  // namespace tfim
