#ifndef TFIM_PFAFFIAN_HPP
#define TFIM_PFAFFIAN_HPP

#include <cstddef>
#include <vector>

namespace tfim {

// Pfaffian of a real antisymmetric n x n matrix (row-major, modified in
// place) by skew-symmetric tridiagonalization: Parlett-Reid elimination
// with partial pivoting, permutation signs tracked in the result.
// Returns 0 for odd n or a structurally singular column.
double pfaffian_inplace(std::vector<double>& a, std::size_t n);

// Copying convenience wrapper.
double pfaffian(const std::vector<double>& a, std::size_t n);

}  // namespace tfim

#endif
