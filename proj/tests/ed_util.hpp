// Test-only brute-force reference: dense operators on the full 2^n space,
// built from Kronecker products, with no basis reduction. Independent of
// the library's sector-based ED path, so the two can validate each other.
#ifndef TFIM_TESTS_ED_UTIL_HPP
#define TFIM_TESTS_ED_UTIL_HPP

#include <Eigen/Dense>
#include <complex>
#include <map>

namespace ed_util {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Mat pauli(int axis) {
    Mat m(2, 2);
    const std::complex<double> I(0, 1);
    switch (axis) {
        case 0: m << 0, 1, 1, 0; break;
        case 1: m << 0, -I, I, 0; break;
        default: m << 1, 0, 0, -1; break;
    }
    return m;
}

// operator acting with the given single-site matrices; site i is bit i,
// i.e. the i-th Kronecker factor from the right
inline Mat op_on_sites(int n, const std::map<int, Mat>& ops) {
    Mat m = Mat::Identity(1, 1);
    for (int i = 0; i < n; ++i) {
        auto it = ops.find(i);
        Mat site = it == ops.end() ? Mat::Identity(2, 2) : it->second;
        Mat next(site.rows() * m.rows(), site.cols() * m.cols());
        for (int r = 0; r < site.rows(); ++r)
            for (int c = 0; c < site.cols(); ++c)
                next.block(r * m.rows(), c * m.cols(), m.rows(), m.cols()) = site(r, c) * m;
        m = next;
    }
    return m;
}

inline Mat hamiltonian(int n, double h, double j) {
    long dim = 1L << n;
    Mat ham = Mat::Zero(dim, dim);
    for (int i = 0; i < n; ++i) {
        ham -= j * op_on_sites(n, {{i, pauli(0)}, {(i + 1) % n, pauli(0)}});
        ham -= h * op_on_sites(n, {{i, pauli(2)}});
    }
    return ham;
}

struct Evolver {
    Eigen::VectorXd evals;
    Mat evecs;

    Evolver(int n, double h, double j) {
        Eigen::SelfAdjointEigenSolver<Mat> es(hamiltonian(n, h, j));
        evals = es.eigenvalues();
        evecs = es.eigenvectors();
    }
    Vec evolve(const Vec& psi0, double t) const {
        Vec c = evecs.adjoint() * psi0;
        for (long i = 0; i < evals.size(); ++i)
            c(i) *= std::exp(std::complex<double>(0, -evals(i) * t));
        return evecs * c;
    }
};

}  // namespace ed_util

#endif
