#include "tfim/ed.hpp"

#include <Eigen/Dense>
#include <bit>
#include <cmath>

#include "tfim/errors.hpp"

namespace tfim::ed {

namespace {

void check_size(int n) {
    if (n < 2 || n % 2 != 0) throw SizeError("ED requires even n >= 2");
    if (n > kMaxSites) throw SizeError("ED limited to n <= 14");
}

struct Sector {
    int n;
    std::vector<unsigned> basis;
    std::vector<int> lookup;
    std::vector<double> diag;  // field term for current h
};

Sector build_sector(int n, double h) {
    Sector s;
    s.n = n;
    unsigned full = 1u << n;
    s.lookup.assign(full, -1);
    for (unsigned b = 0; b < full; ++b) {
        if (std::popcount(b) % 2 == 0) {
            s.lookup[b] = static_cast<int>(s.basis.size());
            s.basis.push_back(b);
        }
    }
    s.diag.resize(s.basis.size());
    for (std::size_t i = 0; i < s.basis.size(); ++i)
        s.diag[i] = -h * (n - 2 * std::popcount(s.basis[i]));
    return s;
}

// y += H x with H = -J sum sx sx - h sum sz on the even sector.
template <class T>
void apply_h(const Sector& s, double j, const std::vector<T>& x, std::vector<T>& y) {
    const int n = s.n;
    for (std::size_t i = 0; i < s.basis.size(); ++i) {
        T acc = s.diag[i] * x[i];
        unsigned b = s.basis[i];
        for (int site = 0; site < n; ++site) {
            unsigned mask = (1u << site) | (1u << ((site + 1) % n));
            acc += -j * x[static_cast<std::size_t>(s.lookup[b ^ mask])];
        }
        y[i] = acc;
    }
}

Eigen::MatrixXd dense_h(const Sector& s, double j) {
    const int dim = static_cast<int>(s.basis.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
        h(i, i) = s.diag[static_cast<std::size_t>(i)];
        unsigned b = s.basis[static_cast<std::size_t>(i)];
        for (int site = 0; site < s.n; ++site) {
            unsigned mask = (1u << site) | (1u << ((site + 1) % s.n));
            h(s.lookup[b ^ mask], i) += -j;
        }
    }
    return h;
}

// Lanczos with full reorthogonalization; returns (e0, ground vector).
std::pair<double, std::vector<double>> lanczos_ground(const Sector& s, double j) {
    const std::size_t dim = s.basis.size();
    const int max_iter = 400;
    std::vector<std::vector<double>> vs;
    std::vector<double> alpha, beta;
    std::vector<double> v(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
    std::vector<double> w(dim);
    double e_prev = 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
    int m = 0;
    for (; m < max_iter; ++m) {
        vs.push_back(v);
        apply_h(s, j, v, w);
        double a = 0.0;
        for (std::size_t i = 0; i < dim; ++i) a += v[i] * w[i];
        alpha.push_back(a);
        for (std::size_t i = 0; i < dim; ++i)
            w[i] -= a * v[i] + (m > 0 ? beta.back() * vs[static_cast<std::size_t>(m) - 1][i] : 0.0);
        for (const auto& u : vs) {  // full reorthogonalization
            double proj = 0.0;
            for (std::size_t i = 0; i < dim; ++i) proj += u[i] * w[i];
            for (std::size_t i = 0; i < dim; ++i) w[i] -= proj * u[i];
        }
        double b = 0.0;
        for (double x : w) b += x * x;
        b = std::sqrt(b);
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, m + 1);
        for (int i = 0; i <= m; ++i) {
            t(i, i) = alpha[static_cast<std::size_t>(i)];
            if (i > 0) t(i, i - 1) = t(i - 1, i) = beta[static_cast<std::size_t>(i) - 1];
        }
        tri.compute(t);
        double e0 = tri.eigenvalues()(0);
        if (m > 4 && std::abs(e0 - e_prev) < 1e-13 * (1.0 + std::abs(e0)) && b < 1e-8)
            break;
        if (m > 4 && std::abs(e0 - e_prev) < 1e-14 * (1.0 + std::abs(e0)))
            break;
        e_prev = e0;
        if (b < 1e-14) break;  // invariant subspace exhausted
        beta.push_back(b);
        for (std::size_t i = 0; i < dim; ++i) v[i] = w[i] / b;
    }
    int kdim = static_cast<int>(alpha.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(kdim, kdim);
    for (int i = 0; i < kdim; ++i) {
        t(i, i) = alpha[static_cast<std::size_t>(i)];
        if (i > 0) t(i, i - 1) = t(i - 1, i) = beta[static_cast<std::size_t>(i) - 1];
    }
    tri.compute(t);
    Eigen::VectorXd y = tri.eigenvectors().col(0);
    std::vector<double> ground(dim, 0.0);
    for (int i = 0; i < kdim && i < static_cast<int>(vs.size()); ++i)
        for (std::size_t p = 0; p < dim; ++p) ground[p] += y(i) * vs[static_cast<std::size_t>(i)][p];
    double norm = 0.0;
    for (double x : ground) norm += x * x;
    norm = std::sqrt(norm);
    if (!(norm > 0.0)) throw ConvergenceError("Lanczos ground state failed");
    for (double& x : ground) x /= norm;
    return {tri.eigenvalues()(0), ground};
}

using cvec = std::vector<std::complex<double>>;

// Krylov propagator: psi <- exp(-i H tau) psi, one substep.
void krylov_step(const Sector& s, double j, cvec& psi, double tau, int m_max = 40) {
    const std::size_t dim = psi.size();
    double nrm = 0.0;
    for (auto& c : psi) nrm += std::norm(c);
    nrm = std::sqrt(nrm);
    std::vector<cvec> vs;
    std::vector<double> alpha, beta;
    cvec v(dim), w(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = psi[i] / nrm;
    int m = 0;
    for (; m < m_max; ++m) {
        vs.push_back(v);
        apply_h(s, j, v, w);
        std::complex<double> a{};
        for (std::size_t i = 0; i < dim; ++i) a += std::conj(v[i]) * w[i];
        alpha.push_back(a.real());
        for (std::size_t i = 0; i < dim; ++i)
            w[i] -= a.real() * v[i] +
                    (m > 0 ? beta.back() * vs[static_cast<std::size_t>(m) - 1][i] : std::complex<double>{});
        for (const auto& u : vs) {
            std::complex<double> proj{};
            for (std::size_t i = 0; i < dim; ++i) proj += std::conj(u[i]) * w[i];
            for (std::size_t i = 0; i < dim; ++i) w[i] -= proj * u[i];
        }
        double b = 0.0;
        for (auto& c : w) b += std::norm(c);
        b = std::sqrt(b);
        if (b < 1e-12) { ++m; break; }
        if (m + 1 >= m_max) { ++m; break; }
        beta.push_back(b);
        for (std::size_t i = 0; i < dim; ++i) v[i] = w[i] / b;
    }
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        t(i, i) = alpha[static_cast<std::size_t>(i)];
        if (i > 0) t(i, i - 1) = t(i - 1, i) = beta[static_cast<std::size_t>(i) - 1];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(m);
    e1(0) = 1.0;
    Eigen::VectorXcd coeff =
        es.eigenvectors() *
        ((-std::complex<double>(0, 1) * tau * es.eigenvalues().array()).exp() *
         (es.eigenvectors().transpose() * e1.real()).array().cast<std::complex<double>>())
            .matrix();
    for (std::size_t i = 0; i < dim; ++i) {
        std::complex<double> acc{};
        for (int q = 0; q < m; ++q) acc += coeff(q) * vs[static_cast<std::size_t>(q)][i];
        psi[i] = nrm * acc;
    }
}

void krylov_evolve(const Sector& s, double j, double h, cvec& psi, double t) {
    if (t == 0.0) return;
    // spectral width bounds the useful substep; 30 rad per 40-dim subspace
    double hnorm = std::abs(h) * s.n + std::abs(j) * s.n + 1.0;
    int nsub = std::max(1, static_cast<int>(std::ceil(std::abs(t) * hnorm / 12.0)));
    double tau = t / nsub;
    for (int i = 0; i < nsub; ++i) krylov_step(s, j, psi, tau);
}

}  // namespace

double DenseState::norm() const {
    double s = 0.0;
    for (const auto& c : amp) s += std::norm(c);
    return std::sqrt(s);
}

DenseState ground_state(int n, double h, double j) {
    check_size(n);
    if (!(j > 0.0)) throw DomainError("ground state requires J > 0");
    if (h < 0.0) throw DomainError("ground state requires h >= 0");
    Sector s = build_sector(n, h);
    std::vector<double> gs;
    if (n <= 10) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_h(s, j));
        if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed");
        gs.assign(s.basis.size(), 0.0);
        for (std::size_t i = 0; i < s.basis.size(); ++i) gs[i] = es.eigenvectors()(static_cast<int>(i), 0);
    } else {
        gs = lanczos_ground(s, j).second;
    }
    DenseState out;
    out.n = n;
    out.amp.assign(1u << n, {});
    for (std::size_t i = 0; i < s.basis.size(); ++i) out.amp[s.basis[i]] = gs[i];
    return out;
}

double ground_energy(int n, double h, double j) {
    check_size(n);
    Sector s = build_sector(n, h);
    if (n <= 10) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_h(s, j));
        return es.eigenvalues()(0);
    }
    return lanczos_ground(s, j).first;
}

EdSolver::EdSolver(const QuenchSpec& spec) : spec_(spec) {
    validate_spec(spec_);
    check_size(spec_.n);
    Sector si = build_sector(spec_.n, spec_.h_i);
    basis_ = si.basis;
    lookup_ = si.lookup;
    dim_ = static_cast<int>(basis_.size());
    if (spec_.n <= 10) {
        dense_ = true;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_h(si, spec_.j));
        psi0_.assign(static_cast<std::size_t>(dim_), 0.0);
        for (int i = 0; i < dim_; ++i) psi0_[static_cast<std::size_t>(i)] = es.eigenvectors()(i, 0);
        Sector sf = build_sector(spec_.n, spec_.h_f);
        diag_ = sf.diag;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ef(dense_h(sf, spec_.j));
        evals_.assign(ef.eigenvalues().data(), ef.eigenvalues().data() + dim_);
        evecs_.resize(static_cast<std::size_t>(dim_) * dim_);
        Eigen::Map<Eigen::MatrixXd>(evecs_.data(), dim_, dim_) = ef.eigenvectors();
    } else {
        psi0_ = lanczos_ground(si, spec_.j).second;
        Sector sf = build_sector(spec_.n, spec_.h_f);
        diag_ = sf.diag;
    }
}

std::vector<std::complex<double>> EdSolver::evolved(double t) const {
    cvec psi(static_cast<std::size_t>(dim_));
    if (dense_) {
        Eigen::Map<const Eigen::MatrixXd> v(evecs_.data(), dim_, dim_);
        Eigen::Map<const Eigen::VectorXd> p0(psi0_.data(), dim_);
        Eigen::VectorXd c = v.transpose() * p0;
        Eigen::VectorXcd ph(dim_);
        for (int i = 0; i < dim_; ++i)
            ph(i) = std::polar(c(i), -evals_[static_cast<std::size_t>(i)] * t);
        Eigen::VectorXcd res = v * ph;
        for (int i = 0; i < dim_; ++i) psi[static_cast<std::size_t>(i)] = res(i);
    } else {
        for (int i = 0; i < dim_; ++i) psi[static_cast<std::size_t>(i)] = psi0_[static_cast<std::size_t>(i)];
        Sector sf;
        sf.n = spec_.n;
        sf.basis = basis_;
        sf.lookup = lookup_;
        sf.diag = diag_;
        krylov_evolve(sf, spec_.j, spec_.h_f, psi, t);
    }
    double nrm = 0.0;
    for (auto& c : psi) nrm += std::norm(c);
    nrm = std::sqrt(nrm);
    if (std::abs(nrm - 1.0) > 1e-9)
        throw ConvergenceError("ED evolution norm drift exceeds 1e-9");
    return psi;
}

namespace {

double sxsx_expectation(const std::vector<unsigned>& basis, const std::vector<int>& lookup,
                        const cvec& psi, int n, int d, int origin) {
    if (d == 0) {
        double s = 0.0;
        for (const auto& c : psi) s += std::norm(c);
        return s;
    }
    int s0 = origin % n;
    int s1 = (origin + d) % n;
    unsigned mask = (1u << s0) | (1u << s1);
    std::complex<double> acc{};
    for (std::size_t i = 0; i < basis.size(); ++i) {
        int jdx = lookup[basis[i] ^ mask];
        acc += std::conj(psi[static_cast<std::size_t>(jdx)]) * psi[i];
    }
    return acc.real();
}

}  // namespace

double EdSolver::correlate(double t, int d, int origin) const {
    if (d < 0 || d > spec_.n) throw DomainError("ED correlator distance out of range");
    cvec psi = evolved(t);
    return sxsx_expectation(basis_, lookup_, psi, spec_.n, d, origin);
}

CorrelationSeries EdSolver::series() const {
    CorrelationSeries out;
    out.times = spec_.t_grid;
    for (int d = 0; d <= spec_.n / 2; ++d) out.distances.push_back(d);
    out.values.assign(out.times.size() * out.distances.size(), 0.0);
    for (std::size_t it = 0; it < out.times.size(); ++it) {
        cvec psi = evolved(out.times[it]);
        for (std::size_t id = 0; id < out.distances.size(); ++id) {
            int d = out.distances[id];
            if (d == 0) {
                out.values[out.index(it, id)] = 1.0;
                continue;
            }
            double acc = 0.0;
            for (int origin = 0; origin < spec_.n; ++origin)
                acc += sxsx_expectation(basis_, lookup_, psi, spec_.n, d, origin);
            out.values[out.index(it, id)] = acc / spec_.n;
        }
    }
    return out;
}

double EdSolver::energy(double t) const {
    cvec psi = evolved(t);
    cvec hpsi(psi.size());
    Sector sf;
    sf.n = spec_.n;
    sf.basis = basis_;
    sf.lookup = lookup_;
    sf.diag = diag_;
    apply_h(sf, spec_.j, psi, hpsi);
    std::complex<double> acc{};
    for (std::size_t i = 0; i < psi.size(); ++i) acc += std::conj(psi[i]) * hpsi[i];
    return acc.real();
}

DenseState EdSolver::state(double t) const {
    cvec psi = evolved(t);
    DenseState out;
    out.n = spec_.n;
    out.amp.assign(1u << spec_.n, {});
    for (std::size_t i = 0; i < basis_.size(); ++i) out.amp[basis_[i]] = psi[i];
    return out;
}

}  // namespace tfim::ed
