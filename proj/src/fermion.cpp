#include "tfim/fermion.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "tfim/errors.hpp"
#include "tfim/pfaffian.hpp"

namespace tfim::fermion {

namespace {

constexpr double kPi = std::numbers::pi;

using Eigen::Matrix2cd;
using Eigen::Vector2cd;
using std::complex;

// Pair block of the fermionized chain in the span {|0>, c+_k c+_{-k} |0>},
// fields in units of J.
Matrix2cd pair_block(double k, double h) {
    Matrix2cd m;
    const complex<double> I(0.0, 1.0);
    m(0, 0) = 0.0;
    m(0, 1) = 2.0 * I * std::sin(k);
    m(1, 0) = -2.0 * I * std::sin(k);
    m(1, 1) = 4.0 * (h - std::cos(k));
    return m;
}

struct MidpointResult {
    double value;
    bool singular;
};

// Midpoint sum of f over [a, b] with m nodes; nodes avoid interval ends,
// so integrable endpoint singularities never get sampled exactly.
template <class F>
double midpoint(F&& f, double a, double b, int m) {
    double h = (b - a) / m;
    double acc = 0.0, comp = 0.0;
    for (int i = 0; i < m; ++i) {
        double x = a + (i + 0.5) * h;
        double y = f(x) - comp;
        double t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    return acc * h;
}

// Doubling refinement with the 1e-6 relative convergence criterion.
template <class F>
double refine(F&& f, double a, double b, const char* what) {
    int m = 4096;
    double prev = midpoint(f, a, b, m);
    for (int iter = 0; iter < 8; ++iter) {
        m *= 2;
        double cur = midpoint(f, a, b, m);
        double scale = std::max(std::abs(cur), 1e-12);
        if (std::abs(cur - prev) <= 1e-6 * scale) return cur;
        prev = cur;
    }
    throw ConvergenceError(std::string("quadrature did not converge: ") + what);
}

}  // namespace

double dispersion(double k, double h) {
    if (h < 0.0) throw DomainError("dispersion requires h >= 0");
    double arg = h * h + 1.0 - 2.0 * h * std::cos(k);
    return 2.0 * std::sqrt(std::max(arg, 0.0));
}

double group_velocity(double k, double h) {
    if (h < 0.0) throw DomainError("group velocity requires h >= 0");
    if (h == 0.0) return 0.0;
    double arg = h * h + 1.0 - 2.0 * h * std::cos(k);
    if (arg <= 0.0) return 0.0;  // gap closure point, k -> 0 at h = 1
    return 2.0 * h * std::sin(k) / std::sqrt(arg);
}

double max_group_velocity(double h) {
    if (h < 0.0) throw DomainError("group velocity requires h >= 0");
    // stationary point at cos k = min(h, 1/h)
    return h >= 1.0 ? 2.0 : 2.0 * h;
}

double mode_occupation(double k, double h_i, double h_f) {
    if (h_i < 0.0 || h_f < 0.0) throw DomainError("mode occupation requires h >= 0");
    double wi = dispersion(k, h_i);
    double wf = dispersion(k, h_f);
    if (wi == 0.0 || wf == 0.0)
        throw DomainError("mode occupation undefined: dispersion vanishes at this k");
    return 0.5 - 2.0 * (h_i * h_f + 1.0 - (h_i + h_f) * std::cos(k)) / (wf * wi);
}

double amplitude_c0(double h_i, double h_f) {
    if (h_i < h_f) throw DomainError("amplitude C0 requires h_i >= h_f");
    if (h_i == h_f) return 0.0;
    double rad = (h_i - h_f) * h_f * std::sqrt(h_i * h_i - 1.0) /
                 ((h_i + h_f) * (h_f * h_i - 1.0));
    if (!(h_i > 1.0) || !std::isfinite(rad) || rad < 0.0)
        throw DomainError("amplitude C0: radicand negative or undefined");
    return std::sqrt(rad);
}

double xi1_closed(double h_i, double h_f) {
    double arg = 2.0 * h_i * h_f / (h_i + h_f);
    if (!(arg > 1.0))
        throw DomainError("xi1 undefined: ln argument must exceed 1");
    return 1.0 / std::log(arg);
}

double h1_field(double h_i, double h_f) {
    double rad = (h_f * h_f - 1.0) * (h_i * h_i - 1.0);
    if (rad < 0.0) throw DomainError("h1 undefined: fields on opposite sides of h=1");
    return (1.0 + h_f * h_i + std::sqrt(rad)) / (h_f + h_i);
}

double xi1_integral(double h_i, double h_f) {
    double t1 = 0.0;
    if (h_f > 1.0 && h_i > 1.0) t1 = std::log(std::min(h_i, h1_field(h_i, h_f)));
    auto integrand = [&](double k) {
        double v = std::abs(1.0 - 2.0 * mode_occupation(k, h_i, h_f));
        if (v < 1e-15)
            throw ConvergenceError("xi1 integrand singular: |1 - 2 n_BF| reaches 0");
        return std::log(v);
    };
    double integral = refine(integrand, -kPi, kPi, "xi1 occupation integral");
    double inv = t1 - integral / (2.0 * kPi);
    if (!(inv > 0.0)) throw DomainError("xi1 integral representation gives nonpositive 1/xi1");
    return 1.0 / inv;
}

double xi_gge(double epsilon) {
    double arg = 2.0 * epsilon + 2.0;
    if (!(arg > 1.0)) throw DomainError("xi_GGE undefined: ln(2 eps + 2) <= 0");
    return 1.0 / std::log(arg);
}

std::vector<double> ns_momenta(int n) {
    if (n < 2 || n % 2 != 0) throw DomainError("momentum grid requires even n >= 2");
    std::vector<double> ks;
    ks.reserve(n);
    for (int m = n / 2; m >= 1; --m) ks.push_back(-(2.0 * m - 1.0) * kPi / n);
    for (int m = 1; m <= n / 2; ++m) ks.push_back((2.0 * m - 1.0) * kPi / n);
    return ks;
}

std::vector<ModeData> mode_data(const QuenchSpec& spec) {
    validate_spec(spec);
    double hi = spec.h_i / spec.j;
    double hf = spec.h_f / spec.j;
    std::vector<ModeData> out;
    out.reserve(spec.n / 2);
    for (int m = 1; m <= spec.n / 2; ++m) {
        double k = (2.0 * m - 1.0) * kPi / spec.n;
        ModeData md;
        md.k = k;
        Eigen::SelfAdjointEigenSolver<Matrix2cd> si(pair_block(k, hi));
        Eigen::SelfAdjointEigenSolver<Matrix2cd> sf(pair_block(k, hf));
        // block eigenvalues are 2(h - cos k) -+ omega
        md.omega_i = 0.5 * (si.eigenvalues()(1) - si.eigenvalues()(0));
        md.omega_f = 0.5 * (sf.eigenvalues()(1) - sf.eigenvalues()(0));
        md.theta_i = std::atan2(std::sin(k), hi - std::cos(k));
        md.theta_f = std::atan2(std::sin(k), hf - std::cos(k));
        Vector2cd gs_i = si.eigenvectors().col(0);
        Vector2cd exc_f = sf.eigenvectors().col(1);
        md.n_bf = std::norm(exc_f.dot(gs_i));
        out.push_back(md);
    }
    return out;
}

ExactSolver::ExactSolver(const QuenchSpec& spec) : spec_(spec) {
    validate_spec(spec_);
    hi_ = spec_.h_i / spec_.j;
    hf_ = spec_.h_f / spec_.j;
    modes_.reserve(spec_.n / 2);
    for (int m = 1; m <= spec_.n / 2; ++m) {
        double k = (2.0 * m - 1.0) * kPi / spec_.n;
        Mode md;
        md.k = k;
        Eigen::SelfAdjointEigenSolver<Matrix2cd> si(pair_block(k, hi_));
        Vector2cd gs = si.eigenvectors().col(0);
        md.a0 = gs(0);
        md.b0 = gs(1);
        Eigen::SelfAdjointEigenSolver<Matrix2cd> sf(pair_block(k, hf_));
        md.lam0 = sf.eigenvalues()(0);
        md.lam1 = sf.eigenvalues()(1);
        const Matrix2cd& v = sf.eigenvectors();
        md.v00 = v(0, 0); md.v10 = v(1, 0);
        md.v01 = v(0, 1); md.v11 = v(1, 1);
        modes_.push_back(md);
    }
}

ExactSolver::Kernels ExactSolver::kernels(double t, int rmax) const {
    const int n = spec_.n;
    const double tj = t * spec_.j;  // block matrices carry fields in units of J
    const std::size_t nk = modes_.size();
    std::vector<double> nt(nk), fr(nk), fi(nk);
    const complex<double> I(0.0, 1.0);
    for (std::size_t m = 0; m < nk; ++m) {
        const Mode& md = modes_[m];
        complex<double> c0 = std::conj(md.v00) * md.a0 + std::conj(md.v10) * md.b0;
        complex<double> c1 = std::conj(md.v01) * md.a0 + std::conj(md.v11) * md.b0;
        c0 *= std::exp(-I * md.lam0 * tj);
        c1 *= std::exp(-I * md.lam1 * tj);
        complex<double> a = md.v00 * c0 + md.v01 * c1;
        complex<double> b = md.v10 * c0 + md.v11 * c1;
        nt[m] = std::norm(b);
        complex<double> f = -std::conj(a) * b;  // <c_k c_{-k}>
        fr[m] = f.real();
        fi[m] = f.imag();
    }
    Kernels ker;
    ker.rmax = rmax;
    ker.s.assign(2 * rmax + 1, 0.0);
    ker.q.assign(2 * rmax + 1, 0.0);
    for (int r = -rmax; r <= rmax; ++r) {
        double s = 0.0, q = 0.0;
        for (std::size_t m = 0; m < nk; ++m) {
            double sk = std::sin(modes_[m].k * r);
            double ck = std::cos(modes_[m].k * r);
            s += sk * fr[m];
            q += nt[m] * ck - sk * fi[m];
        }
        ker.s[static_cast<std::size_t>(r + rmax)] = 4.0 * s / n;
        ker.q[static_cast<std::size_t>(r + rmax)] = 4.0 * q / n - (r == 0 ? 1.0 : 0.0);
    }
    return ker;
}

double ExactSolver::correlator_from_kernels(const Kernels& ker, int d) const {
    if (d == 0) return 1.0;
    // operator string y_0, x_1, y_1, x_2, ..., y_{d-1}, x_d
    const int m = 2 * d;
    std::vector<double> g(static_cast<std::size_t>(m) * m, 0.0);
    auto is_x = [](int p) { return p % 2 == 1; };       // positions 1,3,... are x_{j+1}
    auto site = [](int p) { return (p + 1) / 2; };      // y_j at 2j, x_j at 2j-1
    for (int p = 0; p < m; ++p) {
        for (int q = p + 1; q < m; ++q) {
            double v;
            int ip = site(p), iq = site(q);
            if (!is_x(p) && !is_x(q)) v = ker.sk(iq - ip);
            else if (is_x(p) && is_x(q)) v = -ker.sk(iq - ip);
            else if (!is_x(p) && is_x(q)) v = -ker.qk(iq - ip);
            else v = ker.qk(ip - iq);
            g[static_cast<std::size_t>(p) * m + q] = v;
            g[static_cast<std::size_t>(q) * m + p] = -v;
        }
    }
    double pf = pfaffian_inplace(g, m);
    double c = (d % 2 == 0) ? pf : -pf;
    if (std::abs(c) > 1.0 + 1e-6)
        throw Error("exact correlator: Pfaffian magnitude exceeds 1");
    return c;
}

double ExactSolver::correlator(double t, int d) const {
    if (d < 0 || d > spec_.n / 2)
        throw DomainError("correlator distance must satisfy 0 <= d <= N/2");
    if (d == 0) return 1.0;
    return correlator_from_kernels(kernels(t, d), d);
}

CorrelationSeries ExactSolver::series() const {
    CorrelationSeries out;
    out.times = spec_.t_grid;
    for (int d = 0; d <= spec_.n / 2; ++d) out.distances.push_back(d);
    out.values.resize(out.times.size() * out.distances.size());
    for (std::size_t it = 0; it < out.times.size(); ++it) {
        Kernels ker = kernels(out.times[it], spec_.n / 2);
        for (std::size_t id = 0; id < out.distances.size(); ++id)
            out.values[out.index(it, id)] = correlator_from_kernels(ker, out.distances[id]);
    }
    return out;
}

MajoranaCorrMatrix ExactSolver::covariance(double t) const {
    const int n = spec_.n;
    Kernels ker = kernels(t, n - 1);
    MajoranaCorrMatrix g;
    g.n = n;
    g.gamma.assign(static_cast<std::size_t>(2 * n) * 2 * n, 0.0);
    auto set = [&](int mu, int nu, double v) {
        g.gamma[static_cast<std::size_t>(mu) * 2 * n + nu] = v;
        g.gamma[static_cast<std::size_t>(nu) * 2 * n + mu] = -v;
    };
    for (int l = 0; l < n; ++l) {
        for (int mm = l; mm < n; ++mm) {
            int r = mm - l;
            if (r != 0) {
                set(2 * l, 2 * mm, -ker.sk(r));      // x_l x_m
                set(2 * l + 1, 2 * mm + 1, ker.sk(r));  // y_l y_m
            }
            set(2 * l + 1, 2 * mm, -ker.qk(r));      // y_l x_m
            if (r != 0) set(2 * l, 2 * mm + 1, ker.qk(-r));  // x_l y_m
            else set(2 * l, 2 * mm + 1, ker.qk(0));
        }
    }
    return g;
}

double approx_correlator(const QuenchSpec& spec, double t, int d) {
    validate_spec(spec);
    double hi = spec.h_i / spec.j;
    double hf = spec.h_f / spec.j;
    if (!(hi >= hf && hf > 1.0))
        throw DomainError("approximate correlator requires h_i >= h_f > 1");
    if (hi == hf) return 0.0;  // no quench: vanishing amplitude and occupations
    if (t < 0.0) throw DomainError("approximate correlator requires t >= 0");
    double tj = t * spec.j;

    double gge = amplitude_c0(hi, hf) * std::exp(-d / xi1_integral(hi, hf));

    auto osc = [&](double k) {
        double n = mode_occupation(k, hi, hf);
        double w = dispersion(k, hf);
        return std::sqrt(n / (1.0 - n)) * std::sin(2.0 * w * tj - k * d) / w;
    };
    double i_osc = refine(osc, -kPi, kPi, "oscillatory mode integral") / kPi;

    auto expo = [&](double k) {
        double n = mode_occupation(k, hi, hf);
        double v = group_velocity(k, hf);
        double reach = 2.0 * v * tj;
        double brace = d > reach ? reach : static_cast<double>(d);
        return std::log(std::abs(1.0 - 2.0 * n)) * brace;
    };
    double e = std::exp(refine(expo, 0.0, kPi, "light-cone exponent integral") / kPi);

    double pref = std::pow(hf * hf - 1.0, 0.25) * std::sqrt(4.0 * hf);
    return gge + pref * i_osc * e;
}

}  // namespace tfim::fermion
