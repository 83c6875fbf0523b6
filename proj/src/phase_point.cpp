#include "tfim/phase_point.hpp"

#include "tfim/errors.hpp"

namespace tfim::dtwa {

namespace {
using cd = std::complex<double>;
}

Mat2 PhasePointOperator::matrix() const {
    double cx = sx(), cy = sy(), cz = sz();
    // 1/2 [cx sx + cy sy + cz sz + 1]
    Mat2 m;
    m[0] = 0.5 * cd(1.0 + cz, 0.0);
    m[1] = 0.5 * cd(cx, -cy);
    m[2] = 0.5 * cd(cx, cy);
    m[3] = 0.5 * cd(1.0 - cz, 0.0);
    return m;
}

std::array<PhasePointOperator, 4> representation(Rep rep) {
    return {PhasePointOperator{rep, 0, 0}, PhasePointOperator{rep, 1, 0},
            PhasePointOperator{rep, 0, 1}, PhasePointOperator{rep, 1, 1}};
}

std::array<double, 4> wigner_weights(const Mat2& rho, Rep rep) {
    // Hermiticity and unit trace of rho
    double tr = (rho[0] + rho[3]).real();
    if (std::abs((rho[0] + rho[3]).imag()) > 1e-12 || std::abs(tr - 1.0) > 1e-10 ||
        std::abs(rho[1] - std::conj(rho[2])) > 1e-12)
        throw DomainError("wigner weights require a Hermitian unit-trace density operator");
    std::array<double, 4> w{};
    auto reps = representation(rep);
    for (int i = 0; i < 4; ++i) {
        Mat2 a = reps[static_cast<std::size_t>(i)].matrix();
        // tr(rho a) / 2, normalization M = single-site dimension
        cd t = rho[0] * a[0] + rho[1] * a[2] + rho[2] * a[1] + rho[3] * a[3];
        w[static_cast<std::size_t>(i)] = 0.5 * t.real();
    }
    return w;
}

Mat2 z_polarized_site() {
    return {cd(1.0, 0.0), cd(0.0, 0.0), cd(0.0, 0.0), cd(0.0, 0.0)};
}

SpinConfiguration sample_initial_product(int n, const Mat2& rho, Scheme scheme, PhiloxRng& rng) {
    std::array<std::array<double, 4>, 2> weights;
    weights[0] = wigner_weights(rho, Rep::A);
    weights[1] = wigner_weights(rho, Rep::APrime);
    for (const auto& ws : weights)
        for (double w : ws)
            if (w < -1e-12)
                throw DomainError("initial Wigner function has negative weight; state not sampleable");

    SpinConfiguration cfg;
    cfg.n = n;
    cfg.s.resize(static_cast<std::size_t>(n) * 3);
    for (int site = 0; site < n; ++site) {
        double urep = rng.uniform();
        Rep rep = Rep::A;
        if (scheme == Scheme::S8 && urep < 0.5) rep = Rep::APrime;
        const auto& w = weights[rep == Rep::A ? 0 : 1];
        double u = rng.uniform();
        int pick = 3;
        double acc = 0.0;
        for (int i = 0; i < 4; ++i) {
            acc += std::max(w[static_cast<std::size_t>(i)], 0.0);
            if (u < acc) { pick = i; break; }
        }
        auto op = representation(rep)[static_cast<std::size_t>(pick)];
        cfg.at(site, 0) = op.sx();
        cfg.at(site, 1) = op.sy();
        cfg.at(site, 2) = op.sz();
    }
    return cfg;
}

SpinConfiguration sample_initial(int n, Scheme scheme, PhiloxRng& rng) {
    return sample_initial_product(n, z_polarized_site(), scheme, rng);
}

}  // namespace tfim::dtwa
