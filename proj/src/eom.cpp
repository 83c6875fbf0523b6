#include "tfim/eom.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <utility>

namespace tfim::dtwa {

void eom_first_order(const std::vector<double>& s, double h, double j,
                     std::vector<double>& ds) {
    const int n = static_cast<int>(s.size() / 3);
    ds.resize(s.size());
    for (int i = 0; i < n; ++i) {
        int il = (i + n - 1) % n, ir = (i + 1) % n;
        double xn = s[static_cast<std::size_t>(il) * 3] + s[static_cast<std::size_t>(ir) * 3];
        const double* si = &s[static_cast<std::size_t>(i) * 3];
        double* di = &ds[static_cast<std::size_t>(i) * 3];
        di[0] = 2.0 * h * si[1];
        di[1] = -2.0 * h * si[0] + 2.0 * j * si[2] * xn;
        di[2] = -2.0 * j * si[1] * xn;
    }
}

double classical_energy(const std::vector<double>& s, double h, double j) {
    const int n = static_cast<int>(s.size() / 3);
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
        int ir = (i + 1) % n;
        e -= j * s[static_cast<std::size_t>(i) * 3] * s[static_cast<std::size_t>(ir) * 3];
        e -= h * s[static_cast<std::size_t>(i) * 3 + 2];
    }
    return e;
}

namespace {

// Pauli strings as sorted (site, axis) lists; products stay single strings
// with a phase, so commutators against the Hamiltonian expand exactly.
using String = std::vector<std::pair<int, int>>;
using cd = std::complex<double>;

// sigma^a sigma^b = delta_ab + i eps_abc sigma^c
std::pair<cd, int> mul_single(int a, int b) {
    if (a == b) return {1.0, -1};
    static const int third[3][3] = {{-1, 2, 1}, {2, -1, 0}, {1, 0, -1}};
    int c = third[a][b];
    // eps sign: xy->+z, yz->+x, zx->+y
    bool plus = (b == (a + 1) % 3);
    return {plus ? cd(0, 1) : cd(0, -1), c};
}

std::pair<cd, String> mul_strings(cd c1, const String& s1, cd c2, const String& s2) {
    cd coef = c1 * c2;
    std::map<int, int> acc(s1.begin(), s1.end());
    for (auto [site, ax] : s2) {
        auto it = acc.find(site);
        if (it == acc.end()) {
            acc.emplace(site, ax);
        } else {
            auto [c, res] = mul_single(it->second, ax);
            coef *= c;
            if (res < 0)
                acc.erase(it);
            else
                it->second = res;
        }
    }
    return {coef, String(acc.begin(), acc.end())};
}

}  // namespace

double SecondOrderEom::eval_terms(const std::vector<Term>& terms, int shift,
                                  const std::vector<double>& y) const {
    const int n = layout_.n;
    double acc = 0.0;
    for (const Term& t : terms) {
        double v = t.coef;
        for (int q = 0; q < t.nm; ++q) {
            int site = t.m[q].site + shift;
            if (site >= n) site -= n;
            v *= y[layout_.mean_index(site, t.m[q].comp)];
        }
        if (t.has_c) {
            int si = t.c.si + shift;
            int sj = t.c.sj + shift;
            if (si >= n) si -= n;
            if (sj >= n) sj -= n;
            v *= y[layout_.corr_index(si, sj, t.c.ai, t.c.aj)];
        }
        acc += v;
    }
    return acc;
}

SecondOrderEom::SecondOrderEom(int n, double h, double j) : h_(h), j_(j) {
    layout_.n = n;
    dmean_cache_.resize(static_cast<std::size_t>(n) * 3);

    // Hamiltonian terms; for n=2 the periodic sum visits the single bond twice.
    std::vector<std::pair<double, String>> hterms;
    for (int i = 0; i < n; ++i) {
        int r = (i + 1) % n;
        String bond{{std::min(i, r), 0}, {std::max(i, r), 0}};
        hterms.emplace_back(-j, bond);
        hterms.emplace_back(-h, String{{i, 2}});
    }

    auto heisenberg = [&](const String& target) {
        std::map<String, double> out;
        for (const auto& [hc, hs] : hterms) {
            bool overlap = false;
            for (auto [site, ax] : hs) {
                (void)ax;
                for (auto [ts, ta] : target) {
                    (void)ta;
                    if (ts == site) { overlap = true; break; }
                }
                if (overlap) break;
            }
            if (!overlap) continue;
            auto [cab, sab] = mul_strings(hc, hs, 1.0, target);
            auto [cba, sba] = mul_strings(1.0, target, hc, hs);
            cd c = cd(0, 1) * (cab - cba);
            if (std::abs(c) < 1e-14) continue;
            if (std::abs(c.imag()) > 1e-12)
                throw std::logic_error("commutator expansion produced a complex coefficient");
            out[sab] += c.real();
        }
        return out;
    };

    auto compile = [&](const std::map<String, double>& strings) {
        std::vector<Term> terms;
        for (const auto& [s, coef] : strings) {
            if (std::abs(coef) < 1e-14) continue;
            if (s.empty()) {
                terms.push_back(Term{coef, 0, {}, false, {}});
            } else if (s.size() == 1) {
                Term t{coef, 1, {}, false, {}};
                t.m[0] = {s[0].first, s[0].second};
                terms.push_back(t);
            } else if (s.size() == 2) {
                Term tc{coef, 0, {}, true, {s[0].first, s[1].first, s[0].second, s[1].second}};
                terms.push_back(tc);
                Term tm{coef, 2, {}, false, {}};
                tm.m[0] = {s[0].first, s[0].second};
                tm.m[1] = {s[1].first, s[1].second};
                terms.push_back(tm);
            } else if (s.size() == 3) {
                // cumulant closure: <ABC> = c_AB m_C + c_AC m_B + c_BC m_A + m_A m_B m_C
                const int idx[3][3] = {{0, 1, 2}, {0, 2, 1}, {1, 2, 0}};
                for (const auto& p : idx) {
                    Term t{coef, 1, {},
                           true,
                           {s[static_cast<std::size_t>(p[0])].first,
                            s[static_cast<std::size_t>(p[1])].first,
                            s[static_cast<std::size_t>(p[0])].second,
                            s[static_cast<std::size_t>(p[1])].second}};
                    t.m[0] = {s[static_cast<std::size_t>(p[2])].first,
                              s[static_cast<std::size_t>(p[2])].second};
                    terms.push_back(t);
                }
                Term tm{coef, 3, {}, false, {}};
                for (int q = 0; q < 3; ++q)
                    tm.m[q] = {s[static_cast<std::size_t>(q)].first,
                               s[static_cast<std::size_t>(q)].second};
                terms.push_back(tm);
            } else {
                throw std::logic_error("unexpected four-site string in the hierarchy");
            }
        }
        return terms;
    };

    for (int a = 0; a < 3; ++a) dmean_[a] = compile(heisenberg(String{{0, a}}));

    dpair_.resize(static_cast<std::size_t>(n - 1) * 9);
    for (int delta = 1; delta < n; ++delta)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                dpair_[static_cast<std::size_t>(delta - 1) * 9 +
                       static_cast<std::size_t>(a) * 3 + b] =
                    compile(heisenberg(String{{0, a}, {delta, b}}));
}

void SecondOrderEom::operator()(const std::vector<double>& y, std::vector<double>& dy) const {
    const int n = layout_.n;
    dy.assign(layout_.dim(), 0.0);
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < 3; ++a)
            dmean_cache_[layout_.mean_index(i, a)] = eval_terms(dmean_[a], i, y);
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < 3; ++a)
            dy[layout_.mean_index(i, a)] = dmean_cache_[layout_.mean_index(i, a)];
    for (int i = 0; i < n; ++i) {
        for (int jj = i + 1; jj < n; ++jj) {
            int delta = jj - i;
            for (int a = 0; a < 3; ++a) {
                for (int b = 0; b < 3; ++b) {
                    const auto& terms = dpair_[static_cast<std::size_t>(delta - 1) * 9 +
                                               static_cast<std::size_t>(a) * 3 + b];
                    double dab = eval_terms(terms, i, y);
                    // connected part: subtract the product rule
                    dab -= dmean_cache_[layout_.mean_index(i, a)] * y[layout_.mean_index(jj, b)];
                    dab -= y[layout_.mean_index(i, a)] * dmean_cache_[layout_.mean_index(jj, b)];
                    dy[layout_.corr_index(i, jj, a, b)] = dab;
                }
            }
        }
    }
}

std::vector<double> second_order_init(const SpinConfiguration& cfg) {
    SecondOrderLayout layout{cfg.n};
    std::vector<double> y(layout.dim(), 0.0);
    for (int i = 0; i < cfg.n; ++i)
        for (int a = 0; a < 3; ++a) y[layout.mean_index(i, a)] = cfg.at(i, a);
    return y;
}

}  // namespace tfim::dtwa
