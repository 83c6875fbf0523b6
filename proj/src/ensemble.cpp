#include "tfim/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <cstring>
#include <mutex>
#include <thread>

#include "tfim/eom.hpp"
#include "tfim/trajectory.hpp"

namespace tfim::dtwa {

namespace {

struct KahanArray {
    std::vector<double> sum, comp;

    void init(std::size_t n) {
        sum.assign(n, 0.0);
        comp.assign(n, 0.0);
    }
    void add(std::size_t i, double v) {
        double y = v - comp[i];
        double t = sum[i] + y;
        comp[i] = (t - sum[i]) - y;
        sum[i] = t;
    }
};

// Per-trajectory contribution: correlators for d = 1..N/2 and sz per site,
// for every grid time the trajectory reached.
struct Contribution {
    std::size_t valid = 0;
    bool unstable = false;
    std::vector<double> corr;  // [time][d-1]
    std::vector<double> sz;    // [time][site]
};

struct Accumulators {
    std::size_t nt = 0, nd = 0, nsite = 0;
    KahanArray corr, corr_sq, sz;
    std::vector<std::int64_t> valid;
    std::uint64_t next_index = 0;

    void init(std::size_t t, std::size_t d, std::size_t n) {
        nt = t;
        nd = d;
        nsite = n;
        corr.init(t * d);
        corr_sq.init(t * d);
        sz.init(t * n);
        valid.assign(t, 0);
        next_index = 0;
    }

    void add(const Contribution& c) {
        for (std::size_t it = 0; it < c.valid; ++it) {
            ++valid[it];
            for (std::size_t id = 0; id < nd; ++id) {
                double v = c.corr[it * nd + id];
                corr.add(it * nd + id, v);
                corr_sq.add(it * nd + id, v * v);
            }
            for (std::size_t is = 0; is < nsite; ++is)
                sz.add(it * nsite + is, c.sz[it * nsite + is]);
        }
        ++next_index;
    }
};

constexpr char kCkptMagic[8] = {'T', 'F', 'I', 'M', 'D', 'T', 'W', 'A'};
constexpr std::uint32_t kCkptVersion = 1;

std::uint64_t run_hash(const QuenchSpec& spec, const EnsembleOptions& o) {
    char extra[128];
    std::snprintf(extra, sizeof extra, ";order=%d;scheme=%d;tol=%.17g;fixed=%d", o.order,
                  o.scheme == Scheme::S8 ? 1 : 0, o.tol, o.fixed_step ? 1 : 0);
    std::string s = serialize_spec(spec) + extra;
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

struct CkptHeader {
    char magic[8];
    std::uint32_t version;
    std::uint32_t reserved;
    std::uint64_t hash;
    std::uint64_t seed;
    std::uint64_t next_index;
    std::uint32_t nt, nd, nsite, pad;
};

void save_checkpoint(const std::string& path, const QuenchSpec& spec,
                     const EnsembleOptions& opts, const Accumulators& acc) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw Error("cannot write checkpoint: " + path);
    CkptHeader h{};
    std::memcpy(h.magic, kCkptMagic, 8);
    h.version = kCkptVersion;
    h.hash = run_hash(spec, opts);
    h.seed = opts.seed;
    h.next_index = acc.next_index;
    h.nt = static_cast<std::uint32_t>(acc.nt);
    h.nd = static_cast<std::uint32_t>(acc.nd);
    h.nsite = static_cast<std::uint32_t>(acc.nsite);
    bool ok = std::fwrite(&h, sizeof h, 1, f) == 1;
    auto warr = [&](const std::vector<double>& v) {
        ok = ok && std::fwrite(v.data(), sizeof(double), v.size(), f) == v.size();
    };
    warr(acc.corr.sum);
    warr(acc.corr.comp);
    warr(acc.corr_sq.sum);
    warr(acc.corr_sq.comp);
    warr(acc.sz.sum);
    warr(acc.sz.comp);
    ok = ok && std::fwrite(acc.valid.data(), sizeof(std::int64_t), acc.valid.size(), f) ==
                   acc.valid.size();
    std::fclose(f);
    if (!ok) throw Error("checkpoint write failed: " + path);
}

bool load_checkpoint(const std::string& path, const QuenchSpec& spec,
                     const EnsembleOptions& opts, Accumulators& acc) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) return false;
    CkptHeader h{};
    bool ok = std::fread(&h, sizeof h, 1, f) == 1;
    if (!ok || std::memcmp(h.magic, kCkptMagic, 8) != 0 || h.version != kCkptVersion ||
        h.hash != run_hash(spec, opts) || h.seed != opts.seed || h.nt != acc.nt ||
        h.nd != acc.nd || h.nsite != acc.nsite) {
        std::fclose(f);
        throw Error("checkpoint incompatible with this run: " + path);
    }
    auto rarr = [&](std::vector<double>& v) {
        ok = ok && std::fread(v.data(), sizeof(double), v.size(), f) == v.size();
    };
    rarr(acc.corr.sum);
    rarr(acc.corr.comp);
    rarr(acc.corr_sq.sum);
    rarr(acc.corr_sq.comp);
    rarr(acc.sz.sum);
    rarr(acc.sz.comp);
    ok = ok && std::fread(acc.valid.data(), sizeof(std::int64_t), acc.valid.size(), f) ==
                   acc.valid.size();
    std::fclose(f);
    if (!ok) throw Error("checkpoint truncated: " + path);
    acc.next_index = h.next_index;
    return true;
}

Contribution compute_contribution(const QuenchSpec& spec, const EnsembleOptions& opts,
                                  const TrajectoryIntegrator& integ, std::uint64_t index) {
    const int n = spec.n;
    const std::size_t nd = static_cast<std::size_t>(n / 2);
    PhiloxRng rng(opts.seed, index);
    SpinConfiguration init = sample_initial(n, opts.scheme, rng);
    Trajectory traj = integ.run(init);

    Contribution c;
    c.valid = traj.valid_count;
    c.unstable = traj.unstable;
    c.corr.assign(c.valid * nd, 0.0);
    c.sz.assign(c.valid * static_cast<std::size_t>(n), 0.0);
    SecondOrderLayout layout{n};
    for (std::size_t it = 0; it < c.valid; ++it) {
        const std::vector<double>& y = traj.states[it];
        for (int d = 1; d <= n / 2; ++d) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i) {
                int jj = i + d;
                if (jj >= n) jj -= n;
                double v = y[static_cast<std::size_t>(i) * 3] * y[static_cast<std::size_t>(jj) * 3];
                if (opts.order == 2) v += y[layout.corr_index(i, jj, 0, 0)];
                acc += v;
            }
            c.corr[it * nd + static_cast<std::size_t>(d - 1)] = acc / n;
        }
        for (int i = 0; i < n; ++i)
            c.sz[it * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)] =
                y[static_cast<std::size_t>(i) * 3 + 2];
    }
    return c;
}

}  // namespace

EnsembleResult run_ensemble(const QuenchSpec& spec, const EnsembleOptions& opts) {
    validate_spec(spec);
    if (opts.samples < 2) throw DomainError("ensemble requires at least 2 samples");
    if (opts.order != 1 && opts.order != 2)
        throw DomainError("truncation order must be 1 or 2");

    const std::size_t nt = spec.t_grid.size();
    const std::size_t nd = static_cast<std::size_t>(spec.n / 2);
    const std::size_t nsite = static_cast<std::size_t>(spec.n);
    const std::uint64_t total = static_cast<std::uint64_t>(opts.samples);

    Accumulators acc;
    acc.init(nt, nd, nsite);
    if (!opts.checkpoint_path.empty()) {
        if (load_checkpoint(opts.checkpoint_path, spec, opts, acc)) {
            if (acc.next_index > total)
                throw Error("checkpoint already contains more samples than requested");
        }
    }

    int nthreads = opts.threads > 0
                       ? opts.threads
                       : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    const std::uint64_t first = acc.next_index;
    if (first < total) {
        // Workers claim trajectory indices; a sliding window hands finished
        // contributions to the in-order reducer.
        const std::uint64_t window = static_cast<std::uint64_t>(4 * nthreads + 16);
        std::vector<Contribution> slots(window);
        std::vector<char> ready(window, 0);
        std::mutex mu;
        std::condition_variable cv_space, cv_ready;
        std::atomic<std::uint64_t> next_claim{first};
        std::uint64_t reduced = first;
        std::exception_ptr failure;

        auto worker = [&]() {
            try {
                TrajectoryIntegrator integ(spec,
                                           TrajectoryOptions{opts.order, opts.tol, opts.fixed_step});
                for (;;) {
                    std::uint64_t i = next_claim.fetch_add(1);
                    if (i >= total) break;
                    Contribution c = compute_contribution(spec, opts, integ, i);
                    std::unique_lock lk(mu);
                    cv_space.wait(lk, [&] {
                        return failure || i < reduced + window;
                    });
                    if (failure) break;
                    slots[i % window] = std::move(c);
                    ready[i % window] = 1;
                    if (i == reduced) cv_ready.notify_one();
                }
            } catch (...) {
                std::lock_guard lk(mu);
                if (!failure) failure = std::current_exception();
                cv_ready.notify_one();
                cv_space.notify_all();
            }
        };

        std::vector<std::thread> pool;
        int active = static_cast<int>(std::min<std::uint64_t>(
            static_cast<std::uint64_t>(nthreads), total - first));
        pool.reserve(static_cast<std::size_t>(active));
        for (int i = 0; i < active; ++i) pool.emplace_back(worker);

        {
            std::unique_lock lk(mu);
            while (reduced < total) {
                cv_ready.wait(lk, [&] { return failure || ready[reduced % window]; });
                if (failure) break;
                while (reduced < total && ready[reduced % window]) {
                    Contribution c = std::move(slots[reduced % window]);
                    ready[reduced % window] = 0;
                    acc.add(c);
                    ++reduced;
                    cv_space.notify_all();
                }
            }
        }
        for (auto& th : pool) th.join();
        if (failure) std::rethrow_exception(failure);
    }

    if (!opts.checkpoint_path.empty()) save_checkpoint(opts.checkpoint_path, spec, opts, acc);

    EnsembleResult res;
    res.samples = opts.samples;
    res.seed = opts.seed;
    res.scheme = opts.scheme;
    res.order = opts.order;
    res.series.times = spec.t_grid;
    for (int d = 0; d <= spec.n / 2; ++d) res.series.distances.push_back(d);
    const std::size_t ndist = res.series.distances.size();
    res.series.values.assign(nt * ndist, 0.0);
    res.series.stderrs.assign(nt * ndist, 0.0);
    res.sz.assign(nt, std::vector<double>(nsite, 0.0));
    res.unstable_fraction.assign(nt, 0.0);

    double worst_fraction = 0.0;
    for (std::size_t it = 0; it < nt; ++it) {
        const double r = static_cast<double>(acc.valid[it]);
        res.unstable_fraction[it] = 1.0 - r / static_cast<double>(total);
        worst_fraction = std::max(worst_fraction, res.unstable_fraction[it]);
        res.series.values[res.series.index(it, 0)] = 1.0;
        for (std::size_t id = 1; id < ndist; ++id) {
            std::size_t a = it * nd + (id - 1);
            if (acc.valid[it] < 2) continue;
            double mean = acc.corr.sum[a] / r;
            double var = (acc.corr_sq.sum[a] - acc.corr.sum[a] * acc.corr.sum[a] / r) / (r - 1.0);
            res.series.values[res.series.index(it, id)] = mean;
            res.series.stderrs[res.series.index(it, id)] = std::sqrt(std::max(var, 0.0) / r);
        }
        for (std::size_t is = 0; is < nsite; ++is)
            if (acc.valid[it] > 0) res.sz[it][is] = acc.sz.sum[it * nsite + is] / r;
    }

    if (worst_fraction > 0.5)
        throw EnsembleInstabilityError(
            "more than half of the trajectories are unstable at a requested time", std::move(res));
    return res;
}

}  // namespace tfim::dtwa
