#include "qvi/ksd.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qvi/metrics.hpp"

namespace qvi {

namespace {

constexpr int kDenseCacheBits = 10;

int bits_for_dim(std::size_t dim) {
    int n = 0;
    while ((std::size_t{1} << n) < dim) ++n;
    if (dim == 0 || (std::size_t{1} << n) != dim) {
        throw std::invalid_argument("distribution length must be a power of two");
    }
    return n;
}

std::vector<std::size_t> to_indices(std::span<const BitVector> samples) {
    std::vector<std::size_t> idx(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) idx[i] = index_of(samples[i]);
    return idx;
}

} // namespace

double hamming_kernel(const BitVector& z, const BitVector& zp) {
    if (z.size() != zp.size()) throw std::invalid_argument("bit vectors differ in length");
    int differing = 0;
    for (std::size_t i = 0; i < z.size(); ++i) differing += (z[i] != zp[i]) ? 1 : 0;
    return std::exp(-static_cast<double>(differing) / static_cast<double>(z.size()));
}

SteinKernelCache::SteinKernelCache(const JointModel& model, Observation x)
    : model_(model), x_(std::move(x)), n_(model.latent_dim()),
      dim_(std::size_t{1} << model.latent_dim()) {
    if (n_ <= kDenseCacheBits) {
        dense_.assign(dim_ * dim_, 0.0);
        dense_known_.assign(dim_ * dim_, 0);
    }
}

const std::vector<double>& SteinKernelCache::score(const BitVector& z) {
    auto [it, inserted] = scores_.try_emplace(index_of(z));
    if (inserted) it->second = difference_score(model_, x_, z);
    return it->second;
}

double SteinKernelCache::compute_kappa(std::size_t a, std::size_t b) {
    const BitVector z = bits_of(a, n_);
    const BitVector zp = bits_of(b, n_);
    const auto& s = score(z);
    const auto& sp = score(zp);
    const double k00 = hamming_kernel(z, zp);

    double term1 = 0.0, term2 = 0.0, term3 = 0.0, term4 = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        BitVector zf = flip_bit(z, i);
        BitVector zpf = flip_bit(zp, i);
        double k_zf = hamming_kernel(zf, zp);
        double k_zpf = hamming_kernel(z, zpf);
        double k_both = hamming_kernel(zf, zpf);
        term1 += s[i] * sp[i];
        term2 += s[i] * (k00 - k_zpf);
        term3 += (k00 - k_zf) * sp[i];
        term4 += k00 - k_zf - k_zpf + k_both;
    }
    return k00 * term1 - term2 - term3 + term4;
}

double SteinKernelCache::kappa_by_index(std::size_t a, std::size_t b) {
    if (a >= dim_ || b >= dim_) throw std::out_of_range("basis index out of range");
    if (!dense_.empty()) {
        std::size_t key = a * dim_ + b;
        if (!dense_known_[key]) {
            dense_[key] = compute_kappa(a, b);
            dense_known_[key] = 1;
        }
        return dense_[key];
    }
    std::size_t key = (a << n_) | b;
    auto [it, inserted] = sparse_.try_emplace(key);
    if (inserted) it->second = compute_kappa(a, b);
    return it->second;
}

double SteinKernelCache::kappa(const BitVector& z, const BitVector& zp) {
    return kappa_by_index(index_of(z), index_of(zp));
}

double stein_kernel(const JointModel& model, const Observation& x, const BitVector& z,
                    const BitVector& zp) {
    SteinKernelCache cache(model, x);
    return cache.kappa(z, zp);
}

double ksd_inner_exact(SteinKernelCache& cache, std::span<const double> q1,
                       std::span<const double> q2) {
    if (q1.size() != q2.size()) throw std::invalid_argument("distributions differ in length");
    const std::size_t dim = q1.size();
    bits_for_dim(dim);
    double acc = 0.0;
    for (std::size_t a = 0; a < dim; ++a) {
        if (q1[a] == 0.0) continue;
        double row = 0.0;
        for (std::size_t b = 0; b < dim; ++b) {
            if (q2[b] == 0.0) continue;
            row += q2[b] * cache.kappa_by_index(a, b);
        }
        acc += q1[a] * row;
    }
    return acc;
}

double ksd_inner_ustat(SteinKernelCache& cache, std::span<const BitVector> samples) {
    const std::size_t m = samples.size();
    if (m < 2) throw std::invalid_argument("U-statistic needs at least two samples");
    auto idx = to_indices(samples);
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) acc += cache.kappa_by_index(idx[i], idx[j]);
    }
    return 2.0 * acc / (static_cast<double>(m) * static_cast<double>(m - 1));
}

double ksd_inner_cross(SteinKernelCache& cache, std::span<const BitVector> za,
                       std::span<const BitVector> zb) {
    if (za.empty() || zb.empty()) throw std::invalid_argument("empty sample set");
    auto ia = to_indices(za);
    auto ib = to_indices(zb);
    double acc = 0.0;
    for (auto a : ia) {
        for (auto b : ib) acc += cache.kappa_by_index(a, b);
    }
    return acc / (static_cast<double>(ia.size()) * static_cast<double>(ib.size()));
}

namespace {

double inner_qq(SteinKernelCache& cache, const BornMachine& machine, const Observation& x,
                const KsdOptions& opts, std::uint64_t seed) {
    if (opts.exact) {
        auto q = exact_distribution(machine, x);
        return ksd_inner_exact(cache, q, q);
    }
    if (opts.shots < 2) throw std::invalid_argument("sampled mode needs at least two shots");
    auto samples = born_sample(machine, x, opts.shots, seed);
    return ksd_inner_ustat(cache, samples);
}

// Contribution of one observation to the gradient of theta_j, given the
// denominator estimated once per observation.
double gradient_term(SteinKernelCache& cache, const BornMachine& machine,
                     const BornMachine& plus, const BornMachine& minus, const Observation& x,
                     double den, const KsdOptions& opts, std::uint64_t seed) {
    double t1, t2, t3, t4;
    if (opts.exact) {
        auto q = exact_distribution(machine, x);
        auto qp = exact_distribution(plus, x);
        auto qm = exact_distribution(minus, x);
        t1 = ksd_inner_exact(cache, q, qp);
        t2 = ksd_inner_exact(cache, q, qm);
        t3 = ksd_inner_exact(cache, qp, q);
        t4 = ksd_inner_exact(cache, qm, q);
    } else {
        auto draw = [&](const BornMachine& m, std::uint64_t stream) {
            return born_sample(m, x, opts.shots, derive_seed(seed, stream));
        };
        t1 = ksd_inner_cross(cache, draw(machine, 1), draw(plus, 2));
        t2 = ksd_inner_cross(cache, draw(machine, 3), draw(minus, 4));
        t3 = ksd_inner_cross(cache, draw(plus, 5), draw(machine, 6));
        t4 = ksd_inner_cross(cache, draw(minus, 7), draw(machine, 8));
    }
    return 0.25 / den * (t1 - t2 + t3 - t4);
}

} // namespace

double ksd_estimate(const BornMachine& machine, const JointModel& model, const Observation& x,
                    const KsdOptions& opts) {
    SteinKernelCache cache(model, x);
    double inner = inner_qq(cache, machine, x, opts, opts.seed);
    return std::sqrt(std::max(inner, 0.0));
}

double ksd_gradient(const BornMachine& machine, const JointModel& model,
                    std::span<const Observation> dataset, int j, const KsdOptions& opts,
                    int* guard_hits) {
    if (dataset.empty()) throw std::invalid_argument("dataset must not be empty");
    auto [plus, minus] = shifted_machines(machine, j);
    double acc = 0.0;
    for (std::size_t d = 0; d < dataset.size(); ++d) {
        SteinKernelCache cache(model, dataset[d]);
        std::uint64_t base = derive_seed(opts.seed, d);
        double inner = inner_qq(cache, machine, dataset[d], opts, derive_seed(base, 0));
        double den = std::sqrt(std::max(inner, 0.0));
        if (den < opts.eps_den) {
            if (guard_hits) ++(*guard_hits);
            continue;
        }
        acc += gradient_term(cache, machine, plus, minus, dataset[d], den, opts, base);
    }
    return acc / static_cast<double>(dataset.size());
}

TrainResult train_ksd(BornMachine machine, const JointModel& model,
                      std::span<const Observation> dataset, const KsdConfig& config) {
    if (dataset.empty()) throw std::invalid_argument("dataset must not be empty");
    if (machine.spec.n_qubits != model.latent_dim()) {
        throw std::invalid_argument("machine qubit count does not match latent dimension");
    }

    std::vector<SteinKernelCache> caches;
    caches.reserve(dataset.size());
    for (const auto& x : dataset) caches.emplace_back(model, x);

    std::vector<std::vector<double>> posteriors;
    if (config.track_tvd) {
        for (const auto& x : dataset) posteriors.push_back(exact_posterior(model, x));
    }

    TrainResult result;
    result.best_machine = machine;
    result.best_loss = std::numeric_limits<double>::infinity();

    const auto run_start = std::chrono::steady_clock::now();
    double last_mark = 0.0;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::uint64_t es = derive_seed(config.seed, 0x10000u + static_cast<std::uint64_t>(epoch));
        KsdOptions opts{config.use_exact_expectations, config.shots, 0, config.eps_den};

        // Denominators are estimated once per observation and shared by all
        // parameters; the four gradient terms get independent sample sets.
        std::vector<double> dens(dataset.size());
        for (std::size_t d = 0; d < dataset.size(); ++d) {
            double inner =
                inner_qq(caches[d], machine, dataset[d], opts, derive_seed(es, 4 + d));
            dens[d] = std::sqrt(std::max(inner, 0.0));
        }

        std::vector<double> grad(machine.theta.size(), 0.0);
        for (std::size_t j = 0; j < machine.theta.size(); ++j) {
            auto [plus, minus] = shifted_machines(machine, static_cast<int>(j));
            std::uint64_t js = derive_seed(es, 16 + j);
            for (std::size_t d = 0; d < dataset.size(); ++d) {
                if (dens[d] < opts.eps_den) continue;
                grad[j] += gradient_term(caches[d], machine, plus, minus, dataset[d], dens[d],
                                         opts, derive_seed(js, d));
            }
            grad[j] /= static_cast<double>(dataset.size());
        }
        for (std::size_t j = 0; j < machine.theta.size(); ++j) {
            machine.theta[j] -= config.lr_born * grad[j];
        }

        EpochLog log;
        log.epoch = epoch;
        double acc = 0.0;
        for (std::size_t d = 0; d < dataset.size(); ++d) {
            double inner =
                inner_qq(caches[d], machine, dataset[d], opts, derive_seed(es, 8 + d));
            acc += std::sqrt(std::max(inner, 0.0));
        }
        log.ksd = acc / static_cast<double>(dataset.size());
        if (config.track_tvd) {
            double tacc = 0.0;
            for (std::size_t d = 0; d < dataset.size(); ++d) {
                tacc += tvd(posteriors[d], exact_distribution(machine, dataset[d]));
            }
            log.tvd = tacc / static_cast<double>(dataset.size());
        }
        double now = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                               run_start)
                         .count();
        log.wall_ms = now - last_mark;
        last_mark = now;
        result.logs.push_back(log);

        if (*log.ksd < result.best_loss) {
            result.best_loss = *log.ksd;
            result.best_machine = machine;
            result.best_epoch = epoch;
        }
    }

    result.final_machine = std::move(machine);
    return result;
}

} // namespace qvi
