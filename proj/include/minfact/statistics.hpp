#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <minfact/bijections.hpp>
#include <minfact/errors.hpp>
#include <minfact/factorization.hpp>
#include <minfact/parallel.hpp>
#include <minfact/random_gen.hpp>
#include <minfact/rng.hpp>

namespace minfact {

// --- Exhaustive enumeration --------------------------------------------------

// Hard cap: there are n^{n-2} minimal factorizations, which at n=9 is
// already 4.8M items. Enumeration past that is refused, which also keeps
// every tally below 2^64 with lots of room.
constexpr int kEnumerationCap = 9;

inline std::uint64_t count_factorizations(int n) {
    std::uint64_t c = 1;
    for (int i = 0; i < n - 2; ++i) c *= static_cast<std::uint64_t>(n);
    return c;
}

namespace detail {

inline void check_enumeration_cap(int n) {
    if (n < 2) throw std::invalid_argument("enumeration needs n >= 2");
    if (n > kEnumerationCap)
        throw resource_error("enumeration cap exceeded (n <= " + std::to_string(kEnumerationCap) + ")");
}

// Iterates the Prüfer codes with the given first entry (`bucket`, 1-based);
// n <= 3 has a single empty-or-unit bucket 0.
template <typename Fn>
void for_each_code_in_bucket(int n, int bucket, Fn&& fn) {
    const int len = n - 2;
    std::vector<int> code(len, 1);
    if (len == 0) {
        fn(code);
        return;
    }
    code[0] = bucket;
    for (;;) {
        fn(code);
        int pos = len - 1;
        while (pos >= 1 && code[pos] == n) {
            code[pos] = 1;
            --pos;
        }
        if (pos < 1) return;
        ++code[pos];
    }
}

} // namespace detail

inline int enumeration_buckets(int n) { return n >= 4 ? n : 1; }

// Applies fn to every minimal factorization in one Prüfer bucket.
template <typename Fn>
void for_each_factorization_bucket(int n, int bucket, Fn&& fn) {
    detail::check_enumeration_cap(n);
    auto visit = [&](const std::vector<int>& code) {
        CayleyTree c;
        c.n = n;
        c.edges = prufer_decode(code, n);
        fn(moszkowski_inverse(phi_inverse(c)));
    };
    if (n >= 4) {
        detail::for_each_code_in_bucket(n, bucket, visit);
    } else {
        std::vector<int> code(std::max(n - 2, 0), 1);
        if (n == 3) {
            for (code[0] = 1; code[0] <= 3; ++code[0]) visit(code);
        } else {
            visit(code);
        }
    }
}

// Applies fn to every element of the set of minimal factorizations of
// (1,2,...,n), each exactly once.
template <typename Fn>
void for_each_factorization(int n, Fn&& fn) {
    for (int b = 0; b < enumeration_buckets(n); ++b)
        for_each_factorization_bucket(n, n >= 4 ? b + 1 : 0, fn);
}

// --- Exact joint distributions ----------------------------------------------

enum class StatKind { Touch, Move };

struct StatPair {
    StatKind kind1 = StatKind::Touch;
    int i1 = 1;
    StatKind kind2 = StatKind::Move;
    int i2 = 1;
};

// Exact joint probability generating polynomial of a pair of statistics over
// all minimal factorizations: coefficients are counts over the common
// denominator n^{n-2}, which is exact (the enumeration cap bounds everything
// well below 2^64).
struct BivariatePGP {
    int n = 0;
    StatPair pair;
    std::uint64_t denom = 0;
    std::vector<std::uint64_t> counts;  // (n+1) x (n+1), index [a*(n+1)+b]

    std::uint64_t count(int a, int b) const {
        if (a < 0 || a > n || b < 0 || b > n) return 0;
        return counts[static_cast<std::size_t>(a) * (n + 1) + b];
    }
    double probability(int a, int b) const {
        return static_cast<double>(count(a, b)) / static_cast<double>(denom);
    }
};

namespace detail {

struct PairTally {
    std::vector<std::uint64_t> counts;
};

inline int stat_value(const Factorization& f, const std::vector<int>& touch,
                      const std::vector<int>& move, StatKind kind, int i) {
    const int idx = f.index_of(i);
    return kind == StatKind::Touch ? touch[idx] : move[idx];
}

} // namespace detail

inline BivariatePGP exact_joint_pgp(int n, StatPair pair, int workers = 1) {
    detail::check_enumeration_cap(n);
    if (pair.i1 < 1 || pair.i1 > n || pair.i2 < 1 || pair.i2 > n)
        throw std::domain_error("statistic index out of range");
    const std::size_t cells = static_cast<std::size_t>(n + 1) * (n + 1);
    auto per_bucket = [&](int b) {
        detail::PairTally t;
        t.counts.assign(cells, 0);
        for_each_factorization_bucket(n, n >= 4 ? b + 1 : 0, [&](const Factorization& f) {
            const auto touch = batch_touch_counts(f);
            const auto move = batch_move_counts(f);
            const int a = detail::stat_value(f, touch, move, pair.kind1, pair.i1);
            const int b2 = detail::stat_value(f, touch, move, pair.kind2, pair.i2);
            ++t.counts[static_cast<std::size_t>(a) * (n + 1) + b2];
        });
        return t;
    };
    const auto tallies = run_indexed_tasks<detail::PairTally>(enumeration_buckets(n), workers, per_bucket);
    BivariatePGP out;
    out.n = n;
    out.pair = pair;
    out.denom = count_factorizations(n);
    out.counts.assign(cells, 0);
    for (const auto& t : tallies)
        for (std::size_t i = 0; i < cells; ++i) out.counts[i] += t.counts[i];
    return out;
}

// Coefficient count of x^a y^b in n^{n-2} * x y ((n-2+x+y)/n)^{n-2}.
inline std::uint64_t conjecture_rhs_count(int n, int a, int b) {
    const int m = n - 2;
    const int p = a - 1, q = b - 1;
    if (p < 0 || q < 0 || p + q > m) return 0;
    std::uint64_t v = 1;
    for (int i = 0; i < m - p - q; ++i) v *= static_cast<std::uint64_t>(n - 2);
    // multinomial m! / (p! q! (m-p-q)!), tiny for m <= 7
    auto fact = [](int x) {
        std::uint64_t r = 1;
        for (int i = 2; i <= x; ++i) r *= i;
        return r;
    };
    return v * (fact(m) / (fact(p) * fact(q) * fact(m - p - q)));
}

struct ConjectureReport {
    int n = 0;
    bool ok = false;
    std::uint64_t total = 0;
    std::vector<std::tuple<int, int, std::uint64_t, std::uint64_t>> mismatches;  // (a, b, got, want)
};

// Coefficientwise comparison of the exact joint law of (#T_1, #M_1) with
// x y ((n-2+x+y)/n)^{n-2}, both over the denominator n^{n-2}.
inline ConjectureReport verify_conjecture(int n, int workers = 1) {
    const BivariatePGP pgp = exact_joint_pgp(n, StatPair{StatKind::Touch, 1, StatKind::Move, 1}, workers);
    ConjectureReport r;
    r.n = n;
    r.total = pgp.denom;
    r.ok = true;
    for (int a = 0; a <= n; ++a) {
        for (int b = 0; b <= n; ++b) {
            const std::uint64_t got = pgp.count(a, b);
            const std::uint64_t want = conjecture_rhs_count(n, a, b);
            if (got != want) {
                r.ok = false;
                r.mismatches.emplace_back(a, b, got, want);
            }
        }
    }
    return r;
}

namespace detail {

using TupleDist = std::map<std::vector<int>, std::uint64_t>;

template <typename TupleFn>
TupleDist tuple_distribution(int n, int workers, TupleFn&& tuple_of) {
    auto per_bucket = [&](int b) {
        TupleDist d;
        for_each_factorization_bucket(n, n >= 4 ? b + 1 : 0, [&](const Factorization& f) {
            const auto touch = batch_touch_counts(f);
            const auto move = batch_move_counts(f);
            ++d[tuple_of(f, touch, move)];
        });
        return d;
    };
    const auto parts = run_indexed_tasks<TupleDist>(enumeration_buckets(n), workers, per_bucket);
    TupleDist out;
    for (const auto& p : parts)
        for (const auto& [k, v] : p) out[k] += v;
    return out;
}

} // namespace detail

// The three interleavings of touch/move counts that must share one joint law:
// (T1,M1,...,Tk,Mk), (Mn,T1,M1,...,M_{k-1},Tk) and (Mk,Tk,...,M1,T1).
inline bool verify_symmetry(int n, int k, int workers = 1) {
    detail::check_enumeration_cap(n);
    if (k < 1 || k > n) throw std::domain_error("verify_symmetry needs 1 <= k <= n");
    auto t1 = detail::tuple_distribution(n, workers, [&](const Factorization& f, const auto& touch, const auto& move) {
        std::vector<int> v;
        for (int i = 1; i <= k; ++i) {
            v.push_back(touch[f.index_of(i)]);
            v.push_back(move[f.index_of(i)]);
        }
        return v;
    });
    auto t2 = detail::tuple_distribution(n, workers, [&](const Factorization& f, const auto& touch, const auto& move) {
        std::vector<int> v;
        v.push_back(move[f.index_of(n)]);
        for (int i = 1; i <= k - 1; ++i) {
            v.push_back(touch[f.index_of(i)]);
            v.push_back(move[f.index_of(i)]);
        }
        v.push_back(touch[f.index_of(k)]);
        return v;
    });
    auto t3 = detail::tuple_distribution(n, workers, [&](const Factorization& f, const auto& touch, const auto& move) {
        std::vector<int> v;
        for (int i = k; i >= 1; --i) {
            v.push_back(move[f.index_of(i)]);
            v.push_back(touch[f.index_of(i)]);
        }
        return v;
    });
    return t1 == t2 && t1 == t3;
}

// Exact equality of the joint laws of (#T_1, #M_j) and (#T_1, #M_{n+1-j}).
inline bool verify_horizontal_symmetry(int n, int j, int workers = 1) {
    detail::check_enumeration_cap(n);
    if (j < 1 || j > n) throw std::domain_error("verify_horizontal_symmetry needs 1 <= j <= n");
    const BivariatePGP a = exact_joint_pgp(n, StatPair{StatKind::Touch, 1, StatKind::Move, j}, workers);
    const BivariatePGP b = exact_joint_pgp(n, StatPair{StatKind::Touch, 1, StatKind::Move, n + 1 - j}, workers);
    return a.counts == b.counts;
}

// --- Closed-form limit laws ---------------------------------------------------

// P(limit of #T_i = j): size-biased Poisson(1).
inline double limit_pmf_marginal_T(int j) {
    if (j < 1) throw std::domain_error("marginal argument must be >= 1");
    return std::exp(-1.0 - std::lgamma(static_cast<double>(j)));
}

// Joint limit of (#T_1, #M_1): product of two size-biased Poisson(1) laws.
inline double limit_pmf_joint_deg_dist(int i, int h) {
    if (i < 1 || h < 1) throw std::domain_error("joint arguments must be >= 1");
    return std::exp(-2.0 - std::lgamma(static_cast<double>(i)) - std::lgamma(static_cast<double>(h)));
}

// Joint limit of (#T_1, #T_2).
inline double limit_pmf_joint_TT(int i, int j) {
    if (i < 1 || j < 1) throw std::domain_error("joint arguments must be >= 1");
    const double ij = i + j;
    const double t1 = (ij - 2.0) * std::exp(-std::lgamma(ij + 1.0) + std::log(ij));  // (i+j-2)/(i+j-1)!
    const double t2 = (ij - 1.0) * std::exp(-std::lgamma(i + 1.0) - std::lgamma(j + 1.0));
    const double t3 = (ij - 1.0) * std::exp(-std::lgamma(ij + 1.0));
    return std::exp(-2.0) * (t1 + t2 - t3);
}

// P(the limit trajectory of 1 stays >= 1).
inline double limit_stays_positive() { return 1.0 - std::exp(-1.0); }

// --- Monte Carlo drivers -------------------------------------------------------

enum class MCStatistic { StaysPositive, T1Marginal, M1Marginal, T1M1Joint, T1T2Joint, DegDistJoint };
enum class MCSource { FiniteN, Kesten };

// Histogram of the local statistics over independent samples. Sample s always
// draws from RandomSource(seed, s), so totals are independent of the worker
// count and of scheduling.
struct LocalHistogram {
    std::uint64_t samples = 0;
    std::uint64_t stays_positive = 0;
    int cap = 0;                         // joint cells clamp at cap
    std::vector<std::uint64_t> t1_m1;    // (cap+1)^2, index t1*(cap+1)+m1
    std::vector<std::uint64_t> t1_t2;
    std::vector<std::uint64_t> t1;       // cap+1 bins

    void init(int cap_) {
        cap = cap_;
        t1_m1.assign(static_cast<std::size_t>(cap + 1) * (cap + 1), 0);
        t1_t2.assign(static_cast<std::size_t>(cap + 1) * (cap + 1), 0);
        t1.assign(cap + 1, 0);
    }
    void add(int a, int b, bool stays) {
        ++samples;
        if (stays) ++stays_positive;
        const int ca = std::min(a, cap), cb = std::min(b, cap);
        ++t1[ca];
        ++t1_m1[static_cast<std::size_t>(ca) * (cap + 1) + cb];
    }
    void merge(const LocalHistogram& o) {
        samples += o.samples;
        stays_positive += o.stays_positive;
        for (std::size_t i = 0; i < t1_m1.size(); ++i) t1_m1[i] += o.t1_m1[i];
        for (std::size_t i = 0; i < t1_t2.size(); ++i) t1_t2[i] += o.t1_t2[i];
        for (std::size_t i = 0; i < t1.size(); ++i) t1[i] += o.t1[i];
    }
    double joint_t1_m1(int a, int b) const {
        return static_cast<double>(t1_m1[static_cast<std::size_t>(a) * (cap + 1) + b]) / samples;
    }
    double joint_t1_t2(int a, int b) const {
        return static_cast<double>(t1_t2[static_cast<std::size_t>(a) * (cap + 1) + b]) / samples;
    }
    double marginal_t1(int a) const { return static_cast<double>(t1[a]) / samples; }
};

namespace detail {

constexpr int kHistogramCap = 24;

inline int mc_blocks(std::uint64_t samples) {
    return samples < 256 ? 1 : 128;
}

} // namespace detail

// Uniform factorizations of size n, reduced to local statistics.
inline LocalHistogram mc_finite_histogram(int n, std::uint64_t samples, std::uint64_t seed, int workers = 1) {
    const int blocks = detail::mc_blocks(samples);
    auto per_block = [&](int b) {
        LocalHistogram h;
        h.init(detail::kHistogramCap);
        LocalStatsSampler sampler(n);
        const std::uint64_t lo = samples * b / blocks, hi = samples * (b + 1) / blocks;
        for (std::uint64_t s = lo; s < hi; ++s) {
            RandomSource rng(seed, s);
            const LocalStats st = sampler.sample(rng);
            h.add(st.t1, st.m1, st.stays_positive);
            const int ca = std::min(st.t1, h.cap), cb = std::min(st.t2, h.cap);
            ++h.t1_t2[static_cast<std::size_t>(ca) * (h.cap + 1) + cb];
        }
        return h;
    };
    const auto parts = run_indexed_tasks<LocalHistogram>(blocks, workers, per_block);
    LocalHistogram out;
    out.init(detail::kHistogramCap);
    for (const auto& p : parts) out.merge(p);
    return out;
}

// Kesten-tree samples: (root degree, distance 1->2, degree of label 2).
inline LocalHistogram mc_kesten_histogram(std::uint64_t samples, std::uint64_t seed, int workers = 1) {
    const int blocks = detail::mc_blocks(samples);
    auto per_block = [&](int b) {
        LocalHistogram h;
        h.init(detail::kHistogramCap);
        const std::uint64_t lo = samples * b / blocks, hi = samples * (b + 1) / blocks;
        for (std::uint64_t s = lo; s < hi; ++s) {
            const KestenLocalStats st = sample_kesten_local_stats(RandomSource(seed, s));
            h.add(st.root_degree, st.dist12, false);
            const int ca = std::min(st.root_degree, h.cap), cb = std::min(st.deg_u2, h.cap);
            ++h.t1_t2[static_cast<std::size_t>(ca) * (h.cap + 1) + cb];
        }
        return h;
    };
    const auto parts = run_indexed_tasks<LocalHistogram>(blocks, workers, per_block);
    LocalHistogram out;
    out.init(detail::kHistogramCap);
    for (const auto& p : parts) out.merge(p);
    return out;
}

// Point estimate of one statistic with its standard error and the z-score
// against the analytic limit.
struct MCEstimate {
    std::string statistic;
    double estimate = 0.0;
    std::uint64_t samples = 0;
    double std_error = 0.0;  // sqrt(p_hat (1-p_hat) / N)
    double target = 0.0;
    double z = 0.0;          // (p_hat - target) / sqrt(target (1-target) / N)
    std::uint64_t seed = 0;
};

namespace detail {

inline MCEstimate make_estimate(const std::string& name, double p_hat, std::uint64_t samples,
                                double target, std::uint64_t seed) {
    MCEstimate e;
    e.statistic = name;
    e.estimate = p_hat;
    e.samples = samples;
    e.std_error = std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(samples));
    e.target = target;
    e.z = (p_hat - target) / std::sqrt(target * (1.0 - target) / static_cast<double>(samples));
    e.seed = seed;
    return e;
}

} // namespace detail

// Single-cell Monte Carlo check of one limit statistic. `cell` carries the
// target bin: one entry for marginals, two for joints, none for StaysPositive.
inline MCEstimate mc_limit_check(MCStatistic stat, MCSource source, int n_or_K,
                                 const std::vector<int>& cell, std::uint64_t samples,
                                 std::uint64_t seed, int workers = 1) {
    if (samples == 0) throw std::domain_error("mc_limit_check needs samples >= 1");
    auto need_cell = [&](std::size_t k) {
        if (cell.size() != k) throw std::domain_error("wrong cell arity for this statistic");
        for (int c : cell)
            if (c < 1 || c > detail::kHistogramCap) throw std::domain_error("cell out of range");
    };
    const bool finite = source == MCSource::FiniteN;
    LocalHistogram h;
    if (finite) {
        h = mc_finite_histogram(n_or_K, samples, seed, workers);
    } else {
        if (stat == MCStatistic::StaysPositive)
            throw std::domain_error("stays_positive needs the finite-n source");
        h = mc_kesten_histogram(samples, seed, workers);
    }
    switch (stat) {
        case MCStatistic::StaysPositive:
            return detail::make_estimate("stays_positive",
                                         static_cast<double>(h.stays_positive) / samples, samples,
                                         limit_stays_positive(), seed);
        case MCStatistic::T1Marginal:
            need_cell(1);
            return detail::make_estimate("t1_marginal", h.marginal_t1(cell[0]), samples,
                                         limit_pmf_marginal_T(cell[0]), seed);
        case MCStatistic::M1Marginal: {
            need_cell(1);
            double p = 0.0;
            for (int a = 0; a <= h.cap; ++a) p += h.joint_t1_m1(a, cell[0]);
            return detail::make_estimate("m1_marginal", p, samples, limit_pmf_marginal_T(cell[0]), seed);
        }
        case MCStatistic::T1M1Joint:
        case MCStatistic::DegDistJoint:
            need_cell(2);
            return detail::make_estimate(stat == MCStatistic::T1M1Joint ? "t1_m1_joint" : "deg_dist_joint",
                                         h.joint_t1_m1(cell[0], cell[1]), samples,
                                         limit_pmf_joint_deg_dist(cell[0], cell[1]), seed);
        case MCStatistic::T1T2Joint:
            need_cell(2);
            return detail::make_estimate("t1_t2_joint", h.joint_t1_t2(cell[0], cell[1]), samples,
                                         limit_pmf_joint_TT(cell[0], cell[1]), seed);
    }
    throw std::logic_error("unreachable");
}

// --- Goodness of fit -----------------------------------------------------------

struct ChiSquare {
    double statistic = 0.0;
    int df = 0;
};

// Chi-square statistic against the uniform distribution on counts.size() bins.
inline ChiSquare chi_square_uniform(const std::vector<std::uint64_t>& counts) {
    if (counts.size() < 2) throw std::domain_error("need at least two bins");
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
    ChiSquare r;
    r.df = static_cast<int>(counts.size()) - 1;
    for (auto c : counts) {
        const double d = static_cast<double>(c) - expected;
        r.statistic += d * d / expected;
    }
    return r;
}

// Upper critical values of the chi-square distribution at significance 1e-3.
inline double chi_square_crit_1e3(int df) {
    switch (df) {
        case 2: return 13.8155;
        case 15: return 37.6973;
        case 19: return 43.8202;
        default: break;
    }
    // Wilson-Hilferty approximation is plenty for the remaining test sizes.
    const double z = 3.0902;  // 0.999 normal quantile
    const double t = 1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df));
    return df * t * t * t;
}

} // namespace minfact
