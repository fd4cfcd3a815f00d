#pragma once

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include <minfact/errors.hpp>

namespace minfact {

// An unordered pair of distinct integer labels.
struct Transposition {
    int a;
    int b;

    Transposition(int x, int y) : a(std::min(x, y)), b(std::max(x, y)) {
        if (x == y) throw std::invalid_argument("transposition needs two distinct labels");
    }

    bool contains(int i) const { return i == a || i == b; }
    int other(int i) const { return i == a ? b : a; }
    int apply(int i) const { return i == a ? b : (i == b ? a : i); }

    friend bool operator==(const Transposition&, const Transposition&) = default;
    friend auto operator<=>(const Transposition&, const Transposition&) = default;
};

// A sequence of n-1 transpositions, either on the plain label set {1..n} or,
// when the tilde flag is set, on the recentered set {-floor((n-1)/2)..floor(n/2)}.
// Plain and recentered factorizations are deliberately distinct at the type
// level: operations check the flag and refuse mixed use.
struct Factorization {
    int n = 0;
    bool tilde = false;
    std::vector<Transposition> taus;

    Factorization() = default;
    Factorization(int n_, std::vector<Transposition> taus_, bool tilde_ = false)
        : n(n_), tilde(tilde_), taus(std::move(taus_)) {}

    int label_min() const { return tilde ? -((n - 1) / 2) : 1; }
    int label_max() const { return tilde ? n / 2 : n; }
    bool in_label_set(int x) const { return x >= label_min() && x <= label_max(); }

    // Dense-array index of a label (labels are offset by label_min()).
    int index_of(int label) const { return label - label_min(); }
    int label_at(int index) const { return index + label_min(); }

    // Successor in the ambient cycle: (1,2,...,n) or its recentered version.
    int cycle_successor(int x) const { return x == label_max() ? label_min() : x + 1; }

    void validate() const {
        if (n < 2) throw std::invalid_argument("factorization needs n >= 2");
        if (static_cast<int>(taus.size()) != n - 1)
            throw std::invalid_argument("factorization needs exactly n-1 transpositions");
        for (const auto& t : taus) {
            if (!in_label_set(t.a) || !in_label_set(t.b))
                throw std::invalid_argument("transposition label outside the declared label set");
        }
    }

    friend bool operator==(const Factorization&, const Factorization&) = default;
};

// Left-to-right partial product t_1 t_2 ... t_k as a total mapping on the
// label set, returned as a dense array indexed by Factorization::index_of.
// k = 0 gives the identity.
inline std::vector<int> partial_product(const Factorization& f, int k) {
    f.validate();
    if (k < 0 || k > f.n - 1) throw std::out_of_range("partial product index out of range");
    std::vector<int> img(f.n);
    std::vector<int> pos(f.n);  // pos[index_of(v)] = i with img[i] = v
    for (int i = 0; i < f.n; ++i) img[i] = f.label_at(i);
    std::iota(pos.begin(), pos.end(), 0);
    for (int j = 0; j < k; ++j) {
        const auto& t = f.taus[j];
        const int ia = pos[f.index_of(t.a)];
        const int ib = pos[f.index_of(t.b)];
        std::swap(img[ia], img[ib]);
        std::swap(pos[f.index_of(t.a)], pos[f.index_of(t.b)]);
    }
    return img;
}

// True iff the full product equals the ambient cycle.
inline bool is_minimal(const Factorization& f) {
    const std::vector<int> img = partial_product(f, f.n - 1);
    for (int i = 0; i < f.n; ++i) {
        if (img[i] != f.cycle_successor(f.label_at(i))) return false;
    }
    return true;
}

// Recenters a plain factorization: labels above n/2 are shifted down by n,
// so that the ambient cycle becomes (-floor((n-1)/2),...,0,1,...,floor(n/2)).
inline Factorization to_tilde(const Factorization& f) {
    if (f.tilde) throw std::invalid_argument("to_tilde expects a plain factorization");
    f.validate();
    auto recenter = [&](int x) { return 2 * x <= f.n ? x : x - f.n; };
    std::vector<Transposition> taus;
    taus.reserve(f.taus.size());
    for (const auto& t : f.taus) taus.emplace_back(recenter(t.a), recenter(t.b));
    return Factorization(f.n, std::move(taus), true);
}

// Piecewise-constant trajectory on the integer time domain {0..domain_end},
// stored as jump positions only. values[j] holds on [jump_times[j-1], jump_times[j]).
struct StepTrajectory {
    int start = 0;
    int domain_end = 0;
    std::vector<int> jump_times;  // strictly increasing, within 1..domain_end-1
    std::vector<int> values;      // jump_times.size()+1 entries, values[0] == start

    int at(int k) const {
        if (k < 0 || k > domain_end) throw std::out_of_range("trajectory time out of range");
        const auto it = std::upper_bound(jump_times.begin(), jump_times.end(), k);
        return values[static_cast<std::size_t>(it - jump_times.begin())];
    }
    int final_value() const { return values.back(); }
};

// Positions of the transpositions that touch (contain) or move a label.
struct IndexSet {
    enum class Kind { Touch, Move };
    Kind kind = Kind::Touch;
    int i = 0;
    std::vector<int> indices;  // sorted, within 1..n-1
};

namespace detail {

inline void require_tilde(const Factorization& f, const char* op) {
    if (!f.tilde)
        throw std::invalid_argument(std::string(op) + " expects a recentered factorization");
}

} // namespace detail

// Trajectory of a single label through the recentered factorization.
inline StepTrajectory trajectory(const Factorization& f, int i) {
    detail::require_tilde(f, "trajectory");
    f.validate();
    if (!f.in_label_set(i)) throw std::domain_error("trajectory start outside the label set");
    StepTrajectory t;
    t.start = i;
    t.domain_end = f.n;
    t.values.push_back(i);
    int x = i;
    for (int k = 1; k <= f.n - 1; ++k) {
        const auto& tau = f.taus[k - 1];
        if (tau.contains(x)) {
            x = tau.other(x);
            t.jump_times.push_back(k);
            t.values.push_back(x);
        }
    }
    return t;
}

// All trajectories in one left-to-right sweep; result indexed by index_of.
inline std::vector<StepTrajectory> batch_trajectories(const Factorization& f) {
    detail::require_tilde(f, "batch_trajectories");
    f.validate();
    std::vector<StepTrajectory> out(f.n);
    std::vector<int> at(f.n);  // at[index_of(v)] = index whose trajectory currently sits at v
    for (int i = 0; i < f.n; ++i) {
        out[i].start = f.label_at(i);
        out[i].domain_end = f.n;
        out[i].values.push_back(f.label_at(i));
        at[i] = i;
    }
    for (int k = 1; k <= f.n - 1; ++k) {
        const auto& tau = f.taus[k - 1];
        const int ia = at[f.index_of(tau.a)];
        const int ib = at[f.index_of(tau.b)];
        out[ia].jump_times.push_back(k);
        out[ia].values.push_back(tau.b);
        out[ib].jump_times.push_back(k);
        out[ib].values.push_back(tau.a);
        std::swap(at[f.index_of(tau.a)], at[f.index_of(tau.b)]);
    }
    return out;
}

// Indices of the transpositions containing i. Valid for plain and recentered
// factorizations alike.
inline IndexSet touch_set(const Factorization& f, int i) {
    f.validate();
    IndexSet s;
    s.kind = IndexSet::Kind::Touch;
    s.i = i;
    for (int k = 1; k <= f.n - 1; ++k) {
        if (f.taus[k - 1].contains(i)) s.indices.push_back(k);
    }
    return s;
}

// Indices at which the trajectory of i jumps.
inline IndexSet move_set(const Factorization& f, int i) {
    f.validate();
    IndexSet s;
    s.kind = IndexSet::Kind::Move;
    s.i = i;
    int x = i;
    for (int k = 1; k <= f.n - 1; ++k) {
        const auto& tau = f.taus[k - 1];
        if (tau.contains(x)) {
            x = tau.other(x);
            s.indices.push_back(k);
        }
    }
    return s;
}

// Per-label touch counts (#T_i) in one pass, indexed by index_of.
inline std::vector<int> batch_touch_counts(const Factorization& f) {
    f.validate();
    std::vector<int> deg(f.n, 0);
    for (const auto& t : f.taus) {
        ++deg[f.index_of(t.a)];
        ++deg[f.index_of(t.b)];
    }
    return deg;
}

// Per-label move counts (#M_i) in one sweep, indexed by index_of.
inline std::vector<int> batch_move_counts(const Factorization& f) {
    f.validate();
    std::vector<int> count(f.n, 0);
    std::vector<int> at(f.n);
    std::iota(at.begin(), at.end(), 0);
    for (const auto& tau : f.taus) {
        const int ia = f.index_of(tau.a);
        const int ib = f.index_of(tau.b);
        ++count[at[ia]];
        ++count[at[ib]];
        std::swap(at[ia], at[ib]);
    }
    return count;
}

// Labels whose trajectory enters the band [-A, A] at some time, sorted
// ascending. Only meaningful for recentered factorizations.
inline std::vector<int> entering_indices(const Factorization& f, int A) {
    detail::require_tilde(f, "entering_indices");
    f.validate();
    if (A < 1 || 2 * A > f.n) throw std::out_of_range("band half-width must satisfy 1 <= A <= n/2");
    std::vector<int> min_abs(f.n);
    std::vector<int> at(f.n);
    for (int i = 0; i < f.n; ++i) {
        min_abs[i] = std::abs(f.label_at(i));
        at[i] = i;
    }
    for (const auto& tau : f.taus) {
        const int ia = f.index_of(tau.a);
        const int ib = f.index_of(tau.b);
        min_abs[at[ia]] = std::min(min_abs[at[ia]], std::abs(tau.b));
        min_abs[at[ib]] = std::min(min_abs[at[ib]], std::abs(tau.a));
        std::swap(at[ia], at[ib]);
    }
    std::vector<int> in;
    for (int i = 0; i < f.n; ++i) {
        if (min_abs[i] <= A) in.push_back(f.label_at(i));
    }
    return in;
}

} // namespace minfact
