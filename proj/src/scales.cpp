#include "multinorm/scales.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace multinorm {

bool Scale::is_origin() const {
    for (long long v : L)
        if (v) return false;
    return true;
}

bool Tube::contains(const RationalVec& t) const {
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (t[i] < lo[i] || t[i] > hi[i]) return false;
    return true;
}

bool Tube::intersects(const Tube& o) const {
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (hi[i] < o.lo[i] || o.hi[i] < lo[i]) return false;
    return true;
}

ScaleLattice::ScaleLattice(const Structure& s, const PartitionTable& parts)
    : S_(&s), parts_(&parts) {}

namespace {

RationalVec to_rational(const Lattice& L) {
    RationalVec t(L.size());
    for (std::size_t i = 0; i < L.size(); ++i) t[i] = Rational(L[i]);
    return t;
}

}  // namespace

bool ScaleLattice::eq36_conditions(const Lattice& L, const MarkedPartition& w) const {
    // l_i = floor(l_{k_r} / e(k_r,i)) within blocks, strict tau comparisons
    // between dotted entries.
    for (const auto& b : w.blocks) {
        for (int i : b.members) {
            Rational quotient = Rational(L[b.dotted]) / S_->e(b.dotted, i);
            if (L[i] != quotient.floor()) return false;
        }
    }
    for (int p = 0; p < w.size(); ++p)
        for (int q = 0; q < w.size(); ++q) {
            if (p == q) continue;
            const int kp = w.blocks[p].dotted, kq = w.blocks[q].dotted;
            if (!(Rational(L[kp]) < parts_->tau(w, p, q) * Rational(L[kq]))) return false;
        }
    return true;
}

MarkedPartition ScaleLattice::assign_partition(const Lattice& L, const std::vector<int>& D) const {
    if (D.empty()) return MarkedPartition{};
    const RationalVec t = to_rational(L);
    std::optional<MarkedPartition> best;
    for (const auto& p : parts_->with_dotted_set(D))
        if (parts_->cone_gamma(p).contains(t))
            if (!best || p < *best) best = p;
    if (!best) throw std::logic_error("assign_partition: no candidate partition");
    return *best;
}

std::optional<Scale> ScaleLattice::admit(const Lattice& L) const {
    if ((int)L.size() != S_->n()) throw std::invalid_argument("admit: wrong arity");
    for (long long v : L)
        if (v < 0) throw std::invalid_argument("admit: negative scale");
    auto dom = parts_->dominant_set(to_rational(L));
    if (!dom) return Scale{L, {}, MarkedPartition{}};  // the origin
    // Maximality of the cube within its dominance class: every unit step in a
    // non-dotted direction must leave the class.  At dominance ties this can
    // hold even when the floor/tau characterization fails, so the step test
    // is authoritative; eq36_conditions stays available as a diagnostic.
    for (int j = 0; j < S_->n(); ++j) {
        if (std::find(dom->D.begin(), dom->D.end(), j) != dom->D.end()) continue;
        Lattice Lp = L;
        ++Lp[j];
        auto dp = parts_->dominant_set(to_rational(Lp));
        if (dp && dp->D == dom->D) return std::nullopt;
    }
    return Scale{L, dom->D, assign_partition(L, dom->D)};
}

bool ScaleLattice::maximal_by_definition(const Lattice& L) const {
    auto dom = parts_->dominant_set(to_rational(L));
    std::vector<int> D = dom ? dom->D : std::vector<int>{};
    const int n = S_->n();
    for (int j = 0; j < n; ++j) {
        if (std::find(D.begin(), D.end(), j) != D.end()) continue;
        Lattice Lp = L;
        ++Lp[j];
        auto dp = parts_->dominant_set(to_rational(Lp));
        std::vector<int> Dp = dp ? dp->D : std::vector<int>{};
        if (Dp == D) return false;
    }
    return true;
}

std::vector<Scale> ScaleLattice::enumerate(long long bound) const {
    if (bound < 0) throw std::invalid_argument("enumerate: bound must be >= 0");
    const int n = S_->n();
    std::vector<Scale> out;
    Lattice L(n, 0);
    while (true) {
        if (auto sc = admit(L)) out.push_back(*sc);
        int i = n - 1;
        while (i >= 0 && L[i] == bound) L[i--] = 0;
        if (i < 0) break;
        ++L[i];
    }
    std::sort(out.begin(), out.end(), [](const Scale& a, const Scale& b) { return a.L < b.L; });
    return out;
}

std::map<std::string, std::vector<Scale>> ScaleLattice::enumerate_grouped(long long bound) const {
    std::map<std::string, std::vector<Scale>> g;
    for (auto& sc : enumerate(bound)) g[sc.S.to_string()].push_back(sc);
    return g;
}

Tube ScaleLattice::tube(const Scale& sc) const {
    const int n = S_->n();
    Tube t;
    t.lo.resize(n);
    t.hi.resize(n);
    const Rational half(1, 2);
    for (int j = 0; j < n; ++j) {
        const bool dotted = std::find(sc.D.begin(), sc.D.end(), j) != sc.D.end();
        t.hi[j] = Rational(sc.L[j]) + half;
        t.lo[j] = dotted ? Rational::max(Rational(0), Rational(sc.L[j]) - half) : Rational(0);
    }
    return t;
}

Scale ScaleLattice::tube_owner(const Lattice& M) const {
    const RationalVec t = to_rational(M);
    auto dom = parts_->dominant_set(t);
    if (!dom) {
        auto sc = admit(M);
        if (!sc) throw std::logic_error("tube_owner: origin not admissible");
        return *sc;
    }
    // Raise the non-dotted entries to the floors dictated by a witness
    // partition; at dominance ties the canonical witness may not deliver an
    // admissible point, so every witness is tried.
    auto candidate_from = [&](const MarkedPartition& w) {
        Lattice L(M.size());
        for (const auto& b : w.blocks) {
            L[b.dotted] = M[b.dotted];
            for (int i : b.members)
                if (i != b.dotted) L[i] = (Rational(M[b.dotted]) / S_->e(b.dotted, i)).floor();
        }
        return L;
    };
    std::vector<MarkedPartition> witnesses = {dom->witness};
    for (const auto& p : parts_->with_dotted_set(dom->D))
        if (cone_contains_point(p, t)) witnesses.push_back(p);
    for (const auto& w : witnesses) {
        Lattice L = candidate_from(w);
        if (auto sc = admit(L)) {
            Tube tb = tube(*sc);
            if (tb.contains(t)) return *sc;
        }
    }
    throw std::logic_error("tube_owner: no admissible owner found");
}

bool ScaleLattice::cone_contains_point(const MarkedPartition& p, const RationalVec& t) const {
    return parts_->cone_gamma(p).contains(t);
}

TubeCoverReport ScaleLattice::tube_cover_check(long long bound) const {
    TubeCoverReport rep;
    const int n = S_->n();
    // Tubes of scales beyond the window can still reach lattice points inside
    // it; enlarge the candidate window accordingly.
    const long long cap =
        (Rational(bound) * S_->matrix().max_entry()).ceil() + 1;
    std::vector<Scale> candidates = enumerate(cap);
    std::vector<std::pair<Scale, Tube>> tubes;
    tubes.reserve(candidates.size());
    for (auto& sc : candidates) tubes.emplace_back(sc, tube(sc));

    Lattice M(n, 0);
    while (true) {
        ++rep.checked;
        const RationalVec t = to_rational(M);
        int hits = 0;
        for (const auto& [sc, tb] : tubes)
            if (tb.contains(t)) ++hits;
        Scale owner = tube_owner(M);
        if (hits != 1 || !tube(owner).contains(t)) rep.violations.push_back(M);
        int i = n - 1;
        while (i >= 0 && M[i] == bound) M[i--] = 0;
        if (i < 0) break;
        ++M[i];
    }
    return rep;
}

Rational ScaleLattice::distance_to_principal_cone(const RationalVec& t) const {
    const int n = S_->n();
    // Min-product closure of the edge weights e(i,j); the constraint system
    // u_i <= e(i,j) u_j then reads u_i <= pi_ij u_j for the closed weights.
    std::vector<Rational> pi(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) pi[i * n + j] = i == j ? Rational(1) : S_->e(i, j);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Rational via = pi[i * n + k] * pi[k * n + j];
                if (via < pi[i * n + j]) pi[i * n + j] = via;
            }
    Rational delta(0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Rational cand = (t[i] - pi[i * n + j] * t[j]) / (Rational(1) + pi[i * n + j]);
            delta = Rational::max(delta, cand);
        }
    return delta;
}

Rational ScaleLattice::distance_to_lattice(const RationalVec& t) const {
    const int n = S_->n();
    for (long long radius = 1;; ++radius) {
        Lattice lo(n), hi(n);
        for (int i = 0; i < n; ++i) {
            lo[i] = std::max(0LL, t[i].floor() - radius);
            hi[i] = t[i].ceil() + radius;
        }
        std::optional<Rational> best;
        Lattice L = lo;
        while (true) {
            if (admit(L)) {
                Rational d = sup_distance(to_rational(L), t);
                if (!best || d < *best) best = d;
            }
            int i = n - 1;
            while (i >= 0 && L[i] == hi[i]) { L[i] = lo[i]; --i; }
            if (i < 0) break;
            ++L[i];
        }
        if (best && *best <= Rational(radius)) return *best;
        if (radius > 64) throw std::logic_error("distance_to_lattice: search diverged");
    }
}

KappaReport ScaleLattice::kappa_diagnostics(long long bound) const {
    if (bound < 1) throw std::invalid_argument("kappa_diagnostics: bound must be >= 1");
    KappaReport rep;
    rep.delta_bound = S_->matrix().max_entry();
    const int n = S_->n();
    std::vector<Scale> window = enumerate(bound);

    rep.kappa1 = Rational(0);
    for (const auto& sc : window) {
        Rational d = distance_to_principal_cone(to_rational(sc.L));
        if (d > rep.kappa1) { rep.kappa1 = d; rep.witness1 = sc.L; }
    }

    // Gamma(E) sampled on the half-integer grid of the window.
    rep.kappa2 = Rational(0);
    {
        const Cone gammaE = parts_->principal_cone();
        std::vector<long long> idx(n, 0);
        const long long steps = 2 * bound;
        while (true) {
            RationalVec t(n);
            for (int i = 0; i < n; ++i) t[i] = Rational(idx[i], 2);
            if (gammaE.contains(t)) {
                Rational d = distance_to_lattice(t);
                if (d > rep.kappa2) { rep.kappa2 = d; rep.witness2 = t; }
            }
            int i = n - 1;
            while (i >= 0 && idx[i] == steps) idx[i--] = 0;
            if (i < 0) break;
            ++idx[i];
        }
    }

    rep.kappa3 = Rational(0);
    rep.kappa4 = Rational(0);
    std::vector<Tube> tubes;
    tubes.reserve(window.size());
    for (const auto& sc : window) tubes.push_back(tube(sc));
    for (std::size_t a = 0; a < window.size(); ++a)
        for (std::size_t b = a; b < window.size(); ++b) {
            Lattice meet(n);
            for (int i = 0; i < n; ++i) meet[i] = std::min(window[a].L[i], window[b].L[i]);
            Rational d3 = distance_to_lattice(to_rational(meet));
            if (d3 > rep.kappa3) {
                rep.kappa3 = d3;
                rep.witness3a = window[a].L;
                rep.witness3b = window[b].L;
            }
            if (tubes[a].intersects(tubes[b])) {
                Rational d4 = sup_distance(to_rational(window[a].L), to_rational(window[b].L));
                if (d4 > rep.kappa4) {
                    rep.kappa4 = d4;
                    rep.witness4a = window[a].L;
                    rep.witness4b = window[b].L;
                }
            }
        }
    return rep;
}

FrequencyBlock ScaleLattice::frequency_block(const Scale& sc) const {
    const int n = S_->n();
    FrequencyBlock b;
    b.L = sc.L;
    b.D = sc.D;
    b.lo2.assign(n, 0.0);
    b.hi2.resize(n);
    b.has_lower.assign(n, false);
    for (int j = 0; j < n; ++j) {
        b.hi2[j] = double(sc.L[j]) + 0.5;
        if (std::find(sc.D.begin(), sc.D.end(), j) != sc.D.end()) {
            b.has_lower[j] = true;
            b.lo2[j] = double(sc.L[j]) - 0.5;
        }
    }
    const double emax = S_->matrix().max_entry().to_double();
    b.outer_C = std::pow(2.0, emax / 2.0);
    b.inner_c = std::pow(2.0, -emax / 2.0);
    return b;
}

Scale ScaleLattice::block_membership(const std::vector<double>& xi) const {
    LogPoint p = S_->log_map(xi);
    const int n = S_->n();
    Lattice M(n);
    bool origin = true;
    for (int i = 0; i < n; ++i) {
        // Nearest lattice cube; boundary ties resolve downward, which realizes
        // the lexicographically-smallest-owner convention.
        M[i] = std::max(0LL, (long long)std::ceil(p.t[i] - 0.5));
        if (M[i]) origin = false;
    }
    if (origin) {
        auto sc = admit(Lattice(n, 0));
        return *sc;
    }
    return tube_owner(M);
}

}  // namespace multinorm
