#include "multinorm/partitions.hpp"

#include <algorithm>
#include <stdexcept>

namespace multinorm {

std::string LinearConstraint::to_string() const {
    std::string out;
    bool first = true;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_zero()) continue;
        if (!first) out += " + ";
        out += a[i].to_string() + "*t" + std::to_string(i + 1);
        first = false;
    }
    if (first) out = "0";
    out += strict ? " < 0" : " <= 0";
    return out;
}

std::vector<std::string> Cone::export_inequalities() const {
    std::vector<std::string> out;
    out.reserve(full.size());
    for (const auto& c : full) out.push_back(c.to_string());
    return out;
}

int MarkedPartition::n() const {
    int c = 0;
    for (const auto& b : blocks) c += (int)b.members.size();
    return c;
}

std::vector<int> MarkedPartition::dotted_set() const {
    std::vector<int> d;
    for (const auto& b : blocks) d.push_back(b.dotted);
    std::sort(d.begin(), d.end());
    return d;
}

int MarkedPartition::block_of(int i) const {
    for (int r = 0; r < (int)blocks.size(); ++r)
        for (int m : blocks[r].members)
            if (m == i) return r;
    throw std::out_of_range("block_of: index not in partition");
}

void MarkedPartition::canonicalize() {
    for (auto& b : blocks) std::sort(b.members.begin(), b.members.end());
    std::sort(blocks.begin(), blocks.end(),
              [](const Block& a, const Block& b) { return a.members.front() < b.members.front(); });
}

bool MarkedPartition::operator==(const MarkedPartition& o) const {
    if (blocks.size() != o.blocks.size()) return false;
    for (std::size_t r = 0; r < blocks.size(); ++r)
        if (blocks[r].members != o.blocks[r].members || blocks[r].dotted != o.blocks[r].dotted)
            return false;
    return true;
}

bool MarkedPartition::operator<(const MarkedPartition& o) const {
    return to_string() < o.to_string();
}

std::string MarkedPartition::to_string() const {
    if (blocks.empty()) return "{}";
    std::string s;
    for (const auto& b : blocks) {
        s += '{';
        for (std::size_t i = 0; i < b.members.size(); ++i) {
            if (i) s += ',';
            s += std::to_string(b.members[i] + 1);
            if (b.members[i] == b.dotted) s += '.';
        }
        s += '}';
    }
    return s;
}

MarkedPartition MarkedPartition::parse(const std::string& str) {
    MarkedPartition p;
    std::size_t i = 0;
    while (i < str.size()) {
        if (str[i] != '{') throw std::invalid_argument("marked partition: expected '{'");
        ++i;
        Block b;
        std::string cur;
        bool dotted = false;
        auto flush = [&]() {
            if (cur.empty()) throw std::invalid_argument("marked partition: empty entry");
            int v = std::stoi(cur) - 1;
            b.members.push_back(v);
            if (dotted) {
                if (b.dotted != -1) throw std::invalid_argument("marked partition: two dots in block");
                b.dotted = v;
            }
            cur.clear();
            dotted = false;
        };
        for (; i < str.size() && str[i] != '}'; ++i) {
            if (str[i] == ',') flush();
            else if (str[i] == '.') dotted = true;
            else cur += str[i];
        }
        if (i == str.size()) throw std::invalid_argument("marked partition: missing '}'");
        flush();
        ++i;
        if (b.dotted == -1) throw std::invalid_argument("marked partition: block has no dot");
        p.blocks.push_back(std::move(b));
    }
    p.canonicalize();
    return p;
}

MarkedPartition MarkedPartition::principal(int n) {
    MarkedPartition p;
    for (int i = 0; i < n; ++i) p.blocks.push_back({{i}, i});
    return p;
}

std::vector<MarkedPartition> MarkedPartition::enumerate(int n) {
    if (n < 1) throw std::invalid_argument("enumerate: n must be >= 1");
    // Set partitions by restricted growth strings, then every choice of one
    // dotted entry per block.
    std::vector<MarkedPartition> out;
    std::vector<int> rgs(n, 0);
    auto emit = [&]() {
        int nb = 1 + *std::max_element(rgs.begin(), rgs.end());
        std::vector<std::vector<int>> blocks(nb);
        for (int i = 0; i < n; ++i) blocks[rgs[i]].push_back(i);
        std::vector<int> choice(nb, 0);
        while (true) {
            MarkedPartition p;
            for (int b = 0; b < nb; ++b)
                p.blocks.push_back({blocks[b], blocks[b][choice[b]]});
            p.canonicalize();
            out.push_back(std::move(p));
            int b = nb - 1;
            while (b >= 0 && choice[b] + 1 == (int)blocks[b].size()) choice[b--] = 0;
            if (b < 0) break;
            ++choice[b];
        }
    };
    // Iterate restricted growth strings: rgs[0] = 0, rgs[i] <= 1 + max(prefix).
    std::vector<int> maxp(n, 0);
    int i = n - 1;
    emit();
    while (true) {
        i = n - 1;
        while (i > 0) {
            int cap = 0;
            for (int k = 0; k < i; ++k) cap = std::max(cap, rgs[k]);
            if (rgs[i] <= cap) break;
            --i;
        }
        if (i == 0) break;
        ++rgs[i];
        for (int k = i + 1; k < n; ++k) rgs[k] = 0;
        emit();
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

PartitionTable::PartitionTable(const Structure& s) : S_(&s) {
    all_ = MarkedPartition::enumerate(s.n());
    for (const auto& p : all_)
        if (cone_interior_nonempty(p)) sE_.push_back(p);
}

bool PartitionTable::in_sE(const MarkedPartition& p) const {
    return std::find(sE_.begin(), sE_.end(), p) != sE_.end();
}

Rational PartitionTable::tau(const MarkedPartition& p, int bp, int bq) const {
    if (bp < 0 || bp >= p.size() || bq < 0 || bq >= p.size())
        throw std::out_of_range("tau: invalid block index");
    const int kp = p.blocks[bp].dotted;
    const int kq = p.blocks[bq].dotted;
    bool first = true;
    Rational m(0);
    for (int l : p.blocks[bq].members) {
        Rational v = S_->e(kp, l) / S_->e(kq, l);
        if (first || v < m) { m = v; first = false; }
    }
    return m;
}

Cone PartitionTable::cone_gamma(const MarkedPartition& p) const {
    const int n = S_->n();
    Cone c;
    // Nonnegativity: -t_i <= 0.
    for (int i = 0; i < n; ++i) {
        LinearConstraint lc;
        lc.a.assign(n, Rational(0));
        lc.a[i] = Rational(-1);
        c.full.push_back(lc);
        c.reduced.push_back(lc);
    }
    // Defining system: t_j / e(j,i) <= t_{k_r} / e(k_r,i) for every block r,
    // every i in A_r and every j.
    for (const auto& b : p.blocks)
        for (int i : b.members)
            for (int j = 0; j < n; ++j) {
                if (j == b.dotted) continue;
                LinearConstraint lc;
                lc.a.assign(n, Rational(0));
                lc.a[j] += Rational(1) / S_->e(j, i);
                lc.a[b.dotted] -= Rational(1) / S_->e(b.dotted, i);
                c.full.push_back(std::move(lc));
            }
    // Reduced system: within-block bounds plus pairwise dotted comparisons.
    for (const auto& b : p.blocks)
        for (int j : b.members) {
            if (j == b.dotted) continue;
            LinearConstraint lc;
            lc.a.assign(n, Rational(0));
            lc.a[j] = Rational(1);
            lc.a[b.dotted] -= Rational(1) / S_->e(b.dotted, j);
            c.reduced.push_back(std::move(lc));
        }
    for (int bp = 0; bp < p.size(); ++bp)
        for (int bq = 0; bq < p.size(); ++bq) {
            if (bp == bq) continue;
            LinearConstraint lc;
            lc.a.assign(n, Rational(0));
            lc.a[p.blocks[bp].dotted] += Rational(1);
            lc.a[p.blocks[bq].dotted] -= tau(p, bp, bq);
            c.reduced.push_back(std::move(lc));
        }
    return c;
}

Cone PartitionTable::principal_cone() const {
    return cone_gamma(MarkedPartition::principal(S_->n()));
}

// Interior nonemptiness reduces to the strict system on dotted entries
// u_p < tau_S(k_p,k_q) u_q, feasible exactly when every directed cycle of
// tau-weights has product > 1 (min-product closure over the complete digraph).
namespace {

// Min-product closure over nonempty paths of the complete digraph with the
// given positive weights; entry (a,a) ends up as the lightest cycle through a.
std::vector<std::optional<Rational>> min_product_closure(const std::vector<Rational>& w, int s) {
    std::vector<std::optional<Rational>> d(s * s);
    for (int a = 0; a < s; ++a)
        for (int b = 0; b < s; ++b)
            if (a != b) d[a * s + b] = w[a * s + b];
    for (int k = 0; k < s; ++k)
        for (int a = 0; a < s; ++a)
            for (int b = 0; b < s; ++b) {
                if (!d[a * s + k] || !d[k * s + b]) continue;
                Rational via = *d[a * s + k] * *d[k * s + b];
                if (!d[a * s + b] || via < *d[a * s + b]) d[a * s + b] = via;
            }
    return d;
}

}  // namespace

bool PartitionTable::cone_interior_nonempty(const MarkedPartition& p) const {
    const int s = p.size();
    if (s <= 1) return true;
    std::vector<Rational> w(s * s, Rational(1));
    for (int a = 0; a < s; ++a)
        for (int b = 0; b < s; ++b)
            if (a != b) w[a * s + b] = tau(p, a, b);
    auto d = min_product_closure(w, s);
    for (int a = 0; a < s; ++a)
        if (d[a * s + a] && *d[a * s + a] <= Rational(1)) return false;
    return true;
}

std::optional<RationalVec> PartitionTable::interior_point(const MarkedPartition& p) const {
    if (!cone_interior_nonempty(p)) return std::nullopt;
    const int s = p.size();
    const int n = S_->n();
    std::vector<Rational> u(s, Rational(1));
    if (s > 1) {
        // Minimal cycle product mc > 1; shrink all weights by gamma with
        // gamma^s <= mc, then anchor min-product distances at block 0.
        std::vector<Rational> w(s * s, Rational(1));
        for (int a = 0; a < s; ++a)
            for (int b = 0; b < s; ++b)
                if (a != b) w[a * s + b] = tau(p, a, b);
        auto cl = min_product_closure(w, s);
        Rational mc = *cl[0];  // lightest cycle through block 0
        for (int a = 0; a < s; ++a)
            if (cl[a * s + a]) mc = Rational::min(mc, *cl[a * s + a]);
        Rational gamma = Rational(1) + (mc - Rational(1)) / Rational(2);
        auto pow_s = [&](Rational g) {
            Rational r(1);
            for (int k = 0; k < s; ++k) r *= g;
            return r;
        };
        int halvings = 0;
        while (pow_s(gamma) > mc && halvings++ < 64)
            gamma = Rational(1) + (gamma - Rational(1)) / Rational(2);
        std::vector<Rational> w2 = w;
        for (int a = 0; a < s; ++a)
            for (int b = 0; b < s; ++b)
                if (a != b) w2[a * s + b] = w[a * s + b] / gamma;
        auto cl2 = min_product_closure(w2, s);
        for (int a = 0; a < s; ++a) u[a] = a == 0 ? Rational(1) : *cl2[a * s + 0];
    }
    RationalVec t(n, Rational(0));
    const Rational theta(1, 2);
    for (int r = 0; r < s; ++r) {
        const auto& b = p.blocks[r];
        t[b.dotted] = u[r];
        for (int i : b.members)
            if (i != b.dotted) t[i] = theta * u[r] / S_->e(b.dotted, i);
    }
    return t;
}

std::optional<Dominance> PartitionTable::dominant_set(const RationalVec& t) const {
    bool zero = true;
    for (const auto& v : t) {
        if (v < Rational(0)) throw std::invalid_argument("dominant_set: t must be nonnegative");
        if (!v.is_zero()) zero = false;
    }
    if (zero) return std::nullopt;

    // Collect dotted sets of the S in S_E whose cone contains t; the minimal
    // one under inclusion is D(t).
    std::vector<std::vector<int>> hits;
    for (const auto& p : sE_)
        if (cone_gamma(p).contains(t)) hits.push_back(p.dotted_set());
    if (hits.empty()) throw std::logic_error("dominant_set: no cone contains t");
    std::vector<int> D = hits.front();
    for (const auto& h : hits)
        if (h.size() < D.size()) D = h;
    for (const auto& h : hits)
        if (!std::includes(h.begin(), h.end(), D.begin(), D.end()))
            throw std::logic_error("dominant_set: dotted sets admit no minimum");

    // Canonical witness: each undotted i goes to the dotted k in D maximizing
    // t_k / e(k,i), ties broken by smallest k.
    const int n = S_->n();
    std::vector<std::vector<int>> members(D.size());
    for (int i = 0; i < n; ++i) {
        int best = -1;
        Rational bv(0);
        for (int di = 0; di < (int)D.size(); ++di) {
            Rational v = t[D[di]] / S_->e(D[di], i);
            if (best < 0 || v > bv) { best = di; bv = v; }
        }
        members[best].push_back(i);
    }
    Dominance dom;
    dom.D = D;
    for (int di = 0; di < (int)D.size(); ++di)
        dom.witness.blocks.push_back({members[di], D[di]});
    dom.witness.canonicalize();
    return dom;
}

bool PartitionTable::gamma_D_contains(const std::vector<int>& D, const RationalVec& t) const {
    auto dom = dominant_set(t);
    if (!dom) return D.empty();
    return dom->D == D;
}

bool PartitionTable::face_contains(const MarkedPartition& p, const RationalVec& t) const {
    return cone_gamma(p).contains(t) && principal_cone().contains(t);
}

bool PartitionTable::face_D_contains(const std::vector<int>& D, const RationalVec& t) const {
    if (D.empty()) {
        for (const auto& v : t)
            if (!v.is_zero()) return false;
        return true;
    }
    return principal_cone().contains(t) && gamma_D_contains(D, t);
}

std::vector<MarkedPartition> PartitionTable::with_dotted_set(const std::vector<int>& D) const {
    std::vector<MarkedPartition> out;
    for (const auto& p : sE_)
        if (p.dotted_set() == D) out.push_back(p);
    return out;
}

}  // namespace multinorm
