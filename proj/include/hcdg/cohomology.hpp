#pragma once

#include "hochschild.hpp"
#include "linalg.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>

namespace hcdg {

struct spec_rejection : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using WeightVec = std::vector<int>;

// Integer gradings given per token of the element grammar.
class WeightSystem {
public:
    WeightSystem() = default;
    WeightSystem(const ChartModel& m, std::vector<std::string> use = {}) : nm_(m.names) {
        for (auto& [wn, tw] : m.weights) {
            if (!use.empty() && std::find(use.begin(), use.end(), wn) == use.end()) continue;
            names_.push_back(wn);
            for (auto& [tok, v] : tw) {
                if (v < 0) throw spec_rejection("negative token weight in " + wn);
                auto& vec = tok_[tok];
                vec.resize(names_.size() - 1, 0);
                vec.push_back(v);
            }
        }
        for (auto& [t, v] : tok_) v.resize(names_.size(), 0);
    }
    bool empty() const { return names_.empty(); }
    int size() const { return int(names_.size()); }
    const std::vector<std::string>& names() const { return names_; }
    const Names& model_names() const { return nm_; }

    WeightVec of(const std::string& tok) const {
        auto it = tok_.find(tok);
        return it == tok_.end() ? WeightVec(size(), 0) : it->second;
    }
    WeightVec coord(int i) const { return of(nm_.coords[i]); }
    WeightVec xi(int a) const { return of(nm_.xi(a)); }
    WeightVec d(int i) const { return of(nm_.d(i)); }
    WeightVec dxi(int a) const { return of(nm_.dxi(a)); }
    WeightVec b(int al) const { return of(nm_.b(al)); }

    WeightVec zero() const { return WeightVec(size(), 0); }

private:
    Names nm_;
    std::vector<std::string> names_;
    std::map<std::string, WeightVec> tok_;
};

inline void add_to(WeightVec& a, const WeightVec& b, int times = 1) {
    for (size_t i = 0; i < a.size(); ++i) a[i] += times * b[i];
}
inline bool leq(const WeightVec& a, const WeightVec& b) {
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}
inline bool positive(const WeightVec& a) {
    for (int v : a)
        if (v > 0) return true;
    return false;
}
inline std::string to_string(const WeightVec& w) {
    std::string s = "(";
    for (size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + std::to_string(w[i]);
    return s + ")";
}

// A generator family: even ones take any exponent, odd ones 0 or 1.
struct Atom {
    WeightVec w;
    bool odd = false;
};

// All exponent vectors with total weight <= bound (every atom must carry weight).
inline std::vector<std::pair<std::vector<int>, WeightVec>> enumerate_monomials(const std::vector<Atom>& atoms,
                                                                               const WeightVec& bound) {
    for (auto& a : atoms)
        if (!positive(a.w)) throw spec_rejection("a generator carries no weight; the window is not finite");
    std::vector<std::pair<std::vector<int>, WeightVec>> out;
    std::vector<int> e(atoms.size(), 0);
    std::function<void(size_t, WeightVec)> go = [&](size_t i, WeightVec w) {
        if (i == atoms.size()) {
            out.push_back({e, w});
            return;
        }
        int cap = atoms[i].odd ? 1 : std::numeric_limits<int>::max();
        for (int k = 0; k <= cap && leq(w, bound); ++k) {
            e[i] = k;
            go(i + 1, w);
            add_to(w, atoms[i].w);
        }
        e[i] = 0;
    };
    go(0, WeightVec(bound.size(), 0));
    return out;
}

// Coefficient monomials xi^S x^e of Omega_F.
inline std::vector<std::pair<FKey, WeightVec>> coef_monomials(const WeightSystem& ws, int n, int r, const WeightVec& bound) {
    std::vector<Atom> atoms;
    for (int i = 0; i < n; ++i) atoms.push_back({ws.coord(i), false});
    for (int a = 0; a < r; ++a) atoms.push_back({ws.xi(a), true});
    std::vector<std::pair<FKey, WeightVec>> out;
    for (auto& [e, w] : enumerate_monomials(atoms, bound)) {
        FKey k;
        for (int i = 0; i < n; ++i) k.x.set(i, e[i]);
        for (int a = 0; a < r; ++a)
            if (e[n + a]) k.S |= 1u << a;
        out.push_back({k, w});
    }
    return out;
}

// Pure slots: F[1] side d_x^y d_xi^T, B side words b^y.
inline std::vector<std::pair<Slot, WeightVec>> slot_monomials(const WeightSystem& ws, const Names& nm, bool b_side,
                                                             const WeightVec& bound) {
    std::vector<Atom> atoms;
    int n = nm.n(), r = nm.r, nb = nm.nB();
    if (b_side)
        for (int al = 0; al < nb; ++al) atoms.push_back({ws.b(al), false});
    else {
        for (int i = 0; i < n; ++i) atoms.push_back({ws.d(i), false});
        for (int a = 0; a < r; ++a) atoms.push_back({ws.dxi(a), true});
    }
    std::vector<std::pair<Slot, WeightVec>> out;
    for (auto& [e, w] : enumerate_monomials(atoms, bound)) {
        Slot s;
        if (b_side)
            for (int al = 0; al < nb; ++al) s.y.set(al, e[al]);
        else {
            for (int i = 0; i < n; ++i) s.y.set(i, e[i]);
            for (int a = 0; a < r; ++a)
                if (e[n + a]) s.T |= 1u << a;
        }
        out.push_back({s, w});
    }
    return out;
}

// Finite basis of one graded piece, with coordinates.
template <class L>
struct Basis {
    using K = typename L::key_type;
    std::vector<K> keys;
    std::map<K, int> index;

    void push(const K& k) {
        if (index.emplace(k, int(keys.size())).second) keys.push_back(k);
    }
    size_t size() const { return keys.size(); }
    L element(int i) const { return L(keys[i], Scalar(1)); }
    L combine(const SVec& v) const {
        L out;
        for (auto& [i, c] : v) out.add(keys[i], c);
        return out;
    }
    // a key outside the piece produces a rejection naming it
    template <class Show>
    SVec coords(const L& x, Show&& show) const {
        SVec v;
        for (auto& [k, c] : x) {
            auto it = index.find(k);
            if (it == index.end()) throw spec_rejection("image leaves the enumerated piece: " + show(L(k, Scalar(1))));
            v.emplace(it->second, c);
        }
        return v;
    }
};

template <class L>
using Diff = std::function<L(const L&)>;
template <class L>
using Shower = std::function<std::string(const L&)>;

template <class L>
std::vector<SVec> matrix_of_map(const Basis<L>& src, const Basis<L>& tgt, const Diff<L>& f, const Shower<L>& show) {
    std::vector<SVec> cols;
    cols.reserve(src.size());
    for (size_t j = 0; j < src.size(); ++j) cols.push_back(tgt.coords(f(src.element(int(j))), show));
    return cols;
}

template <class L>
struct CohomologyPiece {
    int degree = 0;
    WeightVec weight;
    size_t dim = 0, rank_out = 0, rank_in = 0, h = 0;
    std::vector<L> reps;
};

// H at the middle of prev -> cur -> next.
template <class L>
CohomologyPiece<L> cohomology_at(const Basis<L>& prev, const Basis<L>& cur, const Basis<L>& next, const Diff<L>& d,
                                 const Shower<L>& show) {
    CohomologyPiece<L> out;
    out.dim = cur.size();
    RankData ro = rank_and_kernel(matrix_of_map(cur, next, d, show));
    std::vector<SVec> im = matrix_of_map(prev, cur, d, show);
    Echelon e;
    for (auto& c : im) e.insert(c);
    out.rank_out = ro.rank;
    out.rank_in = e.rank();
    for (auto& k : ro.kernel)
        if (e.insert(k)) out.reps.push_back(cur.combine(k));
    if (e.rank() != ro.kernel.size()) throw spec_rejection("incoming image is not inside the kernel (d^2 != 0)");
    out.h = out.dim - out.rank_out - out.rank_in;
    return out;
}

// x with d(x) = target inside the span of prev, if one exists.
template <class L>
std::optional<L> solve_primitive(const L& target, const Basis<L>& prev, const Basis<L>& cur, const Diff<L>& d,
                                 const Shower<L>& show) {
    auto x = solve_columns(matrix_of_map(prev, cur, d, show), cur.coords(target, show));
    if (!x) return std::nullopt;
    return prev.combine(*x);
}

template <class L>
bool same_class(const L& a, const L& b, const Basis<L>& prev, const Basis<L>& cur, const Diff<L>& d, const Shower<L>& show) {
    L diff = a - b;
    if (diff.is_zero()) return true;
    return solve_primitive(diff, prev, cur, d, show).has_value();
}

// Graded pieces ----------------------------------------------------------------

// Piece of (Omega_F, d_F) at exact weight.
inline std::map<int, Basis<FormElement>> form_pieces(const WeightSystem& ws, int n, int r, const WeightVec& w) {
    std::map<int, Basis<FormElement>> out;
    for (auto& [k, kw] : coef_monomials(ws, n, r, w))
        if (kw == w) out[popcount(k.S)].push(k);
    return out;
}

// Polydifferential cochains at exact weight; normalized keeps only slots of positive order.
template <class P>
std::map<int, Basis<P>> poly_pieces(const WeightSystem& ws, const Names& nm, const WeightVec& w, int max_arity,
                                    bool normalized = true) {
    constexpr bool b_side = std::is_same_v<P, PolyOpB>;
    std::map<int, Basis<P>> out;
    auto coefs = coef_monomials(ws, nm.n(), nm.r, w);
    auto slots = slot_monomials(ws, nm, b_side, w);
    std::vector<std::pair<Slot, WeightVec>> pos;
    for (auto& s : slots)
        if (!normalized || slot_order(s.first) > 0) pos.push_back(s);
    for (auto& [ck, cw] : coefs) {
        PKey k{ck.x, ck.S, {}};
        std::function<void(WeightVec)> go = [&](WeightVec acc) {
            if (acc == w) out[pkey_degree(k)].push(k);
            if (k.arity() >= max_arity) return;
            for (auto& [s, sw] : pos) {
                WeightVec nw = acc;
                add_to(nw, sw);
                if (!leq(nw, w)) continue;
                k.slots.push_back(s);
                go(nw);
                k.slots.pop_back();
            }
        };
        go(cw);
    }
    return out;
}

template <class P>
WeightVec pkey_weight(const WeightSystem& ws, const PKey& k) {
    constexpr bool b_side = std::is_same_v<P, PolyOpB>;
    const Names& nm = ws.model_names();
    WeightVec w = ws.zero();
    for (int i = 0; i < nm.n(); ++i) add_to(w, ws.coord(i), k.x[i]);
    for (int a = 0; a < nm.r; ++a)
        if (k.S >> a & 1) add_to(w, ws.xi(a));
    for (auto& s : k.slots) {
        if (b_side)
            for (int al = 0; al < nm.nB(); ++al) add_to(w, ws.b(al), s.y[al]);
        else {
            for (int i = 0; i < nm.n(); ++i) add_to(w, ws.d(i), s.y[i]);
            for (int a = 0; a < nm.r; ++a)
                if (s.T >> a & 1) add_to(w, ws.dxi(a));
        }
    }
    return w;
}

// A closed cochain is exact iff each (weight, degree) part is; primitives are sought
// among all cochains of that weight up to the part's arity.
template <class P>
bool exact_by_weight(const P& target, const WeightSystem& ws, const Diff<P>& d, const Shower<P>& show,
                     std::string* why = nullptr) {
    std::map<std::pair<WeightVec, int>, P> parts;
    for (auto& [k, c] : target) parts[{pkey_weight<P>(ws, k), pkey_degree(k)}].add(k, c);
    for (auto& [key, part] : parts) {
        auto pieces = poly_pieces<P>(ws, ws.model_names(), key.first, max_arity(part), false);
        Basis<P> prev;
        if (auto it = pieces.find(key.second - 1); it != pieces.end()) prev = it->second;
        Basis<P> cur;
        for (size_t j = 0; j < prev.size(); ++j)
            for (auto& [k, c] : d(prev.element(int(j)))) cur.push(k);
        for (auto& [k, c] : part) cur.push(k);
        if (!solve_primitive(part, prev, cur, d, show)) {
            if (why) *why = "no primitive at weight " + to_string(key.first) + " for " + show(part);
            return false;
        }
    }
    return true;
}

// Operators d_x^y d_xi^T with coefficients (one slot, unshifted degree).
inline std::map<int, Basis<DiffOpF1>> op_pieces(const WeightSystem& ws, const Names& nm, const WeightVec& w) {
    std::map<int, Basis<DiffOpF1>> out;
    for (auto& [ck, cw] : coef_monomials(ws, nm.n(), nm.r, w))
        for (auto& [s, sw] : slot_monomials(ws, nm, false, w)) {
            WeightVec t = cw;
            add_to(t, sw);
            if (t != w) continue;
            WKey k{s.y, s.T, ck.x, ck.S};
            out[key_degree(k)].push(k);
        }
    return out;
}
inline std::map<int, Basis<OmB>> omb_pieces(const WeightSystem& ws, const Names& nm, const WeightVec& w) {
    std::map<int, Basis<OmB>> out;
    for (auto& [ck, cw] : coef_monomials(ws, nm.n(), nm.r, w))
        for (auto& [s, sw] : slot_monomials(ws, nm, true, w)) {
            WeightVec t = cw;
            add_to(t, sw);
            if (t != w) continue;
            out[popcount(ck.S)].push(WKey{s.y, 0, ck.x, ck.S});
        }
    return out;
}
// Omega_F (x) wedge B
inline std::map<int, Basis<PolyVecB>> polyvec_b_pieces(const WeightSystem& ws, const Names& nm, const WeightVec& w) {
    std::map<int, Basis<PolyVecB>> out;
    std::vector<Atom> atoms;
    int nb = nm.nB();
    for (int al = 0; al < nb; ++al) atoms.push_back({ws.b(al), true});
    auto wedges = enumerate_monomials(atoms, w);
    for (auto& [ck, cw] : coef_monomials(ws, nm.n(), nm.r, w))
        for (auto& [e, bw] : wedges) {
            WeightVec t = cw;
            add_to(t, bw);
            if (t != w) continue;
            uint32_t T = 0;
            for (int al = 0; al < nb; ++al)
                if (e[al]) T |= 1u << al;
            out[popcount(ck.S) + popcount(T)].push(WKey{Exp{}, T, ck.x, ck.S});
        }
    return out;
}

// All weight vectors <= bound.
inline std::vector<WeightVec> weight_window(const WeightVec& lo, const WeightVec& hi) {
    std::vector<WeightVec> out;
    WeightVec w = lo;
    std::function<void(size_t)> go = [&](size_t i) {
        if (i == w.size()) {
            out.push_back(w);
            return;
        }
        for (int v = lo[i]; v <= hi[i]; ++v) {
            w[i] = v;
            go(i + 1);
        }
        w[i] = lo[i];
    };
    go(0);
    return out;
}

// Cohomology of a complex given by its pieces.
template <class L>
std::vector<CohomologyPiece<L>> cohomology(const std::map<int, Basis<L>>& pieces, const WeightVec& w, const Diff<L>& d,
                                           const Shower<L>& show) {
    std::vector<CohomologyPiece<L>> out;
    static const Basis<L> empty;
    auto get = [&](int k) -> const Basis<L>& {
        auto it = pieces.find(k);
        return it == pieces.end() ? empty : it->second;
    };
    for (auto& [k, b] : pieces) {
        auto piece = cohomology_at(get(k - 1), b, get(k + 1), d, show);
        piece.degree = k;
        piece.weight = w;
        out.push_back(std::move(piece));
    }
    return out;
}

// An induced map f: H(C) -> H(C') with candidate inverse g, checked on representatives.
template <class A, class B>
struct InducedIso {
    bool same_dim = true, gf_id = true, fg_id = true;
    std::string detail;
    bool pass() const { return same_dim && gf_id && fg_id; }
};

template <class A, class B>
InducedIso<A, B> check_induced_iso(const std::map<int, Basis<A>>& ca, const std::map<int, Basis<B>>& cb,
                                   const WeightVec& w, const Diff<A>& da, const Diff<B>& db,
                                   const std::function<B(const A&)>& f, const std::function<A(const B&)>& g,
                                   const Shower<A>& sa, const Shower<B>& sb) {
    InducedIso<A, B> r;
    auto ha = cohomology(ca, w, da, sa);
    auto hb = cohomology(cb, w, db, sb);
    std::map<int, size_t> dima, dimb;
    for (auto& p : ha) dima[p.degree] = p.h;
    for (auto& p : hb) dimb[p.degree] = p.h;
    for (auto& [k, v] : dima)
        if (v && dimb[k] != v) r.same_dim = false;
    for (auto& [k, v] : dimb)
        if (v && dima[k] != v) r.same_dim = false;
    static const Basis<A> ea;
    static const Basis<B> eb;
    auto getA = [&](int k) -> const Basis<A>& { auto it = ca.find(k); return it == ca.end() ? ea : it->second; };
    auto getB = [&](int k) -> const Basis<B>& { auto it = cb.find(k); return it == cb.end() ? eb : it->second; };
    for (auto& p : ha)
        for (auto& x : p.reps) {
            A y = g(f(x));
            if (!same_class(y, x, getA(p.degree - 1), getA(p.degree), da, sa)) {
                r.gf_id = false;
                r.detail = sa(x);
            }
        }
    for (auto& p : hb)
        for (auto& x : p.reps) {
            B y = f(g(x));
            if (!same_class(y, x, getB(p.degree - 1), getB(p.degree), db, sb)) {
                r.fg_id = false;
                r.detail = sb(x);
            }
        }
    return r;
}

} // namespace hcdg
