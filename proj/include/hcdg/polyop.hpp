#pragma once

#include "transversal.hpp"

namespace hcdg {

// Polydifferential operators in the normal form  xi^S x^x (P_1 s (x) ... (x) P_p s),
// s placed to the right of each slot, every slot P_i a pure derivative monomial.
// The same key serves F[1]-side tensors (slots d_x^y d_xi^T) and transversal
// ones (slots are words in j(b), T = 0).
struct PKey {
    Exp x;
    uint32_t S = 0;
    std::vector<Slot> slots;
    auto operator<=>(const PKey&) const = default;
    FKey coef() const { return FKey{x, S}; }
    int arity() const { return int(slots.size()); }
};

struct PolyF1Tag {};
struct PolyBTag {};
using PolyOpF1 = Lin<PKey, PolyF1Tag>;
using PolyOpB = Lin<PKey, PolyBTag>;

template <class L>
struct slot_op_of;
template <>
struct slot_op_of<PolyOpF1> {
    using type = DiffOpF1;
};
template <>
struct slot_op_of<PolyOpB> {
    using type = OmB;
};

// shifted degree of a pure slot
inline int slot_degree(const Slot& s) { return 1 - popcount(s.T); }
inline int slot_order(const Slot& s) { return s.y.degree() + popcount(s.T); }
inline int pkey_degree(const PKey& k) {
    int d = popcount(k.S);
    for (auto& s : k.slots) d += slot_degree(s);
    return d;
}
inline int pkey_order(const PKey& k) {
    int o = 0;
    for (auto& s : k.slots) o += slot_order(s);
    return o;
}

template <class L>
int max_arity(const L& p) {
    int a = -1;
    for (auto& [k, c] : p) a = std::max(a, k.arity());
    return a;
}
template <class L>
L arity_part(const L& p, int a) {
    return p.filter([a](const PKey& k) { return k.arity() == a; });
}
template <class L>
std::vector<int> pdegrees_of(const L& p) {
    std::vector<int> g;
    for (auto& [k, c] : p) g.push_back(pkey_degree(k));
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

template <class Op>
Op slot_as_op(const Slot& s) {
    return Op(WKey{s.y, s.T, Exp{}, 0}, Scalar(1));
}

// front * (D_1 s (x) ... (x) D_p s) for slots carrying coefficients; moves every
// coefficient to the front with the Koszul sign of the shifted slots it passes.
template <class P, class Op>
void tensor_accumulate(P& out, const FormElement& front, const std::vector<const Op*>& slots, const Scalar& scale) {
    struct Frame {
        FKey f;
        Scalar c;
        std::vector<Slot> s;
        int passed;  // total shifted degree of slots placed so far
    };
    std::vector<Frame> cur;
    for (auto& [k, c] : front) cur.push_back(Frame{k, c * scale, {}, 0});
    for (const Op* op : slots) {
        std::vector<Frame> nx;
        for (auto& fr : cur)
            for (auto& [k, c] : *op) {
                if (fr.f.S & k.S) continue;
                Scalar v = fr.c * c;
                int par = merge_parity(fr.f.S, k.S) ^ ((popcount(k.S) * fr.passed) & 1);
                if (par) v = -v;
                Frame g{FKey{fr.f.x + k.x, fr.f.S | k.S}, v, fr.s, fr.passed};
                Slot sl{k.y, k.T};
                g.s.push_back(sl);
                g.passed += slot_degree(sl);
                nx.push_back(std::move(g));
            }
        cur = std::move(nx);
        if (cur.empty()) return;
    }
    for (auto& fr : cur) out.add(PKey{fr.f.x, fr.f.S, std::move(fr.s)}, fr.c);
}

template <class P, class Op>
P tensor(const FormElement& front, const std::vector<Op>& slots) {
    std::vector<const Op*> ptr;
    for (auto& s : slots) ptr.push_back(&s);
    P out;
    tensor_accumulate(out, front, ptr, Scalar(1));
    return out;
}

template <class P>
P cup(const P& a, const P& b) {
    P out;
    for (auto& [ka, ca] : a) {
        int da = 0;
        for (auto& s : ka.slots) da += slot_degree(s);
        for (auto& [kb, cb] : b) {
            if (ka.S & kb.S) continue;
            Scalar v = ca * cb;
            int par = merge_parity(ka.S, kb.S) ^ ((popcount(kb.S) * da) & 1);
            if (par) v = -v;
            PKey k{ka.x + kb.x, ka.S | kb.S, ka.slots};
            k.slots.insert(k.slots.end(), kb.slots.begin(), kb.slots.end());
            out.add(std::move(k), v);
        }
    }
    return out;
}

// Hochschild differential; arity-zero components are closed.
template <class P>
P hochschild_dH(const P& p, int n) {
    P out;
    for (auto& [k, c] : p) {
        int a = k.arity();
        if (a == 0) continue;
        int w = popcount(k.S);
        {
            PKey t = k;
            t.slots.insert(t.slots.begin(), Slot{});
            out.add(std::move(t), (w & 1) ? -c : c);
        }
        int star = w;
        for (int i = 0; i < a; ++i) {
            star += slot_degree(k.slots[i]);
            for (auto& [cc, s1, s2] : coproduct_pure(k.slots[i], n)) {
                PKey t{k.x, k.S, {}};
                t.slots.reserve(a + 1);
                for (int j = 0; j < i; ++j) t.slots.push_back(k.slots[j]);
                t.slots.push_back(s1);
                t.slots.push_back(s2);
                for (int j = i + 1; j < a; ++j) t.slots.push_back(k.slots[j]);
                int par = (star + popcount(s2.T)) & 1;
                Scalar v = c * cc;
                out.add(std::move(t), par ? -v : v);
            }
        }
        PKey t = k;
        t.slots.push_back(Slot{});
        out.add(std::move(t), (star & 1) ? c : -c);
    }
    return out;
}

// Iterated unshifted coproduct of a pure slot into m factors.
inline std::vector<std::pair<Scalar, std::vector<Slot>>> coproduct_iter(const Slot& s, int m, int n) {
    if (m == 1) return {{Scalar(1), {s}}};
    std::vector<std::pair<Scalar, std::vector<Slot>>> out;
    for (auto& [c, s1, s2] : coproduct_pure(s, n))
        for (auto& [c2, rest] : coproduct_iter(s2, m - 1, n)) {
            std::vector<Slot> v{s1};
            v.insert(v.end(), rest.begin(), rest.end());
            out.emplace_back(c * c2, std::move(v));
        }
    return out;
}

// Slot-algebra product used by the star product: (pure a) * (b with coefficients).
template <class Op>
using SlotProduct = std::function<Op(const Slot&, const Op&)>;

// insertion of an arity-zero element: slot k evaluates on the coefficient and drops out
template <class P, class Op>
void star_eval(P& out, const P& a, const PKey& kb, const Scalar& cb, const SlotProduct<Op>& prod) {
    FormElement wb(kb.coef(), cb);
    int degb = popcount(kb.S);
    Op wop = lmul_form(wb, slot_as_op<Op>(Slot{}));
    for (auto& [ka, ca] : a) {
        int u = ka.arity();
        FormElement front(ka.coef(), ca);
        int before = 0;
        for (int k = 0; k < u; ++k) {
            int dagger = 0;
            for (int j = k + 1; j < u; ++j) dagger += slot_degree(ka.slots[j]);
            for (auto& [ke, ce] : prod(ka.slots[k], wop)) {
                if (ke.y.degree() || ke.T) continue;
                int de = popcount(ke.S);
                int par = (degb - 1) * dagger + de * before;
                FormElement fe = wedge(front, FormElement(ke.coef(), (par & 1) ? -ce : ce));
                if (fe.is_zero()) continue;
                std::vector<Op> rest;
                for (int j = 0; j < u; ++j)
                    if (j != k) rest.push_back(slot_as_op<Op>(ka.slots[j]));
                std::vector<const Op*> ptr;
                for (auto& x : rest) ptr.push_back(&x);
                tensor_accumulate(out, fe, ptr, Scalar(1));
            }
            before += slot_degree(ka.slots[k]);
        }
    }
}

// D * D' = sum_k (-1)^{(|D'|-1) dagger_k} d_1 .. (Delta^{v-1} d_k) . D' .. d_u
template <class P>
P star(const P& a, const P& b, int n, const SlotProduct<typename slot_op_of<P>::type>& prod) {
    using Op = typename slot_op_of<P>::type;
    P out;
    for (auto& [kb, cb] : b) {
        int v = kb.arity();
        int degb = pkey_degree(kb);
        if (v == 0) {
            star_eval(out, a, kb, cb, prod);
            continue;
        }
        // the b-slots with b's coefficient folded into the first one
        std::vector<Op> bs;
        for (int j = 0; j < v; ++j) bs.push_back(slot_as_op<Op>(kb.slots[j]));
        bs[0] = lmul_form(FormElement(kb.coef(), cb), bs[0]);
        for (auto& [ka, ca] : a) {
            int u = ka.arity();
            FormElement front(ka.coef(), ca);
            for (int k = 0; k < u; ++k) {
                int dagger = 0;
                for (int j = k + 1; j < u; ++j) dagger += slot_degree(ka.slots[j]);
                Scalar sgn = sign_scalar(((degb - 1) * dagger) & 1);
                for (auto& [cc, parts] : coproduct_iter(ka.slots[k], v, n)) {
                    // (a_1 (x) .. (x) a_v) . (b_1 s (x) .. (x) b_v s)
                    int par = 0;
                    for (int j = 0; j < v; ++j) {
                        int bj = slot_degree(kb.slots[j]) + (j == 0 ? popcount(kb.S) : 0);
                        for (int i = j + 1; i < v; ++i) par += bj * (-popcount(parts[i].T));
                    }
                    std::vector<Op> mid;
                    mid.reserve(v);
                    bool zero = false;
                    for (int j = 0; j < v; ++j) {
                        mid.push_back(prod(parts[j], bs[j]));
                        if (mid.back().is_zero()) {
                            zero = true;
                            break;
                        }
                    }
                    if (zero) continue;
                    std::vector<Op> all;
                    for (int j = 0; j < k; ++j) all.push_back(slot_as_op<Op>(ka.slots[j]));
                    for (auto& m : mid) all.push_back(std::move(m));
                    for (int j = k + 1; j < u; ++j) all.push_back(slot_as_op<Op>(ka.slots[j]));
                    std::vector<const Op*> ptr;
                    for (auto& s : all) ptr.push_back(&s);
                    Scalar scale = cc * sgn;
                    if (par & 1) scale = -scale;
                    tensor_accumulate(out, front, ptr, scale);
                }
            }
        }
    }
    return out;
}

template <class P>
P gerstenhaber(const P& a, const P& b, int n, const SlotProduct<typename slot_op_of<P>::type>& prod) {
    P out;
    for (int da : pdegrees_of(a)) {
        P ah = a.filter([da](const PKey& k) { return pkey_degree(k) == da; });
        for (int db : pdegrees_of(b)) {
            P bh = b.filter([db](const PKey& k) { return pkey_degree(k) == db; });
            out += star(ah, bh, n, prod);
            P back = star(bh, ah, n, prod);
            if (((da - 1) * (db - 1)) & 1) out += back;
            else out -= back;
        }
    }
    return out;
}

// Apply a slotwise linear map f of degree deg_f (Koszul over the shifted slots).
template <class P, class F>
P tensor_map_slot(const P& p, int pos, int deg_f, F f) {
    using Op = typename slot_op_of<P>::type;
    P out;
    for (auto& [k, c] : p) {
        if (pos >= k.arity()) continue;
        int passed = popcount(k.S);
        for (int j = 0; j < pos; ++j) passed += slot_degree(k.slots[j]);
        std::vector<Op> all;
        for (int j = 0; j < k.arity(); ++j) all.push_back(slot_as_op<Op>(k.slots[j]));
        Op img = f(all[pos]);
        if (img.is_zero()) continue;
        all[pos] = std::move(img);
        std::vector<const Op*> ptr;
        for (auto& s : all) ptr.push_back(&s);
        Scalar sc = ((deg_f * passed) & 1) ? -c : c;
        tensor_accumulate(out, FormElement(k.coef(), Scalar(1)), ptr, sc);
    }
    return out;
}

} // namespace hcdg
