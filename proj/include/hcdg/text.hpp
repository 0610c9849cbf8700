#pragma once

#include "polyop.hpp"
#include "symtensor.hpp"

namespace hcdg {

// Printing -------------------------------------------------------------------

namespace detail {

// symbol part of a WKey under the given tag vocabulary
template <class Tag>
void symbol_factors(std::vector<std::string>& f, const WKey& k, const Names& nm);

template <>
inline void symbol_factors<DOF1Tag>(std::vector<std::string>& f, const WKey& k, const Names& nm) {
    for (int i = 0; i < nm.n(); ++i) detail::push_pow(f, nm.d(i), k.y[i]);
    for (int a = 0; a < nm.r; ++a)
        if (k.T >> a & 1) f.push_back(nm.dxi(a));
}
template <>
inline void symbol_factors<OmBTag>(std::vector<std::string>& f, const WKey& k, const Names& nm) {
    for (int b = 0; b < nm.nB(); ++b) detail::push_pow(f, nm.b(b), k.y[b]);
}
template <>
inline void symbol_factors<SymTag>(std::vector<std::string>& f, const WKey& k, const Names& nm) {
    std::vector<std::string> io;
    for (int a = 0; a < nm.r; ++a)
        if (k.T >> a & 1) io.push_back(nm.iota(a));
    detail::push_chain(f, io);
    for (int i = 0; i < nm.n(); ++i) detail::push_pow(f, nm.eh(i), k.y[i]);
}
template <>
inline void symbol_factors<SymBTag>(std::vector<std::string>& f, const WKey& k, const Names& nm) {
    for (int b = 0; b < nm.nB(); ++b) detail::push_pow(f, nm.b(b), k.y[b]);
}

template <class Tag>
std::string wkey_term(const WKey& k, const Scalar& c, const Names& nm) {
    std::vector<std::string> f;
    coef_factors(f, k.coef(), nm);
    symbol_factors<Tag>(f, k, nm);
    return join_term(c, f);
}

template <class Tag>
std::string slot_text(const Slot& s, const Names& nm) {
    std::vector<std::string> f;
    symbol_factors<Tag>(f, WKey{s.y, s.T, Exp{}, 0}, nm);
    return f.empty() ? "1" : join_term(Scalar(1), f);
}

} // namespace detail

template <class Tag>
std::string to_string(const Lin<WKey, Tag>& d, const Names& nm) {
    std::vector<std::string> terms;
    for (auto it = d.terms().rbegin(); it != d.terms().rend(); ++it)
        terms.push_back(detail::wkey_term<Tag>(it->first, it->second, nm));
    return detail::join_sum(terms);
}

template <class Tag>
std::string to_string(const Lin<PKey, Tag>& p, const Names& nm) {
    using SlotTag = std::conditional_t<std::is_same_v<Tag, PolyF1Tag>, DOF1Tag, OmBTag>;
    std::vector<std::string> terms;
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        const PKey& k = it->first;
        std::vector<std::string> f;
        coef_factors(f, k.coef(), nm);
        std::string br = "[";
        for (size_t i = 0; i < k.slots.size(); ++i) {
            if (i) br += "|";
            br += detail::slot_text<SlotTag>(k.slots[i], nm);
        }
        br += "]";
        f.push_back(br);
        terms.push_back(detail::join_term(it->second, f));
    }
    return detail::join_sum(terms);
}

// Parsing --------------------------------------------------------------------

// Operators on F[1]: a product of tokens is read as a composition.
inline DiffOpF1 parse_dop(const std::string& s, const Names& nm) {
    DiffOpF1 out;
    for (auto& t : parse_terms(s, nm)) {
        DiffOpF1 acc = dop_one() * t.coef;
        for (auto it = t.factors.rbegin(); it != t.factors.rend(); ++it)
            for (int p = 0; p < it->power; ++p) {
                switch (it->kind) {
                case Tok::Coord: acc = lmul_poly(poly_var(it->index), acc); break;
                case Tok::Xi: acc = lmul_form(form_xi(it->index), acc); break;
                case Tok::DCoord: acc = lmul_dx(it->index, acc); break;
                case Tok::DXi: acc = lmul_dxi(it->index, acc); break;
                default: throw parse_error("token not allowed in an operator on F[1]: '" + s + "'");
                }
            }
        out += acc;
    }
    return out;
}

// Elements of Omega_F (x) D(B): forms first, then a composition of coordinates,
// d<coord> and transversal letters b<k>, reduced modulo the F-directions.
inline OmB parse_omb(const std::string& s, const Transversal& tr) {
    const Names& nm = tr.model().names;
    int r = nm.r;
    OmB out;
    for (auto& t : parse_terms(s, nm)) {
        FormElement front = form_const(t.coef);
        size_t first_op = 0;
        while (first_op < t.factors.size() && t.factors[first_op].kind == Tok::Xi) {
            for (int p = 0; p < t.factors[first_op].power; ++p) front = wedge(front, form_xi(t.factors[first_op].index));
            ++first_op;
        }
        OmB acc = omb_word(Exp{});
        for (size_t i = t.factors.size(); i-- > first_op;) {
            const Factor& f = t.factors[i];
            for (int p = 0; p < f.power; ++p) {
                switch (f.kind) {
                case Tok::Coord: acc = lmul_poly(poly_var(f.index), acc); break;
                case Tok::DCoord: acc = tr.lmul_dx(f.index, acc); break;
                case Tok::B: acc = tr.lmul_frame(r + f.index, acc); break;
                case Tok::Xi: throw parse_error("odd coefficients must precede operator tokens in '" + s + "'");
                default: throw parse_error("token not allowed in a transversal operator: '" + s + "'");
                }
            }
        }
        out += lmul_form(front, acc);
    }
    return out;
}

template <class L>
L parse_symmetric(const std::string& s, const Names& nm, bool transversal) {
    L out;
    for (auto& t : parse_terms(s, nm)) {
        L acc = pure_elem<L>(Exp{}, 0) * t.coef;
        for (auto& f : t.factors)
            for (int p = 0; p < f.power; ++p) {
                L g;
                switch (f.kind) {
                case Tok::Coord: g = lmul_poly(poly_var(f.index), pure_elem<L>(Exp{}, 0)); break;
                case Tok::Xi: g = lmul_form(form_xi(f.index), pure_elem<L>(Exp{}, 0)); break;
                case Tok::Iota:
                    if (transversal) throw parse_error("iota not allowed here: '" + s + "'");
                    g = pure_elem<L>(Exp{}, 1u << f.index);
                    break;
                case Tok::EHat:
                    if (transversal) throw parse_error("eh not allowed here: '" + s + "'");
                    g = pure_elem<L>(Exp::unit(f.index), 0);
                    break;
                case Tok::B:
                    if (!transversal) g = pure_elem<L>(Exp::unit(nm.r + f.index), 0);
                    else g = pure_elem<L>(Exp::unit(f.index), 0);
                    break;
                default: throw parse_error("token not allowed in a symmetric tensor: '" + s + "'");
                }
                acc = sym_mul(acc, g);
            }
        out += acc;
    }
    return out;
}
inline SymT parse_sym(const std::string& s, const Names& nm) { return parse_symmetric<SymT>(s, nm, false); }
inline SymB parse_symb(const std::string& s, const Names& nm) { return parse_symmetric<SymB>(s, nm, true); }

namespace detail {

inline std::vector<std::string> split_slots(const std::string& inner) {
    std::vector<std::string> out;
    if (trim(inner).empty()) return out;
    int depth = 0;
    std::string cur;
    for (char c : inner) {
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == '|' && depth == 0) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

template <class P, class SlotParser>
P parse_polyop_with(const std::string& s, const Names& nm, SlotParser&& slot) {
    using Op = typename slot_op_of<P>::type;
    P out;
    for (auto& [sg, body] : split_terms(s)) {
        size_t lb = body.find('[');
        if (lb == std::string::npos || body.back() != ']')
            throw parse_error("polydifferential term needs a [slot|...] block: '" + body + "'");
        std::string pre = body.substr(0, lb);
        if (!pre.empty()) {
            if (pre.back() != '*') throw parse_error("expected '*' before '[' in '" + body + "'");
            pre.pop_back();
        }
        FormElement front = pre.empty() ? form_const(Scalar(1)) : parse_form(pre, nm);
        std::vector<Op> slots;
        for (auto& txt : split_slots(body.substr(lb + 1, body.size() - lb - 2))) slots.push_back(slot(txt));
        std::vector<const Op*> ptr;
        for (auto& x : slots) ptr.push_back(&x);
        tensor_accumulate(out, front, ptr, Scalar(sg));
    }
    return out;
}

} // namespace detail

inline PolyOpF1 parse_polyop(const std::string& s, const Names& nm) {
    return detail::parse_polyop_with<PolyOpF1>(s, nm, [&](const std::string& t) { return parse_dop(t, nm); });
}
inline PolyOpB parse_polyop_b(const std::string& s, const Transversal& tr) {
    return detail::parse_polyop_with<PolyOpB>(s, tr.model().names, [&](const std::string& t) { return parse_omb(t, tr); });
}

} // namespace hcdg
