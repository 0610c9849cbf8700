#pragma once

#include "algebra.hpp"

#include <cctype>
#include <sstream>
#include <string>
#include <unordered_map>

namespace hcdg {

enum class Tok { Coord, Xi, DCoord, DXi, B, Iota, EHat };

// Token vocabulary of a chart: coordinates, odd generators xi1.., derivative
// tokens d<coord>, dxi1.., transversal letters b1.., and generator symbols
// iota1.. / eh1.. used by symmetric tensors and polyvector fields.
struct Names {
    std::vector<std::string> coords;
    int r = 0;

    int n() const { return int(coords.size()); }
    int nB() const { return n() - r; }

    std::string xi(int a) const { return "xi" + std::to_string(a + 1); }
    std::string d(int i) const { return "d" + coords[i]; }
    std::string dxi(int a) const { return "dxi" + std::to_string(a + 1); }
    std::string b(int al) const { return "b" + std::to_string(al + 1); }
    std::string iota(int a) const { return "iota" + std::to_string(a + 1); }
    std::string eh(int k) const { return "eh" + std::to_string(k + 1); }

    std::unordered_map<std::string, std::pair<Tok, int>> table() const {
        std::unordered_map<std::string, std::pair<Tok, int>> t;
        for (int i = 0; i < n(); ++i) {
            t[coords[i]] = {Tok::Coord, i};
            t[d(i)] = {Tok::DCoord, i};
            t[eh(i)] = {Tok::EHat, i};
        }
        for (int a = 0; a < r; ++a) {
            t[xi(a)] = {Tok::Xi, a};
            t[dxi(a)] = {Tok::DXi, a};
            t[iota(a)] = {Tok::Iota, a};
        }
        for (int al = 0; al < nB(); ++al) t[b(al)] = {Tok::B, al};
        return t;
    }
};

struct Factor {
    Tok kind;
    int index;
    int power;
};

struct ParsedTerm {
    Scalar coef{1};
    std::vector<Factor> factors;  // in written order
};

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline std::string strip_spaces(const std::string& s) {
    std::string r;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) r += c;
    return r;
}

// Split at top-level '+'/'-' (outside parentheses and brackets). Returns (sign, text).
inline std::vector<std::pair<int, std::string>> split_terms(const std::string& src) {
    std::string s = strip_spaces(src);
    std::vector<std::pair<int, std::string>> out;
    int depth = 0, sign = 1;
    std::string cur;
    for (size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '(' || c == '[') ++depth;
        if (c == ')' || c == ']') --depth;
        if (depth == 0 && (c == '+' || c == '-')) {
            bool after_op = cur.empty() || cur.back() == '*' || cur.back() == '/';
            if (cur.empty()) {
                if (c == '-') sign = -sign;
                continue;
            }
            if (!after_op) {
                out.emplace_back(sign, cur);
                cur.clear();
                sign = (c == '-') ? -1 : 1;
                continue;
            }
        }
        cur += c;
    }
    if (depth != 0) throw parse_error("unbalanced brackets in '" + src + "'");
    if (!cur.empty()) out.emplace_back(sign, cur);
    return out;
}

inline bool is_number(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c)) && c != '/') return false;
    return true;
}

inline Scalar parse_paren_scalar(const std::string& inner) {
    // gaussian literal like 1/2+3*I
    Scalar acc(0);
    for (auto& [sg, t] : split_terms(inner)) {
        Scalar v(1);
        std::stringstream ss(t);
        std::string f;
        while (std::getline(ss, f, '*')) {
            if (f == "I") v *= Scalar::imag_unit();
            else if (is_number(f)) v *= Scalar(Scalar::parse_rational(f));
            else throw parse_error("bad scalar literal '" + inner + "'");
        }
        acc += sg < 0 ? -v : v;
    }
    return acc;
}

} // namespace detail

inline ParsedTerm parse_monomial(const std::string& text, const Names& names) {
    auto table = names.table();
    ParsedTerm t;
    std::string s = text;
    // split on '*' outside parentheses
    std::vector<std::string> parts;
    {
        int depth = 0;
        std::string cur;
        for (char c : s) {
            if (c == '(') ++depth;
            if (c == ')') --depth;
            if (c == '*' && depth == 0) {
                parts.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        parts.push_back(cur);
    }
    for (auto& p : parts) {
        if (p.empty()) throw parse_error("empty factor in '" + text + "'");
        if (p.front() == '(') {
            if (p.back() != ')') throw parse_error("bad factor '" + p + "'");
            t.coef *= detail::parse_paren_scalar(p.substr(1, p.size() - 2));
            continue;
        }
        if (p == "I") {
            t.coef *= Scalar::imag_unit();
            continue;
        }
        if (detail::is_number(p)) {
            t.coef *= Scalar(Scalar::parse_rational(p));
            continue;
        }
        std::vector<std::string> chain;
        {
            std::stringstream ss(p);
            std::string piece;
            while (std::getline(ss, piece, '^')) chain.push_back(piece);
        }
        auto it = table.find(chain[0]);
        if (it == table.end()) throw parse_error("unknown token '" + chain[0] + "'");
        if (chain.size() == 2 && detail::is_number(chain[1])) {
            int pw = std::stoi(chain[1]);
            t.factors.push_back({it->second.first, it->second.second, pw});
            continue;
        }
        for (auto& c : chain) {
            auto jt = table.find(c);
            if (jt == table.end()) throw parse_error("unknown token '" + c + "' in '" + p + "'");
            t.factors.push_back({jt->second.first, jt->second.second, 1});
        }
    }
    return t;
}

inline std::vector<ParsedTerm> parse_terms(const std::string& text, const Names& names) {
    std::vector<ParsedTerm> out;
    for (auto& [sg, body] : detail::split_terms(text)) {
        ParsedTerm t = parse_monomial(body, names);
        if (sg < 0) t.coef = -t.coef;
        out.push_back(std::move(t));
    }
    return out;
}

// Printing -------------------------------------------------------------------

namespace detail {

inline void push_pow(std::vector<std::string>& f, const std::string& tok, int p) {
    if (p == 0) return;
    f.push_back(p == 1 ? tok : tok + "^" + std::to_string(p));
}

inline void push_chain(std::vector<std::string>& f, const std::vector<std::string>& toks) {
    if (toks.empty()) return;
    std::string s = toks[0];
    for (size_t i = 1; i < toks.size(); ++i) s += "^" + toks[i];
    f.push_back(s);
}

inline std::string join_term(const Scalar& c, const std::vector<std::string>& f) {
    std::string out;
    bool neg = false;
    Scalar a = c;
    if (a.is_real() && sgn(a.re()) < 0) {
        neg = true;
        a = -a;
    }
    std::string cs = a.str();
    if (f.empty()) return (neg ? "-" : "") + cs;
    if (!a.is_one()) out = cs;
    for (auto& x : f) {
        if (!out.empty()) out += "*";
        out += x;
    }
    return (neg ? "-" : "") + out;
}

inline std::string join_sum(const std::vector<std::string>& terms) {
    if (terms.empty()) return "0";
    std::string out = terms[0];
    for (size_t i = 1; i < terms.size(); ++i) {
        if (terms[i][0] == '-') out += " - " + terms[i].substr(1);
        else out += " + " + terms[i];
    }
    return out;
}

} // namespace detail

inline void coef_factors(std::vector<std::string>& f, const FKey& k, const Names& nm) {
    for (int i = 0; i < nm.n(); ++i) detail::push_pow(f, nm.coords[i], k.x[i]);
    std::vector<std::string> xs;
    for (int a = 0; a < nm.r; ++a)
        if (k.S >> a & 1) xs.push_back(nm.xi(a));
    detail::push_chain(f, xs);
}

inline std::string to_string(const MultiPoly& p, const Names& nm) {
    std::vector<std::string> terms;
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        std::vector<std::string> f;
        coef_factors(f, FKey{it->first, 0}, nm);
        terms.push_back(detail::join_term(it->second, f));
    }
    return detail::join_sum(terms);
}

inline std::string to_string(const FormElement& p, const Names& nm) {
    std::vector<std::string> terms;
    for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
        std::vector<std::string> f;
        coef_factors(f, it->first, nm);
        terms.push_back(detail::join_term(it->second, f));
    }
    return detail::join_sum(terms);
}

inline MultiPoly parse_poly(const std::string& s, const Names& nm) {
    MultiPoly p;
    for (auto& t : parse_terms(s, nm)) {
        Exp e;
        for (auto& f : t.factors) {
            if (f.kind != Tok::Coord) throw parse_error("polynomial expected, got non-coordinate token in '" + s + "'");
            e = e.inc(f.index, f.power);
        }
        p.add(e, t.coef);
    }
    return p;
}

inline FormElement parse_form(const std::string& s, const Names& nm) {
    FormElement out;
    for (auto& t : parse_terms(s, nm)) {
        FormElement acc = form_const(t.coef);
        for (auto& f : t.factors) {
            if (f.kind == Tok::Coord) {
                acc = form_times_poly(acc, MultiPoly(Exp{}.inc(f.index, f.power), Scalar(1)));
            } else if (f.kind == Tok::Xi) {
                for (int k = 0; k < f.power; ++k) acc = wedge(acc, form_xi(f.index));
            } else {
                throw parse_error("form expected, got operator token in '" + s + "'");
            }
        }
        out += acc;
    }
    return out;
}

} // namespace hcdg
