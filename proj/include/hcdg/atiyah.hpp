#pragma once

#include "cohomology.hpp"

#include <functional>
#include <random>

namespace hcdg {

// Graded-commutative polynomial rings reusing the FormElement storage: even
// generators live in the exponent part, odd ones in the mask. Omega_F sits inside
// both rings below with its own indices (x_i -> even i, xi_a -> odd a).
struct RingNames {
    std::vector<std::string> even, odd;
};

inline std::string to_string(const FormElement& w, const RingNames& nm) {
    std::vector<std::string> terms;
    for (auto it = w.terms().rbegin(); it != w.terms().rend(); ++it) {
        std::vector<std::string> f;
        for (size_t i = 0; i < nm.even.size(); ++i) detail::push_pow(f, nm.even[i], it->first.x[int(i)]);
        for (size_t a = 0; a < nm.odd.size(); ++a)
            if (it->first.S >> a & 1) f.push_back(nm.odd[a]);
        terms.push_back(detail::join_term(it->second, f));
    }
    return detail::join_sum(terms);
}

// Graded derivation of the given parity from its values on generators.
template <class Even, class Odd>
FormElement ring_derivation(const FormElement& w, int parity, int n_even, int n_odd, Even&& even_img, Odd&& odd_img) {
    FormElement out;
    for (auto& [k, c] : w) {
        for (int i = 0; i < n_even; ++i) {
            int e = k.x[i];
            if (!e) continue;
            FormElement img = even_img(i);
            if (img.is_zero()) continue;
            out += wedge(img, FormElement(FKey{k.x - Exp::unit(i), k.S}, c * Scalar(e)));
        }
        int passed = 0;
        for (int b = 0; b < n_odd; ++b) {
            if (!(k.S >> b & 1)) continue;
            FormElement img = odd_img(b);
            if (!img.is_zero()) {
                uint32_t lo = k.S & ((1u << b) - 1), hi = k.S & ~((2u << b) - 1);
                FormElement t = wedge(wedge(FormElement(FKey{k.x, lo}, Scalar(1)), img), FormElement(FKey{Exp{}, hi}, Scalar(1)));
                out.add_scaled(t, ((parity * passed) & 1) ? -c : c);
            }
            ++passed;
        }
    }
    return out;
}

// Forms on F[1] in coordinates: even x_i (i), d(xi_a) (n + a); odd xi_a (a), d(x_i) (r + i).
class CoordForms {
public:
    CoordForms(const ChartModel& m, const DiffOpF1& Q) : m_(&m), Q_(Q), n_(m.n()), r_(m.r()) {
        for (int i = 0; i < n_; ++i) qx_.push_back(apply(Q_, form_from_poly(poly_var(i)), m.names));
        for (int a = 0; a < r_; ++a) qxi_.push_back(apply(Q_, form_xi(a), m.names));
        for (int i = 0; i < n_; ++i) nm_.even.push_back(m.names.coords[i]);
        for (int a = 0; a < r_; ++a) nm_.even.push_back("d(" + m.names.xi(a) + ")");
        for (int a = 0; a < r_; ++a) nm_.odd.push_back(m.names.xi(a));
        for (int i = 0; i < n_; ++i) nm_.odd.push_back("d(" + m.names.coords[i] + ")");
    }
    int n() const { return n_; }
    int r() const { return r_; }
    const RingNames& names() const { return nm_; }
    std::string show(const FormElement& w) const { return to_string(w, nm_); }

    FormElement dx(int i) const { return FormElement(FKey{Exp{}, 1u << (r_ + i)}, Scalar(1)); }
    FormElement dxi(int a) const { return FormElement(FKey{Exp::unit(n_ + a), 0}, Scalar(1)); }
    // differential of coordinate p (x's first, then xi's)
    FormElement dz(int p) const { return p < n_ ? dx(p) : dxi(p - n_); }

    static int parity(const FKey& k) { return popcount(k.S) & 1; }
    int form_degree(const FKey& k) const {
        int d = popcount(k.S >> r_);
        for (int a = 0; a < r_; ++a) d += k.x[n_ + a];
        return d;
    }
    // degree in the grading of F[1]: xi and d(xi) carry 1
    int internal_degree(const FKey& k) const {
        int d = popcount(k.S & ((1u << r_) - 1));
        for (int a = 0; a < r_; ++a) d += k.x[n_ + a];
        return d;
    }
    FormElement truncate(const FormElement& w, int max_form) const {
        return w.filter([&](const FKey& k) { return form_degree(k) <= max_form; });
    }
    FormElement form_part(const FormElement& w, int k) const {
        return w.filter([&](const FKey& key) { return form_degree(key) == k; });
    }

    FormElement d(const FormElement& w) const {
        return ring_derivation(
            w, 1, n_ + r_, r_ + n_, [&](int i) { return i < n_ ? dx(i) : FormElement(); },
            [&](int b) { return b < r_ ? dxi(b) : FormElement(); });
    }
    // L_Q, the odd derivation with L_Q(z) = Q(z), L_Q(dz) = -d(Q z)
    FormElement LQ(const FormElement& w) const {
        return ring_derivation(
            w, 1, n_ + r_, r_ + n_, [&](int i) { return i < n_ ? qx_[i] : -d(qxi_[i - n_]); },
            [&](int b) { return b < r_ ? qxi_[b] : -d(qx_[b - r_]); });
    }

private:
    const ChartModel* m_;
    DiffOpF1 Q_;
    int n_, r_;
    std::vector<FormElement> qx_, qxi_;
    RingNames nm_;
};

// Omega_F (x) wedge B^dual: even x_i; odd xi_a (a), beta_g (r + g), with the
// Chevalley-Eilenberg differential of the Bott representation.
class PairForms {
public:
    PairForms(const Geometry& g, const DiffOpF1& Q) : g_(&g), n_(g.model().n()), r_(g.model().r()), nb_(g.model().nB()) {
        const ChartModel& m = g.model();
        for (int i = 0; i < n_; ++i) qx_.push_back(apply(Q, form_from_poly(poly_var(i)), m.names));
        for (int a = 0; a < r_; ++a) qxi_.push_back(apply(Q, form_xi(a), m.names));
        // d beta^g = - sum_{a, d} xi^a bott(u_a, b_d)^g beta^d
        for (int gam = 0; gam < nb_; ++gam) {
            FormElement db;
            for (int a = 0; a < r_; ++a)
                for (int de = 0; de < nb_; ++de) {
                    MultiPoly c = g.bott(sec_unit(r_, a), sec_unit(nb_, de))[gam];
                    if (c.is_zero()) continue;
                    db -= wedge(form_xi(a), form_times_poly(beta(de), c));
                }
            dbeta_.push_back(db);
        }
        for (int i = 0; i < n_; ++i) nm_.even.push_back(m.names.coords[i]);
        for (int a = 0; a < r_; ++a) nm_.odd.push_back(m.names.xi(a));
        for (int b = 0; b < nb_; ++b) nm_.odd.push_back("bv" + std::to_string(b + 1));
    }
    int n() const { return n_; }
    int r() const { return r_; }
    int nB() const { return nb_; }
    const RingNames& names() const { return nm_; }
    std::string show(const FormElement& w) const { return to_string(w, nm_); }

    FormElement beta(int g) const { return FormElement(FKey{Exp{}, 1u << (r_ + g)}, Scalar(1)); }
    int form_degree(const FKey& k) const { return popcount(k.S & ((1u << r_) - 1)); }
    int b_degree(const FKey& k) const { return popcount(k.S >> r_); }

    FormElement d(const FormElement& w) const {
        return ring_derivation(
            w, 1, n_, r_ + nb_, [&](int i) { return qx_[i]; }, [&](int b) { return b < r_ ? qxi_[b] : dbeta_[b - r_]; });
    }

private:
    const Geometry* g_;
    int n_, r_, nb_;
    std::vector<FormElement> qx_, qxi_, dbeta_;
    RingNames nm_;
};

// Square matrices over a graded ring, rows and columns carrying a parity.
struct SuperMatrix {
    std::vector<int> par;  // 0 even, 1 odd index
    std::vector<std::vector<FormElement>> e;

    explicit SuperMatrix(std::vector<int> p = {}) : par(std::move(p)), e(par.size(), std::vector<FormElement>(par.size())) {}
    int size() const { return int(par.size()); }
    static SuperMatrix identity(std::vector<int> p) {
        SuperMatrix m(std::move(p));
        for (int i = 0; i < m.size(); ++i) m.e[i][i] = form_const(Scalar(1));
        return m;
    }
    bool operator==(const SuperMatrix& o) const { return par == o.par && e == o.e; }
};

using Trunc = std::function<FormElement(const FormElement&)>;
inline FormElement no_trunc(const FormElement& w) { return w; }

inline SuperMatrix mat_add(const SuperMatrix& a, const SuperMatrix& b, const Scalar& s = Scalar(1)) {
    SuperMatrix r = a;
    for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < a.size(); ++j) r.e[i][j].add_scaled(b.e[i][j], s);
    return r;
}
inline SuperMatrix mat_scale(const SuperMatrix& a, const Scalar& s) {
    SuperMatrix r = a;
    for (auto& row : r.e)
        for (auto& x : row) x *= s;
    return r;
}
inline SuperMatrix mat_mul(const SuperMatrix& a, const SuperMatrix& b, const Trunc& tr = no_trunc) {
    SuperMatrix r(a.par);
    int n = a.size();
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            if (a.e[i][k].is_zero()) continue;
            for (int j = 0; j < n; ++j)
                if (!b.e[k][j].is_zero()) r.e[i][j] += wedge(a.e[i][k], b.e[k][j]);
        }
    for (auto& row : r.e)
        for (auto& x : row) x = tr(x);
    return r;
}
inline bool mat_is_zero(const SuperMatrix& a) {
    for (auto& row : a.e)
        for (auto& x : row)
            if (!x.is_zero()) return false;
    return true;
}
inline FormElement supertrace(const SuperMatrix& a) {
    FormElement t;
    for (int i = 0; i < a.size(); ++i) t.add_scaled(a.e[i][i], a.par[i] ? Scalar(-1) : Scalar(1));
    return t;
}

struct berezinian_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// (c + n)^{-1} for a nonzero constant c and nilpotent n
inline FormElement ring_inverse(const FormElement& w, const Trunc& tr = no_trunc, int cap = 64) {
    Scalar c = w.coeff(FKey{});
    if (c.is_zero()) throw berezinian_error("element without invertible constant term");
    Scalar ci = Scalar(1) / c;
    FormElement nil = w - form_const(c);
    nil *= -ci;
    FormElement total = form_const(Scalar(1)), cur = total;
    for (int k = 0;; ++k) {
        cur = tr(wedge(cur, nil));
        if (cur.is_zero()) break;
        if (k >= cap) throw berezinian_error("correction term is not nilpotent");
        total += cur;
    }
    return total * ci;
}

// Inverse of a square matrix with invertible constant part and nilpotent rest.
inline SuperMatrix mat_inverse(const SuperMatrix& m, const Trunc& tr = no_trunc, int cap = 64) {
    int n = m.size();
    // constant part by Gauss-Jordan over the scalars
    std::vector<std::vector<Scalar>> a(n, std::vector<Scalar>(2 * n));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a[i][j] = m.e[i][j].coeff(FKey{});
        a[i][n + i] = Scalar(1);
    }
    for (int c = 0; c < n; ++c) {
        int p = c;
        while (p < n && a[p][c].is_zero()) ++p;
        if (p == n) throw berezinian_error("matrix block is not invertible");
        std::swap(a[p], a[c]);
        Scalar inv = Scalar(1) / a[c][c];
        for (auto& v : a[c]) v *= inv;
        for (int i = 0; i < n; ++i) {
            if (i == c || a[i][c].is_zero()) continue;
            Scalar f = a[i][c];
            for (int j = 0; j < 2 * n; ++j) a[i][j] -= f * a[c][j];
        }
    }
    SuperMatrix c0i(m.par), nil(m.par);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            c0i.e[i][j] = form_const(a[i][n + j]);
            nil.e[i][j] = m.e[i][j] - form_const(m.e[i][j].coeff(FKey{}));
        }
    // m = C (1 + C^{-1} N): inverse = sum (-C^{-1} N)^k C^{-1}
    SuperMatrix step = mat_scale(mat_mul(c0i, nil, tr), Scalar(-1));
    SuperMatrix total = SuperMatrix::identity(m.par), cur = total;
    for (int k = 0;; ++k) {
        cur = mat_mul(cur, step, tr);
        if (mat_is_zero(cur)) break;
        if (k >= cap) throw berezinian_error("correction term is not nilpotent");
        total = mat_add(total, cur);
    }
    return mat_mul(total, c0i, tr);
}

// Leibniz expansion; entries must be even (hence central).
inline FormElement det_even(const std::vector<std::vector<FormElement>>& a, const Trunc& tr = no_trunc) {
    int n = int(a.size());
    if (n == 0) return form_const(Scalar(1));
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    FormElement out;
    do {
        FormElement t = form_const(Scalar(perm_parity(p) ? -1 : 1));
        for (int i = 0; i < n && !t.is_zero(); ++i) t = tr(wedge(t, a[i][p[i]]));
        out += t;
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

// Ber = det(A - B D^{-1} C) det(D)^{-1}, blocks taken by index parity.
inline FormElement berezinian(const SuperMatrix& m, const Trunc& tr = no_trunc) {
    std::vector<int> ev, od;
    for (int i = 0; i < m.size(); ++i) (m.par[i] ? od : ev).push_back(i);
    auto block = [&](const std::vector<int>& rs, const std::vector<int>& cs) {
        SuperMatrix b(std::vector<int>(rs.size(), 0));
        b.e.assign(rs.size(), std::vector<FormElement>(cs.size()));
        for (size_t i = 0; i < rs.size(); ++i)
            for (size_t j = 0; j < cs.size(); ++j) b.e[i][j] = m.e[rs[i]][cs[j]];
        return b;
    };
    SuperMatrix A = block(ev, ev), B = block(ev, od), C = block(od, ev), D = block(od, od);
    D.par.assign(od.size(), 0);
    SuperMatrix Di = mat_inverse(D, tr);
    // A - B D^{-1} C with rectangular products
    std::vector<std::vector<FormElement>> S(ev.size(), std::vector<FormElement>(ev.size()));
    for (size_t i = 0; i < ev.size(); ++i)
        for (size_t j = 0; j < ev.size(); ++j) {
            FormElement s = A.e[i][j];
            for (size_t k = 0; k < od.size(); ++k)
                for (size_t l = 0; l < od.size(); ++l) {
                    if (B.e[i][k].is_zero() || Di.e[k][l].is_zero() || C.e[l][j].is_zero()) continue;
                    s -= tr(wedge(wedge(B.e[i][k], Di.e[k][l]), C.e[l][j]));
                }
            S[i][j] = tr(s);
        }
    return tr(wedge(det_even(S, tr), ring_inverse(det_even(D.e, tr), tr)));
}

// Power series over Q -----------------------------------------------------------

using Series = std::vector<Scalar>;

inline Series series_mul(const Series& a, const Series& b, int N) {
    Series r(N + 1);
    for (int i = 0; i <= N && i < int(a.size()); ++i)
        for (int j = 0; i + j <= N && j < int(b.size()); ++j) r[i + j] += a[i] * b[j];
    return r;
}
inline Series series_inverse(const Series& a, int N) {
    Series r(N + 1);
    r[0] = Scalar(1) / a[0];
    for (int k = 1; k <= N; ++k) {
        Scalar s;
        for (int j = 1; j <= k && j < int(a.size()); ++j) s += a[j] * r[k - j];
        r[k] = -s * r[0];
    }
    return r;
}
// log of a series with constant term 1
inline Series series_log(const Series& a, int N) {
    Series d(N + 1), ai = series_inverse(a, N);
    for (int k = 1; k <= N && k < int(a.size()); ++k) d[k - 1] = a[k] * Scalar(k);
    Series q = series_mul(d, ai, N);
    Series r(N + 1);
    for (int k = 1; k <= N; ++k) r[k] = q[k - 1] / Scalar(k);
    return r;
}
inline Scalar factorial(int k) {
    Scalar f(1);
    for (int i = 2; i <= k; ++i) f *= Scalar(i);
    return f;
}
// t / (1 - e^{sign t})
inline Series todd_series(int sign, int N) {
    // (1 - e^{s t}) / t = -s sum_{k>=0} s^k t^k / (k+1)!
    Series den(N + 1);
    for (int k = 0; k <= N; ++k) den[k] = Scalar(-sign) * Scalar((sign < 0 && (k & 1)) ? -1 : 1) / factorial(k + 1);
    return series_inverse(den, N);
}

// Matrix functions by truncated series.
inline SuperMatrix mat_series(const SuperMatrix& a, const Series& s, const Trunc& tr, int N) {
    SuperMatrix total = mat_scale(SuperMatrix::identity(a.par), s[0]), pw = SuperMatrix::identity(a.par);
    for (int k = 1; k <= N; ++k) {
        pw = mat_mul(pw, a, tr);
        if (mat_is_zero(pw)) break;
        if (!s[k].is_zero()) total = mat_add(total, pw, s[k]);
    }
    return total;
}
// exp of a nilpotent ring element
inline FormElement ring_exp(const FormElement& w, const Trunc& tr, int cap = 64) {
    FormElement total = form_const(Scalar(1)), cur = total;
    for (int k = 1;; ++k) {
        cur = tr(wedge(cur, w)) * (Scalar(1) / Scalar(k));
        if (cur.is_zero()) break;
        if (k > cap) throw berezinian_error("exponential of a non-nilpotent element");
        total += cur;
    }
    return total;
}

// Ber f(A) for f(t) = c0 * exp(sum l_k t^k): c0^{sdim} exp(sum l_k str A^k), with the
// supertrace replaced by the trace when there are no odd indices.
inline FormElement ber_series_via_traces(const SuperMatrix& a, const Series& f, const Trunc& tr, int N, const Scalar& power = Scalar(1)) {
    Scalar c0 = f[0];
    Series g = f;
    for (auto& x : g) x /= c0;
    Series l = series_log(g, N);
    FormElement sum;
    SuperMatrix pw = SuperMatrix::identity(a.par);
    for (int k = 1; k <= N; ++k) {
        pw = mat_mul(pw, a, tr);
        if (mat_is_zero(pw)) break;
        if (!l[k].is_zero()) sum.add_scaled(supertrace(pw), l[k] * power);
    }
    int sdim = 0;
    for (int p : a.par) sdim += p ? -1 : 1;
    FormElement e = ring_exp(sum, tr);
    if (c0 != Scalar(1)) {
        // only integral powers of the constant are representable here
        if (power != Scalar(1)) throw berezinian_error("root of a non-unit constant term");
        Scalar c(1);
        for (int i = 0; i < std::abs(sdim); ++i) c *= c0;
        if (sdim < 0) c = Scalar(1) / c;
        e *= c;
    }
    return e;
}

// Atiyah and Todd data --------------------------------------------------------

class Atiyah {
public:
    explicit Atiyah(const Transfer& t)
        : t_(&t), sc_(&t.sym()), cf_(t.model(), t.dF()), pf_(t.geometry(), t.dF()) {}

    const Transfer& transfer() const { return *t_; }
    const CoordForms& forms() const { return cf_; }
    const PairForms& pair_forms() const { return pf_; }
    int n() const { return t_->model().n(); }
    int r() const { return t_->model().r(); }

    // pullback connection on vector fields given in generators
    SymT nabla(const SymT& X, const SymT& Y) const {
        SymT out;
        const Names& nm = t_->names();
        for (auto& [kx, cx] : X) {
            Gen gx = gens_of(kx, n(), r()).at(0);
            FormElement wx(kx.coef(), cx);
            DiffOpF1 gop = sc_->gen_op(gx);
            for (auto& [ky, cy] : Y) {
                Gen gy = gens_of(ky, n(), r()).at(0);
                FormElement wy(ky.coef(), cy);
                FormElement act = apply(gop, wy, nm);
                if (!act.is_zero()) out += lmul_form(wedge(wx, act), gen_elem<SymT>(gy));
                SymT ng = t_->pbw().nabla_gen(gx, gy);
                if (ng.is_zero()) continue;
                FormElement w = wedge(wx, wy);
                if (gx.odd && (popcount(ky.S) & 1)) w = -w;
                out += lmul_form(w, ng);
            }
        }
        return out;
    }

    // At(X, Y) = [Q, nabla_X Y] - nabla_[Q,X] Y - (-1)^|X| nabla_X [Q, Y]
    DiffOpF1 At(const DiffOpF1& X, const DiffOpF1& Y) const {
        SymT y = sc_->decompose(Y), qy = sc_->D(y);
        SymT out;
        for (int d : degrees_of(X)) {
            SymT x = sc_->decompose(X.filter([d](const WKey& k) { return key_degree(k) == d; }));
            out += sc_->D(nabla(x, y));
            out -= nabla(sc_->D(x), y);
            SymT t3 = nabla(x, qy);
            if (d & 1) out += t3;
            else out -= t3;
        }
        return sc_->to_field(out);
    }
    // (L_Q At)(X, Y), zero for a cocycle
    DiffOpF1 LQ_At(const DiffOpF1& X, const DiffOpF1& Y) const {
        const Names& nm = t_->names();
        const DiffOpF1& Q = t_->dF();
        DiffOpF1 out = commutator(Q, At(X, Y), nm);
        out += At(commutator(Q, X, nm), Y);
        for (int d : degrees_of(X)) {
            DiffOpF1 Xd = X.filter([d](const WKey& k) { return key_degree(k) == d; });
            DiffOpF1 t = At(Xd, commutator(Q, Y, nm));
            if (d & 1) out -= t;
            else out += t;
        }
        return out;
    }

    DiffOpF1 coord_field(int p) const { return p < n() ? dop_dx(p) : dop_dxi(p - n()); }
    std::vector<int> coord_parities() const {
        std::vector<int> par(n() + r(), 0);
        for (int a = 0; a < r(); ++a) par[n() + a] = 1;
        return par;
    }

    // End-valued one-form sum_i dz_i (x) At(d_i, -) as a supermatrix over forms on F[1]
    SuperMatrix at_matrix() const {
        int N = n() + r();
        auto par = coord_parities();
        SuperMatrix A(par);
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
                DiffOpF1 v = At(coord_field(i), coord_field(j));
                for (auto& [k, c] : v) {
                    int row = k.T ? n() + std::countr_zero(k.T) : first_var(k.y);
                    A.e[row][j] += wedge(cf_.dz(i), FormElement(k.coef(), c));
                }
            }
        return A;
    }

    // End(B)-valued: R^g_d = sum_{a, b} xi^a beta^b R11(u_a, j(b_b), b_d)^g
    SuperMatrix r11_matrix() const {
        const Geometry& g = t_->geometry();
        const ChartModel& m = t_->model();
        int nb = m.nB();
        SuperMatrix R(std::vector<int>(nb, 0));
        for (int a = 0; a < r(); ++a)
            for (int be = 0; be < nb; ++be)
                for (int de = 0; de < nb; ++de) {
                    Sec v = g.R11(sec_unit(r(), a), m.J[be], sec_unit(nb, de));
                    for (int ga = 0; ga < nb; ++ga) {
                        if (v[ga].is_zero()) continue;
                        R.e[ga][de] += form_times_poly(wedge(form_xi(a), pf_.beta(be)), v[ga]);
                    }
                }
        return R;
    }

    // Chevalley-Eilenberg coboundary of R11 on frame arguments: zero for a cocycle
    Sec dR11(int a1, int a2, int be, int de) const {
        const Geometry& g = t_->geometry();
        const ChartModel& m = t_->model();
        int rr = r(), nb = m.nB();
        Sec u1 = sec_unit(rr, a1), u2 = sec_unit(rr, a2), s = sec_unit(nb, de);
        Sec b = sec_unit(nb, be);
        auto R = [&](const Sec& a, const Sec& bs, const Sec& ss) { return g.R11(a, m.lift(bs), ss); };
        auto nab = [&](const Sec& a, int a_other, const Sec& bs, const Sec& ss) {
            Sec ao = sec_unit(rr, a_other);
            Sec t = g.bott(a, R(ao, bs, ss));
            t = sec_sub(t, R(ao, g.bott(a, bs), ss));
            t = sec_sub(t, R(ao, bs, g.bott(a, ss)));
            return t;
        };
        Sec br = m.project(bracket(m.F_field(u1), m.F_field(u2))).first;
        return sec_sub(sec_sub(nab(u1, a2, b, s), nab(u2, a1, b, s)), R(br, b, s));
    }

    // Todd cocycles, truncated at form degree K on the dg side
    FormElement todd_dg(int K, const Scalar& power = Scalar(1)) const {
        Trunc tr = [this, K](const FormElement& w) { return cf_.truncate(w, K); };
        return ber_series_via_traces(at_matrix(), todd_series(-1, K), tr, K, power);
    }
    FormElement todd_dg_oracle(int K) const {
        Trunc tr = [this, K](const FormElement& w) { return cf_.truncate(w, K); };
        return berezinian(mat_series(at_matrix(), todd_series(-1, K), tr, K), tr);
    }
    // literal det(R / (1 - e^R)) and its unit-normalised square root
    FormElement todd_pair() const {
        int K = std::min(r(), t_->model().nB());
        return det_even(mat_series(r11_matrix(), todd_series(1, K), no_trunc, K).e);
    }
    FormElement todd_pair_traces(const Scalar& power = Scalar(1)) const {
        int K = std::min(r(), t_->model().nB());
        Series s = todd_series(1, K);
        if (power != Scalar(1))
            for (auto& x : s) x /= todd_series(1, 0)[0];
        return ber_series_via_traces(r11_matrix(), s, no_trunc, K, power);
    }
    FormElement todd_half_pair() const { return todd_pair_traces(Scalar(1, 2)); }

    static std::vector<int> degrees_of(const DiffOpF1& X) {
        std::vector<int> d;
        for (auto& [k, c] : X) d.push_back(key_degree(k));
        std::sort(d.begin(), d.end());
        d.erase(std::unique(d.begin(), d.end()), d.end());
        return d;
    }

private:
    static int first_var(Exp y) {
        int i = 0;
        while (y[i] == 0) ++i;
        return i;
    }

    const Transfer* t_;
    const SymCalculus* sc_;
    CoordForms cf_;
    PairForms pf_;
};

// Random admissible connection data: torsion-free F-part, B-part extending Bott.
inline ConnectionData random_connection(const ChartModel& m, uint64_t seed, int deg = 1) {
    std::mt19937_64 g(seed);
    auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g); };
    int n = m.n(), r = m.r(), nb = m.nB();
    auto rpoly = [&] {
        MultiPoly p;
        for (int t = 0; t < 3; ++t) {
            Exp e;
            int d = uni(0, deg);
            for (int s = 0; s < d; ++s) e = e.inc(uni(0, n - 1));
            p.add(e, Scalar(uni(-2, 2)));
        }
        return p;
    };
    ConnectionData cd;
    cd.name = "random-" + std::to_string(seed);
    cd.gt = tensor3(r, r, r);
    for (int c = 0; c < r; ++c)
        for (int a = 0; a < r; ++a)
            for (int b = a; b < r; ++b) {
                MultiPoly sym = rpoly();
                cd.gt[c][a][b] = sym + m.C[a][b][c] * Scalar(1, 2);
                if (b != a) cd.gt[c][b][a] = sym + m.C[b][a][c] * Scalar(1, 2);
            }
    cd.gb = tensor3(n, nb, nb);
    for (int k = 0; k < n; ++k)
        for (int be = 0; be < nb; ++be)
            for (int ga = 0; ga < nb; ++ga) cd.gb[k][be][ga] = k < r ? m.C[k][r + be][r + ga] : rpoly();
    m.check_connection(cd);
    return cd;
}

// Primitives for cocycle differences ------------------------------------------

struct PrimitiveReport {
    std::string side, cocycle;
    bool closed = true;
    bool found = false;
    int window = -1;  // polynomial slack over the degree of the difference
    FormElement delta, primitive;
    size_t unknowns = 0, equations = 0, rank = 0;
};

struct ToddComparison {
    std::string conn_a, conn_b;
    int max_window = 4;
    std::vector<PrimitiveReport> items;
    bool pass() const {
        for (auto& i : items)
            if (!i.closed || !i.found) return false;
        return true;
    }
};

inline int poly_degree(const FormElement& w, int n) {
    int d = 0;
    for (auto& [k, c] : w) {
        int s = 0;
        for (int i = 0; i < n; ++i) s += k.x[i];
        d = std::max(d, s);
    }
    return d;
}

// exponent vectors over `vars` variables with total degree <= D
inline std::vector<std::vector<int>> exponents_upto(int vars, int D) {
    std::vector<std::vector<int>> out;
    std::vector<int> e(vars, 0);
    std::function<void(int, int)> go = [&](int i, int left) {
        if (i == vars) {
            out.push_back(e);
            return;
        }
        for (int k = 0; k <= left; ++k) {
            e[i] = k;
            go(i + 1, left - k);
        }
        e[i] = 0;
    };
    go(0, D);
    return out;
}

// Solve d(eta) = delta over the ansatz, one homogeneous component at a time.
template <class Split, class Ansatz>
void solve_ring_primitive(PrimitiveReport& rep, const std::function<FormElement(const FormElement&)>& d, int n,
                          Split&& split, Ansatz&& ansatz, int max_window, const RingNames& nm) {
    Shower<FormElement> show = [&](const FormElement& w) { return to_string(w, nm); };
    if (rep.delta.is_zero()) {
        rep.found = true;
        rep.window = 0;
        return;
    }
    std::map<std::pair<int, int>, FormElement> parts;
    for (auto& [k, c] : rep.delta) parts[split(k)].add(k, c);
    int D0 = poly_degree(rep.delta, n);
    for (int w = 0; w <= max_window; ++w) {
        FormElement total;
        bool ok = true;
        rep.unknowns = rep.equations = rep.rank = 0;
        for (auto& [grade, target] : parts) {
            Basis<FormElement> prev, cur;
            for (auto& k : ansatz(grade, D0 + w)) prev.push(k);
            for (size_t j = 0; j < prev.size(); ++j)
                for (auto& [k, c] : d(prev.element(int(j)))) cur.push(k);
            for (auto& [k, c] : target) cur.push(k);
            auto cols = matrix_of_map(prev, cur, Diff<FormElement>(d), show);
            rep.unknowns += prev.size();
            rep.equations += cur.size();
            rep.rank += rank_and_kernel(cols).rank;
            auto x = solve_columns(cols, cur.coords(target, show));
            if (!x) {
                ok = false;
                break;
            }
            total += prev.combine(*x);
        }
        if (ok) {
            if (d(total) != rep.delta) throw std::logic_error("primitive does not reproduce the difference");
            rep.found = true;
            rep.window = w;
            rep.primitive = total;
            return;
        }
    }
}

inline std::vector<FKey> coordform_ansatz(const CoordForms& cf, int form_deg, int internal_deg, int D) {
    int n = cf.n(), r = cf.r();
    std::vector<FKey> out;
    if (form_deg < 0 || internal_deg < 0) return out;
    auto xs = exponents_upto(n, D);
    auto dxis = exponents_upto(r, form_deg);
    for (uint32_t S = 0; S < (1u << (n + r)); ++S)
        for (auto& dx : dxis)
            for (auto& xe : xs) {
                FKey k;
                k.S = S;
                for (int i = 0; i < n; ++i) k.x.set(i, xe[i]);
                for (int a = 0; a < r; ++a) k.x.set(n + a, dx[a]);
                if (cf.form_degree(k) == form_deg && cf.internal_degree(k) == internal_deg) out.push_back(k);
            }
    return out;
}

inline std::vector<FKey> pairform_ansatz(const PairForms& pf, int xi_deg, int b_deg, int D) {
    int n = pf.n(), r = pf.r(), nb = pf.nB();
    std::vector<FKey> out;
    if (xi_deg < 0) return out;
    auto xs = exponents_upto(n, D);
    for (uint32_t S = 0; S < (1u << (r + nb)); ++S) {
        FKey probe{Exp{}, S};
        if (pf.form_degree(probe) != xi_deg || pf.b_degree(probe) != b_deg) continue;
        for (auto& xe : xs) {
            FKey k{Exp{}, S};
            for (int i = 0; i < n; ++i) k.x.set(i, xe[i]);
            out.push_back(k);
        }
    }
    return out;
}

// Scalar cocycles of one connection.
struct ToddData {
    std::vector<std::pair<std::string, FormElement>> dg, pair;
};

inline ToddData todd_data(const Atiyah& at, int K) {
    ToddData t;
    const CoordForms& cf = at.forms();
    Trunc tr = [&](const FormElement& w) { return cf.truncate(w, K); };
    SuperMatrix A = at.at_matrix(), P = SuperMatrix::identity(A.par);
    for (int k = 1; k <= K; ++k) {
        P = mat_mul(P, A, tr);
        t.dg.push_back({"str(At^" + std::to_string(k) + ")", supertrace(P)});
    }
    t.dg.push_back({"Td", at.todd_dg(K)});
    t.dg.push_back({"Td^1/2", at.todd_dg(K, Scalar(1, 2))});
    SuperMatrix R = at.r11_matrix(), Q = SuperMatrix::identity(R.par);
    int kr = std::min(at.r(), at.transfer().model().nB());
    if (R.size() == 1) t.pair.push_back({"R11", R.e[0][0]});
    for (int k = 1; k <= kr; ++k) {
        Q = mat_mul(Q, R);
        t.pair.push_back({"tr(R11^" + std::to_string(k) + ")", supertrace(Q)});
    }
    t.pair.push_back({"Td", at.todd_pair()});
    t.pair.push_back({"Td^1/2", at.todd_half_pair()});
    return t;
}

// Exhibit every cocycle difference between two connections as exact.
inline ToddComparison compare_todd(const Atiyah& a, const Atiyah& b, int K = 4, int max_window = 4) {
    ToddComparison out;
    out.conn_a = a.transfer().name();
    out.conn_b = b.transfer().name();
    out.max_window = max_window;
    ToddData ta = todd_data(a, K), tb = todd_data(b, K);
    const CoordForms& cf = a.forms();
    const PairForms& pf = a.pair_forms();
    std::function<FormElement(const FormElement&)> dq = [&](const FormElement& w) { return cf.LQ(w); };
    std::function<FormElement(const FormElement&)> dp = [&](const FormElement& w) { return pf.d(w); };
    for (size_t i = 0; i < ta.dg.size(); ++i) {
        PrimitiveReport r;
        r.side = "dg";
        r.cocycle = ta.dg[i].first;
        r.closed = cf.LQ(ta.dg[i].second).is_zero() && cf.LQ(tb.dg[i].second).is_zero();
        r.delta = ta.dg[i].second - tb.dg[i].second;
        if (r.closed)
            solve_ring_primitive(
                r, dq, cf.n(), [&](const FKey& k) { return std::pair{cf.form_degree(k), cf.internal_degree(k)}; },
                [&](std::pair<int, int> g, int D) { return coordform_ansatz(cf, g.first, g.second - 1, D); }, max_window,
                cf.names());
        out.items.push_back(std::move(r));
    }
    for (size_t i = 0; i < ta.pair.size(); ++i) {
        PrimitiveReport r;
        r.side = "pair";
        r.cocycle = ta.pair[i].first;
        r.closed = pf.d(ta.pair[i].second).is_zero() && pf.d(tb.pair[i].second).is_zero();
        r.delta = ta.pair[i].second - tb.pair[i].second;
        if (r.closed)
            solve_ring_primitive(
                r, dp, pf.n(), [&](const FKey& k) { return std::pair{pf.form_degree(k), pf.b_degree(k)}; },
                [&](std::pair<int, int> g, int D) { return pairform_ansatz(pf, g.first - 1, g.second, D); }, max_window,
                pf.names());
        out.items.push_back(std::move(r));
    }
    return out;
}

// Duflo-type composition on the B side: contract by Td^1/2 of the pair, then hkr.
// beta^g contracts b_g from the left; coefficients pass with the Koszul sign.
inline PolyVecB contract(const FormElement& omega, const PolyVecB& v, int r) {
    PolyVecB out;
    uint32_t xim = (1u << r) - 1;
    for (auto& [ko, co] : omega) {
        uint32_t G = ko.S >> r, xs = ko.S & xim;
        FormElement alpha(FKey{ko.x, xs}, co);
        for (auto& [kv, cv] : v) {
            if ((G & kv.T) != G) continue;
            // iota_{beta^{g1}} ... iota_{beta^{gk}} with g1 < ... < gk applied to b^T
            uint32_t T = kv.T;
            int sgn = 0;
            for (int g = 31; g >= 0; --g) {
                if (!(G >> g & 1)) continue;
                sgn += below_parity(T, g);
                T &= ~(1u << g);
            }
            sgn += popcount(G) * popcount(kv.S);
            FormElement f = wedge(alpha, FormElement(FKey{kv.x, kv.S}, (sgn & 1) ? -cv : cv));
            for (auto& [kf, cf] : f) out.add(WKey{Exp{}, T, kf.x, kf.S}, cf);
        }
    }
    return out;
}

inline PolyOpB duflo_chain(const Hochschild& h, const FormElement& td_half, const PolyVecB& v) {
    return h.hkr(contract(td_half, v, h.transfer().model().r()));
}

} // namespace hcdg
