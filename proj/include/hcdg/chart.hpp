#pragma once

#include "grammar.hpp"
#include "linalg.hpp"

#include <map>
#include <string>
#include <vector>

namespace hcdg {

struct model_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Vector field on the base chart: component i multiplies d/dx_i.
using VField = std::vector<MultiPoly>;
// Sections in the F-frame {u_a} or the B-frame {b_alpha}.
using Sec = std::vector<MultiPoly>;
template <class T>
using Tensor3 = std::vector<std::vector<std::vector<T>>>;

inline Tensor3<MultiPoly> tensor3(int a, int b, int c) {
    return Tensor3<MultiPoly>(a, std::vector<std::vector<MultiPoly>>(b, std::vector<MultiPoly>(c)));
}

inline MultiPoly act(const VField& X, const MultiPoly& f) {
    MultiPoly r;
    for (size_t i = 0; i < X.size(); ++i)
        if (!X[i].is_zero()) r += X[i] * deriv(f, int(i));
    return r;
}

inline VField vf_zero(int n) { return VField(n); }
inline VField vf_add(VField a, const VField& b) {
    for (size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}
inline VField vf_sub(VField a, const VField& b) {
    for (size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
}
inline VField vf_scale(const MultiPoly& f, VField a) {
    for (auto& c : a) c = f * c;
    return a;
}
inline bool vf_is_zero(const VField& a) {
    for (auto& c : a)
        if (!c.is_zero()) return false;
    return true;
}

inline VField bracket(const VField& X, const VField& Y) {
    VField r(X.size());
    for (size_t i = 0; i < X.size(); ++i) r[i] = act(X, Y[i]) - act(Y, X[i]);
    return r;
}

inline Sec sec_add(Sec a, const Sec& b) {
    for (size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}
inline Sec sec_sub(Sec a, const Sec& b) {
    for (size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
}
inline Sec sec_scale(const MultiPoly& f, Sec a) {
    for (auto& c : a) c = f * c;
    return a;
}
inline Sec sec_unit(int size, int i) {
    Sec s(size);
    s[i] = poly_const(1);
    return s;
}
inline bool sec_is_zero(const Sec& a) {
    for (auto& c : a)
        if (!c.is_zero()) return false;
    return true;
}

// Determinant by cofactor expansion (sizes stay at most kMaxVars).
inline MultiPoly poly_det(const std::vector<std::vector<MultiPoly>>& m) {
    int n = int(m.size());
    if (n == 0) return poly_const(1);
    if (n == 1) return m[0][0];
    MultiPoly d;
    for (int j = 0; j < n; ++j) {
        if (m[0][j].is_zero()) continue;
        std::vector<std::vector<MultiPoly>> minor;
        for (int i = 1; i < n; ++i) {
            std::vector<MultiPoly> row;
            for (int k = 0; k < n; ++k)
                if (k != j) row.push_back(m[i][k]);
            minor.push_back(row);
        }
        MultiPoly t = m[0][j] * poly_det(minor);
        if (j & 1) d -= t;
        else d += t;
    }
    return d;
}

// Solve sum_c f_c X_c = W for polynomial f_c of degree <= deg. Returns nullopt if inconsistent.
inline std::optional<Sec> solve_in_span(const std::vector<VField>& X, const VField& W, int deg) {
    int n = int(W.size());
    std::vector<Exp> monos;
    {
        // all exponents with degree <= deg in n variables
        std::vector<Exp> cur{Exp{}};
        monos.push_back(Exp{});
        for (int d = 1; d <= deg; ++d) {
            std::vector<Exp> next;
            for (auto e : cur)
                for (int i = 0; i < n; ++i) {
                    // generate each monomial once: only raise variables >= last raised
                    int last = 0;
                    for (int k = 0; k < n; ++k)
                        if (e[k]) last = k;
                    if (!e.is_zero() && i < last) continue;
                    next.push_back(e.inc(i));
                }
            for (auto e : next) monos.push_back(e);
            cur = std::move(next);
        }
    }
    std::map<std::pair<int, Exp>, int> row_id;
    auto rid = [&](int i, Exp e) {
        auto [it, ins] = row_id.try_emplace({i, e}, int(row_id.size()));
        return it->second;
    };
    std::vector<SVec> cols;
    for (size_t c = 0; c < X.size(); ++c)
        for (auto m : monos) {
            SVec col;
            for (int i = 0; i < n; ++i)
                for (auto& [e, v] : X[c][i]) col[rid(i, e + m)] += v;
            for (auto it = col.begin(); it != col.end();)
                it = it->second.is_zero() ? col.erase(it) : std::next(it);
            cols.push_back(col);
        }
    SVec rhs;
    for (int i = 0; i < n; ++i)
        for (auto& [e, v] : W[i]) rhs[rid(i, e)] += v;
    auto sol = solve_columns(cols, rhs);
    if (!sol) return std::nullopt;
    Sec f(X.size());
    for (auto& [j, v] : *sol) f[j / monos.size()].add(monos[j % monos.size()], v);
    return f;
}

struct ConnectionData {
    std::string name;
    Tensor3<MultiPoly> gt;  // gt[c][a][b] = Christoffel of the F-connection along u_a on u_b, component u_c
    Tensor3<MultiPoly> gb;  // gb[k][beta][gamma]: nabla^B_{e_k} b_beta = sum_gamma gb[k][beta][gamma] b_gamma
};

struct ChartModel {
    std::string name;
    Names names;
    bool complex = false;
    bool perfect = false;
    std::vector<VField> U;  // F-frame
    std::vector<VField> J;  // lifts j(b_alpha)
    std::vector<ConnectionData> connections;
    std::vector<std::pair<std::string, std::map<std::string, int>>> weights;

    // derived by finalize()
    std::vector<VField> E;                // mixed frame: U then J
    std::vector<std::vector<MultiPoly>> N;  // d/dx_i = sum_k N[i][k] e_k
    Tensor3<MultiPoly> C;                 // [e_k, e_l] = sum_m C[k][l][m] e_m

    int n() const { return names.n(); }
    int r() const { return names.r; }
    int nB() const { return names.nB(); }

    // Coefficients of v in the mixed frame.
    Sec frame_coeffs(const VField& v) const {
        Sec c(n());
        for (int i = 0; i < n(); ++i) {
            if (v[i].is_zero()) continue;
            for (int k = 0; k < n(); ++k)
                if (!N[i][k].is_zero()) c[k] += v[i] * N[i][k];
        }
        return c;
    }
    VField from_frame(const Sec& c) const {
        VField v(n());
        for (int k = 0; k < n(); ++k)
            if (!c[k].is_zero()) v = vf_add(v, vf_scale(c[k], E[k]));
        return v;
    }
    std::pair<Sec, Sec> project(const VField& v) const {
        Sec c = frame_coeffs(v);
        return {Sec(c.begin(), c.begin() + r()), Sec(c.begin() + r(), c.end())};
    }
    VField F_field(const Sec& a) const {
        VField v(n());
        for (int c = 0; c < r(); ++c)
            if (!a[c].is_zero()) v = vf_add(v, vf_scale(a[c], U[c]));
        return v;
    }
    VField lift(const Sec& b) const {
        VField v(n());
        for (int g = 0; g < nB(); ++g)
            if (!b[g].is_zero()) v = vf_add(v, vf_scale(b[g], J[g]));
        return v;
    }
    MultiPoly structure(int a, int b, int c) const { return C[a][b][c]; }

    void finalize();
    void check_connection(const ConnectionData& cd) const;
    const ConnectionData& connection(const std::string& nm) const {
        for (auto& c : connections)
            if (c.name == nm) return c;
        throw model_error("unknown connection '" + nm + "' in model " + name);
    }
};

inline int max_degree(const std::vector<VField>& fs) {
    int d = 0;
    for (auto& f : fs)
        for (auto& c : f) d = std::max(d, poly_degree(c));
    return d;
}

inline void ChartModel::finalize() {
    int n_ = n(), r_ = r();
    if (n_ < 1 || n_ > kMaxVars) throw model_error("coordinate count must be in 1..6");
    if (r_ < 0 || r_ > n_) throw model_error("foliation rank out of range");
    if (int(U.size()) != r_ || int(J.size()) != n_ - r_) throw model_error("frame sizes do not match n and r");
    for (auto* fam : {&U, &J})
        for (auto& f : *fam)
            if (int(f.size()) != n_) throw model_error("vector field with wrong component count");

    // involutivity of F, checked on U alone by an exact polynomial ansatz
    int du = max_degree(U);
    for (int a = 0; a < r_; ++a)
        for (int b = a + 1; b < r_; ++b) {
            VField W = bracket(U[a], U[b]);
            int dw = 0;
            for (auto& c : W) dw = std::max(dw, poly_degree(c));
            if (!solve_in_span(U, W, dw + du))
                throw model_error("non-involutive frame: [u" + std::to_string(a + 1) + ", u" + std::to_string(b + 1) +
                                  "] is not in the polynomial span of the F-frame");
        }

    E = U;
    for (auto& j : J) E.push_back(j);
    std::vector<std::vector<MultiPoly>> M(n_, std::vector<MultiPoly>(n_));
    for (int k = 0; k < n_; ++k)
        for (int i = 0; i < n_; ++i) M[k][i] = E[k][i];
    MultiPoly det = poly_det(M);
    if (eval_at_origin(det).is_zero()) throw model_error("frame degenerate at origin (determinant vanishes at 0)");
    auto dc = as_constant(det);
    if (!dc) throw model_error("frame determinant is not constant; only unimodular polynomial frames are supported");
    Scalar inv = Scalar(1) / *dc;
    // N = M^{-1} = adj(M)/det, with N[i][k] = (-1)^{i+k} minor(k,i) / det
    N.assign(n_, std::vector<MultiPoly>(n_));
    for (int i = 0; i < n_; ++i)
        for (int k = 0; k < n_; ++k) {
            std::vector<std::vector<MultiPoly>> minor;
            for (int a = 0; a < n_; ++a) {
                if (a == k) continue;
                std::vector<MultiPoly> row;
                for (int b = 0; b < n_; ++b)
                    if (b != i) row.push_back(M[a][b]);
                minor.push_back(row);
            }
            MultiPoly m = poly_det(minor) * inv;
            N[i][k] = ((i + k) & 1) ? -m : m;
        }

    C = tensor3(n_, n_, n_);
    for (int k = 0; k < n_; ++k)
        for (int l = 0; l < n_; ++l) {
            if (k == l) continue;
            Sec c = frame_coeffs(bracket(E[k], E[l]));
            for (int m = 0; m < n_; ++m) C[k][l][m] = c[m];
        }
    for (int a = 0; a < r_; ++a)
        for (int b = 0; b < r_; ++b)
            for (int m = r_; m < n_; ++m)
                if (!C[a][b][m].is_zero()) throw model_error("non-involutive frame: bracket leaves F");
    if (perfect) {
        for (int a = r_; a < n_; ++a)
            for (int b = r_; b < n_; ++b)
                for (int m = 0; m < r_; ++m)
                    if (!C[a][b][m].is_zero())
                        throw model_error("model declared perfect but span(j(B)) is not involutive");
    }
    for (auto& cd : connections) check_connection(cd);
}

inline void ChartModel::check_connection(const ConnectionData& cd) const {
    int n_ = n(), r_ = r(), nb = nB();
    if (int(cd.gt.size()) != r_ || int(cd.gb.size()) != n_) throw model_error("connection '" + cd.name + "' has wrong shape");
    for (int c = 0; c < r_; ++c)
        for (int a = 0; a < r_; ++a)
            for (int b = 0; b < r_; ++b)
                if (cd.gt[c][a][b] - cd.gt[c][b][a] != C[a][b][c])
                    throw model_error("connection '" + cd.name + "' is not torsion-free");
    for (int a = 0; a < r_; ++a)
        for (int be = 0; be < nb; ++be)
            for (int ga = 0; ga < nb; ++ga)
                if (cd.gb[a][be][ga] != C[a][r_ + be][r_ + ga])
                    throw model_error("connection '" + cd.name + "': nabla^B does not extend the Bott connection");
}

// Connection-derived geometry for a fixed (model, connection triple).
class Geometry {
public:
    Geometry(const ChartModel& m, const ConnectionData& cd) : M_(&m), cd_(cd) {
        int n = m.n(), r = m.r(), nb = m.nB();
        A_ = tensor3(n, r, r);
        for (int k = 0; k < n; ++k)
            for (int b = 0; b < r; ++b)
                for (int c = 0; c < r; ++c) A_[k][b][c] = k < r ? cd.gt[b][k][c] : m.C[k][c][b];
        T_ = tensor3(n, n, n);
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
                if (l < r)
                    for (int b = 0; b < r; ++b) T_[k][l][b] = A_[k][b][l];
                else
                    for (int g = 0; g < nb; ++g) T_[k][l][r + g] = cd.gb[k][l - r][g];
            }
    }

    const ChartModel& model() const { return *M_; }
    const ConnectionData& conn() const { return cd_; }
    // nabla^F_{e_k} u_c = sum_b A(k,b,c) u_b
    const MultiPoly& A(int k, int b, int c) const { return A_[k][b][c]; }
    // nabla^TM_{e_k} e_l = sum_m T(k,l,m) e_m
    const MultiPoly& T(int k, int l, int m) const { return T_[k][l][m]; }
    const MultiPoly& G(int k, int be, int ga) const { return cd_.gb[k][be][ga]; }

    Sec nablaF(const VField& v, const Sec& a) const {
        int r = M_->r();
        Sec out(r);
        Sec cv = M_->frame_coeffs(v);
        for (int c = 0; c < r; ++c) {
            if (a[c].is_zero()) continue;
            out[c] += act(v, a[c]);
            for (int k = 0; k < M_->n(); ++k) {
                if (cv[k].is_zero()) continue;
                MultiPoly f = cv[k] * a[c];
                for (int b = 0; b < r; ++b)
                    if (!A_[k][b][c].is_zero()) out[b] += f * A_[k][b][c];
            }
        }
        return out;
    }
    Sec nablaB(const VField& v, const Sec& s) const {
        int nb = M_->nB();
        Sec out(nb);
        Sec cv = M_->frame_coeffs(v);
        for (int be = 0; be < nb; ++be) {
            if (s[be].is_zero()) continue;
            out[be] += act(v, s[be]);
            for (int k = 0; k < M_->n(); ++k) {
                if (cv[k].is_zero()) continue;
                MultiPoly f = cv[k] * s[be];
                for (int g = 0; g < nb; ++g)
                    if (!cd_.gb[k][be][g].is_zero()) out[g] += f * cd_.gb[k][be][g];
            }
        }
        return out;
    }
    VField nablaTM(const VField& u, const VField& v) const {
        auto [f, b] = M_->project(v);
        return vf_add(M_->F_field(nablaF(u, f)), M_->lift(nablaB(u, b)));
    }
    // torsion-free F-connection
    Sec tilde(const Sec& a, const Sec& a2) const {
        int r = M_->r();
        Sec out(r);
        VField va = M_->F_field(a);
        for (int c = 0; c < r; ++c) {
            if (a2[c].is_zero()) continue;
            out[c] += act(va, a2[c]);
            for (int e = 0; e < r; ++e) {
                if (a[e].is_zero()) continue;
                MultiPoly f = a[e] * a2[c];
                for (int b = 0; b < r; ++b)
                    if (!cd_.gt[b][e][c].is_zero()) out[b] += f * cd_.gt[b][e][c];
            }
        }
        return out;
    }
    Sec bott(const Sec& a, const Sec& s) const {
        return M_->project(bracket(M_->F_field(a), M_->lift(s))).second;
    }
    VField bas(const Sec& a, const VField& w) const {
        return vf_add(M_->F_field(nablaF(w, a)), bracket(M_->F_field(a), w));
    }
    Sec bas_shift(const Sec& a, const Sec& a2) const { return tilde(a, a2); }
    Sec Rtilde(const Sec& a, const Sec& a2, const Sec& a3) const {
        Sec br = M_->project(bracket(M_->F_field(a), M_->F_field(a2))).first;
        return sec_sub(sec_sub(tilde(a, tilde(a2, a3)), tilde(a2, tilde(a, a3))), tilde(br, a3));
    }
    // the five-term basic curvature, valued in F[1]
    Sec Rbas(const Sec& a, const Sec& a2, const VField& w) const {
        auto Fbr = [&](const Sec& x, const Sec& y) {
            return M_->project(bracket(M_->F_field(x), M_->F_field(y))).first;
        };
        Sec t1 = nablaF(w, Fbr(a, a2));
        Sec t2 = Fbr(nablaF(w, a), a2);
        Sec t3 = Fbr(a, nablaF(w, a2));
        Sec t4 = nablaF(bas(a2, w), a);
        Sec t5 = nablaF(bas(a, w), a2);
        return sec_add(sec_sub(sec_sub(sec_sub(t1, t2), t3), t4), t5);
    }
    Sec R11(const Sec& a, const VField& u, const Sec& s) const {
        VField va = M_->F_field(a);
        return sec_sub(sec_sub(nablaB(va, nablaB(u, s)), nablaB(u, nablaB(va, s))), nablaB(bracket(va, u), s));
    }

private:
    const ChartModel* M_;
    ConnectionData cd_;
    Tensor3<MultiPoly> A_, T_;
};

} // namespace hcdg
