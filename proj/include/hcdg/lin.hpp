#pragma once

#include "scalar.hpp"

#include <array>
#include <bit>
#include <cassert>
#include <cstdint>
#include <functional>
#include <map>
#include <utility>
#include <vector>

namespace hcdg {

constexpr int kMaxVars = 6;

// Up to six exponents of at most 255, packed so that integer order is graded lex
// (total degree in bits 48..55, first variable most significant).
struct Exp {
    uint64_t bits = 0;

    static constexpr int shift(int i) { return 8 * (kMaxVars - 1 - i); }
    static constexpr uint64_t kDegUnit = uint64_t(1) << 48;

    static Exp unit(int i) { return Exp{(uint64_t(1) << shift(i)) | kDegUnit}; }
    int operator[](int i) const { return int((bits >> shift(i)) & 0xff); }
    int degree() const { return int((bits >> 48) & 0xff); }
    bool is_zero() const { return bits == 0; }

    void set(int i, int v) {
        int old = (*this)[i];
        bits &= ~(uint64_t(0xff) << shift(i));
        bits |= uint64_t(v) << shift(i);
        uint64_t d = uint64_t(degree() - old + v);
        bits = (bits & ~(uint64_t(0xff) << 48)) | (d << 48);
    }
    Exp inc(int i, int by = 1) const {
        Exp e = *this;
        e.set(i, (*this)[i] + by);
        return e;
    }
    friend Exp operator+(Exp a, Exp b) { return Exp{a.bits + b.bits}; }
    // caller guarantees b <= a componentwise
    friend Exp operator-(Exp a, Exp b) { return Exp{a.bits - b.bits}; }
    bool divides(Exp o) const {
        for (int i = 0; i < kMaxVars; ++i)
            if ((*this)[i] > o[i]) return false;
        return true;
    }
    auto operator<=>(const Exp&) const = default;
};

inline int popcount(uint32_t m) { return std::popcount(m); }

// (-1)^{#pairs (i in a, j in b, i > j)}; the reordering sign of xi^a xi^b -> xi^{a|b}.
inline int merge_parity(uint32_t a, uint32_t b) {
    int p = 0;
    while (b) {
        int j = std::countr_zero(b);
        b &= b - 1;
        p += std::popcount(a >> (j + 1));
    }
    return p & 1;
}

// Sign for removing generator a from mask m from the left: #elements of m below a.
inline int below_parity(uint32_t m, int a) { return std::popcount(m & ((1u << a) - 1)) & 1; }

// Sparse linear combination over Scalar; Tag keeps unrelated spaces apart.
template <class K, class Tag>
class Lin {
public:
    using key_type = K;
    using map_type = std::map<K, Scalar>;

    Lin() = default;
    Lin(const K& k, Scalar c) { add(k, std::move(c)); }

    void add(const K& k, const Scalar& c) {
        if (c.is_zero()) return;
        auto it = t_.find(k);
        if (it == t_.end()) {
            t_.emplace(k, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) t_.erase(it);
        }
    }
    void add(K&& k, const Scalar& c) {
        if (c.is_zero()) return;
        auto [it, ins] = t_.try_emplace(std::move(k), c);
        if (!ins) {
            it->second += c;
            if (it->second.is_zero()) t_.erase(it);
        }
    }
    void add_scaled(const Lin& o, const Scalar& c) {
        if (c.is_zero()) return;
        for (const auto& [k, v] : o.t_) add(k, v * c);
    }

    Lin& operator+=(const Lin& o) {
        for (const auto& [k, v] : o.t_) add(k, v);
        return *this;
    }
    Lin& operator-=(const Lin& o) {
        for (const auto& [k, v] : o.t_) add(k, -v);
        return *this;
    }
    Lin& operator*=(const Scalar& c) {
        if (c.is_zero()) {
            t_.clear();
            return *this;
        }
        for (auto& kv : t_) kv.second *= c;
        return *this;
    }
    friend Lin operator+(Lin a, const Lin& b) { return a += b; }
    friend Lin operator-(Lin a, const Lin& b) { return a -= b; }
    friend Lin operator*(Lin a, const Scalar& c) { return a *= c; }
    friend Lin operator*(const Scalar& c, Lin a) { return a *= c; }
    Lin operator-() const {
        Lin r = *this;
        for (auto& kv : r.t_) kv.second = -kv.second;
        return r;
    }
    friend bool operator==(const Lin& a, const Lin& b) { return a.t_ == b.t_; }
    friend bool operator!=(const Lin& a, const Lin& b) { return !(a == b); }

    bool is_zero() const { return t_.empty(); }
    size_t size() const { return t_.size(); }
    const map_type& terms() const { return t_; }
    auto begin() const { return t_.begin(); }
    auto end() const { return t_.end(); }
    Scalar coeff(const K& k) const {
        auto it = t_.find(k);
        return it == t_.end() ? Scalar(0) : it->second;
    }
    void clear() { t_.clear(); }

    template <class Pred>
    Lin filter(Pred p) const {
        Lin r;
        for (const auto& [k, v] : t_)
            if (p(k)) r.t_.emplace(k, v);
        return r;
    }

private:
    map_type t_;
};

// Build a Lin by applying a termwise linear map.
template <class Out, class In, class F>
Out map_terms(const In& in, F f) {
    Out out;
    for (const auto& [k, c] : in) out.add_scaled(f(k), c);
    return out;
}

} // namespace hcdg
