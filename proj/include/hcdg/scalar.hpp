#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

namespace hcdg {

struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Element of Q(i); the imaginary part stays zero for real models.
class Scalar {
public:
    Scalar() = default;
    Scalar(long v) : re_(v) {}
    Scalar(int v) : re_(v) {}
    Scalar(long num, long den) : re_(num, den) { re_.canonicalize(); }
    explicit Scalar(const mpq_class& re) : re_(re) {}
    Scalar(const mpq_class& re, const mpq_class& im) : re_(re), im_(im) {}

    static Scalar imag_unit() { return Scalar(mpq_class(0), mpq_class(1)); }

    const mpq_class& re() const { return re_; }
    const mpq_class& im() const { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_real() const { return sgn(im_) == 0; }
    bool is_one() const { return re_ == 1 && sgn(im_) == 0; }

    Scalar operator-() const { return Scalar(-re_, -im_); }

    Scalar& operator+=(const Scalar& o) {
        re_ += o.re_;
        if (sgn(o.im_) != 0) im_ += o.im_;
        return *this;
    }
    Scalar& operator-=(const Scalar& o) {
        re_ -= o.re_;
        if (sgn(o.im_) != 0) im_ -= o.im_;
        return *this;
    }
    Scalar& operator*=(const Scalar& o) {
        if (is_real() && o.is_real()) {
            re_ *= o.re_;
            return *this;
        }
        mpq_class r = re_ * o.re_ - im_ * o.im_;
        mpq_class i = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(r);
        im_ = std::move(i);
        return *this;
    }
    Scalar& operator/=(const Scalar& o) {
        if (o.is_zero()) throw std::domain_error("division by zero scalar");
        if (o.is_real()) {
            re_ /= o.re_;
            if (sgn(im_) != 0) im_ /= o.re_;
            return *this;
        }
        mpq_class n = o.re_ * o.re_ + o.im_ * o.im_;
        mpq_class r = (re_ * o.re_ + im_ * o.im_) / n;
        mpq_class i = (im_ * o.re_ - re_ * o.im_) / n;
        re_ = std::move(r);
        im_ = std::move(i);
        return *this;
    }

    friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
    friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
    friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }
    friend bool operator==(const Scalar& a, const Scalar& b) { return a.re_ == b.re_ && a.im_ == b.im_; }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

    Scalar conj() const { return Scalar(re_, -im_); }

    // "3/2", "-1", "I", "(1/2+3*I)"
    std::string str() const {
        if (is_real()) return re_.get_str();
        if (sgn(re_) == 0) {
            if (im_ == 1) return "I";
            if (im_ == -1) return "-I";
            return im_.get_str() + "*I";
        }
        std::string s = "(" + re_.get_str();
        if (sgn(im_) > 0) s += "+";
        if (im_ == 1) s += "I";
        else if (im_ == -1) s += "-I";
        else s += im_.get_str() + "*I";
        return s + ")";
    }

    static mpq_class parse_rational(const std::string& s) {
        if (s.empty()) throw parse_error("empty number");
        mpq_class q;
        if (q.set_str(s, 10) != 0) throw parse_error("bad number '" + s + "'");
        if (q.get_den() == 0) throw parse_error("zero denominator in '" + s + "'");
        q.canonicalize();
        return q;
    }

private:
    mpq_class re_{0};
    mpq_class im_{0};
};

inline std::ostream& operator<<(std::ostream& os, const Scalar& s) { return os << s.str(); }

inline Scalar sign_scalar(int parity) { return (parity & 1) ? Scalar(-1) : Scalar(1); }

} // namespace hcdg
