#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hyperconv {

// Thrown when an adaptive scheme exhausts its budget without reaching the
// requested accuracy. Distinct from divergence, which is a value.
struct accuracy_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when an evaluation is requested in a regime where the result is
// known to diverge but the return type cannot carry infinity.
struct divergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A nonnegative-integral value that is either a finite real or +infinity.
// Finite values are never NaN; NaN coming out of a computation is a bug
// and is rejected at construction.
class ExtendedReal {
public:
    static ExtendedReal finite(double v) {
        if (std::isnan(v))
            throw std::domain_error("ExtendedReal: NaN is not a value");
        if (std::isinf(v))
            return infinity();
        return ExtendedReal(v, false);
    }
    static ExtendedReal infinity() { return ExtendedReal(0.0, true); }

    bool is_finite() const { return !inf_; }
    bool is_infinite() const { return inf_; }

    double value() const {
        if (inf_)
            throw std::domain_error("ExtendedReal: value() on +infinity");
        return v_;
    }
    // +inf maps to the IEEE infinity; handy for comparisons and printing.
    double as_double() const {
        return inf_ ? std::numeric_limits<double>::infinity() : v_;
    }

    friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
        return a.inf_ == b.inf_ && (a.inf_ || a.v_ == b.v_);
    }
    friend bool operator<=(const ExtendedReal& a, const ExtendedReal& b) {
        return a.as_double() <= b.as_double();
    }

    std::string str() const {
        if (inf_) return "inf";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v_);
        return buf;
    }

private:
    ExtendedReal(double v, bool inf) : v_(v), inf_(inf) {}
    double v_;
    bool inf_;
};

} // namespace hyperconv
