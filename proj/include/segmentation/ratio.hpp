#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace seg {

// Exact rational with a small magnitude range. Metric values (LoCS, PA) and
// thresholds are ratios of vertex counts, so exact comparison is required;
// floating point would make threshold gates order-dependent.
class Ratio {
public:
    Ratio() : num_(0), den_(1) {}
    Ratio(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
        if (den_ == 0) throw std::invalid_argument("Ratio: zero denominator");
        if (den_ < 0) { num_ = -num_; den_ = -den_; }
        std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) { num_ /= g; den_ /= g; }
    }

    static Ratio from_decimal(const std::string& text) {
        // "0.41" -> 41/100. Only plain decimal literals are accepted.
        auto dot = text.find('.');
        std::string whole = dot == std::string::npos ? text : text.substr(0, dot);
        std::string frac = dot == std::string::npos ? "" : text.substr(dot + 1);
        if (whole.empty() && frac.empty())
            throw std::invalid_argument("Ratio: empty literal");
        bool neg = !whole.empty() && whole[0] == '-';
        if (neg) whole = whole.substr(1);
        std::int64_t num = 0, den = 1;
        for (char c : whole) {
            if (c < '0' || c > '9') throw std::invalid_argument("Ratio: bad literal '" + text + "'");
            num = num * 10 + (c - '0');
        }
        for (char c : frac) {
            if (c < '0' || c > '9') throw std::invalid_argument("Ratio: bad literal '" + text + "'");
            num = num * 10 + (c - '0');
            den *= 10;
        }
        return Ratio(neg ? -num : num, den);
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    friend bool operator==(const Ratio& a, const Ratio& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Ratio& a, const Ratio& b) { return !(a == b); }
    friend bool operator<(const Ratio& a, const Ratio& b) {
        return a.num_ * b.den_ < b.num_ * a.den_;
    }
    friend bool operator<=(const Ratio& a, const Ratio& b) { return a < b || a == b; }
    friend bool operator>(const Ratio& a, const Ratio& b) { return b < a; }
    friend bool operator>=(const Ratio& a, const Ratio& b) { return b <= a; }

    std::string str() const {
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    // Fixed four decimal places, round half away from zero.
    std::string decimal() const {
        std::int64_t n = num_ < 0 ? -num_ : num_;
        std::int64_t scaled = (n * 10000 + den_ / 2) / den_;
        std::string digits = std::to_string(scaled % 10000);
        while (digits.size() < 4) digits = "0" + digits;
        std::string sign = num_ < 0 ? "-" : "";
        return sign + std::to_string(scaled / 10000) + "." + digits;
    }

    double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }

private:
    std::int64_t num_;
    std::int64_t den_;
};

} // namespace seg
