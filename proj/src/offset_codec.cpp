#include "tspmdf/offset_codec.hpp"

#include <cmath>
#include <string>

#include "tspmdf/errors.hpp"

namespace tspmdf {

namespace {

const double kPow10[kMaxPrecision + 1] = {1.0,    10.0,    100.0,    1000.0,   10000.0,
                                          1e5,    1e6,     1e7,      1e8};

void require_precision(int m) {
    if (m < 1 || m > kMaxPrecision)
        throw DomainError("digit precision must be in 1.." + std::to_string(kMaxPrecision) +
                          ", got " + std::to_string(m));
}

}  // namespace

double offset_bound(int m) {
    require_precision(m);
    return (kPow10[m] - 1.0) / kPow10[m];
}

void require_valid_code(const OffsetCode& code) {
    if (code.sign != 1 && code.sign != -1)
        throw DomainError("offset sign must be -1 or +1, got " + std::to_string(code.sign));
    require_precision(code.precision());
    for (int d : code.digits)
        if (d < 0 || d > 9) throw DomainError("offset digit out of 0..9: " + std::to_string(d));
}

double decode(const OffsetCode& code) {
    require_valid_code(code);
    long long scaled = 0;
    for (int d : code.digits) scaled = scaled * 10 + d;
    return code.sign * (static_cast<double>(scaled) / kPow10[code.precision()]);
}

OffsetCode encode(double x, int m) {
    require_precision(m);
    if (!(std::fabs(x) < 1.0))
        throw DomainError("offset magnitude must be < 1 before encoding, got " +
                          std::to_string(x) + " (clamp first)");

    // Scaled truncation: the first m decimal digits of |x| are the decimal
    // representation of floor(|x| * 10^m). The product is formed in 80-bit
    // extended precision and nudged by 1e-6 before the floor so that a value
    // sitting a rounding error below an integer (in particular any exact
    // decode() output) still lands on that integer; this is what makes
    // encode(decode(c)) == c exact. The nudge can only promote inputs within
    // 1e-6 * 10^-m of a digit boundary, far inside the 10^-m round-trip
    // tolerance.
    long double scaled = static_cast<long double>(std::fabs(x)) * static_cast<long double>(kPow10[m]);
    long long units = static_cast<long long>(floorl(scaled + 1e-6L));
    // |x| just below 1 must stay at all-nines; the nudge may not push it over.
    long long cap = static_cast<long long>(kPow10[m]) - 1;
    if (units > cap) units = cap;

    OffsetCode code;
    code.digits.assign(m, 0);
    for (int i = m - 1; i >= 0; --i) {
        code.digits[i] = static_cast<int>(units % 10);
        units /= 10;
    }
    code.sign = (x < 0.0 && !code.is_zero()) ? -1 : +1;
    return code;
}

std::vector<double> one_hot_features(const OffsetCode& code) {
    require_valid_code(code);
    const int m = code.precision();
    std::vector<double> features(2 + 10 * static_cast<std::size_t>(m), 0.0);
    features[code.sign < 0 ? 0 : 1] = 1.0;
    for (int i = 0; i < m; ++i) features[2 + 10 * i + code.digits[i]] = 1.0;
    return features;
}

}  // namespace tspmdf
