#pragma once

#include <cstdint>
#include <vector>

namespace tspmdf {

/// A coordinate offset discretized as a sign and M base-10 digits. The
/// decoded magnitude sum_m 0.1^m * digit_m lies in [0, 1 - 10^-M].
///
/// The representation is redundant at zero (both signs decode to 0), so codes
/// whose digits are all zero must carry sign +1; that canonical form is what
/// encode produces, what samplers emit, and what log-probability scoring
/// accepts.
struct OffsetCode {
    int sign = +1;            // -1 or +1
    std::vector<int> digits;  // M values, each 0..9

    [[nodiscard]] int precision() const { return static_cast<int>(digits.size()); }
    [[nodiscard]] bool is_zero() const {
        for (int d : digits)
            if (d != 0) return false;
        return true;
    }
    bool operator==(const OffsetCode&) const = default;
};

/// Largest representable magnitude, 1 - 10^-m. Cumulative offsets are clamped
/// to +/- this bound before encoding.
double offset_bound(int m);

/// sign * sum_m 0.1^m * digit_m, computed as one integer-over-power-of-ten
/// division so the result is correctly rounded. Throws DomainError on an
/// invalid sign or digit.
double decode(const OffsetCode& code);

/// Inverse of decode by truncation toward zero: the digits are the first m
/// decimal digits of |x|, so |decode(encode(x,m))| <= |x| (clamped offsets
/// never re-exceed the valid range) and |decode(encode(x,m)) - x| < 10^-m.
/// x == 0 encodes with the canonical +1 sign. Throws DomainError when
/// |x| >= 1 or m is outside 1..8.
OffsetCode encode(double x, int m);

/// Concatenation of a 2-slot sign one-hot (index 0 = sign -1, index 1 = +1;
/// frozen, checkpoints depend on it) and M 10-slot digit one-hots. Length
/// 2 + 10M, exactly M+1 ones.
std::vector<double> one_hot_features(const OffsetCode& code);

/// Bounds-checks sign and digits; throws DomainError.
void require_valid_code(const OffsetCode& code);

// Maximum supported precision. Above 8 digits the integer digit extraction
// would start to collide with double rounding noise (see encode).
inline constexpr int kMaxPrecision = 8;

}  // namespace tspmdf
