#include "sdelab/rng.hpp"

#include <cmath>

namespace sdelab {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

double horner(const double (&c)[8], double r) {
    double v = c[7];
    for (int i = 6; i >= 0; --i) v = v * r + c[i];
    return v;
}

}  // namespace

Philox4x32 philox4x32_10(Philox4x32 ctr, std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kW0;
            key[1] += kW1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kM0, ctr[0], hi0, lo0);
        mulhilo(kM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

double normal_quantile(double p) {
    static constexpr double a[8] = {3.387132872796366608,  133.14166789178437745, 1971.5909503065514427,
                                    13731.693765509461125, 45921.953931549871457, 67265.770927008700853,
                                    33430.575583588128105, 2509.0809287301226727};
    static constexpr double b[8] = {1.0,                   42.313330701600911252, 687.1870074920579083,
                                    5394.1960214247511077, 21213.794301586595867, 39307.89580009271061,
                                    28729.085735721942674, 5226.495278852545925};
    static constexpr double c[8] = {1.42343711074968357734,  4.6303378461565452959,   5.7694972214606914055,
                                    3.64784832476320460504,  1.27045825245236838258,  0.24178072517745061177,
                                    0.0227238449892691845833, 7.7454501427834140764e-4};
    static constexpr double d[8] = {1.0,
                                    2.05319162663775882187,
                                    1.6763848301838038494,
                                    0.68976733498510000455,
                                    0.14810397642748007459,
                                    0.0151986665636164571966,
                                    5.475938084995344946e-4,
                                    1.05075007164441684324e-9};
    static constexpr double e[8] = {6.6579046435011037772,    5.4637849111641143699,    1.7848265399172913358,
                                    0.29656057182850489123,   0.026532189526576123093,  0.0012426609473880784386,
                                    2.71155556874348757815e-5, 2.01033439929228813265e-7};
    static constexpr double f[8] = {1.0,
                                    0.59983220655588793769,
                                    0.13692988092273580531,
                                    0.0148753612908506148525,
                                    7.868691311456132591e-4,
                                    1.8463183175100546818e-5,
                                    1.4215117583164458887e-7,
                                    2.04426310338993978564e-15};

    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * horner(a, r) / horner(b, r);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double v;
    if (r <= 5.0) {
        r -= 1.6;
        v = horner(c, r) / horner(d, r);
    } else {
        r -= 5.0;
        v = horner(e, r) / horner(f, r);
    }
    return q < 0.0 ? -v : v;
}

double RngStream::uniform_at(std::uint64_t index) const {
    const std::uint64_t block = index >> 1;
    const Philox4x32 ctr = {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                            static_cast<std::uint32_t>(replication_),
                            static_cast<std::uint32_t>(replication_ >> 32) ^
                                (static_cast<std::uint32_t>(lane_) << 24)};
    const Philox4x32 out = philox4x32_10(ctr, {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
    const std::size_t slot = (index & 1u) * 2;
    const std::uint64_t bits =
        (static_cast<std::uint64_t>(out[slot]) << 21) | (static_cast<std::uint64_t>(out[slot + 1]) >> 11);
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace sdelab
