#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace adgve {

using Vec = std::vector<double>;

// Base class for all typed pipeline errors.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

#define ADGVE_ERROR(Name)                                                  \
    class Name : public Error {                                           \
    public:                                                               \
        explicit Name(const std::string& what) : Error(#Name, what) {}    \
    }

ADGVE_ERROR(SchemaError);
ADGVE_ERROR(RangeError);
ADGVE_ERROR(GeometryError);
ADGVE_ERROR(InsufficientFrames);
ADGVE_ERROR(DegenerateLane);
ADGVE_ERROR(WeightError);
ADGVE_ERROR(TemplateError);
ADGVE_ERROR(ParseError);
ADGVE_ERROR(TransportError);
ADGVE_ERROR(BackendError);
ADGVE_ERROR(BackendUnavailable);
ADGVE_ERROR(DimensionError);
ADGVE_ERROR(InsufficientData);
ADGVE_ERROR(NonFiniteLoss);
ADGVE_ERROR(SpecError);
ADGVE_ERROR(EmptyInput);
ADGVE_ERROR(IoError);

#undef ADGVE_ERROR

// 64-bit FNV-1a; used for catalog/config checksums and stub hashing.
inline std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ull) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

// SplitMix64: portable deterministic RNG. std::mt19937_64 is also portable,
// but distributions are not; this keeps every sampled value pinned.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }

private:
    std::uint64_t state_;
};

inline double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace adgve
