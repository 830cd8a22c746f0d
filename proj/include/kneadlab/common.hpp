#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace kneadlab {

using Complex = std::complex<double>;

/// Which one-sided limit to take at a discontinuity or turning point.
enum class Side { Minus, Plus, TwoSided };

struct SidedPoint {
    double x = 0.0;
    Side side = Side::TwoSided;
};

inline SidedPoint at(double x) { return {x, Side::TwoSided}; }
inline SidedPoint at_minus(double x) { return {x, Side::Minus}; }
inline SidedPoint at_plus(double x) { return {x, Side::Plus}; }

enum class ErrorCode {
    DomainError,
    SideRequired,
    NonDifferentiable,
    DegenerateDeformation,
    OrbitEscaped,
    NoRoot,
    PeriodCollision,
    NotRealized,
    MonotonicityViolation,
    Diverged,
    SingularJacobian,
    OrbitNotFinite,
    TangentOrbit,
    OrbitLeftDomain,
    WrongShape,
    ZeroDeterminant,
    CollidingOrbitPoints,
    InjectivityLost,
    BranchJump,
    SingularLift,
    TargetHitSingularValue,
    NoConvergence,
    NoRootInBracket,
    HypothesisViolated,
    GeometryFailed,
    InvalidValueVector,
    Overflow,
    InvalidArgument,
    Unsupported,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

inline void require(bool ok, ErrorCode code, const std::string& what) {
    if (!ok) fail(code, what);
}

/// Deterministic 64-bit RNG (splitmix-seeded xoshiro256**). Used instead of
/// std::uniform_real_distribution so streams are identical across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t z = seed;
        for (auto& word : s_) {
            z += 0x9e3779b97f4a7c15ULL;
            std::uint64_t t = z;
            t = (t ^ (t >> 30)) * 0xbf58476d1ce4e5b9ULL;
            t = (t ^ (t >> 27)) * 0x94d049bb133111ebULL;
            word = t ^ (t >> 31);
        }
    }

    std::uint64_t next_u64() {
        auto rotl = [](std::uint64_t v, int k) {
            return (v << k) | (v >> (64 - k));
        };
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform in [0,1).
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }
    /// Uniform in [a,b).
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

private:
    std::uint64_t s_[4];
};

}  // namespace kneadlab
