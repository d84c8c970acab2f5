#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace gfm {

/// Per-unit fundamental-frequency complex amplitude.
using Phasor = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Argument with arg(0) := 0, so zero phasors never carry an undefined angle.
inline double phase_of(Phasor p) {
    if (p.real() == 0.0 && p.imag() == 0.0) return 0.0;
    return std::arg(p);
}

inline bool is_finite(Phasor p) { return std::isfinite(p.real()) && std::isfinite(p.imag()); }

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
    double w = std::remainder(a, kTwoPi);
    if (w <= -kPi) w += kTwoPi;
    return w;
}

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Positive/negative/zero sequence components of one quantity.
///
/// Negative-sequence phasors follow the symmetrical-component (Fortescue) convention: the phase-a
/// negative-sequence waveform is Re(neg * exp(j w t)), the same rotation sense as the positive
/// sequence. Controllers working in a negatively rotating dq frame see conj(neg) instead.
struct SequenceSet {
    Phasor pos{};
    Phasor neg{};
    Phasor zero{};
};

}  // namespace gfm
