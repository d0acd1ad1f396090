#pragma once

// Frozen values from tests/oracles/generate_golden.py (mpmath, 30 digits).
// Default scenario: gamma = -0.8 / (1 + s^4), eta = 0.3.

#include <complex>

namespace golden {

using C = std::complex<double>;

inline constexpr double gamma_1 = -0.4;
inline constexpr double dgamma_1 = 0.8;
inline constexpr double d2gamma_1 = -0.8;
inline const C gamma_z{-0.025476503727692879, 0.034544411834159835};  // z = 2 + 0.5i
inline const C dgamma_z{0.034015576895376928, -0.073192363707844247};
inline const C d2gamma_z{-0.048378661523038209, 0.17987690653091027};

inline constexpr double alpha0 = -1.7771531752633465;
inline constexpr double alpha_1 = -1.5821549775036021;
inline constexpr double alpha_m3 = -0.0098246932340491725;
inline const C alpha_15_5{-1.7771147749719497, -5.546630738712839e-5};

inline constexpr double embed_1_0_x = 0.29160142321147157;
inline constexpr double embed_1_0_y = -0.93427335633118376;
inline constexpr double embed_m2_1_x = -1.8175191352866485;
inline constexpr double embed_m2_1_y = 1.5622292825110665;

inline constexpr double a_minus = 0.31958850823610968;
inline constexpr double a_plus = 0.59389504472263517;

// F = 0.02
inline constexpr double w_2_05 = 0.00079616049482787959;
inline constexpr double w_m3_025 = -0.049491924131622619;
inline const C w_m12m3i_05{-0.21993733137031624, -0.05731866767039709};
inline const C w_15p5i_075{-0.12050986617874692, -0.048494253899980034};

// V0 at s = 0.5, u = 0.3.
inline constexpr double v0_05_03 = 0.30375177088547504;

}  // namespace golden
