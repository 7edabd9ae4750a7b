// Constants produced by tests/oracle/derive.py (sympy), frozen here.
#pragma once

namespace oracle {

// rotational2d, f = 1 + 0.1|p|^2, a = -0.2 f, at q = (1, 0), p = (0, 1)
inline constexpr double kRot2F = 1.1;
inline constexpr double kRot2J = 0.90909090909090909;
inline constexpr double kRot2A = -0.22;
inline constexpr double kRot2L12 = -0.2;
inline constexpr double kRot2Lower34 = -0.16528925619834711;

// constant {q1, q2} = 0.1 next to f = 1 + 0.1|p|^2: cyclic sum on (q1, q2, p1) at (0.5, 0.5, 0.5, 0.5)
inline constexpr double kBrokenJacobiQ1Q2P1 = -0.105;

// -1/f(rho) on rho = 0, 0.25, ..., 2
inline constexpr double kReducedW[9] = {
    -1.0,
    -0.99378881987577640,
    -0.97560975609756098,
    -0.94674556213017752,
    -0.90909090909090909,
    -0.86486486486486487,
    -0.81632653061224490,
    -0.76555023923444976,
    -0.71428571428571429,
};

// Bianchi, f = 1 + 0.1(p1^2 + p2^2)
inline constexpr double kBianchiL = 0.6;             // q = (., 2, 3), p = (., 1, 0)
inline constexpr double kOmegaNP1P2 = 0.49586776859504132;

// V = 1 + (q1^2 + q2^2)/2 at x = (0.1, 0.2, -0.3, 1.5, 0.4, -0.6)
inline constexpr double kBianchiXH[6] = {
    -3.156, 0.8416, -1.2624, -6.6856422189733058, -0.31387991638372328, 0.47081987457558491,
};
inline constexpr double kBianchiHAtX = -0.14120669701204711;

// reduced field at t = -0.2, s = (0.3, 0.1, -0.5, 0.25)
inline constexpr double kReducedXt[4] = {
    -1.0323733224102931, 0.51899496723087916, -0.13901114827376543, -0.046337049424588477,
};

inline constexpr double kExpAtQuarter = 2.7182818284590452;

}  // namespace oracle
