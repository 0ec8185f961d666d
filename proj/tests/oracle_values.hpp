#pragma once

// Generated by tests/oracle/derive.py (sympy / mpmath). Do not edit by hand.

namespace oracle
{

// Gamma^0_00 of the unit sphere chart at y = (1, 0)
inline constexpr double kSphereGamma_000_at_10 = -1.0000000000000000;

// Gamma^0_01 of the unit sphere chart at y = (1, 0)
inline constexpr double kSphereGamma_001_at_10 = 0.0;

// Gamma^0_11 of the unit sphere chart at y = (1, 0)
inline constexpr double kSphereGamma_011_at_10 = 1.0000000000000000;

// Gamma^1_00 of the unit sphere chart at y = (1, 0)
inline constexpr double kSphereGamma_100_at_10 = 0.0;

// Gamma^1_01 of the unit sphere chart at y = (1, 0)
inline constexpr double kSphereGamma_101_at_10 = -1.0000000000000000;

// Gamma^1_11 of the unit sphere chart at y = (1, 0)
inline constexpr double kSphereGamma_111_at_10 = 0.0;

// stereographic factor 4/(1+|y|^2)^2 at |y| = 1
inline constexpr double kSphereMetricAtUnit = 1.0000000000000000;

// 2 atan(1)
inline constexpr double kSphereDistanceAtUnit = 1.5707963267948966;

// 2 artanh(1/2)
inline constexpr double kHyperbolicDistanceAtHalf = 1.0986122886681097;

// sqrt(1) cos(pi/4)
inline constexpr double kXiQuarterPi = 0.70710678118654752;

// -1/4 (1 - 0)^2
inline constexpr double kDoubleWellAtZero = -0.25000000000000000;

// V'(1/2) = u - u^3
inline constexpr double kDoubleWellGradAtHalf = 0.37500000000000000;

// V''(1) = 1 - 3u^2 at u = 1
inline constexpr double kDoubleWellSecondAtOne = -2.0000000000000000;

// Hess cos(rho) = -cos(rho) g at rho = 0, g(0) = 4 I
inline constexpr double kCosineHessianAtCenter = -4.0000000000000000;

// d^2/dr^2 cos(2 atan r) at 0
inline constexpr double kCosineRadialSecondDerivative = -4.0000000000000000;

// 1/2 |d phi|^2 at x = 0
inline constexpr double kInstantonEnergyDensityAtOrigin = 4.0000000000000000;

// int_{B_1} 1/2 |d phi|^2 = 4 pi r^2/(1+r^2) at r = 1
inline constexpr double kInstantonBallEnergyR1 = 6.2831853071795865;

// d/dr 4 pi r^2/(1+r^2) at r = 1
inline constexpr double kInstantonRadialFluxR1 = 6.2831853071795865;

// 4 pi
inline constexpr double kInstantonTotalEnergy = 12.566370614359173;

// tail 4 pi/(1+L^2) outside the disk of radius 8
inline constexpr double kInstantonTailL8 = 0.19332877868244881;

// int over [-8,8]^2 of 4/(1+|x|^2)^2
inline constexpr double kInstantonBoxEnergyL8 = 12.407794322372055;

// P(0) for the continuum kink
inline constexpr double kKinkPAtZero = 0.0;

// int (1/2 u'^2 - V) = int u'^2 over the line (= 2 sqrt 2 / 3)
inline constexpr double kKinkEnergyOnLine = 0.94280904158206337;

// max |u''''| of the kink sampled on [0, 4]
inline constexpr double kKinkFourthDerivMax = 1.0214712937067346;

// 4 pi (r - 1/2) at r = 0.75
inline constexpr double kHedgehogIdentity_0_75 = 3.1415926535897932;

// 4 pi (r - 1/2) at r = 1.0
inline constexpr double kHedgehogIdentity_1_0 = 6.2831853071795865;

// 4 pi (r - 1/2) at r = 1.5
inline constexpr double kHedgehogIdentity_1_5 = 12.566370614359173;

// cos(pi/2)
inline constexpr double kPendulumEnergy = 0.0;

// pi r^2 at r = 1
inline constexpr double kDiskArea = 3.1415926535897932;

// 2 pi r
inline constexpr double kUnitCircle = 6.2831853071795865;

// 4 pi r^2
inline constexpr double kUnitSphereArea = 12.566370614359173;

} // namespace oracle
