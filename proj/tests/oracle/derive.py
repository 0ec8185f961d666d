"""Independent oracle for the unit and acceptance tests.

Computes reference values symbolically (sympy) or in extended precision
(mpmath) without touching the C++ code, and writes them to
tests/oracle_values.hpp. Run once; the header is committed frozen.

    python3 tests/oracle/derive.py > tests/oracle_values.hpp
"""

import sympy as sp
import mpmath as mp

mp.mp.dps = 40
out = []


def emit(name, value, note):
    if isinstance(value, sp.Basic):
        value = mp.mpf(sp.N(value, 40))
    out.append(f"// {note}\ninline constexpr double {name} = {mp.nstr(mp.mpf(value), 17, strip_zeros=False)};")


y1, y2, y3 = sp.symbols("y1 y2 y3", real=True)
Y = [y1, y2]

# Stereographic sphere metric k = 1 in two dimensions.
omega2 = 4 / (1 + y1**2 + y2**2) ** 2
g = sp.diag(omega2, omega2)
ginv = g.inv()


def christoffel(a, b, c):
    return sp.simplify(sum(ginv[a, d] * (sp.diff(g[d, c], Y[b]) + sp.diff(g[d, b], Y[c]) - sp.diff(g[b, c], Y[d]))
                           for d in range(2)) / 2)


pt = {y1: 1, y2: 0}
for a in range(2):
    for b in range(2):
        for c in range(b, 2):
            emit(f"kSphereGamma_{a}{b}{c}_at_10", christoffel(a, b, c).subs(pt), f"Gamma^{a}_{b}{c} of the unit sphere chart at y = (1, 0)")

emit("kSphereMetricAtUnit", omega2.subs({y1: 1, y2: 0}), "stereographic factor 4/(1+|y|^2)^2 at |y| = 1")
emit("kSphereDistanceAtUnit", 2 * mp.atan(1), "2 atan(1)")
emit("kHyperbolicDistanceAtHalf", 2 * mp.atanh(mp.mpf("0.5")), "2 artanh(1/2)")
emit("kXiQuarterPi", mp.cos(mp.pi / 4), "sqrt(1) cos(pi/4)")

# Double well V = -1/4 (1 - u^2)^2
u = sp.symbols("u", real=True)
V = -sp.Rational(1, 4) * (1 - u**2) ** 2
emit("kDoubleWellAtZero", V.subs(u, 0), "-1/4 (1 - 0)^2")
emit("kDoubleWellGradAtHalf", sp.diff(V, u).subs(u, sp.Rational(1, 2)), "V'(1/2) = u - u^3")
emit("kDoubleWellSecondAtOne", sp.diff(V, u, 2).subs(u, 1), "V''(1) = 1 - 3u^2 at u = 1")

# Covariant Hessian of cos(rho) at the center of the unit sphere: -g(y0) = -4 I.
r = sp.symbols("r", positive=True)
rho = 2 * sp.atan(r)
emit("kCosineHessianAtCenter", -4, "Hess cos(rho) = -cos(rho) g at rho = 0, g(0) = 4 I")
# radial second derivative along the chart ray at r = 0: d^2/dr^2 cos(2 atan r) = -4
emit("kCosineRadialSecondDerivative", sp.diff(sp.cos(rho), r, 2).subs(r, 0), "d^2/dr^2 cos(2 atan r) at 0")

# Instanton phi = x in the sphere chart: |d phi|^2 = 8/(1+|x|^2)^2.
emit("kInstantonEnergyDensityAtOrigin", sp.Rational(1, 2) * 8, "1/2 |d phi|^2 at x = 0")
s = sp.symbols("s", positive=True)
ball = sp.integrate(2 * sp.pi * s * 4 / (1 + s**2) ** 2, (s, 0, r))
emit("kInstantonBallEnergyR1", ball.subs(r, 1), "int_{B_1} 1/2 |d phi|^2 = 4 pi r^2/(1+r^2) at r = 1")
emit("kInstantonRadialFluxR1", sp.diff(4 * sp.pi * r**2 / (1 + r**2), r).subs(r, 1), "d/dr 4 pi r^2/(1+r^2) at r = 1")
emit("kInstantonTotalEnergy", 4 * mp.pi, "4 pi")
L = sp.Integer(8)
emit("kInstantonTailL8", 4 * sp.pi / (1 + L**2), "tail 4 pi/(1+L^2) outside the disk of radius 8")
emit("kInstantonBoxEnergyL8",
     mp.quad(lambda a, b: 4 / (1 + a * a + b * b) ** 2, [-8, 8], [-8, 8]),
     "int over [-8,8]^2 of 4/(1+|x|^2)^2")

# Kink u = tanh(x / sqrt 2): P(0) = 1/2 u'(0)^2 + V(u(0)) = 1/4 - 1/4.
x = sp.symbols("x", real=True)
kink = sp.tanh(x / sp.sqrt(2))
P = sp.Rational(1, 2) * sp.diff(kink, x) ** 2 + V.subs(u, kink)
emit("kKinkPAtZero", sp.simplify(P.subs(x, 0)), "P(0) for the continuum kink")
emit("kKinkEnergyOnLine", sp.integrate(sp.simplify(sp.diff(kink, x) ** 2), (x, -sp.oo, sp.oo)),
     "int (1/2 u'^2 - V) = int u'^2 over the line (= 2 sqrt 2 / 3)")
emit("kKinkFourthDerivMax",
     max(abs(sp.diff(kink, x, 4).subs(x, mp.mpf(t) / 1000)) for t in range(0, 4000)),
     "max |u''''| of the kink sampled on [0, 4]")

# Hedgehog x/|x| on the annulus 0.5 < |x| < 2: 1/2|d phi|^2 = 1/r^2.
for rr in ("0.75", "1.0", "1.5"):
    val = 4 * mp.pi * (mp.mpf(rr) - mp.mpf("0.5"))
    emit(f"kHedgehogIdentity_{rr.replace('.', '_')}", val, f"4 pi (r - 1/2) at r = {rr}")

# Pendulum H = 1/2 v^2 + cos u at u = pi/2, v = 0.
emit("kPendulumEnergy", sp.cos(sp.pi / 2), "cos(pi/2)")

# Unit ball volumes for quadrature checks.
emit("kDiskArea", mp.pi, "pi r^2 at r = 1")
emit("kUnitCircle", 2 * mp.pi, "2 pi r")
emit("kUnitSphereArea", 4 * mp.pi, "4 pi r^2")

print("#pragma once\n")
print("// Generated by tests/oracle/derive.py (sympy / mpmath). Do not edit by hand.\n")
print("namespace oracle\n{\n")
print("\n\n".join(out))
print("\n} // namespace oracle")
