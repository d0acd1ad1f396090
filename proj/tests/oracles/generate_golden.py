"""High-precision reference values for the unit tests.

Independent of the C++ implementation: curvature, bending angle, embedding,
reference constants and field potentials are evaluated with mpmath quadrature
at 30 digits.  Distorted (complex) field values are integrated along the
straight segment 0 -> z, whereas the library goes along the real axis first
and then vertically; analyticity makes both paths agree.

Run:  python3 tests/oracles/generate_golden.py
"""
import mpmath as mp

mp.mp.dps = 30
AMP = mp.mpf("-0.8")
N = 2
ETA = mp.mpf("0.3")


def gamma(z):
    return AMP / (1 + z ** (2 * N))


def dgamma(z):
    return mp.diff(gamma, z)


def d2gamma(z):
    return mp.diff(gamma, z, 2)


ALPHA0 = mp.quad(gamma, [-mp.inf, 0, mp.inf])
HALF = mp.quad(gamma, [-mp.inf, 0])


def alpha(z):
    # straight segment from 0 to z
    return HALF + mp.quad(gamma, [0, z])


def embed(s, u):
    x = mp.quad(lambda t: mp.cos(alpha(t)), [0, s]) - u * mp.sin(alpha(s))
    y = mp.quad(lambda t: mp.sin(alpha(t)), [0, s]) + u * mp.cos(alpha(s))
    return x, y


def stark(F, z, u):
    return F * mp.quad(lambda t: mp.cos(ETA - alpha(t)), [0, z]) + F * u * mp.sin(ETA - alpha(z))


def v0(s, u):
    g, g1, g2 = gamma(s), dgamma(s), d2gamma(s)
    q = 1 + u * g
    return -g**2 / (4 * q**2) + u * g2 / (2 * q**3) - mp.mpf(5) / 4 * u**2 * g1**2 / q**4


def alpha_real(t):
    # real argument: integrate from -inf (or subtract the tail to +inf)
    if t <= 0:
        return mp.quad(gamma, [-mp.inf, t])
    return ALPHA0 - mp.quad(gamma, [t, mp.inf])


A_MINUS = mp.quad(lambda t: mp.cos(ETA) - mp.cos(ETA - alpha_real(t)), [-mp.inf, -10, 0])
A_PLUS = mp.quad(lambda t: mp.cos(ETA - alpha_real(t)) - mp.cos(ETA - ALPHA0), [0, 10, mp.inf])


def show(name, v):
    if isinstance(v, mp.mpc):
        print(f"{name} = ({mp.nstr(v.real, 17)}, {mp.nstr(v.imag, 17)})")
    else:
        print(f"{name} = {mp.nstr(v, 17)}")


show("gamma(1)", gamma(1))
show("dgamma(1)", dgamma(1))
show("d2gamma(1)", d2gamma(1))
z = mp.mpc(2, mp.mpf("0.5"))
show("gamma(2+0.5i)", gamma(z))
show("dgamma(2+0.5i)", dgamma(z))
show("d2gamma(2+0.5i)", d2gamma(z))
show("alpha0", ALPHA0)
show("alpha(1)", alpha(1))
show("alpha(-3)", alpha(-3))
x, y = embed(1, 0)
show("embed(1,0).x", x)
show("embed(1,0).y", y)
x, y = embed(-2, 1)
show("embed(-2,1).x", x)
show("embed(-2,1).y", y)
show("A_minus", A_MINUS)
show("A_plus", A_PLUS)
show("W(F=0.02,s=2,u=0.5)", stark(mp.mpf("0.02"), 2, mp.mpf("0.5")))
show("W(F=0.02,s=-3,u=0.25)", stark(mp.mpf("0.02"), -3, mp.mpf("0.25")))
show("V0(0.5,0.3)", v0(mp.mpf("0.5"), mp.mpf("0.3")))
show("W(F=0.02,z=-12-3i,u=0.5)", stark(mp.mpf("0.02"), mp.mpc(-12, -3), mp.mpf("0.5")))
show("W(F=0.02,z=15+5i,u=0.75)", stark(mp.mpf("0.02"), mp.mpc(15, 5), mp.mpf("0.75")))
show("alpha(15+5i)", alpha(mp.mpc(15, 5)))
