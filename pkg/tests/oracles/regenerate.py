"""Recompute the frozen reference values used by the test-suite.

Independent of the package: 40-digit mpmath quadrature of the defining
integrals. Run ``python3 tests/oracles/regenerate.py`` and compare the output
with the constants in ``test_measures.py``, ``test_properties.py`` and
``test_acceptance.py``.
"""

import mpmath as mp

mp.mp.dps = 40


def past(f, F, t, lo=0):
    mass = F(t)
    i1 = mp.quad(lambda x: f(x) * mp.log(f(x) / mass), [lo, t]) / mass
    i2 = mp.quad(lambda x: f(x) * mp.log(f(x) / mass) ** 2, [lo, t]) / mass
    return -i1, i2 - i1 ** 2


def inactivity(F, t):
    mass = F(t)
    m = mp.quad(F, [0, t]) / mass
    return m, 2 * mp.quad(lambda x: (t - x) * F(x), [0, t]) / mass - m ** 2


def exponential(lam):
    return (lambda x: lam * mp.e ** (-lam * x)), (lambda x: 1 - mp.e ** (-lam * x))


def weibull(k):
    return (lambda x: k * x ** (k - 1) * mp.e ** (-x ** k)), (lambda x: 1 - mp.e ** (-x ** k))


def show(label, *values):
    print(label, *(mp.nstr(v, 17) for v in values))


def main():
    for lam, t in [(1, 1), (2, 0.7), (0.5, 2), (1, 0.5), (2, 2)]:
        f, F = exponential(mp.mpf(lam))
        show(f"exponential lambda={lam} t={t}", *past(f, F, mp.mpf(t)), *inactivity(F, mp.mpf(t)))
    for k, t in [(2, 1), (2, 0.5), (0.5, 1)]:
        f, F = weibull(mp.mpf(k))
        show(f"weibull k={k} t={t}", *past(f, F, mp.mpf(t)), *inactivity(F, mp.mpf(t)))
    for k in [2, 0.5]:
        f, _ = weibull(mp.mpf(k))
        h = -mp.quad(lambda x: f(x) * mp.log(f(x)), [0, 1, mp.inf])
        v = mp.quad(lambda x: f(x) * mp.log(f(x)) ** 2, [0, 1, mp.inf]) - h ** 2
        show(f"weibull k={k} whole", h, v)
    f0, F0 = exponential(1)
    for a, t in [(3, 2), (2, 1), (0.5, 1)]:
        a = mp.mpf(a)
        show(f"prhr exponential a={a} t={t}",
             *past(lambda x: a * F0(x) ** (a - 1) * f0(x), lambda x: F0(x) ** a, mp.mpf(t)))
    f, F = weibull(mp.mpf(2))
    tail = 1 - F(1)
    h = -mp.quad(lambda x: f(x) / tail * mp.log(f(x) / tail), [1, mp.inf])
    v = mp.quad(lambda x: f(x) / tail * mp.log(f(x) / tail) ** 2, [1, mp.inf]) - h ** 2
    show("weibull k=2 residual t=1", h, v)
    show("discrete [1/4, 3/4] varentropy", mp.mpf(3) / 16 * mp.log(3) ** 2)


if __name__ == "__main__":
    main()
