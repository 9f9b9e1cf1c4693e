#!/usr/bin/env python3
"""Generate the embedded 1D quadrature tables in core/src/quadrature_tables.inc.

Two families are emitted for n = 1..12 points, both on [-1, 1]:

  * Gauss-Legendre, weight function 1, exact for polynomials of degree 2n-1.
  * Gauss-Jacobi with weight (1-x), exact for p with integral(p(x)(1-x)) of
    degree 2n-1.  Combined with a Legendre rule through the Duffy map this
    yields interior-point product rules on the reference triangle.

Nodes and weights come from the Golub-Welsch eigenvalue method applied to the
symmetric Jacobi matrix of the weight's three-term recurrence, evaluated at
50-digit precision and printed with 17 significant digits (exact double round
trip).  Every rule is checked against closed-form monomial moments before it
is emitted.

Run:  python3 scripts/gen_quadrature_tables.py > core/src/quadrature_tables.inc
"""

import mpmath as mp

mp.mp.dps = 50

NMAX = 12


def golub_welsch(n, alpha, beta):
    """Nodes/weights from recurrence coefficients alpha_k, beta_k (monic form).

    J = tridiag(sqrt(beta_k); alpha_k; sqrt(beta_k)), eigenvalues are the
    nodes, weights are beta_0 * (first eigenvector component)^2.
    """
    J = mp.zeros(n)
    for k in range(n):
        J[k, k] = alpha[k]
    for k in range(1, n):
        J[k, k - 1] = J[k - 1, k] = mp.sqrt(beta[k])
    vals, vecs = mp.eigsy(J)
    rule = []
    for i in range(n):
        x = vals[i]
        w = beta[0] * vecs[0, i] ** 2
        rule.append((x, w))
    rule.sort(key=lambda t: t[0])
    return rule


def legendre_rule(n):
    alpha = [mp.mpf(0)] * n
    beta = [mp.mpf(2)] + [mp.mpf(k * k) / (4 * k * k - 1) for k in range(1, n)]
    return golub_welsch(n, alpha, beta)


def jacobi10_rule(n):
    # weight (1-x)^1 (1+x)^0: alpha_k = -1/((2k+1)(2k+3)), beta_0 = 2,
    # beta_k = k(k+1)/(2k+1)^2
    alpha = [mp.mpf(-1) / ((2 * k + 1) * (2 * k + 3)) for k in range(n)]
    beta = [mp.mpf(2)] + [
        mp.mpf(k * (k + 1)) / (2 * k + 1) ** 2 for k in range(1, n)
    ]
    return golub_welsch(n, alpha, beta)


def moment_legendre(m):
    # integral over [-1,1] of x^m
    return mp.mpf(2) / (m + 1) if m % 2 == 0 else mp.mpf(0)


def moment_jacobi10(m):
    # integral over [-1,1] of x^m (1-x)
    return moment_legendre(m) - moment_legendre(m + 1)


def verify(rule, n, moment):
    for m in range(0, 2 * n):
        approx = mp.fsum(w * x**m for x, w in rule)
        assert abs(approx - moment(m)) < mp.mpf(10) ** -40, (n, m)


def emit(name, rules):
    print(f"static const double {name}_nodes[] = {{")
    for n, rule in enumerate(rules, start=1):
        row = ", ".join(mp.nstr(x, 17, strip_zeros=False) for x, _ in rule)
        print(f"    {row},  // n={n}")
    print("};")
    print(f"static const double {name}_weights[] = {{")
    for n, rule in enumerate(rules, start=1):
        row = ", ".join(mp.nstr(w, 17, strip_zeros=False) for _, w in rule)
        print(f"    {row},  // n={n}")
    print("};")


def main():
    gl = []
    gj = []
    for n in range(1, NMAX + 1):
        r = legendre_rule(n)
        verify(r, n, moment_legendre)
        gl.append(r)
        r = jacobi10_rule(n)
        verify(r, n, moment_jacobi10)
        gj.append(r)
    print("// Generated by scripts/gen_quadrature_tables.py. Do not edit by hand.")
    print("// Rules for n = 1..%d are stored back to back; rule n starts at" % NMAX)
    print("// offset n*(n-1)/2 and has n entries.")
    emit("kGaussLegendre", gl)
    emit("kGaussJacobi10", gj)


if __name__ == "__main__":
    main()
