"""Writes frozen reference cases for the unit tests.

min-discrepancy values come from a linear program over all couplings, and
Prokhorov values from the subset definition checked at every candidate eps.

    python3 tests/oracles/gen_cases.py > tests/oracles/cases.inc
"""

import itertools
import math
import random

import numpy as np
from scipy.optimize import linprog


def min_discrepancy_lp(mu, nu, allowed):
    n, m = len(mu), len(nu)
    pairs = [(i, j) for i in range(n) for j in range(m)]
    k = len(pairs)
    # variables: alpha (k), row slack (n), column slack (m)
    cost = [0.0 if p in allowed else 1.0 for p in pairs] + [1.0] * (n + m)
    a_ub, b_ub = [], []
    for i in range(n):
        row = [1.0 if p[0] == i else 0.0 for p in pairs]
        for sign in (1.0, -1.0):
            slack = [0.0] * (n + m)
            slack[i] = -1.0
            a_ub.append([sign * v for v in row] + slack)
            b_ub.append(sign * mu[i])
    for j in range(m):
        col = [1.0 if p[1] == j else 0.0 for p in pairs]
        for sign in (1.0, -1.0):
            slack = [0.0] * (n + m)
            slack[n + j] = -1.0
            a_ub.append([sign * v for v in col] + slack)
            b_ub.append(sign * nu[j])
    res = linprog(cost, A_ub=a_ub, b_ub=b_ub, bounds=[(0, None)] * (k + n + m), method="highs")
    assert res.status == 0
    return res.fun


def prokhorov_definition(d, mu, nu):
    support_mu = [i for i, w in enumerate(mu) if w > 0]
    support_nu = [i for i, w in enumerate(nu) if w > 0]

    def holds(eps, a_meas, b_meas, support):
        for r in range(1, len(support) + 1):
            for subset in itertools.combinations(support, r):
                mass = sum(a_meas[i] for i in subset)
                near = sum(w for j, w in enumerate(b_meas) if any(d[i][j] <= eps for i in subset))
                if mass > near + eps + 1e-12:
                    return False
        return True

    candidates = {0.0, max(sum(mu), sum(nu))}
    candidates.update(d[i][j] for i in range(len(d)) for j in range(len(d)))
    radii = sorted(candidates)
    for a_meas, b_meas, support in ((mu, nu, support_mu), (nu, mu, support_nu)):
        for delta in radii:
            for r in range(1, len(support) + 1):
                for subset in itertools.combinations(support, r):
                    mass = sum(a_meas[i] for i in subset)
                    near = sum(w for j, w in enumerate(b_meas) if any(d[i][j] <= delta for i in subset))
                    if mass - near > 0:
                        candidates.add(mass - near)
    best = math.inf
    for eps in sorted(candidates):
        if eps >= 0 and holds(eps, mu, nu, support_mu) and holds(eps, nu, mu, support_nu):
            best = eps
            break
    return best


def fmt(x):
    return repr(float(x))


def main():
    rng = random.Random(7)
    print("// Generated by tests/oracles/gen_cases.py; do not edit.")
    print("inline const std::vector<MinDiscrepancyCase> kMinDiscrepancyCases = {")
    for _ in range(40):
        n, m = rng.randint(1, 4), rng.randint(1, 4)
        mu = [rng.choice([0.0, rng.uniform(0.05, 1.0)]) for _ in range(n)]
        nu = [rng.choice([0.0, rng.uniform(0.05, 1.0)]) for _ in range(m)]
        allowed = {(i, j) for i in range(n) for j in range(m) if rng.random() < 0.4}
        value = min_discrepancy_lp(mu, nu, allowed)
        pairs = ", ".join("{%d, %d}" % p for p in sorted(allowed))
        print("    {{%s}, {%s}, {%s}, %s}," % (", ".join(map(fmt, mu)), ", ".join(map(fmt, nu)), pairs, fmt(value)))
    print("};")
    print()
    print("inline const std::vector<ProkhorovCase> kProkhorovCases = {")
    for _ in range(40):
        n = rng.randint(1, 6)
        pts = np.array([[rng.random(), rng.random()] for _ in range(n)])
        d = [[float(np.hypot(*(pts[i] - pts[j]))) for j in range(n)] for i in range(n)]
        mu = [rng.choice([0.0, rng.uniform(0.05, 0.6)]) for _ in range(n)]
        nu = [rng.choice([0.0, rng.uniform(0.05, 0.6)]) for _ in range(n)]
        value = prokhorov_definition(d, mu, nu)
        rows = ", ".join("{%s}" % ", ".join(map(fmt, row)) for row in d)
        print("    {{%s}, {%s}, {%s}, %s}," % (rows, ", ".join(map(fmt, mu)), ", ".join(map(fmt, nu)), fmt(value)))
    print("};")


if __name__ == "__main__":
    main()
