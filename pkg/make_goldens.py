#!/usr/bin/env python3
"""
Regenerate the golden files under data/golden

Every value is derived symbolically with sympy, independently of the
engine under src/: Christoffel symbols by differentiating a closed-form
metric, Lie-group data from the Koszul formula over exact rationals.
The engine itself never writes goldens.

Usage:
    python make_goldens.py
"""

import json
from pathlib import Path

import sympy as sp


GOLDEN_DIR = Path(__file__).parent / "data" / "golden"
X = sp.symbols("x1 x2 x3")
ORIGIN = {x: 0 for x in X}


def _text(value) -> str:
    return str(sp.nsimplify(sp.simplify(value)))


def _nested(obj):
    if isinstance(obj, (list, tuple)):
        return [_nested(v) for v in obj]
    return _text(obj)


def write_golden(name: str, data: dict) -> None:
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    path = GOLDEN_DIR / f"{name}.json"
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {path}")


# ---------------------------------------------------------------------------
# Metric jets
# ---------------------------------------------------------------------------

def circulant_metric(A, B) -> sp.Matrix:
    return sp.Matrix(3, 3, lambda i, j: A if i == j else B)


def christoffel_at_origin(g: sp.Matrix):
    """gamma[k][i][j] = Gamma^k_ij at the origin"""
    g_inv = g.inv()
    gamma = [[[0] * 3 for _ in range(3)] for _ in range(3)]
    for k in range(3):
        for i in range(3):
            for j in range(3):
                total = 0
                for l in range(3):
                    total += g_inv[k, l] * (sp.diff(g[j, l], X[i]) + sp.diff(g[i, l], X[j]) - sp.diff(g[i, j], X[l]))
                gamma[k][i][j] = sp.simplify(total / 2).subs(ORIGIN)
    return gamma


def golden_christoffel() -> None:
    g = circulant_metric(2 + X[0], sp.Integer(1))
    write_golden("christoffel_linear_a", {
        "metric": "circulant(2 + x1, 1)",
        "layout": "gamma[k][i][j] = Gamma^k_ij at the origin, 0-based",
        "gamma": _nested(christoffel_at_origin(g)),
    })


# ---------------------------------------------------------------------------
# Lie groups
# ---------------------------------------------------------------------------

def structure_constants(brackets: dict):
    """C[i][j][k] = c^k_ij from {(i, j): [c1, c2, c3]} with 1-based i < j"""
    C = [[[sp.Integer(0)] * 3 for _ in range(3)] for _ in range(3)]
    for (i, j), values in brackets.items():
        for k, value in enumerate(values):
            C[i - 1][j - 1][k] = sp.Rational(value)
            C[j - 1][i - 1][k] = -sp.Rational(value)
    return C


def family1_brackets(l1, l2, l3) -> dict:
    return {(1, 2): [l1, l2, 0], (2, 3): [0, l3, -l1], (1, 3): [l3, 0, l2]}


def family2_brackets(l1, l2) -> dict:
    v = [l1, l2, -(l1 + l2)]
    return {(1, 2): v, (2, 3): v, (1, 3): [-c for c in v]}


def koszul(C, m: sp.Matrix):
    """N[i][j] = coefficients of nabla_{x_i} x_j"""
    m_inv = m.inv()
    N = [[None] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            lowered = sp.Matrix([
                sum(C[i][j][a] * m[a, k] + C[k][i][a] * m[a, j] + C[k][j][a] * m[a, i] for a in range(3)) / 2
                for k in range(3)
            ])
            N[i][j] = list(m_inv * lowered)
    return N


def apply_q(v):
    """Q x_a = x_{a+1}"""
    return [v[2], v[0], v[1]]


def nabla_q(N):
    """table[i][j] = (nabla_{x_i} Q) x_j"""
    return [[[a - b for a, b in zip(N[i][(j + 1) % 3], apply_q(N[i][j]))] for j in range(3)] for i in range(3)]


def riemann(C, N, m: sp.Matrix):
    """R[i][j][k][l] = m(R(x_i, x_j) x_k, x_l)"""
    R = [[[[0] * 3 for _ in range(3)] for _ in range(3)] for _ in range(3)]
    for i in range(3):
        for j in range(3):
            for k in range(3):
                vector = [0, 0, 0]
                for n in range(3):
                    vector[n] = sum(
                        N[j][k][a] * N[i][a][n] - N[i][k][a] * N[j][a][n] - C[i][j][a] * N[a][k][n]
                        for a in range(3)
                    )
                for l in range(3):
                    R[i][j][k][l] = sp.nsimplify(sum(vector[n] * m[n, l] for n in range(3)))
    return R


def ricci(R, m: sp.Matrix):
    m_inv = m.inv()
    return [[sum(m_inv[i, j] * R[i][a][b][j] for i in range(3) for j in range(3)) for b in range(3)] for a in range(3)]


def lie_spot(brackets: dict, g: sp.Matrix, gt: sp.Matrix) -> dict:
    C = structure_constants(brackets)
    N = koszul(C, gt)
    R = riemann(C, N, gt)
    rho = ricci(R, gt)
    tau = sum(gt.inv()[a, b] * rho[a][b] for a in range(3) for b in range(3))
    tau_star = sum(g.inv()[a, b] * rho[a][b] for a in range(3) for b in range(3))
    x1, x2 = sp.Matrix([1, 0, 0]), sp.Matrix([0, 1, 0])
    gram = (x1.T * gt * x1)[0] * (x2.T * gt * x2)[0] - (x1.T * gt * x2)[0] ** 2
    return {
        "riemann_1212": _text(R[0][1][0][1]),
        "riemann_1313": _text(R[0][2][0][2]),
        "riemann_2323": _text(R[1][2][1][2]),
        "riemann_1213": _text(R[0][1][0][2]),
        "riemann_1323": _text(R[0][2][1][2]),
        "riemann_1223": _text(R[0][1][1][2]),
        "ricci_11": _text(rho[0][0]),
        "ricci_12": _text(rho[0][1]),
        "tau": _text(tau),
        "tau_star": _text(tau_star),
        "sectional_12": _text(R[0][1][0][1] / gram),
        "nabla_q": _nested(nabla_q(N)),
    }


def golden_lie() -> None:
    g = sp.eye(3)
    gt = sp.Matrix(3, 3, lambda i, j: 0 if i == j else 1)
    write_golden("lie_family1_100", {
        "family": 1,
        "lambda": ["1", "0", "0"],
        "layout": "nabla_q[i][j] = (nabla_{x_i+1} Q) x_{j+1} for the associated metric",
        **lie_spot(family1_brackets(1, 0, 0), g, gt),
    })
    write_golden("lie_family2_10", {
        "family": 2,
        "lambda": ["1", "0"],
        "layout": "nabla_q[i][j] = (nabla_{x_i+1} Q) x_{j+1} for the associated metric",
        **lie_spot(family2_brackets(1, 0), g, gt),
    })


if __name__ == "__main__":
    golden_christoffel()
    golden_lie()
