"""Built-in example presentations.

Every fixture is stored as the same JSON structure the CLI reads from disk,
so ``curvlab examples show NAME > spec.json`` round-trips through the file
interface.  The list:

  free_d1..free_d4        free modules of rank one, no generators
  maximal_ideal_d2, _d3   quotient by (z_1,...,z_d): the constants module
  z1_d2                   principal ideal (z_1) in two variables
  even_d2                 ideal (z_3^2 - z_1 z_2) in three variables; the
                          quotient is the even subspace of H^2(C^2) with
                          dim H_n = 2n+1
  veronese                the six 2x2 minors of the symmetric 3x3 catalecticant
                          in rationally rescaled coordinates (d = 6); the full
                          vanishing ideal of the quadratic Veronese surface,
                          with dim H_n = q_2(2n)
  graph_d2_N1, _N2        graph of multiplication by z_1^N inside H^2 + H^2
                          with shifts [0, -N]: pure rank-two graded modules
"""

from __future__ import annotations

import json


def _term(exponents, coeff="1"):
    return {"exponents": list(exponents), "coeff": str(coeff)}


def _free(d: int) -> dict:
    return {"d": d, "rank": 1, "shifts": [0], "generators": []}


def _maximal(d: int) -> dict:
    gens = []
    for k in range(d):
        e = [0] * d
        e[k] = 1
        gens.append({"components": [[_term(e)]]})
    return {"d": d, "rank": 1, "shifts": [0], "generators": gens}


def _z1_d2() -> dict:
    return {
        "d": 2,
        "rank": 1,
        "shifts": [0],
        "generators": [{"components": [[_term([1, 0])]]}],
    }


def _even_d2() -> dict:
    # z3^2 - z1*z2 cuts out {(x^2, y^2, xy)}; quotient = even subspace of H^2(C^2)
    return {
        "d": 3,
        "rank": 1,
        "shifts": [0],
        "generators": [
            {"components": [[_term([0, 0, 2]), _term([1, 1, 0], "-1")]]}
        ],
    }


def _veronese() -> dict:
    # 2x2 minors of [[w1, w4, w5], [w4, w2, w6], [w5, w6, w3]]
    minors = [
        [_term([1, 1, 0, 0, 0, 0]), _term([0, 0, 0, 2, 0, 0], "-1")],  # w1 w2 - w4^2
        [_term([1, 0, 1, 0, 0, 0]), _term([0, 0, 0, 0, 2, 0], "-1")],  # w1 w3 - w5^2
        [_term([0, 1, 1, 0, 0, 0]), _term([0, 0, 0, 0, 0, 2], "-1")],  # w2 w3 - w6^2
        [_term([1, 0, 0, 0, 0, 1]), _term([0, 0, 0, 1, 1, 0], "-1")],  # w1 w6 - w4 w5
        [_term([0, 0, 0, 1, 0, 1]), _term([0, 1, 0, 0, 1, 0], "-1")],  # w4 w6 - w2 w5
        [_term([0, 0, 1, 1, 0, 0]), _term([0, 0, 0, 0, 1, 1], "-1")],  # w3 w4 - w5 w6
    ]
    return {
        "d": 6,
        "rank": 1,
        "shifts": [0],
        "generators": [{"components": [m]} for m in minors],
    }


def _graph(d: int, power: int) -> dict:
    e = [0] * d
    e[0] = power
    return {
        "d": d,
        "rank": 2,
        "shifts": [0, -power],
        "generators": [{"components": [[_term([0] * d)], [_term(e)]]}],
    }


FIXTURES: dict[str, dict] = {
    "free_d1": _free(1),
    "free_d2": _free(2),
    "free_d3": _free(3),
    "free_d4": _free(4),
    "maximal_ideal_d2": _maximal(2),
    "maximal_ideal_d3": _maximal(3),
    "z1_d2": _z1_d2(),
    "even_d2": _even_d2(),
    "veronese": _veronese(),
    "graph_d2_N1": _graph(2, 1),
    "graph_d2_N2": _graph(2, 2),
}


def names() -> list[str]:
    return list(FIXTURES)


def spec_dict(name: str) -> dict:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURES)}")
    return json.loads(json.dumps(FIXTURES[name]))  # defensive copy


def spec_json(name: str) -> str:
    return json.dumps(spec_dict(name), indent=2, sort_keys=True)
