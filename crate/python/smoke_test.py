"""Smoke test for the tdcount extension module.

Build and install it first, e.g. `pip install ./crates/py`, then run
`python python/smoke_test.py`.
"""

import itertools
import random
from fractions import Fraction

import tdcount


def brute_force(num_vars, clauses, weights=None):
    total = Fraction(0)
    for bits in itertools.product([False, True], repeat=num_vars):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in clauses):
            w = Fraction(1)
            if weights is not None:
                for v, b in enumerate(bits, start=1):
                    w *= weights[v if b else -v]
            total += w
    return total


def dimacs(num_vars, clauses, weights=None):
    lines = [f"p cnf {num_vars} {len(clauses)}"]
    if weights is not None:
        for lit, w in sorted(weights.items()):
            lines.append(f"c p weight {lit} {w} 0")
    lines += [" ".join(map(str, c)) + " 0" for c in clauses]
    return "\n".join(lines) + "\n"


def random_formula(rng):
    n = rng.randint(1, 10)
    clauses = []
    for _ in range(rng.randint(0, 2 * n)):
        vs = rng.sample(range(1, n + 1), rng.randint(1, min(3, n)))
        clauses.append([v if rng.random() < 0.5 else -v for v in vs])
    return n, clauses


def main():
    r = tdcount.count("p cnf 2 1\n1 2 0\n")
    assert r["type"] == "mc" and r["status"] == "SATISFIABLE" and r["count"] == 3, r
    assert r["block"].startswith("c s type mc\ns SATISFIABLE\n"), r["block"]

    r = tdcount.count("p cnf 1 2\n1 0\n-1 0\n")
    assert r["status"] == "UNSATISFIABLE" and r["count"] == 0, r

    r = tdcount.count("p cnf 300 0\n")
    assert r["count"] == 2**300, r

    rng = random.Random(7)
    for _ in range(100):
        n, clauses = random_formula(rng)
        expected = brute_force(n, clauses)
        for preprocess in (True, False):
            got = tdcount.count(dimacs(n, clauses), preprocess=preprocess)
            assert got["count"] == expected, (n, clauses, got, expected)

    for _ in range(50):
        n, clauses = random_formula(rng)
        weights = {}
        for v in range(1, n + 1):
            p = Fraction(rng.randint(1, 9), 10)
            weights[v], weights[-v] = p, 1 - p
        expected = brute_force(n, clauses, weights)
        got = tdcount.count(dimacs(n, clauses, weights), mode="wmc")
        assert got["type"] == "wmc", got
        assert abs(Fraction(got["value"]) - expected) <= Fraction(1, 10**12) * max(expected, 1), (got, expected)

    try:
        tdcount.count("p cnf 1 1\n2 0\n")
    except ValueError:
        pass
    else:
        raise AssertionError("malformed input accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
