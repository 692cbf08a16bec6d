"""Shared fixtures and independent oracles for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from liouville import LiouvilleParams


@pytest.fixture
def params_g1():
    return LiouvilleParams(gamma=1.0, mu=1.0, mu_boundary=1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def brute_partitions(n):
    """Exhaustive partition enumeration (independent of the library)."""
    if n == 0:
        return [()]
    out = set()

    def rec(rest, cap, acc):
        if rest == 0:
            out.add(tuple(acc))
            return
        for k in range(min(cap, rest), 0, -1):
            rec(rest - k, k, acc + [k])

    rec(n, n, [])
    return sorted(out, reverse=True)


def make_vev(delta, c):
    """Brute-force vacuum expectation of arbitrary Virasoro mode words.

    <v| L_{n1} L_{n2} ... |v> evaluated by literally commuting the leftmost
    positive mode one slot to the right at a time with
    [L_a, L_b] = (a-b) L_{a+b} + (c/12) a (a^2-1) delta_{a+b,0}.
    Exact in the scalar type of delta and c.
    """
    memo = {}

    def vev(word):
        if word in memo:
            return memo[word]
        if not word:
            return delta * 0 + 1
        if word[0] < 0 or word[-1] > 0:
            res = delta * 0
        elif all(w == 0 for w in word):
            res = delta ** len(word)
        else:
            # commute the leftmost positive (or L_0) across the boundary to
            # the non-positives on its right; this strictly reduces the
            # number of (positive, non-positive) inversions
            res = None
            for i in range(len(word) - 1):
                a, b = word[i], word[i + 1]
                if (a > 0 and b <= 0) or (a == 0 and b < 0):
                    pre, post = word[:i], word[i + 2:]
                    res = vev(pre + (b, a) + post) \
                        + (a - b) * vev(pre + (a + b,) + post)
                    if a + b == 0 and a != 0:
                        res = res + c * a * (a * a - 1) / 12 * vev(pre + post)
                    break
            if res is None:  # e.g. zeros on the outside: L_0 acts as delta
                if word[0] == 0:
                    res = delta * vev(word[1:])
                elif word[-1] == 0:
                    res = delta * vev(word[:-1])
                else:
                    res = delta * 0
        memo[word] = res
        return res

    return vev


def oracle_gram(n, delta, c):
    """Level-n Shapovalov matrix via the brute-force commutator oracle."""
    parts = brute_partitions(n)
    vev = make_vev(delta, c)
    mat = []
    for bra in parts:
        raisings = tuple(reversed(bra))
        row = [vev(raisings + tuple(-k for k in ket)) for ket in parts]
        mat.append(row)
    return parts, mat
