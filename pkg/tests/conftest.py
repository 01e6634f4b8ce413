import hypothesis
import numpy as np
import pytest

from polyinv.tensor_poly import HomogeneousPart, Polynomial

hypothesis.settings.register_profile("default", max_examples=40, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=5, deadline=None)
hypothesis.settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


def abs_poly(p):
    """Same polynomial with every coefficient replaced by its absolute value.

    A contraction evaluated on it bounds the sum of absolute terms of the same
    contraction on ``p``, which is the scale rounding errors are relative to.
    """
    return Polynomial(p.n, tuple(HomogeneousPart(p.n, q.degree, np.abs(q.coeffs)) for q in p.parts))


def assert_rel(a, b, rtol, scale=0.0):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    ref = np.maximum(np.maximum(np.abs(a), np.abs(b)), scale)
    bad = np.abs(a - b) > rtol * ref
    assert not np.any(bad), f"max rel err {np.max(np.abs(a - b) / np.where(ref > 0, ref, 1)):.3e} > {rtol}"


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
