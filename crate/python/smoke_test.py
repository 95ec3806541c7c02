"""Smoke test for the quasilin_py extension module."""

import math

import quasilin_py as q


def main():
    # g(v) = v below the threshold: a bounded minimal solution
    lin = q.Problem(lam=1.0, n=401)
    lam1 = lin.first_eigenvalue()
    assert abs(lam1 - math.pi**2) < 1e-3 * math.pi**2, lam1
    low = lin.with_lambda(0.95 * lam1).solve()
    high = lin.with_lambda(1.05 * lam1).solve()
    assert low.converged and high.status == "diverged", (low, high)

    # Bratu at λ = 1: both solutions and the critical parameter
    bratu = q.Problem(lam=1.0, pair="ex5", n=401)
    minimal = bratu.solve()
    assert abs(minimal.sup_norm - 0.140539) < 1e-4, minimal
    second = bratu.mountain_pass(minimal)
    assert abs(second.sup_norm - 4.091467) < 1e-3, second
    lo, hi = bratu.critical_lambda()
    assert lo <= 3.51383 <= hi + 1e-3, (lo, hi)
    u = minimal.companion(bratu)
    assert len(u) == len(minimal.nodes)

    # Ψ and H are inverse
    for x in (0.1, 0.5, 0.9):
        assert abs(q.h("ex5", q.psi("ex5", x)) - x) < 1e-10

    rep = q.exponents(p=2.0, n=3, m=2.0)
    assert rep["case"] == "Linfinity", rep

    try:
        q.Problem(lam=-1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative lambda accepted")

    print(f"smoke test passed: lambda1={lam1:.6f} bracket=[{lo:.6f}, {hi:.6f}] second sup={second.sup_norm:.6f}")


if __name__ == "__main__":
    main()
