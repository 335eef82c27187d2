"""Run the claims audit on a few normal and non-normal matrices.

Prints one table row per (matrix, claim). Non-normal inputs are expected to
fail the hermitian-idempotent and multiplicativity claims, normal ones to
pass all five.

    python scripts/claims_audit_demo.py
"""
import argparse

import numpy as np

from ncg.speccalc import audit_claims


def examples(rng):
    u, _ = np.linalg.qr(rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    yield "upper 2x2", np.array([[1, 1], [0, 2]], dtype=complex)
    yield "jordan 3x3", np.array([[2, 1, 0], [0, 2, 1], [0, 0, 2]], dtype=complex)
    yield "diag", np.diag([1.0, -1.0, 2j])
    yield "unitary 4x4", u
    yield "normal repeated", u @ np.diag([1, 1, 1j, 3]) @ u.conj().T
    yield "shear", np.array([[1, 10], [0, 1.001]], dtype=complex)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--angles", type=int, default=256)
    args = p.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    print(f"{'matrix':<18}{'claim':<6}{'pass':<7}{'expected':<10}residual")
    for name, a in examples(rng):
        for c in audit_claims(a, angle_count=args.angles, seed=args.seed).claims:
            res = "-" if c.residual is None else f"{c.residual:.2e}"
            print(f"{name:<18}{c.id:<6}{str(c.passed):<7}{str(c.expected):<10}{res}")


if __name__ == "__main__":
    main()
