"""How the deleting-machine signal depends on its free parameters.

Samples random blank states, initial ancillas, final-ancilla rules and
off-diagonal images, and reports the signal D(rho(0), rho(pi/2)) for each
family. Basis-independent off-diagonal images show up as zero-signal
configurations; the final-ancilla rule never changes Bob's state.
"""
import argparse

import numpy as np

from qdelete.machines import ConstantAncilla, FixedOffdiag, deleting_machine
from qdelete.protocol import signalling_report
from qdelete.resources import QubitBasis

ZERO, HALF_PI = QubitBasis(0.0), QubitBasis(np.pi / 2)


def rand_state(rng, n):
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return v / np.linalg.norm(v)


def signal(machine):
    return signalling_report(machine, ZERO, HALF_PI).distance


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)

    families = {
        "passthrough": lambda: deleting_machine(rand_state(rng, 1), rand_state(rng, 1), "passthrough"),
        "entangling": lambda: deleting_machine(rand_state(rng, 1), rand_state(rng, 1), "entangling"),
        "inline (basis-independent)": lambda: deleting_machine(
            rand_state(rng, 1), rand_state(rng, 1), FixedOffdiag(rand_state(rng, 3), rand_state(rng, 3))),
    }
    print(f"{'off-diagonal rule':<28}{'min D':>10}{'median D':>10}{'max D':>10}{'zero-signal':>13}")
    for name, make in families.items():
        d = np.array([signal(make()) for _ in range(args.samples)])
        print(f"{name:<28}{d.min():>10.4f}{np.median(d):>10.4f}{d.max():>10.4f}{int((d < 1e-10).sum()):>13}")

    spread = 0.0
    for _ in range(args.samples // 4):
        sigma, anc = rand_state(rng, 1), rand_state(rng, 1)
        base = signal(deleting_machine(sigma, anc))
        alt = signal(deleting_machine(sigma, anc, ancilla_rule=ConstantAncilla(rand_state(rng, 1), rand_state(rng, 1))))
        spread = max(spread, abs(base - alt))
    print(f"\nlargest change in D from swapping the final-ancilla rule: {spread:.2e}")


if __name__ == "__main__":
    main()
