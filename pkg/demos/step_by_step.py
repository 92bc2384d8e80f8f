"""Walk the update rule by hand.

Feeds a handful of chosen points into a two-category system on [0, 1] and
prints the full ledger after each step: which category won, where its mean
moved, and how every weight decayed.  Ends with the zero-decay special
case, where the update is an exact running mean.
"""

import math

import numpy as np

from exdyn import Domain, SystemState, step, total_weight

LN2 = math.log(2.0)


def show(label, state):
    means = ", ".join(f"{m:.4f}" for m in state.means[:, 0])
    weights = ", ".join(f"{w:.4f}" for w in state.weights)
    print(f"  {label}: means ({means})  weights ({weights})"
          f"  total {total_weight(state):.4f}")


def main():
    domain = Domain(np.array([0.0]), np.array([1.0]))
    state = SystemState(np.array([[0.0], [1.0]]), np.array([1.0, 1.0]), 0)

    print("decay rate ln 2: every step halves the old weights, then the")
    print("winner absorbs the new point with weight 1")
    show("start", state)
    for z in (1.0, 0.9, 0.1, 0.52):
        state = step(state, z, LN2, domain)
        show(f"z={z:<4}", state)
    print()

    # the same feed without forgetting: each mean is the plain average of
    # the points its category has won, initial mean included
    state = SystemState(np.array([[0.0], [1.0]]), np.array([1.0, 1.0]), 0)
    print("decay rate 0: the update is an exact running mean")
    show("start", state)
    for z in (1.0, 0.9, 0.1, 0.52):
        state = step(state, z, 0.0, domain)
        show(f"z={z:<4}", state)
    print("  category 2 saw 1.0, 0.9, 0.52 on top of its start at 1.0:")
    print(f"  (1.0 + 1.0 + 0.9 + 0.52) / 4 = {(1.0 + 1.0 + 0.9 + 0.52) / 4}")

    print()
    print("ties go to the lower category: z = 0.5 sits exactly between")
    state = SystemState(np.array([[0.25], [0.75]]), np.array([1.0, 1.0]), 0)
    after = step(state, 0.5, LN2, domain)
    print(f"  category 1 moved {state.means[0, 0]:.3f} -> {after.means[0, 0]:.3f},"
          f" category 2 stayed at {after.means[1, 0]:.3f}")


if __name__ == "__main__":
    main()
