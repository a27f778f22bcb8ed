"""Why shrink-by-multiplying and grow-by-adding is the right pairing.

A step size under sign-driven adaptation is a random walk: each epoch a
fair coin either shrinks it or grows it.  Of the four ways to combine a
multiplicative or subtractive shrink with an additive or multiplicative
growth, only multiply-then-add keeps the step size positive with a
stationary distribution; the three others collapse to zero or run off
below it.
"""

import argparse

import numpy as np

from activelr import (HIGH_ADD, HIGH_MULTIPLY, LOW_MULTIPLY, LOW_SUBTRACT,
                      simulate_lr_walk)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--epochs", type=int, default=10_000)
    parser.add_argument("--seeds", type=int, default=30)
    args = parser.parse_args()

    pairs = [(LOW_MULTIPLY, HIGH_ADD), (LOW_MULTIPLY, HIGH_MULTIPLY),
             (LOW_SUBTRACT, HIGH_ADD), (LOW_SUBTRACT, HIGH_MULTIPLY)]

    print(f"alpha_low=0.9, alpha_high=0.1, alpha_init=1.0, "
          f"{args.epochs} epochs, {args.seeds} seeds")
    print()
    print(f"{'shrink/grow':>18}  {'mean':>9}  {'std':>7}  {'min':>10}  went<=0")
    for low_op, high_op in pairs:
        stats = [simulate_lr_walk(low_op, high_op, 0.9, 0.1,
                                  epochs=args.epochs, seed=s)
                 for s in range(args.seeds)]
        mean = np.mean([s.mean for s in stats])
        std = np.mean([s.std for s in stats])
        lowest = min(s.min for s in stats)
        crossed = sum(s.crossed_zero for s in stats)
        print(f"{low_op + '/' + high_op:>18}  {mean:9.3f}  {std:7.3f}  "
              f"{lowest:10.3g}  {crossed}/{args.seeds}")

    print()
    print("multiply/add hovers around 1.0 with spread ~0.3 and never")
    print("touches zero; the other pairings are shown for contrast.")


if __name__ == "__main__":
    main()
