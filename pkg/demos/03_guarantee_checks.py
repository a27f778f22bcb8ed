"""Check the two convex-case guarantees numerically.

First on one tiny hand-made quadratic where every number can be read,
then as randomized suites over batched convex quadratics.  The first
guarantee: the cumulative gradient of an epoch run with updates agrees
in sign, parameter by parameter, with the cumulative gradient frozen at
the epoch's start.  The second: one epoch of per-parameter adapted step
sizes costs no more than the constant-step epoch, provided consecutive
gradient signs match.
"""

import argparse

import numpy as np

from activelr import (check_sign_agreement, check_step_advantage,
                      convex_quadratic, sign_agreement_suite,
                      step_advantage_suite)


def batched_quadratic():
    # Two batches of 0.5 a (x - c)^2 with the same curvature and centers
    # at 0 and 0.5; the full objective's minimum sits at 0.25.
    def make_pair(a, c):
        return (lambda th: float(0.5 * a * (th[0] - c) ** 2),
                lambda th: np.array([a * (th[0] - c)]))

    batches = [make_pair(1.0, 0.0), make_pair(1.0, 0.5)]
    obj = convex_quadratic(np.array([[1.0]]), np.array([0.25]),
                           batches=batches, smoothness=1.0)
    return obj


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--cases", type=int, default=200,
                        help="cases per randomized suite (default: %(default)s)")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    obj = batched_quadratic()
    theta0 = np.array([2.0])
    report = check_sign_agreement(obj, theta0, alpha=0.25)
    print("sign agreement on the 1-D two-batch quadratic, started at 2.0:")
    print(f"  frozen cumulative gradient  {report.cu_star[0]:+.4f}")
    print(f"  updated cumulative gradient {report.cu_hat[0]:+.4f}")
    print(f"  product {report.product[0]:+.4f} (>= 0 means signs agree)")
    print(f"  loss-decrease lower bound {report.lower_bound:+.4f} "
          f"<= inner product {report.inner_product:+.4f}")
    print()

    adv = check_step_advantage(obj, theta0, alpha=0.05, alpha_high_eff=0.1,
                               alpha_low_eff=0.025,
                               prior_grad=obj.grad(theta0))
    print("step advantage at the same start:")
    print(f"  f(constant step) - f(adapted step) = {adv.lhs:+.5f}")
    print(f"  first-order bound                  = {adv.rhs:+.5f}")
    print(f"  segment condition held: {adv.segment_condition}")
    print()

    sign = sign_agreement_suite(n_cases=args.cases, seed=args.seed)
    print(f"sign-agreement suite: {sign.n_cases} random batched quadratics, "
          f"{sign.n_diverged} diverged, {sign.n_failed} failed "
          f"-> {'pass' if sign.passed else 'FAIL'}")

    adv_suite = step_advantage_suite(n_cases=args.cases, seed=args.seed)
    print(f"step-advantage suite: {adv_suite.n_cases} random quadratics, "
          f"{adv_suite.n_failed} failed "
          f"-> {'pass' if adv_suite.passed else 'FAIL'}")


if __name__ == "__main__":
    main()
