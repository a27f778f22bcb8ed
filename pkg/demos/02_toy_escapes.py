"""The three toy landscapes where a too-small step size traps Adam.

Each scenario pairs vanilla Adam against the adaptive variant at the
same base step size.  The adaptive runs climb out of the flat or
trapping region because their step sizes grow while the cumulative
gradient sign holds; the vanilla runs crawl.
"""

import argparse

import numpy as np

from activelr import (RunConfig, bivariate_multimodal, cubic_1d,
                      run_training, saddle_2d)
from activelr.backbones import ADAMW, BackboneConfig


def paired(obj, alpha, epochs, theta0):
    base = dict(alpha=alpha, backbone=BackboneConfig(kind=ADAMW),
                epochs=epochs, steps_per_epoch=1, theta0=theta0,
                stop_when_escaped=True)
    vanilla = run_training(obj, RunConfig(active=False, **base))
    active = run_training(obj, RunConfig(active=True, **base))
    return vanilla, active


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.parse_args()

    print("cubic trap: f has a local minimum at x=3; the exit is x < 0.5")
    vanilla, active = paired(cubic_1d(), 1e-5, 500, np.array([5.0]))
    print(f"  vanilla: escaped={vanilla.final['escaped']}, "
          f"final x = {vanilla.final['final_params'][0]:.4f}")
    print(f"  active:  escaped={active.final['escaped']} "
          f"at epoch {active.final['escape_epoch']}")
    print()

    obj = bivariate_multimodal()
    trap = obj.f(np.array([0.0, -2.0]))
    print(f"multimodal: started at a stationary point; the trap level is "
          f"f(0,-2) = {trap:g}")
    vanilla, active = paired(obj, 1e-3, 1000, np.array([-3.99, 6.01]))
    print(f"  vanilla: escaped={vanilla.final['escaped']}, "
          f"final f = {vanilla.final['final_loss']:.1f}")
    print(f"  active:  escaped={active.final['escaped']} "
          f"at epoch {active.final['escape_epoch']}")
    print()

    print("saddle: from (0.5, 0.1), global minima sit at (0, +1) and (0, -1)")
    vanilla, active = paired(saddle_2d(), 1e-3, 50, np.array([0.5, 0.1]))
    for name, traj in (("vanilla", vanilla), ("active", active)):
        x, y = traj.final["final_params"]
        dist = min(np.hypot(x, y - 1.0), np.hypot(x, y + 1.0))
        print(f"  {name:7s}: finished at ({x:+.3f}, {y:+.3f}), "
              f"distance to nearest minimum {dist:.3f}")


if __name__ == "__main__":
    main()
