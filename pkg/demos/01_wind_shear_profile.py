"""Plot the logistic wind-shear profile and its altitude gradient.

The profile saturates at the free-stream speed above the shear layer and
dies out below it; thinning the layer turns it into a step (the classic
discontinuous shear idealization).  The gradient peaks mid-layer, which is
where a soaring trajectory wants to spend its climbs and descents.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from dsoar import WindParams, wind_gradient, wind_speed

OUT = "demos/output"


def main():
    z = np.linspace(-30.0, 40.0, 400)
    nominal = WindParams(w0=7.8, delta=7.0)

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
    for delta in (7.0, 3.0, 0.5):
        p = WindParams(w0=7.8, delta=delta)
        ax1.plot([wind_speed(zi, p) for zi in z], z,
                 label=f"delta = {delta} m")
    ax1.axhline(0.0, color="gray", lw=0.5)
    ax1.set_xlabel("wind speed W(z) [m/s]")
    ax1.set_ylabel("altitude z [m]")
    ax1.set_title("logistic shear profile")
    ax1.legend()

    ax2.plot([wind_gradient(zi, nominal) for zi in z], z)
    ax2.set_xlabel("dW/dz [1/s]")
    ax2.set_title("shear gradient (delta = 7 m)")

    fig.tight_layout()
    fig.savefig(f"{OUT}/wind_profile.png", dpi=130)
    print(f"wrote {OUT}/wind_profile.png")

    print(f"mid-layer speed W(0)      = {wind_speed(0.0, nominal):.3f} m/s "
          f"(half of {nominal.w0})")
    print(f"peak gradient dW/dz(0)    = {wind_gradient(0.0, nominal):.4f} 1/s "
          f"(= w0 / (4 delta))")
    thin = WindParams(w0=7.8, delta=0.02)
    print(f"thin layer at z = +-1 m   = {wind_speed(1.0, thin):.6f} / "
          f"{wind_speed(-1.0, thin):.2e} m/s (step limit)")


if __name__ == "__main__":
    main()
