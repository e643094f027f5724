"""Dimension-4 radial system: compare the coupled (f, g) solve with two scalar n = 4 solves.

For even p the combinations g + f and g - f each solve the n = 4 equation; for
odd p, g + i f does. Prints the max deviation on a grid for each p.
"""
import numpy as np
from scipy.integrate import solve_ivp

from eqym.reduced import reduced_rhs_hpm
from eqym.solvers import integrate_radial, son_series

R = np.linspace(0.01, 2.5, 300)


def scalar(b):
    """g(r) for the n = 4 equation; complex b handled through real and imaginary parts."""
    g0, d0 = son_series(4, complex(b), R[0])
    sol = solve_ivp(lambda r, y: [y[1], reduced_rhs_hpm(r, y[0], y[1])], (R[0], R[-1]),
                    [complex(g0), complex(d0)], method="DOP853", rtol=1e-11, atol=1e-13, t_eval=R)
    return sol.y[0]


def main():
    a, b = 0.25, 0.8
    for p in range(5):
        sol = integrate_radial("SOPQ4", b, (R[0], R[-1]), p=p, a=a, rtol=1e-11, atol=1e-13)
        g, _, f, _ = sol.state_at(R)
        if p % 2 == 0:
            dev = max(np.abs(g + f - scalar(b + a)).max(), np.abs(g - f - scalar(b - a)).max())
            kind = "g+f, g-f"
        else:
            dev = np.abs(g + 1j * f - scalar(b + 1j * a)).max()
            kind = "g+if"
        print(f"p={p}  {kind:9s} max deviation {dev:.2e}")


if __name__ == "__main__":
    main()
