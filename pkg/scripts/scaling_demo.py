"""Energy under r -> lam r: scales as lam^(n-4), invariant in n = 4."""
import numpy as np

from eqym.reduced import energy, scale
from eqym.suites import bump_data

r = np.linspace(0.5, 10.5, 4001)
u0, v0 = bump_data()
u, ut = u0(r), v0(r) + 0.05 * np.exp(-(r - 5) ** 2)
for n in (4, 5, 6):
    E = energy(r, u, ut, n).E
    row = []
    for lam in (0.5, 2.0, 3.0):
        rs, f = scale(r, {"u": u, "u_t": ut}, lam)
        row.append(energy(rs, f["u"], f["u_t"], n).E / (lam ** (n - 4) * E))
    print(f"n={n}  E={E:.6e}  ratios " + "  ".join(f"{x:.12f}" for x in row))
