"""Exact computations with dg Loday-Pirashvili modules over Lie algebras.

Layers, bottom up:

- linalg: exact rational matrices (rref, kernel, image, solve, complements).
- lie: Lie algebras from structure constants, module actions.
- complexes: dg g-modules, the Chevalley-Eilenberg complex, d_tot, cohomology.
- morphisms: weak morphisms, homotopies, the constructive lifting solver.
- lp: dg Loday-Pirashvili structures and their three equivalent descriptions.
- atiyah: dg derivations and the twisted Atiyah cocycle/class.
- kapranov: the Leibniz-infinity[1] bracket tower and its identities.
- liepair: Lie algebra pairs, splittings, and the worked small examples.
- corpus: seeded random fixtures built from exact solution spaces.
- problemfile / service / cli: JSON schema, HTTP service, command line.
"""

__version__ = "0.1.0"
