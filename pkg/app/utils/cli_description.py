def getDescription():
    description = """
Torsion toolkit.

Computes torsion invariants of finite complexes that carry a coboundary d
(degree +1) and a boundary d* (degree -1), each squaring to zero.

\b
Commands:
  validate   check d^2 = 0, d*^2 = 0 and rank decisions of a bicomplex file
  torsion    torsion relative to supplied bases, or plain for doubly acyclic input
  spectral   split at a threshold K, zeta data, Ray-Singer term, total torsion
  sweep-k    total torsion over a ladder of thresholds and threshold-change identities
  cw         combinatorial torsion of a flat cell complex (circle, lens space or file)
  claims     randomized property suites a, b, c and k
  probe      randomized strip and parabola bounds for perturbed self-adjoint operators

\b
Exit codes: 0 pass, 1 check failure, 2 input error, 3 threshold collision.
Complex numbers are written as [re, im] everywhere. Reports are JSON with sorted keys;
two runs with the same configuration differ only in wall_clock_seconds.
"""
    return description
