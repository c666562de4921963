"""Run every inequality check over the built-in corpus.

Seven domains: two in 1-D, a disk, an ellipse (eigenvalue bracketed, so each
margin is taken at the worse end), a square and a 3:1 rectangle (grid
backend, tolerance three times the Richardson error), and a ball cluster.
"""

from torsionlab import builtin_corpus, run_corpus

run = run_corpus(builtin_corpus(), qs=[0.0, 0.5, 1.0, 2.0])
summary = run.summary()
print(f"{summary['n_checks']} checks, {summary['n_failed']} failed, {summary['n_errors']} errors")
print()
print("tightest margin per check family:")
for family, worst in summary["worst_margin"].items():
    print(f"  {family:14s} {worst['margin']:+.3e}  {worst['check_id']} on {worst['domain']}")
