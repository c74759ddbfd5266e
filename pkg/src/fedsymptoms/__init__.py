"""Deterministic simulator of federated symptom-prevalence learning.

Synthetic survey data is generated per client from bundled country
prevalence tables, a small embedding-fed binary classifier is trained
locally, and weighted parameter averaging aggregates the clients into a
global model whose per-symptom predictions are swept over noise and
privacy regimes.
"""

__version__ = "0.1.0"
