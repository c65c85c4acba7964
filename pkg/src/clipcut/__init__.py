"""Desk-scale hierarchical language-conditioned learning for a synthetic
bimanual clip-and-cut procedure: simulator, policies, rollout orchestration,
evaluation harness, and a session service for operator intervention."""

__version__ = "0.1.0"
