"""Scheduled intrinsic drive agents over tabular gridworlds.

Successor-feature intrinsic rewards, tiered replay, K-step double-Q
learning, and a small experiment harness around them.
"""

__version__ = "0.1.0"
