"""
feeddiv: tweet propagation under algorithmic injection, engagement-optimal
and δ-diverse policies, and the cost of diversity.
"""

__version__ = "0.1.0"
