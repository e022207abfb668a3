"""Timed hierarchical coloured Petri nets and an Ethernet switch model
with static-priority and weighted-round-robin output scheduling."""

__version__ = "0.1.0"
