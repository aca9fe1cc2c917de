"""Construction of finite models that are k-sound for acyclic queries.

The modules follow the order in which the construction uses them:
partition of the UIDs, balancing and realizations, dense interpretations,
saturation with envelopes, thrifty chase steps and the completion loop.
"""
