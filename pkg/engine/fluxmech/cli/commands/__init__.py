from . import bifurcate, map, response, selftest, simulate

__all__ = ["bifurcate", "map", "response", "selftest", "simulate"]
