"""Spherical trace functions, tau_l-spherical transforms and Hecke counting on SL2(C)."""
