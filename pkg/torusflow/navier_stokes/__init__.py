"""
``torusflow.navier_stokes`` solves the projected Navier-Stokes system in its mild (Duhamel) form by Picard iteration,
recovers the pressure and checks the solutions (momentum residual, continuity at ``t = 0``, energy).
"""
