import os

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from torsionkit.polyring import Polynomial, VarContext

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

XYZ = VarContext.create(["x", "y", "z"])
XYZ_T = VarContext.create(["x", "y", "z"], ["t"])


def polys(ctx: VarContext = XYZ, max_terms: int = 5, max_exp: int = 3, coeff: int = 5):
    """Random polynomials with small integer coefficients."""
    mono = st.tuples(*[st.integers(0, max_exp)] * ctx.nvars)
    terms = st.dictionaries(mono, st.integers(-coeff, coeff), max_size=max_terms)
    return terms.map(lambda d: Polynomial(ctx, {e: ctx.field.from_int(c) for e, c in d.items() if c}))
