from fractions import Fraction

from hypothesis import HealthCheck, settings, strategies as st

from thetagraph.scalars import QQi

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

small_fractions = st.builds(Fraction, st.integers(-20, 20), st.integers(1, 12))
gaussian = st.builds(QQi, small_fractions, small_fractions)
nonzero_gaussian = gaussian.filter(lambda q: q != QQi(0))

EXACT_SAMPLE = ["2", "-2", "1/2", "3", "i", "-i", "3/5+4/5i"]
FLOAT_SAMPLE = ["exp(i*pi/3)", "exp(i*pi/7)"]
KLEIN_SAMPLE = ["1", "-1"]
