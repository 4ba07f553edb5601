import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from casimir_restrict.mobius import GroupElement, diagonal, rotation

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

angles = st.floats(0.0, np.pi, allow_nan=False)
radii = st.floats(0.0, 1.5, allow_nan=False)


@st.composite
def group_elements(draw, allow_reflection=True):
    """rotation . a(r) . rotation, optionally composed with the reflection."""
    g = rotation(draw(angles)) @ diagonal(draw(radii)) @ rotation(draw(angles))
    if allow_reflection and draw(st.booleans()):
        g = g @ GroupElement(-1.0, 0.0, 0.0, 1.0)
    return g


def random_element(rng, r_max=1.5, reflect=False):
    g = rotation(rng.uniform(0, np.pi)) @ diagonal(rng.uniform(0, r_max)) @ rotation(rng.uniform(0, np.pi))
    if reflect and rng.random() < 0.5:
        g = g @ GroupElement(-1.0, 0.0, 0.0, 1.0)
    return g


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
