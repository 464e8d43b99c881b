import os

from hypothesis import HealthCheck, settings

# Fixed seed (derandomize) and at least 1000 cases per property.
settings.register_profile(
    "acceptance",
    max_examples=1000,
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.register_profile("quick", max_examples=50, derandomize=True, deadline=None)
settings.load_profile(os.environ.get("BISETCALC_HYPOTHESIS_PROFILE", "acceptance"))
