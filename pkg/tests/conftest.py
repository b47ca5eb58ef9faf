import sys
from pathlib import Path

from hypothesis import HealthCheck, settings

# make the sibling oracle transcriptions importable from every test module
sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile(
    "suite",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("suite")
