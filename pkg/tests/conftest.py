import sys
from pathlib import Path

# test modules import shared helpers from each other (test_elections etc.)
sys.path.insert(0, str(Path(__file__).parent))

DATA_DIR = Path(__file__).parent / "data"

# Weight constants for the coverage/harmonic greedy reductions at n=2.
# The default closed-form constants order the scores wrongly for small n
# (the builders flag this), so small-instance tests use these, which pass
# every build-time ordering check.
SCALED_GREEDY_CONSTANTS = (600, 18)

CORPUS_FILES = (
    "cover_a.rx3c",
    "cover_b.rx3c",
    "cover_c.rx3c",
    "nocover_a.rx3c",
    "nocover_b.rx3c",
    "nocover_c.rx3c",
)
