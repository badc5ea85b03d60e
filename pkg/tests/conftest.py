import sys
from pathlib import Path

# Test modules import shared builders from helpers.py next to this file.
sys.path.insert(0, str(Path(__file__).parent))
