import sys
from pathlib import Path

# Add project root (for tests.oracles) and src (for an uninstalled checkout) to the Python path
sys.path.insert(0, str(Path(__file__).parent / "src"))
sys.path.insert(0, str(Path(__file__).parent))
