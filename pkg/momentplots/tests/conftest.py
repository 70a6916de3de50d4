from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"


@pytest.fixture()
def data() -> Path:
    return DATA


@pytest.fixture()
def sweep_paths() -> list[str]:
    return [str(DATA / f"sample_sweep_{i:03d}.csv") for i in range(5)]
