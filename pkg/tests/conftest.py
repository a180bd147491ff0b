import os
from pathlib import Path

import pytest

from fairlaunch import behavior as bh
from fairlaunch import engine
from fairlaunch import scenario as sc

#: (criterion number, title, status, detail); filled by test_acceptance.py
ACCEPTANCE: list[tuple[int, str, str, str]] = []

DRIFT_SEED = 0
DRIFT_REPLICATES = 30
DRIFT_SCALE = 10.0


def record(number: int, title: str, ok: bool | None, detail: str = "") -> None:
    status = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
    ACCEPTANCE.append((number, title, status, detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, status, detail in sorted(ACCEPTANCE):
        line = f"[{status}] criterion {number}: {title}"
        terminalreporter.write_line(f"{line} ({detail})" if detail else line)


def drift_config(kind: str, level: str, **kw) -> engine.RunConfig:
    return engine.RunConfig(seed=DRIFT_SEED, scenario=sc.ScenarioSpec(kind=kind), behavior=bh.preset(level),
                            synthetic=engine.SyntheticMarket(), entrant_scale=DRIFT_SCALE, **kw)


@pytest.fixture(scope="session")
def drift_ensembles():
    """30-replicate ensembles for every scenario x preset on the default synthetic market."""
    workers = min(engine.default_workers(), 8)
    return {(k.value, p): engine.run_ensemble(drift_config(k.value, p), DRIFT_REPLICATES, workers)
            for k in sc.ScenarioKind for p in bh.PRESETS}


@pytest.fixture(scope="session")
def real_data():
    """Directory with market.csv and reference.csv, from FAIRLAUNCH_YFI_DATA, or None."""
    root = os.environ.get("FAIRLAUNCH_YFI_DATA")
    if not root:
        return None
    root = Path(root)
    if not (root / "market.csv").is_file() or not (root / "reference.csv").is_file():
        return None
    return root
