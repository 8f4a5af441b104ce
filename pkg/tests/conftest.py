import functools

import pytest

from casimir_spectra.config import load_presets
from casimir_spectra.lifshitz import Gap, thermal_pressure_total
from casimir_spectra.matsubara import thermal_correction_oracle

PRESETS = load_presets()
AU = PRESETS["Au-paper"]
AU_LOW_LOSS = PRESETS["Au-low-loss"]
AU_PLASMA = PRESETS["Au-plasma"]
GAP_162 = Gap(162e-9, 300.0)


@functools.lru_cache(maxsize=None)
def breakdown(material_name, separation, temperature=300.0):
    return thermal_pressure_total(Gap(separation, temperature), PRESETS[material_name])


@functools.lru_cache(maxsize=None)
def oracle(material_name, separation, temperature=300.0):
    return thermal_correction_oracle(Gap(separation, temperature), PRESETS[material_name])


@pytest.fixture(scope="session")
def au():
    return AU


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(test_acceptance.RESULTS, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
