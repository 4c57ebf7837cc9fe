import pytest

from rtreveal.model import DEFAULT_BOUNDS, HyperbolicSymmetric, Logistic, NoiseSpec, simulate_raw

# M sits far to the right of both extremes, so every forward condition holds with slack
CALIBRATION = {"L": Logistic(-2.0, 1.0), "M": Logistic(1.5, 1.0), "H": Logistic(-1.0, 1.0)}


def synth_groups(latents, n, seed, eta_sigma=0.2, eps_sigma=0.2):
    c = HyperbolicSymmetric(DEFAULT_BOUNDS)
    noise = NoiseSpec.lognormal(eta_sigma, eps_sigma)
    return {lab: simulate_raw(G, c, noise, n, seed + k, group_id=lab) for k, (lab, G) in enumerate(latents.items())}


@pytest.fixture(scope="session")
def calibration_groups():
    return synth_groups(CALIBRATION, 4000, 100)


# one line per acceptance criterion, echoed at the end of every run
ACCEPTANCE = {}


def record_criterion(number, ok, detail):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
