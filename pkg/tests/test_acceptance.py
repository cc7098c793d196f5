"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` or directly as a script.
"""
import itertools
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from causalcell import gibbs_charger as gc
from causalcell import oracles
from causalcell import stabilizer as stb
from causalcell import unitary_charger as uc
from causalcell.channels import (
    LindbladSpec, choi, compose, kraus_from_choi, lindblad_integrate, lindblad_propagator,
    remix, superoperator,
)
from causalcell.qops import KET_E, KET_G, SIGMA_X, SIGMA_Z, matexp_hermitian_generator, projector
from causalcell.switch import PLUS, ControlState, measure_control, switch_evolve, switch_kraus
from causalcell.unitary_charger import ChargerSpec, UnitaryProtocol

sys.path.insert(0, str(Path(__file__).parent))
from helpers import random_channel, random_density, random_unitary  # noqa: E402

pytestmark = pytest.mark.acceptance

GIBBS_GRID = list(itertools.product((0.5, 1.0, 2.0), (0.5, 1.0, 2.0), (0.1, 0.25, 0.4)))
UNITARY_PAIRS = [
    (ChargerSpec(2.0, 1.0), ChargerSpec(1.0, 0.5)),
    (ChargerSpec(-0.5, 0.0), ChargerSpec(1.0, 0.0)),
    (ChargerSpec(0.0, 0.0), ChargerSpec(0.0, 2.0)),
    (ChargerSpec(1.0, 1.0), ChargerSpec(1.0, 1.0)),
    (ChargerSpec(1.0, 0.0), ChargerSpec(0.3, 1.2)),
]


def criterion_1():
    start = time.perf_counter()
    worst_p, worst_f = 0.0, 1.0
    for k in (1, 2, 3):
        proto = uc.optimal_protocol(1.0, k)
        _, minus = uc.simulate(proto, uc.optimal_time(1.0))
        worst_p = max(worst_p, abs(minus.probability - (1 - 1 / (1 + 2 * k) ** 2)))
        worst_f = min(worst_f, uc.excited_fidelity(minus))
    elapsed = time.perf_counter() - start
    ok = worst_p <= 1e-6 and worst_f >= 1 - 1e-9 and elapsed < 1
    return ok, f"max |p - p_k| = {worst_p:.2e}, min fidelity = {worst_f:.12f}, {elapsed:.2f}s"


def criterion_2():
    start = time.perf_counter()
    worst = 0.0
    for omega in (0.5, 1.0, 2.0):
        for c1, c2 in UNITARY_PAIRS:
            proto = UnitaryProtocol(omega, c1, c2)
            for t in np.linspace(0, 2 * np.pi, 50):
                sim = uc.simulate(proto, t)[1].unnormalized
                closed = uc.minus_branch_population(proto, t)
                worst = max(worst, abs(closed[0] - sim[0, 0].real), abs(closed[1] - sim[1, 1].real))
    elapsed = time.perf_counter() - start
    return worst <= 1e-9 and elapsed < 5, f"max deviation = {worst:.2e} over 750 points, {elapsed:.2f}s"


def criterion_3():
    start = time.perf_counter()
    rng = np.random.default_rng(3)
    best = 0.0
    for _ in range(100):
        omega = rng.uniform(0.1, 3.0)
        x, y = rng.normal(scale=3.0, size=2)
        h = omega * SIGMA_Z + ChargerSpec(x, y).hamiltonian()
        freq = np.sqrt(omega**2 + x**2 + y**2)
        # dense grid over two Rabi periods, stepped with one exact propagator
        n = 4000
        step = matexp_hermitian_generator(h, 2 * np.pi / freq / n)
        psi = KET_G.copy()
        for _ in range(n):
            psi = step @ psi
            best = max(best, abs(psi[0]) ** 2)
    elapsed = time.perf_counter() - start
    return best < 1 - 1e-6 and elapsed < 5, f"max excited population = {best:.9f}, {elapsed:.2f}s"


def criterion_4():
    start = time.perf_counter()
    anchors = max(abs(gc.f_of_p(gc.GibbsSpec(w, k, 0.0)) - 1) + abs(gc.f_of_p(gc.GibbsSpec(w, k, 0.5)) - 0.5)
                  for w, k in itertools.product((0.5, 1.0, 2.0), repeat=2))
    worst = 0.0
    for w, k, p in GIBBS_GRID:
        spec = gc.GibbsSpec(w, k, p)
        peaks = gc.scan_probability_peaks(spec)
        worst = max([worst] + [abs(pk.excited - gc.f_of_p(spec)) for pk in peaks])
        if not peaks:
            worst = np.inf
    elapsed = time.perf_counter() - start
    ok = anchors <= 1e-12 and worst <= 1e-6 and elapsed < 30
    return ok, f"anchor error = {anchors:.1e}, max |f - scan| = {worst:.2e}, {elapsed:.1f}s"


def criterion_5():
    start = time.perf_counter()
    worst_v = worst_t = 0.0
    for w, k, p in GIBBS_GRID:
        spec = gc.GibbsSpec(w, k, p)
        value, t = gc.scan_global_max(spec)
        worst_v = max(worst_v, abs(value - (p - 1) ** 2 / (1 + 2 * p * (p - 1))))
        worst_t = max(worst_t, abs(t - 2 * np.pi / np.sqrt(w**2 + k**2)))
    elapsed = time.perf_counter() - start
    ok = worst_v <= 1e-6 and worst_t <= 1e-3
    return ok, f"max value error = {worst_v:.2e}, max time error = {worst_t:.2e}, {elapsed:.1f}s"


def criterion_6():
    grid = np.round(np.arange(0, 501) * 1e-3, 12)
    violations = 0
    for w, k in itertools.product((0.5, 1.0, 2.0, 5.0), repeat=2):
        for p in grid:
            spec = gc.GibbsSpec(w, k, p)
            f = gc.f_of_p(spec)
            violations += (f < gc.g_of_p(spec) - 1e-9) + (f < gc.h_of_p(p) - 1e-9)
    return violations == 0, f"{violations} violations over {16 * grid.size} points"


def criterion_7():
    worst = max(abs(gc.f_of_p(gc.GibbsSpec(100.0, 1.0, p)) - gc.weak_coupling_f(p)) for p in (0.1, 0.2, 0.3, 0.4))
    return worst <= 1e-3, f"max |f - weak-coupling form| = {worst:.2e}"


def criterion_8():
    start = time.perf_counter()
    parts, ok = [], False
    for name in ("half", "full"):
        res = stb.find_rescue_time(stb.with_branch_duration(stb.StabilizerSpec(), name), 1.0)
        hit = 0.188 <= res.t_rescue <= 0.208 and res.fidelity >= 0.99
        ok |= hit
        parts.append(f"{name}: t = {res.t_rescue:.5f}, fidelity = {res.fidelity:.5f}{' (in window)' if hit else ''}")
    elapsed = time.perf_counter() - start
    return ok and elapsed < 30, "; ".join(parts) + f", {elapsed:.1f}s"


def criterion_9():
    rng = np.random.default_rng(9)
    remix_err = prob_err = cptp_err = 0.0
    for _ in range(100):
        a, b = random_channel(rng, 2, 2), random_channel(rng, 2, 3)
        rho = random_density(rng)
        ctrl = ControlState(*rng.uniform(0, 2 * np.pi, 2))
        ref = switch_evolve(a, b, ctrl, rho)
        out = switch_evolve(remix(a, random_unitary(rng, 2)), remix(b, random_unitary(rng, 3)), ctrl, rho)
        remix_err = max(remix_err, np.max(np.abs(out - ref)))
        plus, minus = measure_control(ref)
        prob_err = max(prob_err, abs(plus.probability + minus.probability - 1))
        w = switch_kraus(a, b)
        cptp_err = max(cptp_err, np.max(np.abs(sum(k.conj().T @ k for k in w.ops) - np.eye(4))))
        cptp_err = max(cptp_err, np.max(np.abs(
            sum(k.conj().T @ k for k in kraus_from_choi(choi(a)).ops) - np.eye(2))))
    spec = LindbladSpec(3 * SIGMA_X + SIGMA_Z, projector(KET_E), 2 / 3)
    semi = 0.0
    for t1, t2 in [(0.05, 0.1), (0.2, 0.3), (0.7, 0.4)]:
        lhs = superoperator(lindblad_propagator(spec, t1 + t2))
        rhs = superoperator(compose(lindblad_propagator(spec, t1), lindblad_propagator(spec, t2)))
        semi = max(semi, np.max(np.abs(lhs - rhs)))
    lind_cptp = max(np.max(np.abs(sum(k.conj().T @ k for k in lindblad_propagator(spec, t).ops) - np.eye(2)))
                    for t in (0.01, 0.1, 0.5, 1.0))
    traj = lindblad_integrate(spec, random_density(rng), np.linspace(0, 1, 11))
    drift = max(abs(np.trace(r) - 1) for r in traj)
    ok = (remix_err <= 1e-10 and prob_err <= 1e-10 and cptp_err <= 1e-9 and lind_cptp <= 1e-8
          and semi <= 1e-7 and drift <= 1e-8)
    return ok, (f"remix {remix_err:.1e}, prob sum {prob_err:.1e}, completeness {cptp_err:.1e}/{lind_cptp:.1e}, "
                f"semigroup {semi:.1e}, trace drift {drift:.1e}")


def criterion_10():
    rng = np.random.default_rng(10)
    worst = 0.0
    for _ in range(20):
        w, k = rng.uniform(0.2, 3.0, 2)
        p = rng.uniform(0.0, 0.5)
        spec = gc.GibbsSpec(w, k, p)
        t = rng.uniform(0.0, 2 * gc.minus_period(spec))
        rho_b = random_density(rng)
        ch = gc.single_charge_channel(spec, t=t / 2)
        joint = switch_evolve(ch, ch, PLUS, rho_b)
        plus, minus = measure_control(joint)
        joint_ref, plus_ref, minus_ref = oracles.dilated_gibbs_switch(w, k, p, t, rho_b)
        worst = max(worst, np.max(np.abs(joint - joint_ref)),
                    np.max(np.abs(plus.unnormalized - plus_ref)), np.max(np.abs(minus.unnormalized - minus_ref)))
    return worst <= 1e-9, f"max deviation from the 16-dimensional dilation = {worst:.2e}"


CLI_CONFIGS = {
    "unitary": "omega = 1\nx1 = 0.5\nx2 = 2.0\nsteps = 201\n",
    "unitary-optimal": "omega = 1\nk = 1\n",
    "gibbs": "omega = 1\ncoupling = 1\np = 0.25\nsteps = 401\n",
    "gibbs-compare": "omega = 1\ncoupling = 1\np_steps = 501\n",
    "stabilize": "t_max = 0.5\nsteps = 201\n",
    "rescue-time": "t_max = 1\n",
}


def criterion_11(workdir):
    workdir = Path(workdir)
    mismatched = []
    for command, text in CLI_CONFIGS.items():
        cfg = workdir / f"{command}.cfg"
        cfg.write_text(text, encoding="utf-8")
        outputs = []
        for run in (1, 2):
            out = workdir / f"{command}-{run}.csv"
            proc = subprocess.run([sys.executable, "-m", "causalcell", command, "--config", str(cfg), "--out", str(out)],
                                  capture_output=True)
            outputs.append(out.read_bytes() if proc.returncode == 0 else None)
        if outputs[0] is None or outputs[0] != outputs[1]:
            mismatched.append(command)
    return not mismatched, f"{len(CLI_CONFIGS)} commands, mismatched: {mismatched or 'none'}"


def report(number, result):
    ok, detail = result
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    return ok, line


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("number", range(1, 12))
def test_criterion(number, tmp_path, capsys):
    result = criterion_11(tmp_path) if number == 11 else CRITERIA[number - 1]()
    ok, line = report(number, result)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    import tempfile

    failures = 0
    for n in range(1, 12):
        if n == 11:
            with tempfile.TemporaryDirectory() as d:
                ok, line = report(n, criterion_11(d))
        else:
            ok, line = report(n, CRITERIA[n - 1]())
        failures += not ok
        print(line, flush=True)
    sys.exit(1 if failures else 0)
