# bresse/pipeline.py

import os
from datetime import datetime
from typing import Any, Dict, List

import numpy as np
from tqdm import tqdm

from .config import (
    BOUNDARY_GROWTH_LIMIT,
    BOUNDARY_SWEEP,
    DISSIPATIVITY_TOL,
    LOG_FILE_NAME,
    MULTIPLIER_MIN_RATIO,
)
from .exceptions import BresseError, DecayFitError, SolverError
from .fem import build_system
from .generator import (
    check_dissipativity,
    smooth_random_state,
    verify_boundary_estimates,
    verify_multiplier_identities,
)
from .reports.csv_report import write_csv_report
from .reports.json_report import write_json_report
from .reports.svg_plot import emit_plot
from .runconfig import RunConfig
from .spectral import certify_stability, compute_spectrum, resolved_state, resolvent_sweep, scan_gains
from .timeint import fit_decay_rate, simulate
from .utils.logging_utils import BresseLogger, log_bresse_pipeline, setup_logging

COMMANDS = ("simulate", "spectrum", "sweep", "certify", "verify", "scan")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_ERROR = 2


def boundary_growth(ratios: np.ndarray) -> float:
    """max over the upper half of a sweep divided by max over the lower half."""
    half = ratios.size // 2
    lower = float(np.max(ratios[:half])) if half else 0.0
    upper = float(np.max(ratios[half:]))
    if lower == 0.0:
        return 0.0 if upper == 0.0 else float("inf")
    return upper / lower


class BressePipeline:
    """
    Runs one subcommand for a RunConfig and writes its reports.

    Each ``run_<command>`` returns a status dict with the written ``outputs``,
    a ``summary`` and a ``passed`` verdict for commands that check something.
    """

    def __init__(self, config: RunConfig, plot: bool = False, progress: bool = False):
        self.config = config
        self.plot = plot
        self.progress = progress
        self.logger = BresseLogger("pipeline")

    def _path(self, name: str) -> str:
        return os.path.join(self.config.output_dir, name)

    def _system(self, N: int = None):
        cfg = self.config
        return build_system(cfg.params, cfg.N if N is None else N, lumped=cfg.lumped)

    def _maybe_plot(self, csv_path: str, kind: str, outputs: List[str]):
        if self.plot:
            outputs.append(emit_plot(csv_path, kind))

    def run_simulate(self) -> Dict[str, Any]:
        cfg = self.config
        system = self._system()
        initial = smooth_random_state(system.grid, cfg.seed)
        projected = True
        try:
            initial = resolved_state(initial, system)
        except SolverError as e:
            projected = False
            self.logger.logger.warning(f"Initial state not projected onto resolved modes: {e}")
        trace = simulate(initial, cfg.T, cfg.dt, system, progress=self.progress)

        losses = np.concatenate([[0.0], trace.boundary_losses])
        outputs = [write_csv_report(self._path("energy.csv"), ("t", "E", "loss"),
                                    zip(trace.times, trace.energies, losses))]
        self._maybe_plot(outputs[0], "energy", outputs)

        e0 = float(trace.energies[0])
        summary = {
            "steps": trace.steps,
            "resolved_initial_state": projected,
            "dt": float(trace.times[1] - trace.times[0]),
            "E0": e0,
            "E_final": float(trace.energies[-1]),
            "max_balance_residual": float(np.max(np.abs(trace.balance_residuals)) / e0) if e0 > 0 else 0.0,
            "fit_window": list(cfg.fit_window),
            "mu": None,
            "fit_residual": None,
        }
        try:
            fit = fit_decay_rate(trace, cfg.fit_window)
            summary["mu"] = fit.mu
            summary["fit_residual"] = fit.residual_norm
        except DecayFitError as e:
            summary["fit_error"] = str(e)
            self.logger.logger.warning(f"Decay fit skipped: {e}")
        summary["config"] = cfg.to_dict()
        outputs.append(write_json_report(self._path("simulate_summary.json"), summary))
        return {"status": "success", "outputs": outputs, "summary": summary, "passed": True}

    def run_spectrum(self) -> Dict[str, Any]:
        spectrum = compute_spectrum(self._system())
        ev = spectrum.eigenvalues
        outputs = [write_csv_report(self._path("spectrum.csv"), ("re", "im"), zip(ev.real, ev.imag))]
        self._maybe_plot(outputs[0], "spectrum", outputs)
        summary = {
            "count": int(ev.size),
            "spectral_abscissa": spectrum.spectral_abscissa,
            "imag_axis_clearance": spectrum.imag_axis_clearance,
            "resolved_limit": spectrum.resolved_limit,
            "full_spectral_abscissa": spectrum.full_abscissa,
            "full_imag_axis_clearance": spectrum.full_clearance,
            "config": self.config.to_dict(),
        }
        outputs.append(write_json_report(self._path("spectrum_summary.json"), summary))
        return {"status": "success", "outputs": outputs, "summary": summary, "passed": True}

    def run_sweep(self) -> Dict[str, Any]:
        cfg = self.config
        sweep = resolvent_sweep(cfg.lambda_max, cfg.sweep_count, self._system(), progress=self.progress)
        outputs = [write_csv_report(self._path("resolvent.csv"), ("lambda", "norm"),
                                    zip(sweep.lambdas, sweep.norms))]
        self._maybe_plot(outputs[0], "resolvent", outputs)
        summary = {
            "sup_norm": sweep.sup_norm,
            "argmax": sweep.argmax,
            "near_singular": list(sweep.near_singular),
            "config": cfg.to_dict(),
        }
        outputs.append(write_json_report(self._path("sweep_summary.json"), summary))
        return {"status": "success", "outputs": outputs, "summary": summary, "passed": True}

    def run_certify(self) -> Dict[str, Any]:
        cfg = self.config
        certificate = certify_stability(cfg.params, cfg.N, cfg.lambda_max, count=cfg.sweep_count,
                                        shooting_modes=cfg.shooting_modes, progress=self.progress)
        values = {
            "spectral_abscissa": certificate.spectral_abscissa,
            "imag_axis_clearance": certificate.imag_axis_clearance,
            "resolvent_sup": certificate.resolvent_sup,
            "shooting": max(certificate.shooting_deltas, default=0.0),
        }
        for name, passed in certificate.checks.items():
            self.logger.log_check(name, passed, values[name])
        payload = certificate.to_dict()
        payload["config"] = cfg.to_dict()
        outputs = [write_json_report(self._path("certificate.json"), payload)]
        return {"status": "success", "outputs": outputs, "summary": payload, "passed": certificate.passed}

    def run_verify(self) -> Dict[str, Any]:
        cfg = self.config
        system = self._system()

        dissipativity = check_dissipativity(system, cfg.verify_trials, cfg.seed)
        self.logger.log_check("dissipativity", dissipativity.passed,
                              dissipativity.max_relative_residual, DISSIPATIVITY_TOL)

        meshes = [cfg.N, 2 * cfg.N, 4 * cfg.N]
        multiplier = []
        for N in meshes:
            refined = system if N == cfg.N else self._system(N)
            F = smooth_random_state(refined.grid, cfg.seed)
            report = verify_multiplier_identities(cfg.verify_lambda, F, refined)
            multiplier.append({"N": N, "residuals": list(report.residuals),
                               "lhs": list(report.lhs), "rhs": list(report.rhs),
                               "combined_residual": report.combined_residual})
        worst = [max(m["residuals"]) for m in multiplier]
        ratios = [a / b if b > 0 else float("inf") for a, b in zip(worst, worst[1:])]
        multiplier_passed = all(r >= MULTIPLIER_MIN_RATIO for r in ratios)
        self.logger.log_check("multiplier_identities", multiplier_passed, min(ratios), MULTIPLIER_MIN_RATIO)

        F = smooth_random_state(system.grid, cfg.seed)
        lambdas = np.arange(BOUNDARY_SWEEP[0], BOUNDARY_SWEEP[1] + 1, dtype=float)
        if self.progress:
            lambdas = tqdm(lambdas, desc="Boundary estimates", unit="lambda")
        rows = [verify_boundary_estimates(float(lam), F, system) for lam in lambdas]
        growth = {name: boundary_growth(np.array([getattr(r, name) for r in rows])) for name in ("r0", "r1", "r2")}
        boundary_passed = all(g <= BOUNDARY_GROWTH_LIMIT for g in growth.values())
        self.logger.log_check("boundary_estimates", boundary_passed, max(growth.values()), BOUNDARY_GROWTH_LIMIT)

        outputs = [write_csv_report(self._path("boundary_estimates.csv"), ("lambda", "r0", "r1", "r2"),
                                    [(r.lam, r.r0, r.r1, r.r2) for r in rows])]
        passed = dissipativity.passed and multiplier_passed and boundary_passed
        summary = {
            "passed": passed,
            "dissipativity": {
                "trials": dissipativity.trials,
                "max_residual": dissipativity.max_residual,
                "max_relative_residual": dissipativity.max_relative_residual,
                "passed": dissipativity.passed,
            },
            "multiplier": {
                "lambda": cfg.verify_lambda,
                "meshes": multiplier,
                "reduction_ratios": ratios,
                "passed": multiplier_passed,
            },
            "boundary_estimates": {
                "lambdas": [int(BOUNDARY_SWEEP[0]), int(BOUNDARY_SWEEP[1])],
                "max": {name: max(getattr(r, name) for r in rows) for name in ("r0", "r1", "r2")},
                "growth": growth,
                "passed": boundary_passed,
            },
            "config": cfg.to_dict(),
        }
        outputs.append(write_json_report(self._path("verify.json"), summary))
        return {"status": "success", "outputs": outputs, "summary": summary, "passed": passed}

    def run_scan(self) -> Dict[str, Any]:
        cfg = self.config
        rows = scan_gains(cfg.params, cfg.N, cfg.scan_factors)
        outputs = [write_csv_report(self._path("gain_scan.csv"), ("factor", "abscissa", "clearance"),
                                    [(r.factor, r.spectral_abscissa, r.imag_axis_clearance) for r in rows])]
        summary = {
            "rows": [{"factor": r.factor, "spectral_abscissa": r.spectral_abscissa,
                      "imag_axis_clearance": r.imag_axis_clearance} for r in rows],
            "config": cfg.to_dict(),
        }
        outputs.append(write_json_report(self._path("scan_summary.json"), summary))
        return {"status": "success", "outputs": outputs, "summary": summary, "passed": True}

    def execute(self, command: str) -> Dict[str, Any]:
        if command not in COMMANDS:
            raise ValueError(f"unknown command '{command}', expected one of {COMMANDS}")
        self.logger.log_run_start(command, {"N": self.config.N, "scenario": self.config.scenario.value})
        start = datetime.now()
        result = getattr(self, f"run_{command}")()
        self.logger.log_performance(command, (datetime.now() - start).total_seconds(),
                                    {"N": self.config.N, "passed": result["passed"]})
        self.logger.log_run_complete(command, result["outputs"])
        return result


def run(config: RunConfig, command: str, plot: bool = False, progress: bool = False,
        log_level: str = "INFO") -> int:
    """
    Execute a subcommand and map its outcome to an exit status.

    Returns:
        0 on success, 1 when a certify or verify check fails, 2 on a
        BresseError or any other exception (message printed and logged)
    """
    os.makedirs(config.output_dir, exist_ok=True)
    setup_logging(log_level=log_level, log_file=os.path.join(config.output_dir, LOG_FILE_NAME))
    pipeline = BressePipeline(config, plot=plot, progress=progress)

    start = datetime.now()
    try:
        result = pipeline.execute(command)
    except BresseError as e:
        pipeline.logger.log_error(command, str(e))
        log_bresse_pipeline(command, start, datetime.now(), False, {"error": str(e)})
        print(f"✗ Error: {e}")
        return EXIT_ERROR
    except Exception as e:
        pipeline.logger.logger.exception(f"Unexpected error in '{command}'")
        log_bresse_pipeline(command, start, datetime.now(), False, {"error": repr(e)})
        print(f"✗ Unexpected error: {e!r}")
        return EXIT_ERROR

    log_bresse_pipeline(command, start, datetime.now(), True, {"passed": result["passed"]})
    for path in result["outputs"]:
        print(f"✓ Wrote {path}")
    if not result["passed"]:
        print(f"✗ '{command}' checks failed")
        return EXIT_CHECK_FAILED
    print(f"✓ '{command}' completed")
    return EXIT_OK
