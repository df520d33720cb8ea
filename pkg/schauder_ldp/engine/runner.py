from __future__ import annotations

"""
Command runner.

Each command is logged as planned, executed, then marked completed or failed.
Failures never escape as exceptions: they come back as RunResult(ok=False) with the
exit code the CLI should use.
"""

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from schauder_ldp import __version__
from schauder_ldp.core.ciesielski import (
    CoeffMatrix,
    dyadic_holder,
    forward,
    inverse,
    seq_norm_comp,
    seq_norm_h,
    truncate,
)
from schauder_ldp.core.dyadic_basis import (
    dyadic_grid,
    haar_eval,
    index_info,
    log2_exact,
    schauder_eval,
    schauder_table,
    weight,
)
from schauder_ldp.core.ldp import CURVE_CSV_HEADER, BallSpec, ball_infimum, classify, convergence_summary, ldp_curve
from schauder_ldp.core.qwiener import SimConfig, log_bound_stat, sample_coeffs, sample_path
from schauder_ldp.core.rate import rate_path, rate_total
from schauder_ldp.core.tightness import tight_build, tight_check
from schauder_ldp.engine.config import RunConfig, require
from schauder_ldp.engine.run_log import RunLog
from schauder_ldp.engine.verify import run_acceptance
from schauder_ldp.errors import EXIT_OK, EXIT_RUNTIME, UsageError, exit_code_for
from schauder_ldp.utils.io_utils import (
    Table,
    emit_report,
    load_coeff_csv,
    load_path_csv,
    save_coeff_csv,
    save_path_csv,
    sniff_csv_kind,
)


@dataclass(frozen=True)
class Report:
    payload: dict[str, Any]
    table: Table | None = None
    ok: bool = True

    def to_dict(self) -> dict[str, Any]:
        return self.payload

    def csv_table(self) -> Table:
        if self.table is not None:
            return self.table
        scalars = [[k, v] for k, v in sorted(self.payload.items()) if isinstance(v, (int, float, str, bool)) or v is None]
        return Table(header=["key", "value"], rows=scalars)


@dataclass(frozen=True)
class RunResult:
    ok: bool
    action_id: str | None
    message: str
    report: Report | None = None
    text: str | None = None
    exit_code: int = EXIT_OK


class Runner:
    def __init__(self, *, log_path: Path | None = None):
        self.log = RunLog(log_path=log_path)

    def status(self) -> dict[str, Any]:
        return {"version": __version__, "log_path": str(self.log.log_path), "runs": self.log.summary()}

    def logs(self, limit: int = 200) -> list[dict[str, Any]]:
        return self.log.list(limit=limit)

    def run(self, cfg: RunConfig, *, emit: bool = True) -> RunResult:
        entry_id = self.log.append_planned(
            {"action_type": "run", "command": cfg.command, "params": cfg.log_params()}
        )
        try:
            report = self.execute(cfg)
            text = None
            if emit:
                location = cfg.output if _report_goes_to_output(cfg) else None
                text = emit_report(report, cfg.format, location)
        except Exception as ex:
            self.log.mark_failed(entry_id, f"{type(ex).__name__}: {ex}")
            return RunResult(ok=False, action_id=entry_id, message=str(ex), exit_code=exit_code_for(ex))

        self.log.mark_completed(entry_id, {"ok": report.ok})
        if not report.ok:
            return RunResult(
                ok=False, action_id=entry_id, message="Acceptance criteria failed.", report=report, text=text,
                exit_code=EXIT_RUNTIME,
            )
        return RunResult(ok=True, action_id=entry_id, message="Completed.", report=report, text=text)

    def execute(self, cfg: RunConfig) -> Report:
        handler = _HANDLERS.get(cfg.command)
        if handler is None:
            raise UsageError("command", f"{cfg.command} is not a batch command")
        return handler(self, cfg)

    def _basis(self, cfg: RunConfig) -> Report:
        if cfg.action == "eval":
            require(cfg, "n", "t")
            n, t = int(cfg.n), float(cfg.t)
            info = index_info(n)
            payload = {
                "n": n,
                "k_level": info.k,
                "l_shift": info.l,
                "t": t,
                "haar": haar_eval(n, t),
                "schauder": schauder_eval(n, t),
                "weight": weight(n, cfg.alpha),
                "alpha": cfg.alpha,
            }
            return Report(payload)

        N = cfg.truncation
        grid = dyadic_grid(cfg.J)
        phi = schauder_table(N, cfg.J)
        rows = [[t, *row] for t, row in zip(grid.tolist(), phi.tolist())]
        table = Table(header=["t"] + [f"phi{n}" for n in range(N)], rows=rows)
        return Report({"J": cfg.J, "N": N, "t": grid.tolist(), "phi": phi.tolist()}, table=table)

    def _transform(self, cfg: RunConfig) -> Report:
        require(cfg, "input")
        if cfg.action == "forward":
            path = load_path_csv(cfg.input)
            coeffs = forward(path, cfg.alpha)
            if "N" in cfg.explicit:
                coeffs = truncate(coeffs, cfg.truncation)
            if cfg.output:
                save_coeff_csv(coeffs, cfg.output)
            payload = {
                "J": path.J,
                "K": coeffs.K,
                "N": coeffs.N,
                "alpha": cfg.alpha,
                "seq_norm_h": seq_norm_h(coeffs),
                "seq_norm_comp": seq_norm_comp(coeffs),
                "dyadic_holder": dyadic_holder(path, cfg.alpha).to_dict(),
                "output": cfg.output,
            }
            return Report(payload)

        coeffs = load_coeff_csv(cfg.input, cfg.alpha)
        J_out = max(cfg.J, log2_exact(coeffs.N))
        path = inverse(coeffs, J_out)
        if cfg.output:
            save_path_csv(path, cfg.output)
        payload = {
            "J": path.J,
            "K": path.K,
            "N": coeffs.N,
            "alpha": cfg.alpha,
            "sup_abs": float(np.max(np.abs(path.samples))),
            "endpoint": path.samples[-1].tolist(),
            "output": cfg.output,
        }
        return Report(payload)

    def _simulate(self, cfg: RunConfig) -> Report:
        spec = cfg.build_spectrum()
        sim = SimConfig(spec, J=cfg.J, N=cfg.truncation, seed=cfg.seed, paths=cfg.paths, alpha=cfg.alpha, workers=cfg.workers)
        rows = []
        targets = _simulation_targets(cfg)
        for i in range(cfg.paths):
            path = sample_path(sim, i)
            coeffs = sample_coeffs(sim, i)
            if targets is not None:
                save_path_csv(path, targets[i])
            rows.append([i, float(np.max(np.abs(path.samples))), seq_norm_h(coeffs)])
        payload = {
            "J": cfg.J,
            "N": sim.N,
            "K": spec.K,
            "seed": cfg.seed,
            "paths": cfg.paths,
            "spectrum": spec.to_dict(),
            "sup_abs": [r[1] for r in rows],
            "seq_norm_h": [r[2] for r in rows],
            "log_bound_stat": log_bound_stat(sim) if sim.N >= 3 else None,
            "outputs": [str(p) for p in targets] if targets is not None else [],
        }
        return Report(payload, table=Table(header=["path", "sup_abs", "seq_norm_h"], rows=rows))

    def _rate(self, cfg: RunConfig) -> Report:
        require(cfg, "input")
        if sniff_csv_kind(cfg.input) == "path":
            path = load_path_csv(cfg.input)
            value = rate_path(path, cfg.build_spectrum(K=path.K))
        else:
            coeffs = load_coeff_csv(cfg.input, cfg.alpha)
            value = rate_total(coeffs, cfg.build_spectrum(K=coeffs.K))
        table = Table(header=["channel", "rate"], rows=[[k, v] for k, v in enumerate(value.per_channel)])
        return Report(value.to_dict(), table=table)

    def _ball_inf(self, cfg: RunConfig) -> Report:
        ball = self._ball(cfg)
        infimum = ball_infimum(ball)
        payload = {
            "alpha": ball.alpha,
            "delta": ball.delta,
            "N": ball.N,
            "K": ball.K,
            "infimum": infimum.to_dict(),
            "partition": classify(ball).to_dict(),
        }
        return Report(payload)

    def _ldp_curve(self, cfg: RunConfig) -> Report:
        ball = self._ball(cfg)
        with_mc = cfg.mc_upto is not None
        sim = None
        if with_mc:
            sim = SimConfig(
                ball.spec, J=log2_exact(ball.N), N=ball.N, seed=cfg.seed, paths=cfg.M, alpha=ball.alpha, workers=cfg.workers
            )
        curve = ldp_curve(ball, cfg.eps_grid, with_mc=with_mc, cfg=sim, mc_upto=cfg.mc_upto)
        for eps in curve.mc_refused:
            self.log.log_error("ldp-curve", f"Monte Carlo refused at eps={eps!r}; exact value reported", extra={"eps": eps})
        payload = curve.to_dict()
        payload["summary"] = convergence_summary(curve)
        return Report(payload, table=Table(header=list(CURVE_CSV_HEADER), rows=curve.csv_rows()))

    def _tightness(self, cfg: RunConfig) -> Report:
        spec = cfg.build_spectrum()
        N = cfg.truncation
        tset = tight_build(cfg.a, spec, cfg.build_divergent(), alpha=cfg.alpha, N=N, lam_bar=cfg.lam_bar)
        sim = SimConfig(spec, J=log2_exact(N), N=N, seed=cfg.seed, paths=cfg.M, alpha=cfg.alpha, workers=cfg.workers)
        report = tight_check(tset, cfg.eps_grid, sim)
        rows = [[p.eps, p.bound, p.mass, p.stderr, p.status] for p in report.points]
        return Report(
            report.to_dict(),
            table=Table(header=["eps", "bound", "mass", "stderr", "status"], rows=rows),
        )

    def _verify(self, cfg: RunConfig) -> Report:
        report = run_acceptance(seed=cfg.seed, workers=cfg.workers)
        rows = [[c.id, c.name, c.status] for c in report.criteria]
        return Report(report.to_dict(), table=Table(header=["criterion", "name", "status"], rows=rows), ok=report.passed)

    def _ball(self, cfg: RunConfig) -> BallSpec:
        require(cfg, "center", "delta")
        center = _load_center(cfg)
        return BallSpec(center=center, delta=float(cfg.delta), spec=cfg.build_spectrum(K=center.K))


_HANDLERS = {
    "basis": Runner._basis,
    "transform": Runner._transform,
    "simulate": Runner._simulate,
    "rate": Runner._rate,
    "ball-inf": Runner._ball_inf,
    "ldp-curve": Runner._ldp_curve,
    "tightness": Runner._tightness,
    "verify": Runner._verify,
}


def _load_center(cfg: RunConfig) -> CoeffMatrix:
    if sniff_csv_kind(cfg.center) == "path":
        coeffs = forward(load_path_csv(cfg.center), cfg.alpha)
    else:
        coeffs = load_coeff_csv(cfg.center, cfg.alpha)
    if "N" in cfg.explicit:
        coeffs = truncate(coeffs, cfg.truncation)
    return coeffs


def _report_goes_to_output(cfg: RunConfig) -> bool:
    # transform and simulate write data files to --out; their report goes to stdout
    return cfg.command not in ("transform", "simulate")


def _simulation_targets(cfg: RunConfig) -> list[Path] | None:
    if not cfg.output:
        return None
    out = Path(cfg.output)
    if cfg.paths == 1:
        return [out]
    width = max(5, int(math.log10(cfg.paths)) + 1)
    return [out / f"path_{i:0{width}d}.csv" for i in range(cfg.paths)]
