from __future__ import annotations

"""
Local-only FastAPI application exposing status, logs and small numerical queries.

The middleware rejects non-local clients to keep the API strictly on localhost.
Requests are answered one at a time from the core modules; nothing here steers a
running computation.
"""

import math
from typing import Any

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, ConfigDict, Field

from schauder_ldp import __version__
from schauder_ldp.core.ciesielski import CoeffMatrix
from schauder_ldp.core.dyadic_basis import haar_eval, index_info, schauder_eval, weight
from schauder_ldp.core.ldp import BallSpec, ball_infimum, classify, exact_log_prob
from schauder_ldp.core.rate import rate_total
from schauder_ldp.core.spectrum import spectrum_from_descriptor
from schauder_ldp.engine.runner import Runner
from schauder_ldp.errors import SchauderLDPError


LOCAL_HOSTS = frozenset({"127.0.0.1", "::1", "localhost"})


class BasisEvalRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int = Field(ge=0)
    t: float = Field(ge=0.0, le=1.0)
    alpha: float = Field(0.4, gt=0.0, lt=1.0)


class CoefficientRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    raw: list[list[float]] | None = None
    scaled: list[list[float]] | None = None
    alpha: float = Field(0.4, gt=0.0, lt=1.0)
    spectrum: dict[str, Any] = Field(default_factory=lambda: {"kind": "geometric", "lambda0": 0.5, "ratio": 0.5})

    def coeffs(self) -> CoeffMatrix:
        if (self.raw is None) == (self.scaled is None):
            raise _RequestError("give exactly one of raw or scaled coefficients")
        if self.raw is not None:
            return CoeffMatrix.from_raw(np.array(self.raw, dtype=float), self.alpha)
        return CoeffMatrix.from_scaled(np.array(self.scaled, dtype=float), self.alpha)


class BallRequest(CoefficientRequest):
    delta: float = Field(gt=0.0)


class ExactLogProbRequest(BallRequest):
    eps: float = Field(gt=0.0)


class _RequestError(SchauderLDPError, ValueError):
    pass


def create_app(runner: Runner, allowed_hosts: frozenset[str] | set[str] = LOCAL_HOSTS) -> FastAPI:
    app = FastAPI(title="Schauder LDP", version=__version__)
    hosts = frozenset(allowed_hosts)

    @app.middleware("http")
    async def localhost_only(request: Request, call_next):  # type: ignore[no-untyped-def]
        try:
            client = request.client
            host = client.host if client else ""
            if host not in hosts:
                return JSONResponse(status_code=403, content={"detail": "Localhost only."})
        except Exception:
            return JSONResponse(status_code=403, content={"detail": "Localhost only."})
        return await call_next(request)

    @app.exception_handler(SchauderLDPError)
    async def domain_error(_request: Request, ex: SchauderLDPError) -> JSONResponse:
        return JSONResponse(status_code=422, content={"ok": False, "error": type(ex).__name__, "message": str(ex)})

    @app.get("/status")
    def status() -> dict[str, Any]:
        return {"ok": True, "service": runner.status()}

    @app.get("/logs")
    def logs(limit: int = 200) -> dict[str, Any]:
        safe_limit = max(1, min(int(limit), 2000))
        return {"ok": True, "logs": runner.logs(limit=safe_limit)}

    @app.post("/basis/eval")
    def basis_eval(req: BasisEvalRequest) -> dict[str, Any]:
        info = index_info(req.n)
        return {
            "ok": True,
            "n": req.n,
            "k_level": info.k,
            "l_shift": info.l,
            "t": req.t,
            "haar": haar_eval(req.n, req.t),
            "schauder": schauder_eval(req.n, req.t),
            "weight": weight(req.n, req.alpha),
        }

    @app.post("/rate")
    def rate(req: CoefficientRequest) -> dict[str, Any]:
        coeffs = req.coeffs()
        value = rate_total(coeffs, spectrum_from_descriptor(req.spectrum, coeffs.K))
        return {"ok": True, **_finite_json(value.to_dict())}

    @app.post("/ball-inf")
    def ball_inf(req: BallRequest) -> dict[str, Any]:
        ball = _ball(req)
        return {
            "ok": True,
            "infimum": _finite_json(ball_infimum(ball).to_dict()),
            "partition": classify(ball).to_dict(),
        }

    @app.post("/exact-log-prob")
    def exact(req: ExactLogProbRequest) -> dict[str, Any]:
        return {"ok": True, **_finite_json(exact_log_prob(_ball(req), req.eps).to_dict())}

    return app


def _ball(req: BallRequest) -> BallSpec:
    coeffs = req.coeffs()
    return BallSpec(center=coeffs, delta=req.delta, spec=spectrum_from_descriptor(req.spectrum, coeffs.K))


def _finite_json(obj: Any) -> Any:
    # JSON responses carry infinities as strings, same as the CLI reports
    if isinstance(obj, float) and not math.isfinite(obj):
        return "nan" if math.isnan(obj) else ("inf" if obj > 0 else "-inf")
    if isinstance(obj, dict):
        return {k: _finite_json(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_finite_json(v) for v in obj]
    return obj
