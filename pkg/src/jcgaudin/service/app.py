"""HTTP front end: one POST route per handler.

Domain validation problems map to 422, malformed usage to 400, and
numerical failures to 500; every error body carries the exception class
name so clients can branch without parsing prose.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import JcgError, NumericError, UsageError, ValidationError
from ..reporting import configure_logging
from . import handlers as H
from . import schemas as S


def _status(exc: JcgError) -> int:
    if isinstance(exc, UsageError):
        return 400
    if isinstance(exc, ValidationError):
        return 422
    if isinstance(exc, NumericError):
        return 500
    return 500


def create_app() -> FastAPI:
    configure_logging()
    app = FastAPI(title="jcgaudin", version=__version__)

    @app.exception_handler(JcgError)
    async def _jcg_error(request: Request, exc: JcgError) -> JSONResponse:
        return JSONResponse(status_code=_status(exc),
                            content={"error": type(exc).__name__,
                                     "message": str(exc)})

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/bethe", response_model=S.BetheResponse)
    def bethe(req: S.BetheRequest) -> S.BetheResponse:
        return H.handle_bethe(req)

    @app.post("/normal", response_model=S.NormalResponse)
    def normal(req: S.NormalRequest) -> S.NormalResponse:
        return H.handle_normal(req)

    @app.post("/evolve", response_model=S.EvolveResponse)
    def evolve(req: S.EvolveRequest) -> S.EvolveResponse:
        return H.handle_evolve(req)

    @app.post("/soliton", response_model=S.SolitonResponse)
    def soliton(req: S.SolitonRequest) -> S.SolitonResponse:
        return H.handle_soliton(req)

    @app.post("/divisor", response_model=S.DivisorResponse)
    def divisor(req: S.DivisorRequest) -> S.DivisorResponse:
        return H.handle_divisor(req)

    @app.post("/actions", response_model=S.ActionsResponse)
    def actions(req: S.ActionsRequest) -> S.ActionsResponse:
        return H.handle_actions(req)

    @app.post("/invariants", response_model=S.InvariantsResponse)
    def invariants(req: S.InvariantsRequest) -> S.InvariantsResponse:
        return H.handle_invariants(req)

    @app.post("/monodromy", response_model=S.MonodromyResponse)
    def monodromy(req: S.MonodromyRequest) -> S.MonodromyResponse:
        return H.handle_monodromy(req)

    @app.post("/inout", response_model=S.InOutResponse)
    def inout(req: S.InOutRequest) -> S.InOutResponse:
        return H.handle_inout(req)

    @app.post("/reproduce")
    def reproduce(req: S.ReproduceRequest):
        target = req.target.strip().lower()
        if target == "one-spin":
            return H.handle_reproduce_one_spin()
        if target == "fig3":
            return H.handle_reproduce_fig3()
        raise UsageError(f"unknown reproduce target {req.target!r}; "
                         "use one-spin or fig3")

    return app
