"""Pydantic models for every service request and response.

Complex numbers travel as {"re": .., "im": ..} objects throughout; unknown
fields are rejected so that a typo in a config file fails loudly instead
of silently using a default.
"""

from __future__ import annotations

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class Complex(Strict):
    re: float
    im: float = 0.0

    @classmethod
    def of(cls, z) -> "Complex":
        return cls(re=float(np.real(z)), im=float(np.imag(z)))

    def value(self) -> complex:
        return complex(self.re, self.im)


def complex_list(values) -> list[Complex]:
    return [Complex.of(z) for z in np.asarray(values).ravel()]


class ModelConfig(Strict):
    n: int
    s: float
    omega: float = 0.0
    epsilon: list[float]
    signs: list[int] | None = None


class StateDoc(Strict):
    b: Complex
    spins: list[list[float]]


class SolitonDoc(Strict):
    x0: list[Complex]


class WaypointsDoc(Strict):
    waypoints: list[Complex]


# ---------------------------------------------------------------- requests

class BetheRequest(Strict):
    model: ModelConfig


class NormalRequest(Strict):
    model: ModelConfig
    state: StateDoc


class EvolveRequest(Strict):
    model: ModelConfig
    state: StateDoc
    duration: float
    samples: int = 64
    coeffs: list[float] | None = None
    rtol: float = 1e-10
    atol: float = 1e-12


class SolitonRequest(Strict):
    model: ModelConfig
    soliton: SolitonDoc
    times: list[float]


class DivisorRequest(Strict):
    model: ModelConfig
    soliton: SolitonDoc
    duration: float = Field(default=2.0 * np.pi)
    samples: int = 400
    c1: Complex = Field(default_factory=lambda: Complex(re=1e-8, im=0.0))


class ActionsRequest(Strict):
    model: ModelConfig
    state: StateDoc
    cycle: str = "A"
    pair: int = 1
    waypoints: list[Complex] | None = None
    samples: int = 2048


class InvariantsRequest(Strict):
    model: ModelConfig
    focus: int = 1


class MonodromyRequest(Strict):
    model: ModelConfig
    focus: int = 1
    loop: int = 1
    radius: float | None = None
    samples: int = 4096


class InOutRequest(Strict):
    model: ModelConfig
    delta: float
    c1: Complex
    spectators: list[Complex] | None = None


class ReproduceRequest(Strict):
    target: str


# --------------------------------------------------------------- responses

class WilliamsonDoc(Strict):
    me: int
    mff: int


class BetheResponse(Strict):
    roots: list[Complex]
    pairing: list[int]
    williamson: WilliamsonDoc
    aprime: list[Complex]
    signs: list[int]


class NormalResponse(Strict):
    z: list[Complex]
    w: list[Complex]
    K: list[float]
    L: list[float]


class EvolveResponse(Strict):
    times: list[float]
    states: list[StateDoc]
    hamiltonians: list[list[float]]


class SolitonResponse(Strict):
    state: StateDoc
    hamiltonians: list[float]


class DivisorRow(Strict):
    t: float
    gap: bool
    lambdas: list[Complex]


class DivisorResponse(Strict):
    rows: list[DivisorRow]


class ActionsResponse(Strict):
    value: Complex
    converged: bool
    samples_used: int


class InvariantsResponse(Strict):
    j: int
    rho: float
    gamma: float
    rho_z: list[Complex]
    rho_w: list[Complex]
    alpha: list[float]
    beta: list[float]
    omega_reg: list[float]
    phi0: Complex | None = None
    time_lapse: float | None = None


class MonodromyResponse(Strict):
    value: float
    focus: int
    loop: int
    radius: float
    samples: int


class InOutResponse(Strict):
    delta: float
    c1_in: Complex
    c1_out: Complex
    phi0: Complex
    phi0_predicted: Complex
    time_lapse: float
    tau: float
    rho_z: list[Complex]
    rho_w: list[Complex]
    rho_z_exact: list[Complex]


class ReproduceCheck(Strict):
    name: str
    measured: float
    expected: float
    passed: bool


class ReproduceResponse(Strict):
    target: str
    passed: bool
    checks: list[ReproduceCheck]
