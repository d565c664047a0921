"""FastAPI service wrapping the laboratory.

Endpoints mirror the CLI surface: suite execution, default
configuration retrieval, decomposition enumeration, a direct
partition-identity check and a small split-step evolution runner.
Long-running suites execute synchronously; clients that need background
behaviour run several service instances.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__, harness
from ..clusters import enumerate_decompositions
from ..errors import ParameterError, ScatterLabError
from ..geometry import MassSystem
from ..potentials import profile_from_config
from ..quantum import GridField, GridSpec, evolve, gaussian_packet
from ..unity import PartitionEvaluator, select_params
from .models import (
    ConfigResponse,
    DecompositionRequest,
    DecompositionResponse,
    EvolveRequest,
    EvolveResponse,
    HealthResponse,
    PartitionCheckRequest,
    PartitionCheckResponse,
    SuiteListResponse,
    SuiteRequest,
    SuiteResponse,
)

app = FastAPI(
    title="scatterlab",
    version=__version__,
    description="Numerical laboratory for many-body scattering geometry",
)


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.get("/suites", response_model=SuiteListResponse)
def suites() -> SuiteListResponse:
    return SuiteListResponse(suites=harness.list_suites())


@app.get("/config/default", response_model=ConfigResponse)
def config_default() -> ConfigResponse:
    return ConfigResponse(config=harness.default_config())


def _resolve_config(request: SuiteRequest) -> dict:
    cfg = harness.load_config(request.config_path)
    for key, value in (request.config or {}).items():
        if isinstance(value, dict) and isinstance(cfg.get(key), dict):
            cfg[key].update(value)
        else:
            cfg[key] = value
    return cfg


@app.post("/suites/{name}", response_model=SuiteResponse)
def run_suite(name: str, request: SuiteRequest) -> SuiteResponse:
    try:
        cfg = _resolve_config(request)
    except ParameterError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    code, report = harness.run_suite(
        name, cfg, seed=request.seed, out_dir=request.out_dir
    )
    if code == 2:
        raise HTTPException(status_code=400, detail=report)
    return SuiteResponse(
        suite=name, exit_code=code, passed=bool(report.get("passed", False)), report=report
    )


@app.post("/partition/verify", response_model=SuiteResponse)
def partition_verify(request: SuiteRequest) -> SuiteResponse:
    return run_suite("partition", request)


@app.post("/orbits/run", response_model=SuiteResponse)
def orbits_run(request: SuiteRequest) -> SuiteResponse:
    return run_suite("orbits", request)


@app.post("/invariance/run", response_model=SuiteResponse)
def invariance_run(request: SuiteRequest) -> SuiteResponse:
    return run_suite("invariance", request)


@app.post("/phase/verify", response_model=SuiteResponse)
def phase_verify(request: SuiteRequest) -> SuiteResponse:
    return run_suite("eikonal", request)


@app.post("/phase/build", response_model=SuiteResponse)
def phase_build(request: SuiteRequest) -> SuiteResponse:
    # the modifier suite persists its phase table next to the report
    return run_suite("modifier", request)


@app.post("/waveop/probe", response_model=SuiteResponse)
def waveop_probe(request: SuiteRequest) -> SuiteResponse:
    return run_suite("waveop", request)


@app.post("/channels/profile", response_model=SuiteResponse)
def channels_profile(request: SuiteRequest) -> SuiteResponse:
    return run_suite("channels", request)


@app.post("/partition/sum", response_model=PartitionCheckResponse)
def partition_sum(request: PartitionCheckRequest) -> PartitionCheckResponse:
    try:
        sysn = MassSystem.equal(request.n_particles, 1)
        params = select_params(request.n_particles, ratio=request.ratio)
        evaluator = PartitionEvaluator(sysn, params)
        pts = np.asarray(request.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != request.n_particles:
            raise ParameterError(
                f"each point must list {request.n_particles} one-dimensional positions"
            )
        r = pts[:, :, None]
        r = r - r.mean(axis=1, keepdims=True)
        total = sum(evaluator.phi(r))
    except ScatterLabError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    return PartitionCheckResponse(
        sums=[float(v) for v in total],
        max_deviation=float(np.max(np.abs(total - 1.0))),
    )


@app.post("/clusters/enumerate", response_model=DecompositionResponse)
def clusters_enumerate(request: DecompositionRequest) -> DecompositionResponse:
    try:
        decs = enumerate_decompositions(request.n_particles, request.cluster_count)
    except ParameterError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    return DecompositionResponse(
        decompositions=[[list(c) for c in a.clusters] for a in decs]
    )


@app.post("/quantum/evolve", response_model=EvolveResponse)
def quantum_evolve(request: EvolveRequest) -> EvolveResponse:
    try:
        spec = GridSpec(1, request.extent, request.points, request.dt)
        field = gaussian_packet(
            spec, request.packet_center, request.packet_momentum, request.packet_width
        )
        potential = None
        if request.potential is not None:
            profile = profile_from_config(request.potential)
            potential = profile.radial(np.abs(spec.axis()))
        n0 = field.norm()
        out = evolve(field, potential, request.duration, request.dt)
    except ScatterLabError as exc:
        raise HTTPException(status_code=400, detail=str(exc))
    snapshot = None
    if request.snapshot_path:
        out.save(request.snapshot_path)
        snapshot = request.snapshot_path
    return EvolveResponse(
        norm_initial=n0,
        norm_final=out.norm(),
        boundary_fraction=out.boundary_fraction(),
        snapshot_path=snapshot,
    )
