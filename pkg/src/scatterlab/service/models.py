"""Pydantic request and response models of the laboratory service."""

from __future__ import annotations

from typing import Any, Optional

from pydantic import BaseModel, Field


class SuiteRequest(BaseModel):
    """Run request: inline config overrides, or a config file path."""

    config: Optional[dict[str, Any]] = Field(
        default=None, description="Section-wise overrides of the default configuration"
    )
    config_path: Optional[str] = Field(
        default=None, description="Path to a JSON configuration file on the server"
    )
    seed: Optional[int] = Field(default=None, description="Master seed override")
    out_dir: Optional[str] = Field(default=None, description="Artifact directory override")


class SuiteResponse(BaseModel):
    suite: str
    exit_code: int
    passed: bool
    report: dict[str, Any]


class SuiteListResponse(BaseModel):
    suites: list[str]


class ConfigResponse(BaseModel):
    config: dict[str, Any]


class PartitionCheckRequest(BaseModel):
    """Direct partition-identity evaluation at caller-supplied points."""

    n_particles: int = Field(ge=2, le=8)
    ratio: float = Field(default=2.0**11, ge=2.0**11)
    points: list[list[float]] = Field(
        description="Centered particle configurations, each flattened over particles"
    )


class PartitionCheckResponse(BaseModel):
    sums: list[float]
    max_deviation: float


class DecompositionRequest(BaseModel):
    n_particles: int = Field(ge=2, le=8)
    cluster_count: Optional[int] = Field(default=None, ge=1)


class DecompositionResponse(BaseModel):
    decompositions: list[list[list[int]]]


class EvolveRequest(BaseModel):
    """One-dimensional split-step evolution of a Gaussian packet."""

    extent: float = Field(gt=0)
    points: int = Field(ge=8)
    duration: float
    dt: float = Field(gt=0)
    packet_center: float = 0.0
    packet_momentum: float = 0.0
    packet_width: float = 1.0
    potential: Optional[dict[str, Any]] = Field(
        default=None, description='Radial profile spec, e.g. {"name": "sech2", "v0": 1}'
    )
    snapshot_path: Optional[str] = None


class EvolveResponse(BaseModel):
    norm_initial: float
    norm_final: float
    boundary_fraction: float
    snapshot_path: Optional[str]


class HealthResponse(BaseModel):
    status: str
    version: str
