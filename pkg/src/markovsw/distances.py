"""Named distance specifications shared by the flow engine and the CLI."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .exact_ot import exact_wasserstein
from .max_sw import AscentConfig, max_ksw, max_sw
from .msw import (InputAwareDeterministic, InputAwareVmf, MswConfig, OrthogonalBased, RandomWalk,
                  chain_directions)
from .sw import ksw_directions, sliced_distance, sw_directions

KINDS = ("sw", "max-sw", "ksw", "max-ksw", "msw-r", "msw-o", "msw-i", "msw-vi", "exact")

# hyperparameters each kind actually reads, in display order
_PARAMS = {
    "sw": ("L",),
    "max-sw": ("T", "eta"),
    "ksw": ("L", "K"),
    "max-ksw": ("K", "T", "eta"),
    "msw-r": ("L", "T", "kappa", "M", "N"),
    "msw-o": ("L", "T", "M", "N"),
    "msw-i": ("L", "T", "eta", "M", "N"),
    "msw-vi": ("L", "T", "eta", "kappa", "M", "N"),
    "exact": (),
}


@dataclass(frozen=True)
class DistanceSpec:
    """One estimator and its hyperparameters.

    ``T`` is the chain length for MSW variants and the ascent length for
    Max-SW / Max-K-SW; ``eta`` is the direction step size in both cases.
    """

    kind: str = "sw"
    p: float = 2.0
    L: int = 10
    T: int = 5
    K: int = 2
    eta: float = 0.1
    kappa: float = 50.0
    M: int = 0
    N: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown distance {self.kind!r}; expected one of {', '.join(KINDS)}")
        if not self.p >= 1:
            raise ValueError(f"order p must be >= 1, got {self.p}")
        if self.kind in ("msw-r", "msw-o", "msw-i", "msw-vi"):
            self.msw_config(0)  # validates L, T, M, N, eta, kappa

    @property
    def sliced(self) -> bool:
        return self.kind != "exact"

    def describe(self) -> dict:
        out = {"kind": self.kind, "p": self.p}
        out.update({k: getattr(self, k) for k in _PARAMS[self.kind]})
        return out

    def label(self) -> str:
        args = " ".join(f"{k}={getattr(self, k)}" for k in _PARAMS[self.kind])
        return f"{self.kind}({args})"

    def msw_config(self, seed: int) -> MswConfig:
        kernel = {
            "msw-r": lambda: RandomWalk(self.kappa),
            "msw-o": OrthogonalBased,
            "msw-i": lambda: InputAwareDeterministic(self.eta),
            "msw-vi": lambda: InputAwareVmf(self.eta, self.kappa),
        }[self.kind]()
        return MswConfig(L=self.L, T=self.T, p=self.p, transition=kernel, burn=self.M, thin=self.N, seed=seed)

    def directions(self, mu, nu, seed: int) -> np.ndarray:
        """The projection directions this estimator evaluates, as rows."""
        kind = self.kind
        if kind == "sw":
            return sw_directions(mu.d, self.L, seed)
        if kind == "ksw":
            return ksw_directions(mu.d, self.L, self.K, seed)
        if kind == "max-sw":
            return max_sw(mu, nu, self.p, AscentConfig(self.T, self.eta, seed))[1][None, :]
        if kind == "max-ksw":
            return max_ksw(mu, nu, self.p, self.K, AscentConfig(self.T, self.eta, seed))[1]
        if kind.startswith("msw"):
            return chain_directions(mu, nu, self.msw_config(seed), kept_only=True)
        raise ValueError("the exact distance has no projection directions")

    def evaluate(self, mu, nu, seed: int) -> float:
        if self.kind == "exact":
            return exact_wasserstein(mu, nu, self.p)
        return sliced_distance(mu, nu, self.directions(mu, nu, seed), self.p)


def spec_from_dict(d: dict) -> DistanceSpec:
    return DistanceSpec(**d)


def spec_to_dict(spec: DistanceSpec) -> dict:
    return asdict(spec)
