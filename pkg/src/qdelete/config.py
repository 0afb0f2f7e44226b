"""Scenario files: flat ``dotted.key = value`` lines, ``#`` comments.

Example::

    machine.kind = delete
    machine.sigma = 1,0, 0,0          # real,imag pairs
    machine.offdiag_rule = passthrough
    basis.grid = 0; pi/2; pi/4:pi/3   # theta or theta:phi, radians
    basis.reference = 0
    tolerance = 1e-10
    output = report.json
"""
from __future__ import annotations

import ast
import math
import operator
from dataclasses import dataclass, replace
from pathlib import Path

from . import machines
from .machines import BranchMachine, LinearChannel
from .protocol import SIGNAL_TOL
from .resources import TWO_PI, QubitBasis

MACHINE_KINDS = ("delete", "erase", "clone", "cptp")
DEFAULT_GRID_POINTS = 64

# keys each machine kind accepts beyond machine.kind
KIND_KEYS = {
    "delete": {"sigma", "ancilla", "offdiag_rule", "offdiag_states", "ancilla_rule", "ancilla_states"},
    "erase": {"sigma"},
    "clone": {"sigma", "ancilla", "ancilla_rule", "ancilla_states"},
    "cptp": {"num_kraus", "seed"},
}
TOP_KEYS = {"basis.grid", "basis.reference", "basis.grid_points", "tolerance", "output"}


class ConfigError(ValueError):
    """Malformed scenario; message names the line and/or field."""


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def parse_angle(text: str) -> float:
    """Radians as a number or a simple ``pi`` expression: ``pi/2``, ``3*pi/4``, ``0.5``."""
    text = text.strip().replace("π", "pi")

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError

    try:
        value = ev(ast.parse(text, mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError):
        raise ConfigError(f"cannot read angle {text!r}") from None
    if not 0.0 <= value < TWO_PI:
        raise ConfigError(f"angle {text!r} = {value!r} outside [0, 2pi)")
    return value


def parse_basis(text: str) -> tuple[float, float]:
    theta, _, phi = text.partition(":")
    return parse_angle(theta), parse_angle(phi) if phi.strip() else 0.0


def parse_amplitudes(text: str) -> tuple[complex, ...]:
    """Comma-separated real,imag pairs."""
    try:
        nums = [float(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise ConfigError(f"non-numeric amplitude in {text!r}") from None
    if len(nums) % 2:
        raise ConfigError(f"odd number of components in {text!r}; expected real,imag pairs")
    return tuple(complex(r, i) for r, i in zip(nums[::2], nums[1::2]))


def _state(text: str, qubits: int, key: str) -> tuple[complex, ...]:
    amps = parse_amplitudes(text)
    if len(amps) != 2**qubits:
        raise ConfigError(f"{key}: need {2**qubits} amplitudes, got {len(amps)}")
    if abs(sum(abs(a) ** 2 for a in amps) - 1) > 1e-12:
        raise ConfigError(f"{key}: state is not normalised")
    return amps


@dataclass(frozen=True)
class ScenarioConfig:
    kind: str
    sigma: tuple[complex, ...] = (1, 0)
    ancilla: tuple[complex, ...] = (1, 0)
    offdiag_rule: str = "passthrough"
    offdiag_states: tuple[tuple[complex, ...], ...] = ()
    ancilla_rule: str = "copy"
    ancilla_states: tuple[tuple[complex, ...], ...] = ()
    num_kraus: int = 2
    seed: int = 0
    bases: tuple[tuple[float, float], ...] | None = None
    reference: tuple[float, float] = (0.0, 0.0)
    grid_points: int = DEFAULT_GRID_POINTS
    tolerance: float = SIGNAL_TOL
    output_path: str | None = None

    def __post_init__(self):
        if self.kind not in MACHINE_KINDS:
            raise ConfigError(f"machine.kind: unknown machine kind {self.kind!r}")
        if self.bases is not None and not self.bases:
            raise ConfigError("basis.grid: at least one basis is required")
        if self.tolerance <= 0:
            raise ConfigError("tolerance: must be > 0")
        if self.grid_points < 1:
            raise ConfigError("basis.grid_points: must be >= 1")
        if self.num_kraus < 1:
            raise ConfigError("machine.num_kraus: must be >= 1")
        if self.offdiag_rule not in ("passthrough", "entangling", "inline"):
            raise ConfigError(f"machine.offdiag_rule: unknown rule {self.offdiag_rule!r}")
        if (self.offdiag_rule == "inline") != bool(self.offdiag_states):
            raise ConfigError("machine.offdiag_states: required exactly when offdiag_rule = inline")
        if self.ancilla_rule not in ("copy", "constant"):
            raise ConfigError(f"machine.ancilla_rule: unknown rule {self.ancilla_rule!r}")
        if (self.ancilla_rule == "constant") != bool(self.ancilla_states):
            raise ConfigError("machine.ancilla_states: required exactly when ancilla_rule = constant")

    def grid(self) -> list[QubitBasis]:
        if self.bases is None:
            return [QubitBasis(TWO_PI * k / self.grid_points) for k in range(self.grid_points)]
        return [QubitBasis(t, p) for t, p in self.bases]

    def reference_basis(self) -> QubitBasis:
        return QubitBasis(*self.reference)

    def build(self) -> BranchMachine | LinearChannel:
        if self.kind == "cptp":
            return machines.random_cptp_channel(self.num_kraus, self.seed)
        if self.kind == "erase":
            return machines.erasure_machine(self.sigma)
        ancilla_rule = None
        if self.ancilla_rule == "constant":
            ancilla_rule = machines.ConstantAncilla(*self.ancilla_states)
        if self.kind == "clone":
            return machines.cloning_machine(ancilla_rule, sigma=self.sigma, ancilla_init=self.ancilla)
        offdiag = self.offdiag_rule
        if offdiag == "inline":
            offdiag = machines.FixedOffdiag(*self.offdiag_states)
        return machines.deleting_machine(self.sigma, self.ancilla, offdiag, ancilla_rule)

    def resolved(self) -> dict:
        """Every setting that affects the run, defaults filled in."""
        out = {
            "machine": {"kind": self.kind},
            "basis": {
                "grid": [list(b) for b in ((g.theta, g.phi) for g in self.grid())],
                "reference": list(self.reference),
            },
            "tolerance": self.tolerance,
        }
        m = out["machine"]
        if self.kind == "cptp":
            m.update(num_kraus=self.num_kraus, seed=self.seed)
        else:
            m["sigma"] = list(self.sigma)
        if self.kind in ("delete", "clone"):
            m.update(ancilla=list(self.ancilla), ancilla_rule=self.ancilla_rule,
                     ancilla_states=[list(s) for s in self.ancilla_states])
        if self.kind == "delete":
            m.update(offdiag_rule=self.offdiag_rule,
                     offdiag_states=[list(s) for s in self.offdiag_states])
        return out


def parse_lines(text: str) -> dict[str, tuple[int, str]]:
    entries: dict[str, tuple[int, str]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        key = key.strip()
        if not eq or not key:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r} (first on line {entries[key][0]})")
        entries[key] = (lineno, value.strip())
    return entries


def parse_config(text: str) -> ScenarioConfig:
    entries = parse_lines(text)
    if "machine.kind" not in entries:
        raise ConfigError("machine.kind: missing")
    kind = entries["machine.kind"][1]
    if kind not in MACHINE_KINDS:
        raise ConfigError(f"line {entries['machine.kind'][0]}: machine.kind: unknown machine kind {kind!r}")
    allowed = TOP_KEYS | {"machine.kind"} | {f"machine.{k}" for k in KIND_KEYS[kind]}
    kwargs: dict = {"kind": kind}
    for key, (lineno, value) in entries.items():
        if key not in allowed:
            raise ConfigError(f"line {lineno}: key {key!r} not valid for machine.kind = {kind}")
        try:
            _assign(kwargs, key, value)
        except ConfigError as exc:
            raise ConfigError(f"line {lineno}: {key}: {exc}") from None
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {key}: {exc}") from None
    return ScenarioConfig(**kwargs)


def _assign(kwargs: dict, key: str, value: str) -> None:
    field_ = key.split(".", 1)[-1]
    if key == "basis.grid":
        kwargs["bases"] = tuple(parse_basis(v) for v in value.split(";") if v.strip())
    elif key == "basis.reference":
        kwargs["reference"] = parse_basis(value)
    elif key == "basis.grid_points":
        kwargs["grid_points"] = int(value)
    elif key == "tolerance":
        kwargs["tolerance"] = float(value)
    elif key == "output":
        kwargs["output_path"] = value
    elif field_ in ("sigma", "ancilla"):
        kwargs[field_] = _state(value, 1, key)
    elif field_ in ("offdiag_rule", "ancilla_rule"):
        kwargs[field_] = value
    elif field_ == "offdiag_states":
        states = tuple(_state(v, 3, key) for v in value.split(";"))
        if len(states) != 2:
            raise ConfigError("need exactly two ';'-separated 3-qubit states")
        kwargs[field_] = states
    elif field_ == "ancilla_states":
        states = tuple(_state(v, 1, key) for v in value.split(";"))
        if len(states) != 2:
            raise ConfigError("need exactly two ';'-separated 1-qubit states")
        kwargs[field_] = states
    elif field_ in ("num_kraus", "seed"):
        kwargs[field_] = int(value)


def load_config(path: str | Path) -> ScenarioConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)


def with_overrides(cfg: ScenarioConfig, *, output=None, seed=None, tolerance=None,
                   grid_points=None) -> ScenarioConfig:
    changes = {}
    if output is not None:
        changes["output_path"] = output
    if seed is not None:
        changes["seed"] = seed
    if tolerance is not None:
        changes["tolerance"] = tolerance
    if grid_points is not None:
        changes.update(grid_points=grid_points, bases=None)
    return replace(cfg, **changes) if changes else cfg
