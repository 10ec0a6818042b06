"""Command-line batch driver.

Each subcommand reads a JSON config (``--config``) and flag overrides (flags
win), runs one computation, and writes either CSV rows with a header or a
JSON document.  Exit status: 0 when every embedded check passes, 1 when a
check fails, 2 on parse or validation errors.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import os
import sys
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import DoubledSpin, spin_operators, super_operators, verify_su2, verify_superalgebra
from .dyson import SPIN_VARIANTS, SUPER_VARIANTS, VARIANTS, anti_dyson_factors, dyson_factors, map_spin, map_super, super_factors
from .errors import DysonizeError
from .lattice import square_cluster
from .models import HamiltonianSpec, build_hamiltonian, transcription_audit
from .spectral import compare_spectra, self_adjointness_residual, spectrum, susy_point_sweep

COMMANDS = ("verify-algebra", "factors", "build", "spectrum", "compare", "susy-scan", "audit")
FORMATS = ("rows", "structured")
OUTPUT_DIR_ENV = "DYSONIZE_OUTPUT_DIR"
DEFAULT_TAUS = tuple(round(0.1 * k, 12) for k in range(1, 10))


@dataclass(frozen=True)
class RunConfig:
    command: str
    model: str = "heisenberg_FM"
    representation: str = "spin"
    model_b: str | None = None
    representation_b: str = "mapped_substituted"
    J: float = 1.0
    tau: float = 0.0
    two_s: int = 1
    lx: int = 2
    ly: int = 1
    boundary: str = "open"
    algebra: str = "su2"
    include_mapped: bool = False
    variant: str | None = None
    tau_values: tuple = DEFAULT_TAUS
    tolerance: float = 1e-12
    spectral_tolerance: float = 1e-9
    susy_zero_tolerance: float = 1e-10
    susy_gap_tolerance: float = 1e-4
    output_path: str | None = None
    output_format: str = "rows"

    _GROUPS = {
        "spec": ("model", "representation", "model_b", "representation_b", "J", "tau", "two_s"),
        "cluster": ("lx", "ly", "boundary"),
        "algebra": ("algebra", "include_mapped", "variant"),
        "sweep": ("tau_values",),
        "tolerance": ("tolerance", "spectral_tolerance", "susy_zero_tolerance", "susy_gap_tolerance"),
        "output": ("output_path", "output_format"),
    }

    def __post_init__(self):
        object.__setattr__(self, "tau_values", tuple(float(t) for t in self.tau_values))
        for name in ("J", "tau", "tolerance", "spectral_tolerance", "susy_zero_tolerance", "susy_gap_tolerance"):
            object.__setattr__(self, name, float(getattr(self, name)))
        for name in ("two_s", "lx", "ly"):
            object.__setattr__(self, name, int(getattr(self, name)))

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.output_format not in FORMATS:
            raise ValueError(f"output_format must be one of {FORMATS}")
        if self.algebra not in ("su2", "super", "both"):
            raise ValueError("algebra must be su2, super or both")
        if self.variant is not None and self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        DoubledSpin(self.two_s).require_physical()
        return self

    def to_dict(self) -> dict:
        d = {"command": self.command}
        for group, names in self._GROUPS.items():
            d[group] = {n: list(v) if isinstance(v := getattr(self, n), tuple) else v for n in names}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        flat = {"command": d["command"]}
        known = {f.name for f in dataclasses.fields(cls)}
        for key, value in d.items():
            if key == "command":
                continue
            if key in cls._GROUPS and isinstance(value, dict):
                for n, v in value.items():
                    if n not in cls._GROUPS[key]:
                        raise ValueError(f"unknown key {key}.{n}")
                    flat[n] = v
            elif key in known:
                flat[key] = value
            else:
                raise ValueError(f"unknown key {key!r}")
        return cls(**flat)

    def spec(self, which: str = "a") -> HamiltonianSpec:
        model = self.model if which == "a" or self.model_b is None else self.model_b
        rep = self.representation if which == "a" else self.representation_b
        return HamiltonianSpec(model, rep, self.J, self.tau, DoubledSpin(self.two_s))

    def cluster(self):
        return square_cluster(self.lx, self.ly, self.boundary)


@dataclass
class Result:
    header: tuple
    rows: list
    document: dict
    failures: list = field(default_factory=list)


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if v is None:
        return ""
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, float) and not np.isfinite(v):
        return str(v)
    return v


# ---------------------------------------------------------------------------

def _verify_algebra(cfg: RunConfig) -> Result:
    s = DoubledSpin(cfg.two_s)
    sets = []
    if cfg.algebra in ("su2", "both"):
        sets.append(("spin", "su2", spin_operators(s)))
        if cfg.include_mapped:
            sets += [(v, "su2", map_spin(s, v)) for v in SPIN_VARIANTS]
    if cfg.algebra in ("super", "both"):
        sets.append(("super", "super", super_operators(s)))
        if cfg.include_mapped:
            sets += [(v, "super", map_super(s, v)) for v in SUPER_VARIANTS]
    rows, failures = [], []
    for set_name, kind, ops in sets:
        check = verify_su2 if kind == "su2" else verify_superalgebra
        for r in check(ops, cfg.tolerance):
            rows.append((set_name, r.relation_name, r.residual, r.tolerance, r.passed))
            if not r.passed:
                failures.append(f"relation {r.relation_name} fails on {set_name} (residual {r.residual:.3e})")
    header = ("operator_set", "relation", "residual", "tolerance", "passed")
    return Result(header, rows, {"relations": [dict(zip(header, r)) for r in rows]}, failures)


def _factors(cfg: RunConfig) -> Result:
    s = DoubledSpin(cfg.two_s)
    tables = []
    for v in ([cfg.variant] if cfg.variant else VARIANTS):
        if v == "dyson":
            tables.append(dyson_factors(s))
        elif v == "anti_dyson":
            tables.append(anti_dyson_factors(s))
        else:
            tables += [super_factors(s, a, v) for a in (0, 1)]
    rows = [(t.variant, "" if t.fermion_sector is None else t.fermion_sector, u, val)
            for t in tables for u, val in enumerate(t.values)]
    doc = {"tables": [{"variant": t.variant, "two_s": t.two_s, "fermion_sector": t.fermion_sector,
                       "values": list(t.values)} for t in tables]}
    return Result(("variant", "fermion_sector", "u", "value"), rows, doc)


def _build(cfg: RunConfig) -> Result:
    spec, c = cfg.spec(), cfg.cluster()
    h, g = build_hamiltonian(spec, c)
    dyn = self_adjointness_residual(h, g)
    kin = self_adjointness_residual(h, None)
    failures = []
    if dyn > cfg.tolerance:
        failures.append(f"metric self-adjointness residual {dyn:.3e} exceeds {cfg.tolerance:.1e}")
    doc = {"spec": spec.to_dict(), "cluster": c.to_dict(), "dim": h.dim, "site_dims": list(h.site_dims),
           "basis_id": h.basis_id, "n_terms": h.metadata["n_terms"], "flags": list(spec.flags),
           "residual_dynamical": dyn, "residual_kinematic": kin}
    rows = [(k, doc[k]) for k in ("dim", "n_terms", "residual_dynamical", "residual_kinematic")]
    rows += [("flag", f) for f in spec.flags]
    return Result(("quantity", "value"), rows, doc, failures)


def _spectrum_of(spec: HamiltonianSpec, c):
    h, g = build_hamiltonian(spec, c)
    return spectrum(h, g if spec.mapped else None, method="hermitized")


def _spectrum(cfg: RunConfig) -> Result:
    spec = cfg.spec()
    sp = _spectrum_of(spec, cfg.cluster())
    rows = [(i, z.real, z.imag) for i, z in enumerate(sp.eigenvalues)]
    return Result(("index", "real", "imag"), rows, {"spec": spec.to_dict(), "spectrum": sp.to_dict()})


def _compare(cfg: RunConfig) -> Result:
    c = cfg.cluster()
    a, b = cfg.spec("a"), cfg.spec("b")
    rep = compare_spectra(_spectrum_of(a, c), _spectrum_of(b, c), cfg.spectral_tolerance)
    header = ("max_abs_difference", "matched", "tolerance", "dim_a", "dim_b", "note")
    failures = [] if rep.matched else [f"spectra differ: {rep.note or f'max |diff| {rep.max_abs_difference:.3e}'}"]
    doc = {"spec_a": a.to_dict(), "spec_b": b.to_dict(), "report": rep.to_dict()}
    return Result(header, [tuple(getattr(rep, k) for k in header)], doc, failures)


def _susy_scan(cfg: RunConfig) -> Result:
    model = cfg.model if cfg.model in ("tJ_ferro", "tJ_AF") else "tJ_ferro"
    table = susy_point_sweep(cfg.cluster(), DoubledSpin(cfg.two_s), cfg.J, cfg.tau_values, model)
    names = [n for n, _ in table[0].norms] if table else []
    rows, failures = [], []
    for r in table:
        special = np.isclose(abs(2 * r.tau), abs(cfg.J), rtol=0, atol=1e-12)
        ok = r.max_norm < cfg.susy_zero_tolerance if special else r.max_norm > cfg.susy_gap_tolerance
        if not ok:
            want = f"< {cfg.susy_zero_tolerance:.0e}" if special else f"> {cfg.susy_gap_tolerance:.0e}"
            failures.append(f"susy sweep at tau={r.tau:g}: max commutator norm {r.max_norm:.3e}, expected {want}")
        rows.append((r.tau, r.max_norm, bool(special), bool(ok)) + tuple(n for _, n in r.norms))
    header = ("tau", "max_norm", "susy_point", "passed") + tuple(f"norm_{n}" for n in names)
    doc = {"model": model, "J": cfg.J, "two_s": cfg.two_s, "rows": [dict(zip(header, r)) for r in rows]}
    return Result(header, rows, doc, failures)


def _audit(cfg: RunConfig) -> Result:
    spec = cfg.spec().replace(representation="mapped_transcribed")
    audit = transcription_audit(spec, cfg.cluster(), cfg.tolerance)
    rows = [("degree", r.degree, r.substituted_norm, r.transcribed_norm, r.discrepancy) for r in audit.rows]
    rows += [("term", label, "", n, "") for label, n in audit.term_norms]
    rows.append(("total", "", "", "", audit.residual))
    failures = []
    if spec.model == "heisenberg_FM" and not audit.exact:
        failures.append(f"ferromagnet transcription residual {audit.residual:.3e} exceeds {cfg.tolerance:.1e}")
    header = ("kind", "key", "substituted_norm", "transcribed_norm", "discrepancy")
    return Result(header, rows, audit.to_dict(), failures)


_HANDLERS = {
    "verify-algebra": _verify_algebra,
    "factors": _factors,
    "build": _build,
    "spectrum": _spectrum,
    "compare": _compare,
    "susy-scan": _susy_scan,
    "audit": _audit,
}


def render(result: Result, fmt: str) -> str:
    if fmt == "structured":
        return json.dumps(_jsonable(result.document), sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(result.header)
    writer.writerows([_fmt(v) for v in row] for row in result.rows)
    return buf.getvalue()


def run(cfg: RunConfig) -> tuple[int, Result]:
    cfg.validate()
    result = _HANDLERS[cfg.command](cfg)
    return (1 if result.failures else 0), result


# ---------------------------------------------------------------------------

class _ParseError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _ParseError(message)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dysonize", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--model")
    p.add_argument("--representation")
    p.add_argument("--model-b", dest="model_b")
    p.add_argument("--representation-b", dest="representation_b")
    p.add_argument("--J", dest="J", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--two-s", dest="two_s", type=int)
    p.add_argument("--lx", type=int)
    p.add_argument("--ly", type=int)
    p.add_argument("--boundary", choices=("open", "periodic"))
    p.add_argument("--algebra", choices=("su2", "super", "both"))
    p.add_argument("--include-mapped", dest="include_mapped", action="store_const", const=True)
    p.add_argument("--variant", choices=VARIANTS)
    p.add_argument("--tau-values", dest="tau_values", help="comma-separated list")
    p.add_argument("--tolerance", type=float)
    p.add_argument("--spectral-tolerance", dest="spectral_tolerance", type=float)
    p.add_argument("--output", dest="output_path")
    p.add_argument("--format", dest="output_format", choices=FORMATS)
    return p


def load_config(argv: Sequence[str]) -> RunConfig:
    ns = _parser().parse_args(argv)
    base: dict = {"command": ns.command}
    if ns.config:
        try:
            with open(ns.config) as fh:
                base = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise _ParseError(f"cannot read config {ns.config}: {exc}") from None
        base["command"] = ns.command
    cfg = RunConfig.from_dict(base)
    overrides = {k: v for k, v in vars(ns).items() if k not in ("command", "config") and v is not None}
    if "tau_values" in overrides:
        text = overrides["tau_values"].strip()
        try:
            overrides["tau_values"] = tuple(float(t) for t in text.split(",")) if text else ()
        except ValueError:
            raise _ParseError(f"bad --tau-values {text!r}") from None
    return dataclasses.replace(cfg, **overrides)


def _output_target(cfg: RunConfig) -> str | None:
    if cfg.output_path:
        return cfg.output_path
    directory = os.environ.get(OUTPUT_DIR_ENV)
    if directory:
        ext = "csv" if cfg.output_format == "rows" else "json"
        return os.path.join(directory, f"{cfg.command}.{ext}")
    return None


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = load_config(argv)
        cfg.validate()
    except _ParseError as exc:
        print(f"error: parse: {exc}", file=sys.stderr)
        return 2
    except (DysonizeError, ValueError, TypeError, KeyError) as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return 2
    try:
        status, result = run(cfg)
    except DysonizeError as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return 2
    text = render(result, cfg.output_format)
    target = _output_target(cfg)
    if target:
        os.makedirs(os.path.dirname(os.path.abspath(target)), exist_ok=True)
        with open(target, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    for reason in result.failures:
        print(f"check failed: {reason}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
