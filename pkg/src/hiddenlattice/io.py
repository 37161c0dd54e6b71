"""JSON instance files. Every integer is written as a decimal string."""

import json
from fractions import Fraction

from .errors import InvalidInstance
from .lattice import LatticeBasis
from .linalg import IntegerMatrix
from .solvers import HlpInstance, NhlpInstance, Planted

SCHEMA_VERSION = 1


def _enc_rows(B):
    rows = B.rows if hasattr(B, "rows") else B
    return [[str(int(x)) for x in row] for row in rows]


def _dec_rows(rows):
    return LatticeBasis(IntegerMatrix([[int(x) for x in row] for row in rows]), check=False)


def _enc_any(x):
    if isinstance(x, bool) or x is None or isinstance(x, (float, str)):
        return x
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {k: _enc_any(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_enc_any(v) for v in x]
    return x


def _dec_any(x):
    if isinstance(x, str):
        try:
            return int(x)
        except ValueError:
            return x
    if isinstance(x, dict):
        return {k: _dec_any(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_dec_any(v) for v in x]
    return x


def instance_to_dict(inst):
    d = {
        "schema_version": SCHEMA_VERSION,
        "kind": inst.kind,
        "m": inst.m,
        "n": inst.n,
        "r": inst.r,
        "N": str(inst.N),
    }
    if isinstance(inst, NhlpInstance):
        d["W_basis"] = _enc_rows(inst.W_basis)
        d["rho"] = inst.rho
    else:
        d["M_basis"] = _enc_rows(inst.M_basis)
        if inst.factorization:
            d["factorization"] = [str(p) for p in inst.factorization]
    p = inst.planted
    if p is not None:
        pd = {"L_basis": _enc_rows(p.L_basis), "mu_sq": str(p.mu_sq)}
        if p.seed is not None:
            pd["seed"] = str(p.seed)
        if p.coeffs is not None:
            pd["coeffs"] = _enc_rows(p.coeffs)
        if p.X_basis is not None:
            pd["X_basis"] = _enc_rows(p.X_basis)
        if p.extra:
            pd["extra"] = _enc_any(p.extra)
        d["planted"] = pd
    return d


def instance_from_dict(d):
    version = d.get("schema_version")
    if version != SCHEMA_VERSION:
        raise InvalidInstance(f"unsupported schema_version {version!r}")
    try:
        m, n, r, N = int(d["m"]), int(d["n"]), int(d["r"]), int(d["N"])
        planted = None
        if "planted" in d:
            pd = d["planted"]
            planted = Planted(
                L_basis=_dec_rows(pd["L_basis"]),
                mu_sq=Fraction(pd["mu_sq"]),
                seed=int(pd["seed"]) if "seed" in pd else None,
                coeffs=[[int(x) for x in row] for row in pd["coeffs"]] if "coeffs" in pd else None,
                X_basis=_dec_rows(pd["X_basis"]) if "X_basis" in pd else None,
                extra=_dec_any(pd.get("extra", {})),
            )
        if d["kind"] == "nhlp":
            return NhlpInstance(m, n, r, N, _dec_rows(d["W_basis"]), d["rho"], planted)
        fact = tuple(int(p) for p in d["factorization"]) if "factorization" in d else None
        return HlpInstance(m, n, r, N, _dec_rows(d["M_basis"]), planted, factorization=fact, kind=d["kind"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInstance(f"malformed instance file: {exc}") from exc


def dumps_instance(inst):
    return json.dumps(instance_to_dict(inst), indent=1)


def loads_instance(text):
    return instance_from_dict(json.loads(text))


def save_instance(inst, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_instance(inst))
        fh.write("\n")


def load_instance(path):
    with open(path, encoding="utf-8") as fh:
        return loads_instance(fh.read())


def load_basis_rows(rows):
    """Rows of decimal strings (as in a solve report) to a LatticeBasis."""
    return _dec_rows(rows)
