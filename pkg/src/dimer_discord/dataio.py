"""File ingestion, material presets, and result serialization.

CSV files are UTF-8, ``#`` starts a comment line, a header line is
required, and columns are picked out by name (extra columns are ignored,
which lets result files round-trip as correlator input):

* susceptibility:  ``T_K,chi_emu_per_mol[,sigma_chi]``   (emu/mol, CGS)
* specific heat:   ``T_K,cm_over_R[,sigma]``  (dimensionless; the unit tag
  ``cm_J_per_mol_K`` is also accepted and divided by R on load)
* correlator:      ``T_K,G[,sigma_G]``

Everything is normalized on load: rows sorted by temperature, per-monomer
values doubled to per-dimer (susceptibility and specific heat are
extensive; a correlator is not and refuses the flag), J/(mol K) converted
to multiples of R.  Downstream code therefore only ever sees per-dimer,
per-R series.
"""

import json
import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dimer_core import DimerParameters, measures_from_correlator
from .errors import DataError, DomainError, InconsistencyError
from .numerics import ValueWithUncertainty, propagate_uncertainty

__all__ = [
    "R_GAS",
    "MeasurementSeries",
    "MaterialPreset",
    "PRESETS",
    "preset",
    "ResultRecord",
    "result_from_correlator",
    "load_series",
    "write_results",
    "parse_value_with_uncertainty",
]

R_GAS = 8.31446261815324  # J/(mol K), exact; converts cm_J_per_mol_K columns

_CHANNELS = ("neutron", "calorimetric", "magnetometric", "theory")

# value-column tags accepted per series kind; first entry is canonical
_VALUE_TAGS = {
    "susceptibility": ("chi_emu_per_mol",),
    "specific_heat": ("cm_over_R", "cm_J_per_mol_K"),
    "correlator": ("G",),
}
_SIGMA_TAGS = {
    "susceptibility": "sigma_chi",
    "specific_heat": "sigma",
    "correlator": "sigma_G",
}


@dataclass(eq=False)
class MeasurementSeries:
    """One experimental curve, already normalized per mole of dimers."""

    kind: str
    temperatures: np.ndarray
    values: np.ndarray
    sigmas: np.ndarray | None
    units: str
    normalization: str = "per_dimer"

    def __len__(self) -> int:
        return int(self.temperatures.size)


@dataclass(frozen=True)
class MaterialPreset:
    """Fitted parameters for a material, as published."""

    name: str
    j_over_kb: float
    g_factor: float | None
    note: str

    @property
    def parameters(self) -> DimerParameters:
        return DimerParameters(self.j_over_kb, self.g_factor)


PRESETS = {
    p.name: p
    for p in (
        MaterialPreset(
            "copper-nitrate-calorimetric",
            -2.59,
            None,
            "Cu(NO3)2 . 2.5 H2O, coupling from low-temperature calorimetry",
        ),
        MaterialPreset(
            "copper-nitrate-magnetometric",
            -2.56,
            2.11,
            "Cu(NO3)2 . 2.5 H2O, coupling and g from susceptibility",
        ),
        MaterialPreset(
            "copper-acetate-hydrate",
            -204.0,
            2.13,
            "Cu2(CH3COO)4 . 2 H2O, strongly coupled dimer",
        ),
        MaterialPreset(
            "copper-acetate-anhydrous",
            -216.0,
            2.17,
            "anhydrous Cu2(CH3COO)4",
        ),
        MaterialPreset(
            "cu2l-oac-ferro",
            35.4,
            2.13,
            "[Cu2L(OAc)] . 6 H2O, ferromagnetically coupled pair",
        ),
    )
}


def preset(name: str) -> MaterialPreset:
    """Look up a material preset by name."""
    try:
        return PRESETS[name]
    except KeyError:
        known = ", ".join(sorted(PRESETS))
        raise DataError(f"unknown preset {name!r}; available: {known}") from None


@dataclass(frozen=True)
class ResultRecord:
    """One output row: a correlator and everything derived from it."""

    t: float
    correlator: ValueWithUncertainty
    discord: ValueWithUncertainty
    classical: float
    mutual_information: float
    entanglement: float
    channel: str

    def __post_init__(self):
        if self.channel not in _CHANNELS:
            raise DataError(f"channel must be one of {_CHANNELS}, got {self.channel!r}")
        if abs(self.discord.value - (self.mutual_information - self.classical)) > 1e-12:
            raise InconsistencyError(
                "discord does not equal mutual information minus classical correlation"
            )


def result_from_correlator(
    t: float, g: ValueWithUncertainty, channel: str
) -> ResultRecord:
    """Expand a correlator (with its error bar) into a full record.

    The discord sigma is propagated by the symmetric secant rule; the other
    measures are reported at the central value only.
    """
    m = measures_from_correlator(g.value)

    def discord_of(x: float) -> float:
        return measures_from_correlator(x).discord

    q = propagate_uncertainty(discord_of, g) if g.sigma > 0.0 else ValueWithUncertainty(m.discord)
    return ResultRecord(
        t=t,
        correlator=g,
        discord=q,
        classical=m.classical,
        mutual_information=m.mutual_information,
        entanglement=m.entanglement,
        channel=channel,
    )


# ---------------------------------------------------------------------------
# reading


def _parse_float(token: str, path: str, line_no: int, column: str) -> float:
    try:
        v = float(token)
    except ValueError:
        raise DataError(
            f"{path}:{line_no}: column {column!r} has non-numeric value {token!r}"
        ) from None
    if not math.isfinite(v):
        raise DataError(f"{path}:{line_no}: column {column!r} is not finite")
    return v


def load_series(
    path: str | Path,
    kind: str,
    *,
    units: str | None = None,
    normalization: str = "per_dimer",
) -> MeasurementSeries:
    """Read one measured curve from a CSV file.

    Parameters
    ----------
    path : str or Path
        File in the schema described in the module docstring.
    kind : {"susceptibility", "specific_heat", "correlator"}
        Which curve the file holds; decides the value column looked for.
    units : str, optional
        Expected unit tag.  Defaults to whichever accepted tag the header
        carries; passing it makes a mismatch an error instead of a guess.
    normalization : {"per_dimer", "per_monomer"}
        How the file is normalized.  Per-monomer values (and sigmas) are
        doubled on load; temperatures are never touched.  A correlator is
        a per-bond quantity, so ``per_monomer`` is rejected for it.
    """
    if kind not in _VALUE_TAGS:
        raise DataError(f"kind must be one of {tuple(_VALUE_TAGS)}, got {kind!r}")
    if normalization not in ("per_dimer", "per_monomer"):
        raise DataError(f"normalization must be per_dimer or per_monomer, got {normalization!r}")
    if normalization == "per_monomer" and kind == "correlator":
        raise DataError("a correlator has no per-monomer form; it is not extensive")
    accepted = _VALUE_TAGS[kind]
    if units is not None and units not in accepted:
        raise DataError(f"unknown unit tag {units!r} for {kind}; accepted: {accepted}")

    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {p}: {exc}") from exc

    header: list[str] | None = None
    rows: list[tuple[float, float, float | None]] = []
    t_col = v_col = s_col = -1
    value_tag = units
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split(",")]
        if header is None:
            header = fields
            if "T_K" not in header:
                raise DataError(f"{p}:{line_no}: header lacks required column T_K")
            t_col = header.index("T_K")
            present = [tag for tag in accepted if tag in header]
            if value_tag is None:
                if not present:
                    raise DataError(
                        f"{p}:{line_no}: header has no {kind} column; expected one of {accepted}"
                    )
                value_tag = present[0]
            elif value_tag not in header:
                raise DataError(f"{p}:{line_no}: header lacks declared column {value_tag!r}")
            v_col = header.index(value_tag)
            sigma_tag = _SIGMA_TAGS[kind]
            s_col = header.index(sigma_tag) if sigma_tag in header else -1
            continue
        if len(fields) != len(header):
            raise DataError(
                f"{p}:{line_no}: row has {len(fields)} fields, header has {len(header)}"
            )
        t = _parse_float(fields[t_col], str(p), line_no, "T_K")
        if t <= 0.0:
            raise DataError(f"{p}:{line_no}: temperature must be positive, got {t:g}")
        v = _parse_float(fields[v_col], str(p), line_no, value_tag)
        s = None
        if s_col >= 0 and fields[s_col] != "":
            s = _parse_float(fields[s_col], str(p), line_no, _SIGMA_TAGS[kind])
            if s < 0.0:
                raise DataError(f"{p}:{line_no}: sigma must be >= 0, got {s:g}")
        rows.append((t, v, s))
    if header is None:
        raise DataError(f"{p}: no header line found")

    rows.sort(key=lambda r: r[0])
    t_arr = np.array([r[0] for r in rows], dtype=float)
    v_arr = np.array([r[1] for r in rows], dtype=float)
    if t_arr.size > 1 and np.any(np.diff(t_arr) == 0.0):
        dup = float(t_arr[np.flatnonzero(np.diff(t_arr) == 0.0)[0]])
        raise DataError(f"{p}: duplicate temperature {dup:g} K")
    n_sigma = sum(1 for r in rows if r[2] is not None)
    if n_sigma and n_sigma != len(rows):
        raise DataError(f"{p}: sigma present on some rows but not all")
    s_arr = np.array([r[2] for r in rows], dtype=float) if n_sigma else None

    scale = 1.0
    if value_tag == "cm_J_per_mol_K":
        scale /= R_GAS
        value_tag = "cm_over_R"
    if normalization == "per_monomer":
        scale *= 2.0
    if scale != 1.0:
        v_arr = v_arr * scale
        if s_arr is not None:
            s_arr = s_arr * scale

    return MeasurementSeries(
        kind=kind,
        temperatures=t_arr,
        values=v_arr,
        sigmas=s_arr,
        units=value_tag if value_tag is not None else accepted[0],
        normalization="per_dimer",
    )


# ---------------------------------------------------------------------------
# writing


def _fmt(x: float, precision: int) -> str:
    return f"%.{precision}g" % x


def _rounded(x: float, precision: int) -> float:
    return float(_fmt(x, precision))


_RESULT_COLUMNS = ("T_K", "G", "sigma_G", "Q", "sigma_Q", "C", "I", "E", "channel")


def write_results(
    records: list[ResultRecord],
    fmt: str = "csv",
    *,
    preset_name: str | None = None,
    precision: int = 6,
) -> bytes:
    """Serialize result records to CSV or JSON bytes.

    Column order is fixed; floats carry ``precision`` significant digits
    (default 6), so identical inputs give identical bytes.
    """
    if fmt not in ("csv", "json"):
        raise DataError(f"format must be csv or json, got {fmt!r}")
    if precision < 1 or precision > 17:
        raise DomainError(f"precision must be in [1, 17], got {precision}")
    if fmt == "csv":
        lines = [",".join(_RESULT_COLUMNS)]
        for r in records:
            lines.append(
                ",".join(
                    [
                        _fmt(r.t, precision),
                        _fmt(r.correlator.value, precision),
                        _fmt(r.correlator.sigma, precision),
                        _fmt(r.discord.value, precision),
                        _fmt(r.discord.sigma, precision),
                        _fmt(r.classical, precision),
                        _fmt(r.mutual_information, precision),
                        _fmt(r.entanglement, precision),
                        r.channel,
                    ]
                )
            )
        return ("\n".join(lines) + "\n").encode("utf-8")

    channels = {r.channel for r in records}
    doc = {
        "meta": {
            "channel": channels.pop() if len(channels) == 1 else "mixed",
            "preset": preset_name,
            "units": {"T_K": "kelvin", "G": "dimensionless", "correlations": "bit"},
        },
        "rows": [
            {
                "T_K": _rounded(r.t, precision),
                "G": _rounded(r.correlator.value, precision),
                "sigma_G": _rounded(r.correlator.sigma, precision),
                "Q": _rounded(r.discord.value, precision),
                "sigma_Q": _rounded(r.discord.sigma, precision),
                "C": _rounded(r.classical, precision),
                "I": _rounded(r.mutual_information, precision),
                "E": _rounded(r.entanglement, precision),
            }
            for r in records
        ],
    }
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# scalar parsing

_VWU_RE = re.compile(
    r"^(?P<mantissa>[+-]?(?:\d+\.?\d*|\.\d+))"
    r"(?:\((?P<digits>\d+)\))?"
    r"(?P<exponent>[eE][+-]?\d+)?$"
)


def parse_value_with_uncertainty(text: str) -> ValueWithUncertainty:
    """Parse the compact error notation used in experimental papers.

    ``"-0.54(9)"`` means -0.54 with one sigma of 0.09: the parenthesized
    digits scale the last decimal place of the mantissa.  A bare number has
    sigma 0.  An exponent suffix applies to both.
    """
    s = text.strip().replace("−", "-")  # tolerate a typographic minus
    m = _VWU_RE.match(s)
    if m is None:
        raise DataError(f"cannot parse {text!r} as value(uncertainty)")
    mantissa = m.group("mantissa")
    exponent = m.group("exponent")
    scale = 10.0 ** int(exponent[1:]) if exponent else 1.0
    value = float(mantissa) * scale
    digits = m.group("digits")
    if digits is None:
        return ValueWithUncertainty(value, 0.0)
    decimals = len(mantissa.partition(".")[2])
    sigma = int(digits) * 10.0 ** (-decimals) * scale
    return ValueWithUncertainty(value, sigma)
