"""Scenario parameters, per-SF physical-layer tables, and EIB annulus geometry.

Everything downstream (closed forms and simulator alike) reads from the two
immutable records defined here: ``SfTable`` (per-SF time-on-air and transmit
power) and ``NetworkParams`` (densities, radii, propagation, traffic, noise).
Units are km for distances, seconds for times, and mW for powers; dB/dBm only
appear at the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

N_SF = 6  # SF7..SF12 on 125 kHz

# Time-on-air for a 25-byte packet, SF7..SF12, 125 kHz (seconds).
TOA_25_BYTES = (0.036, 0.064, 0.113, 0.204, 0.365, 0.682)

SAME_POWER_DBM = 14.0
SF_BASED_POWER_DBM = (2.0, 5.0, 8.0, 11.0, 14.0, 20.0)

POWER_SCHEMES = ("SamePower", "SfBased")

# Free-space reference loss at 868 MHz, with link distances expressed in km.
# The paper never states alpha; it cancels in every interference term and
# survives only in the noise factor, so this is a convention, not a fit.
ALPHA_DEFAULT = (299792458.0 / (4.0 * math.pi * 868e6)) ** 2

# Thermal noise over 125 kHz plus a 6 dB receiver noise figure.
NOISE_DBM_DEFAULT = -174.0 + 10.0 * math.log10(125e3) + 6.0


class ScenarioError(ValueError):
    """Raised when a scenario file is malformed (names the offending key)."""


def dbm_to_mw(p: float) -> float:
    """Convert dBm to linear milliwatts."""
    if not math.isfinite(p):
        raise ValueError(f"power must be finite, got {p}")
    return 10.0 ** (p / 10.0)


def mw_to_dbm(p: float) -> float:
    if p <= 0:
        raise ValueError(f"power must be positive, got {p}")
    return 10.0 * math.log10(p)


@dataclass(frozen=True)
class SfTable:
    """Static per-SF ground truth: index q in 1..n_sf maps to SF label q+6."""

    n_sf: int
    toa: tuple[float, ...]           # packet time-on-air l_q, seconds
    power_dbm: tuple[float, ...]     # transmit power P_q, dBm
    power_linear: tuple[float, ...]  # transmit power P_q, mW
    sf_label: tuple[int, ...]        # 7..12

    def __post_init__(self):
        n = self.n_sf
        if not (len(self.toa) == len(self.power_dbm) == len(self.power_linear) == len(self.sf_label) == n):
            raise ValueError("SfTable field lengths disagree")
        if any(l <= 0 for l in self.toa) or any(p <= 0 for p in self.power_linear):
            raise ValueError("toa and power_linear must be strictly positive")
        if any(self.toa[i] >= self.toa[i + 1] for i in range(n - 1)):
            raise ValueError("toa must be strictly increasing in q")

    def toa_of(self, q: int) -> float:
        self._check_q(q)
        return self.toa[q - 1]

    def power_of(self, q: int) -> float:
        """Transmit power of SF index q in mW."""
        self._check_q(q)
        return self.power_linear[q - 1]

    def _check_q(self, q: int) -> None:
        if not 1 <= q <= self.n_sf:
            raise IndexError(f"SF index q={q} out of range 1..{self.n_sf}")


def build_sf_table(packet_bytes: int = 25, scheme: str = "SamePower") -> SfTable:
    """Per-SF table for the supported payload.

    Only the 25-byte payload is supported: its time-on-air values are tabulated,
    not computed, and extrapolating to other sizes silently would be wrong.
    """
    if packet_bytes != 25:
        raise ValueError(f"unsupported payload: {packet_bytes} bytes (only 25-byte packets are tabulated)")
    if scheme == "SamePower":
        dbm = (SAME_POWER_DBM,) * N_SF
    elif scheme == "SfBased":
        dbm = SF_BASED_POWER_DBM
    else:
        raise ValueError(f"unknown power scheme {scheme!r}; expected one of {POWER_SCHEMES}")
    return SfTable(
        n_sf=N_SF,
        toa=TOA_25_BYTES,
        power_dbm=dbm,
        power_linear=tuple(dbm_to_mw(p) for p in dbm),
        sf_label=tuple(range(7, 7 + N_SF)),
    )


@dataclass(frozen=True)
class NetworkParams:
    """One immutable scenario description.

    lambda_g = 0 describes a single-gateway world (only the typical gateway
    at the origin exists); the analytic side then has no inter-cluster term.
    """

    lambda_g: float = 0.3      # gateway density, /km^2
    lambda_ed: float = 100.0   # end-device density, /km^2
    r_cluster: float = 2.0     # cluster radius R, km
    eta: float = 3.0           # path-loss exponent, > 2
    alpha: float = ALPHA_DEFAULT  # path-loss constant (linear), distances in km
    a: float = 0.1             # per-frame transmit probability
    t_c: float = 1.5           # contention half-window, s
    noise_mw: float = dbm_to_mw(NOISE_DBM_DEFAULT)  # AWGN variance sigma^2, mW
    power_scheme: str = "SamePower"

    def __post_init__(self):
        if self.eta <= 2:
            raise ValueError(f"eta must exceed 2 for the inter-cluster integral to converge, got {self.eta}")
        if not 0.0 <= self.a <= 1.0:
            raise ValueError(f"a must lie in [0, 1], got {self.a}")
        if self.lambda_g < 0:
            raise ValueError(f"lambda_g must be >= 0, got {self.lambda_g}")
        if self.lambda_ed <= 0 or self.r_cluster <= 0:
            raise ValueError("lambda_ed and r_cluster must be strictly positive")
        if self.t_c <= 0:
            raise ValueError(f"t_c must be positive, got {self.t_c}")
        if self.noise_mw < 0:
            raise ValueError(f"noise_mw must be >= 0, got {self.noise_mw}")
        if self.alpha <= 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if self.power_scheme not in POWER_SCHEMES:
            raise ValueError(f"unknown power scheme {self.power_scheme!r}; expected one of {POWER_SCHEMES}")

    def annulus_width(self, n_sf: int = N_SF) -> float:
        return self.r_cluster / n_sf

    def table(self, packet_bytes: int = 25) -> SfTable:
        return build_sf_table(packet_bytes, self.power_scheme)

    def without_noise(self) -> "NetworkParams":
        return replace(self, noise_mw=0.0)


def validate_window(params: NetworkParams, table: SfTable) -> None:
    """t_c must cover every packet so the contention window contains all overlaps."""
    l_max = max(table.toa)
    if params.t_c < l_max:
        raise ValueError(f"t_c={params.t_c} s is shorter than the longest time-on-air {l_max} s")


@dataclass(frozen=True)
class AnnulusSpec:
    """EIB annulus q: nodes at distance in (inner, outer] from their gateway use SF q."""

    q: int
    inner: float       # d_{q-1}, km
    outer: float       # d_q, km
    width: float       # omega = R / N, km
    mean_nodes: float  # N_q = lambda_ed * pi * (outer^2 - inner^2)


def annulus_spec(q: int, params: NetworkParams, table: SfTable) -> AnnulusSpec:
    table._check_q(q)
    w = params.annulus_width(table.n_sf)
    inner = (q - 1) * w
    outer = q * w
    return AnnulusSpec(
        q=q,
        inner=inner,
        outer=outer,
        width=w,
        mean_nodes=params.lambda_ed * math.pi * (outer**2 - inner**2),
    )


def desired_distance(q: int, params: NetworkParams, table: SfTable) -> float:
    """Mid-annulus link distance r0(q) = d_{q-1} + omega/2 used for the probed node."""
    table._check_q(q)
    w = params.annulus_width(table.n_sf)
    return (q - 1) * w + 0.5 * w


# --- model variants (which interference the closed forms / simulator include) ---

VARIANT_KINDS = ("Full", "PerfectOrthogonality", "SingleGateway", "SingleInterferingSf", "SamePowerOverride")


@dataclass(frozen=True)
class Variant:
    """Selects the interfering-SF product set and topology reductions.

    Full                 -- all SFs interfere, gateways per lambda_g
    PerfectOrthogonality -- only co-SF interference (product set {q0})
    SingleGateway        -- lambda_g forced to 0, all SFs interfere
    SingleInterferingSf  -- only SF q_star interferes
    SamePowerOverride    -- all interferers forced to the desired node's power
    """

    kind: str = "Full"
    q_star: int | None = None

    def __post_init__(self):
        if self.kind not in VARIANT_KINDS:
            raise ValueError(f"unknown variant {self.kind!r}; expected one of {VARIANT_KINDS}")
        if (self.kind == "SingleInterferingSf") != (self.q_star is not None):
            raise ValueError("q_star must be given exactly for SingleInterferingSf")

    def interfering_sfs(self, q0: int, n_sf: int = N_SF) -> tuple[int, ...]:
        if self.kind == "PerfectOrthogonality":
            return (q0,)
        if self.kind == "SingleInterferingSf":
            if not 1 <= self.q_star <= n_sf:
                raise IndexError(f"q_star={self.q_star} out of range 1..{n_sf}")
            return (self.q_star,)
        return tuple(range(1, n_sf + 1))

    def effective_lambda_g(self, params: NetworkParams) -> float:
        return 0.0 if self.kind == "SingleGateway" else params.lambda_g

    def interferer_power(self, q: int, q0: int, table: SfTable) -> float:
        """P_q in mW as seen by the model under this variant."""
        if self.kind == "SamePowerOverride":
            return table.power_of(q0)
        return table.power_of(q)

    def label(self) -> str:
        if self.kind == "SingleInterferingSf":
            return f"SingleInterferingSf{self.q_star}"
        return self.kind


FULL = Variant("Full")
PERFECT_ORTHOGONALITY = Variant("PerfectOrthogonality")
SINGLE_GATEWAY = Variant("SingleGateway")
SAME_POWER_OVERRIDE = Variant("SamePowerOverride")


def single_interfering_sf(q_star: int) -> Variant:
    return Variant("SingleInterferingSf", q_star)


def parse_variant(text: str) -> Variant:
    """Parse a CLI variant name, e.g. 'Full' or 'SingleInterferingSf:3'."""
    name, _, arg = text.partition(":")
    key = name.strip().lower()
    simple = {
        "full": FULL,
        "perfectorthogonality": PERFECT_ORTHOGONALITY,
        "singlegateway": SINGLE_GATEWAY,
        "samepoweroverride": SAME_POWER_OVERRIDE,
    }
    if key in simple:
        if arg:
            raise ValueError(f"variant {name!r} takes no argument")
        return simple[key]
    if key == "singleinterferingsf":
        if not arg:
            raise ValueError("SingleInterferingSf needs an SF index, e.g. SingleInterferingSf:3")
        return single_interfering_sf(int(arg))
    raise ValueError(f"unknown variant {text!r}")


# --- scenario files ---------------------------------------------------------
#
# Flat TOML key/value files whose keys mirror NetworkParams field names
# exactly.  Paper-stated quantities are required; alpha and noise_mw (which
# the paper never states) fall back to the documented defaults.

REQUIRED_SCENARIO_KEYS = ("lambda_g", "lambda_ed", "r_cluster", "eta", "a", "t_c", "power_scheme")
OPTIONAL_SCENARIO_KEYS = ("alpha", "noise_mw")


def load_scenario(path: str) -> NetworkParams:
    try:
        with open(path, "rb") as f:
            raw = tomllib.load(f)
    except OSError as e:
        raise ScenarioError(f"cannot read scenario file {path}: {e}") from e
    except tomllib.TOMLDecodeError as e:
        raise ScenarioError(f"scenario file {path} is not valid TOML: {e}") from e
    return params_from_mapping(raw, source=path)


def params_from_mapping(raw: dict, source: str = "<scenario>") -> NetworkParams:
    known = set(REQUIRED_SCENARIO_KEYS) | set(OPTIONAL_SCENARIO_KEYS)
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ScenarioError(f"{source}: unknown key(s) {', '.join(unknown)}")
    missing = [k for k in REQUIRED_SCENARIO_KEYS if k not in raw]
    if missing:
        raise ScenarioError(f"{source}: missing required key(s) {', '.join(missing)}")
    kwargs = {}
    for key, value in raw.items():
        if key == "power_scheme":
            if not isinstance(value, str):
                raise ScenarioError(f"{source}: key power_scheme must be a string")
            kwargs[key] = value
        else:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ScenarioError(f"{source}: key {key} must be a number, got {value!r}")
            kwargs[key] = float(value)
    try:
        return NetworkParams(**kwargs)
    except ValueError as e:
        raise ScenarioError(f"{source}: {e}") from e


def dump_scenario(params: NetworkParams, path: str) -> None:
    """Write a scenario file that load_scenario reads back identically."""
    lines = []
    for f in fields(params):
        value = getattr(params, f.name)
        if isinstance(value, str):
            lines.append(f'{f.name} = "{value}"')
        else:
            lines.append(f"{f.name} = {value!r}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


DEFAULT_PARAMS = NetworkParams()
