"""Closed-form voltage transfer functions of the capacitive body channel.

Implements every algebraic form of the channel model:

* ``body_potential_ratio`` - body potential divider C_return/C_B,
* ``rx_transfer_distant`` - receiver-side product form, valid when the
  receiver return path is small against load + ground-to-body capacitance,
* ``full_transfer`` - the complete transfer including inter-device coupling,
* ``simplified_transfer`` - the large-C_B / large-C_L reduction of it,
* ``geometric_transfer`` - the same expressions substituted with the
  geometric capacitance laws of :mod:`hbc_channel.geometry`,

plus dB conversion and :func:`compare_closed_forms`, which evaluates all
applicable forms against the nodal oracle and fills regime flags.

Note on the full form: its denominator and the nodal solution of the
reconstructed circuit differ by one cross term that swaps the Tx and Rx
return-path capacitances; the two coincide exactly when ``c_x_tx == c_x_rx``
and stay within a few percent when the two devices are similar.  The closed
form is kept verbatim and the disagreement is surfaced through the report's
relative errors instead of being silently corrected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .constants import (
    COUPLED_COUPLING_F,
    DEGENERATE_DENOMINATOR,
    DISTANT_COUPLING_F,
    EPSILON_0,
)
from .geometry import (
    CouplingConstant,
    DeviceGeometry,
    coupling_capacitance,
    ground_to_body_capacitance,
    plate_to_plate_capacitance,
    return_path_capacitance,
)
from .network import build_channel_network, solve_transfer


class DegenerateScenarioError(ArithmeticError):
    """A transfer denominator collapsed below the meaningful range."""


def _checked_ratio(numerator: float, denominator: float, context: str) -> float:
    if denominator < DEGENERATE_DENOMINATOR:
        raise DegenerateScenarioError(
            f"{context}: denominator {denominator:.3e} below {DEGENERATE_DENOMINATOR:.0e}"
        )
    return numerator / denominator


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not (value > 0 and math.isfinite(value)):
            raise ValueError(f"{name} must be positive, got {value}")


@dataclass(frozen=True)
class GeometricProvenance:
    """Geometric inputs a scenario's capacitances were derived from.

    Any subset may be present; fields left ``None`` were supplied directly as
    capacitances.  ``decouple_m`` records the separation beyond which the
    coupling capacitance was zeroed during scenario assembly.
    """

    tx_geom: DeviceGeometry | None = None
    rx_geom: DeviceGeometry | None = None
    x_tx: float | None = None
    x_rx: float | None = None
    c_f: float | None = None
    d: float | None = None
    k: CouplingConstant | None = None
    decouple_m: float | None = None


@dataclass(frozen=True)
class ChannelScenario:
    """Complete parameter set of the channel transfer model, all in farads."""

    c_x_tx: float
    c_x_rx: float
    c_gb_rx: float
    c_l: float
    c_b: float
    c_c: float = 0.0
    provenance: GeometricProvenance | None = None

    def __post_init__(self) -> None:
        _require_positive(
            c_x_tx=self.c_x_tx, c_x_rx=self.c_x_rx, c_gb_rx=self.c_gb_rx,
            c_l=self.c_l, c_b=self.c_b,
        )
        if self.c_c < 0 or not math.isfinite(self.c_c):
            raise ValueError(f"c_c must be nonnegative, got {self.c_c}")

    def has_full_geometry(self) -> bool:
        """True when the provenance is complete enough for the geometric forms."""
        p = self.provenance
        return p is not None and None not in (
            p.tx_geom, p.rx_geom, p.x_tx, p.x_rx, p.c_f,
        )

    def validate_provenance(self, rel_tol: float = 1e-12) -> None:
        """Check stored capacitances against their geometric derivation.

        Raises:
            ValueError: If any derived value disagrees with the stored one by
                more than ``rel_tol`` relative.
        """
        p = self.provenance
        if p is None:
            return

        def check(name: str, stored: float, derived: float) -> None:
            scale = max(abs(stored), abs(derived))
            if scale > 0 and abs(stored - derived) > rel_tol * scale:
                raise ValueError(
                    f"scenario {name}={stored:.15g} disagrees with geometric "
                    f"derivation {derived:.15g}"
                )

        if p.tx_geom is not None and p.x_tx is not None:
            check("c_x_tx", self.c_x_tx, return_path_capacitance(p.tx_geom, p.x_tx))
        if p.rx_geom is not None and p.x_rx is not None:
            check("c_x_rx", self.c_x_rx, return_path_capacitance(p.rx_geom, p.x_rx))
        if p.rx_geom is not None and p.c_f is not None:
            derived_gb = ground_to_body_capacitance(
                plate_to_plate_capacitance(p.rx_geom), p.c_f
            )
            check("c_gb_rx", self.c_gb_rx, derived_gb)
        if p.tx_geom is not None and p.d is not None and p.k is not None:
            if p.decouple_m is not None and p.d >= p.decouple_m:
                derived_cc = 0.0
            else:
                derived_cc = coupling_capacitance(p.tx_geom, p.d, p.k)
            check("c_c", self.c_c, derived_cc)


@dataclass(frozen=True)
class TransferReport:
    """All closed forms of one scenario next to the nodal oracle.

    ``ratios`` holds the evaluated forms keyed by name (``distant``,
    ``simplified``, ``full``, ``geometric_full``/``geometric_distant`` when
    geometry is known, and ``oracle``).  ``relative_errors`` holds pairwise
    disagreements ``|a-b|/max(|a|,|b|)`` keyed ``"<a>_vs_<b>"``.
    """

    ratios: dict[str, float]
    relative_errors: dict[str, float]
    flags: tuple[str, ...]
    frequency_hz: float = field(default=1e5)

    def loss_db(self, name: str) -> float:
        """Channel loss of one form in dB (positive for attenuation)."""
        return -ratio_to_db(self.ratios[name])


def body_potential_ratio(c_return: float, c_b: float) -> float:
    """Body potential divider: V_body/V_in = C_return / C_B.

    The exact divider would be C_return/(C_return + C_B); the model keeps the
    standard approximation valid for C_return << C_B, and the nodal oracle
    recovers the exact value when needed.
    """
    _require_positive(c_return=c_return, c_b=c_b)
    return _checked_ratio(c_return, c_b, "body_potential_ratio")


def extract_return_path(v_ratio: float, c_b: float) -> float:
    """Invert :func:`body_potential_ratio`: C_return = C_B * (V_body/V_in).

    Args:
        v_ratio: Measured or simulated body potential ratio, in (0, 1).
        c_b: Body-to-earth capacitance, F.
    """
    if not (0.0 < v_ratio < 1.0):
        raise ValueError(f"v_ratio must be in (0, 1), got {v_ratio}")
    _require_positive(c_b=c_b)
    return c_b * v_ratio


def rx_transfer_distant(s: ChannelScenario) -> float:
    """Receiver product form, no inter-device coupling.

    V_o/V_in = (C_x-Tx / C_B) * (C_x-Rx / (C_GB-Rx + C_L)).  Intended for the
    regime c_x_rx << c_gb_rx + c_l; shares its arithmetic grouping with
    :func:`simplified_transfer` so the two agree bitwise at c_c = 0.
    """
    forward = _checked_ratio(s.c_x_tx * s.c_x_rx, s.c_b, "rx_transfer_distant")
    return _checked_ratio(forward, s.c_gb_rx + s.c_l, "rx_transfer_distant")


def full_transfer(s: ChannelScenario) -> float:
    """Complete transfer with inter-device coupling.

    ::

        V_o     C_c*[C_B + C_x-Rx + C_x-Tx] + C_x-Rx*C_x-Tx
        ---- = -----------------------------------------------------------
        V_in    C_c*[C_B + C_x-Rx + C_x-Tx]
                  + (C_B + C_x-Rx)*(C_L + C_GB-Rx + C_x-Tx)
                  + C_x-Tx*(C_L + C_GB-Rx)

    The result lies in (0, 1) for positive capacitances, increases strictly
    with C_c and decreases strictly with C_L.
    """
    shared = s.c_c * (s.c_b + s.c_x_rx + s.c_x_tx)
    numerator = shared + s.c_x_rx * s.c_x_tx
    denominator = (
        shared
        + (s.c_b + s.c_x_rx) * (s.c_l + s.c_gb_rx + s.c_x_tx)
        + s.c_x_tx * (s.c_l + s.c_gb_rx)
    )
    return _checked_ratio(numerator, denominator, "full_transfer")


def simplified_transfer(s: ChannelScenario) -> float:
    """Large-C_B, large-load reduction of :func:`full_transfer`.

    V_o/V_in = (C_c + C_x-Rx*C_x-Tx/C_B) / (C_c + C_L + C_GB-Rx); exact in
    the limit c_b >> c_x_tx, c_x_rx and c_l + c_gb_rx >> c_x_rx.  At c_c = 0
    this reduces to :func:`rx_transfer_distant` exactly.
    """
    forward = _checked_ratio(s.c_x_tx * s.c_x_rx, s.c_b, "simplified_transfer")
    return _checked_ratio(
        s.c_c + forward, s.c_c + (s.c_gb_rx + s.c_l), "simplified_transfer"
    )


def geometric_transfer(
    tx: DeviceGeometry,
    rx: DeviceGeometry,
    x_tx: float,
    x_rx: float,
    c_f: float,
    c_l: float,
    c_b: float,
    distant: bool,
    d: float | None = None,
    k: CouplingConstant | None = None,
) -> float:
    """Transfer ratio written directly in device geometry.

    For same-radius devices::

        coupled:  [k*pi*a^2/d + x_tx*x_rx*(8*eps0*a)^2 / C_B]
                  / [k*pi*a^2/d + eps0*pi*a^2/t + C_F + C_L]
        distant:  drop both k*pi*a^2/d terms

    Composing the capacitance laws and calling :func:`simplified_transfer`
    yields identical values to better than 1e-12 relative.

    Args:
        tx: Transmitter geometry.
        rx: Receiver geometry; must share the transmitter's radius.  The
            plate separation entering the denominator is the receiver's.
        x_tx: Transmitter shadowing fraction in (0, 1].
        x_rx: Receiver shadowing fraction in (0, 1].
        c_f: Receiver fringe capacitance, F (>= 0).
        c_l: Load capacitance, F.
        c_b: Body-to-earth capacitance, F.
        distant: True drops the coupling terms; False requires d and k.
        d: Device separation, m (coupled form only).
        k: Coupling constant (coupled form only).

    Raises:
        ValueError: If radii differ, inputs are invalid, or d/k are missing
            for the coupled form.
    """
    if not math.isclose(tx.radius_a, rx.radius_a, rel_tol=1e-12):
        raise ValueError(
            f"geometric form assumes equal radii, got tx={tx.radius_a} rx={rx.radius_a}"
        )
    if c_f < 0 or not math.isfinite(c_f):
        raise ValueError(f"c_f must be nonnegative, got {c_f}")
    _require_positive(c_l=c_l, c_b=c_b)

    a = tx.radius_a
    if distant:
        c_c = 0.0
    else:
        if d is None or k is None:
            raise ValueError("coupled geometric form requires d and k")
        if d <= 0:
            raise ValueError(f"device separation d must be positive, got {d}")
        c_c = 0.0 if math.isinf(d) else k.k * math.pi * a**2 / d

    x_tx_cap = return_path_capacitance(tx, x_tx)
    x_rx_cap = return_path_capacitance(rx, x_rx)
    numerator = c_c + _checked_ratio(x_tx_cap * x_rx_cap, c_b, "geometric_transfer")
    denominator = c_c + (EPSILON_0 * math.pi * a**2 / rx.thickness_t + c_f + c_l)
    return _checked_ratio(numerator, denominator, "geometric_transfer")


def ratio_to_db(r: float) -> float:
    """Voltage ratio in dB: 20*log10(r).  Negative for r < 1.

    Channel *loss* is the negative of this value.
    """
    if not (r > 0 and math.isfinite(r)):
        raise ValueError(f"ratio must be positive, got {r}")
    return 20.0 * math.log10(r)


def relative_error(a: float, b: float) -> float:
    """Symmetric relative disagreement |a - b| / max(|a|, |b|)."""
    scale = max(abs(a), abs(b))
    if scale == 0.0:
        return 0.0
    return abs(a - b) / scale


# Factor by which one quantity must exceed another to count as an "order of
# magnitude larger" when checking the simplification preconditions.
_APPROXIMATION_MARGIN = 10.0


def regime_flags(s: ChannelScenario) -> tuple[str, ...]:
    """Classify a scenario against the model's regime thresholds.

    * ``distant``: c_c below 1 fF - coupling negligible.
    * ``coupled``: c_c above 10 fF - coupling shapes the channel.
    * ``invalid-approximation``: the simplified forms' preconditions
      (c_b and c_l + c_gb_rx an order of magnitude above the return paths)
      do not hold.
    """
    flags: list[str] = []
    if s.c_c < DISTANT_COUPLING_F:
        flags.append("distant")
    if s.c_c > COUPLED_COUPLING_F:
        flags.append("coupled")
    if (
        _APPROXIMATION_MARGIN * s.c_x_rx > s.c_gb_rx + s.c_l
        or _APPROXIMATION_MARGIN * max(s.c_x_tx, s.c_x_rx) > s.c_b
    ):
        flags.append("invalid-approximation")
    return tuple(flags)


def compare_closed_forms(s: ChannelScenario, frequency: float = 1e5) -> TransferReport:
    """Evaluate every applicable closed form plus the nodal oracle.

    Geometric forms are included when the scenario carries full geometric
    provenance.  Pairwise relative errors cover each closed form against the
    oracle and the closed forms against the full expression.

    Raises:
        SingularNetworkError: Propagated from the nodal solve.
    """
    ratios: dict[str, float] = {
        "distant": rx_transfer_distant(s),
        "simplified": simplified_transfer(s),
        "full": full_transfer(s),
    }
    if s.has_full_geometry():
        p = s.provenance
        assert p is not None
        ratios["geometric_distant"] = geometric_transfer(
            p.tx_geom, p.rx_geom, p.x_tx, p.x_rx, p.c_f, s.c_l, s.c_b, distant=True
        )
        if p.d is not None and p.k is not None:
            ratios["geometric_full"] = geometric_transfer(
                p.tx_geom, p.rx_geom, p.x_tx, p.x_rx, p.c_f, s.c_l, s.c_b,
                distant=False, d=p.d, k=p.k,
            )

    net = build_channel_network(s.c_x_tx, s.c_x_rx, s.c_gb_rx, s.c_l, s.c_b, s.c_c)
    ratios["oracle"] = solve_transfer(net, frequency).ratio.real

    errors: dict[str, float] = {}
    for name, value in ratios.items():
        if name != "oracle":
            errors[f"{name}_vs_oracle"] = relative_error(value, ratios["oracle"])
        if name not in ("full", "oracle"):
            errors[f"{name}_vs_full"] = relative_error(value, ratios["full"])

    return TransferReport(
        ratios=ratios,
        relative_errors=errors,
        flags=regime_flags(s),
        frequency_hz=frequency,
    )
