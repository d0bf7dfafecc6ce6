"""Toolkit configuration: a line-oriented ``section.key = value`` text format.

Grammar: one assignment per line, ``#`` starts a comment, blank lines are
ignored.  Keys carry unit suffixes (``_db``, ``_dbm``, ``_hz``, ``_m``, ...);
decibel quantities are converted to linear exactly once, inside the typed
accessors.  Loading validates every key against the schema below; dumping
emits the canonical key order, so load(dump(cfg)) reproduces all values.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from importlib import resources

from .array_geometry import ArrayConfig, C_LIGHT, Direction
from .beamforming import BeamSpec, azimuth_cut, full_grid
from .errors import ConfigError
from .frame_scheduler import FrameConfig, ResourceGrid
from .link_budget import RadioParams
from .ofdm_isac import OfdmConfig
from .scanning import SceneGeometry

_INT, _FLOAT, _FLOAT_LIST, _STR = "int", "float", "float list", "string"

# key -> (type, unit/meaning, optional (lo, hi) inclusive range or choices)
SCHEMA = {
    "array.p": (_INT, "antenna layers incl. the reference element", (1, 10_000)),
    "array.b": (_INT, "log2 of elements per layer", (1, 16)),
    "array.d_m": (_FLOAT, "inter-layer element spacing [m]", (1e-6, 10.0)),
    "beam.fdb_phi_deg": (_FLOAT, "FDB azimuth [deg]", (-180.0, 360.0)),
    "beam.fdb_theta_deg": (_FLOAT, "FDB pitch [deg]", (0.0, 90.0)),
    "beam.dcb_phi_deg": (_FLOAT_LIST, "DCB azimuths [deg]", None),
    "beam.dcb_theta_deg": (_FLOAT_LIST, "DCB pitches [deg]", None),
    "beam.beta": (_FLOAT, "combiner regularisation factor", (0.0, 1e15)),
    "beam.grid_step_deg": (_FLOAT, "response grid step [deg]", (0.01, 10.0)),
    "beam.grid_mode": (_STR, "response grid layout", ("azimuth_cut", "full_2d")),
    "radio.f_c_hz": (_FLOAT, "carrier frequency [Hz]", (1e6, 1e13)),
    "radio.p_t_dbm": (_FLOAT, "total transmit power [dBm]", None),
    "radio.rho": (_FLOAT, "communication power fraction", (0.0, 1.0)),
    "radio.g_t_db": (_FLOAT, "transmit beam gain [dB]", None),
    "radio.g_r_c_db": (_FLOAT, "communication receive beam gain [dB]", None),
    "radio.g_r_s_db": (_FLOAT, "sensing receive beam gain [dB]", None),
    "radio.g_p_c_db": (_FLOAT, "communication processing gain [dB]", None),
    "radio.g_p_s_db": (_FLOAT, "sensing processing gain [dB]", None),
    "radio.alpha": (_FLOAT, "path-loss exponent", (1.0, 10.0)),
    "radio.k_factor": (_FLOAT, "Rician K factor (linear)", (0.0, 1e6)),
    "radio.p_n_dbm": (_FLOAT, "thermal noise power [dBm]", None),
    "radio.p_i_dbm": (_FLOAT, "ground clutter power [dBm]", None),
    "radio.f_n_db": (_FLOAT, "noise figure [dB]", None),
    "radio.xi_th_db": (_FLOAT, "communication SNR threshold [dB]", None),
    "radio.epsilon": (_FLOAT, "outage probability target", (1e-9, 0.999999)),
    "radio.sigma_rcs_m2": (_FLOAT, "sensing cross section [m^2]", (1e-9, 1e6)),
    "radio.gamma_min_db": (_FLOAT, "minimum sensing SINR [dB]", None),
    "radio.b_hz": (_FLOAT, "total signal bandwidth [Hz]", (1.0, 1e12)),
    "ofdm.m": (_INT, "OFDM symbols per frame", (2, 1 << 20)),
    "ofdm.n": (_INT, "subcarriers", (2, 1 << 20)),
    "ofdm.delta_f_hz": (_FLOAT, "subcarrier spacing [Hz]", (1e-3, 1e9)),
    "ofdm.t_guard_ratio": (_FLOAT, "cyclic guard as a fraction of 1/delta_f",
                           (0.0, 10.0)),
    "ofdm.m_dft": (_INT, "Doppler transform length (zero padded)", (2, 1 << 24)),
    "ofdm.n_idft": (_INT, "range transform length (zero padded)", (2, 1 << 24)),
    "ofdm.qam_order": (_INT, "QAM constellation order (power of 4)", (4, 4096)),
    "scene.h_m": (_FLOAT, "SBS mast height [m]", (0.1, 1e4)),
    "scene.w_r_m": (_FLOAT, "road width [m]", (0.1, 1e4)),
    "scene.r_r_m": (_FLOAT, "target truth range [m]", (0.0, 1e6)),
    "scene.v_r_mps": (_FLOAT, "target truth radial velocity [m/s]", (0.0, 1e5)),
    "scene.tau_s": (_FLOAT, "beam dwell duration [s]", (1e-6, 10.0)),
    "scene.delta_theta_deg": (_FLOAT, "FDB pitch beamwidth [deg]", (0.01, 90.0)),
    "scene.delta_phi_deg": (_FLOAT, "FDB azimuth beamwidth [deg]", (0.01, 90.0)),
    "frame.t_d_ms": (_FLOAT, "downlink interval [ms]", (0.0, 5.0)),
    "frame.t_g_ms": (_FLOAT, "guard interval [ms]", (0.0, 5.0)),
    "frame.t_u_ms": (_FLOAT, "uplink interval [ms]", (0.0, 5.0)),
    "frame.subframes": (_INT, "subframes per schedule window", (1, 1 << 20)),
    "frame.blocks": (_INT, "subcarrier blocks per subframe", (1, 1 << 20)),
    "mc.seed": (_INT, "master random seed", (0, (1 << 64) - 1)),
    "mc.trials": (_INT, "Monte Carlo trials per sweep point", (1, 1 << 31)),
    "mc.m": (_INT, "symbol count of the Monte Carlo numerology", (2, 1 << 20)),
    "mc.n": (_INT, "subcarrier count of the Monte Carlo numerology", (2, 1 << 20)),
    "mc.gamma_db_start": (_FLOAT, "SINR sweep start [dB]", None),
    "mc.gamma_db_stop": (_FLOAT, "SINR sweep stop, inclusive [dB]", None),
    "mc.gamma_db_step": (_FLOAT, "SINR sweep step [dB]", (1e-6, 100.0)),
    "mc.v_true_mps": (_FLOAT, "Monte Carlo truth velocity [m/s]", (0.0, 1e5)),
    "mc.r_true_m": (_FLOAT, "Monte Carlo truth range [m]", (0.0, 1e6)),
    "sweep.rho_step": (_FLOAT, "power-ratio sweep step", (1e-6, 1.0)),
    "sweep.x_start_m": (_FLOAT, "distance sweep start [m]", (1e-3, 1e7)),
    "sweep.x_stop_m": (_FLOAT, "distance sweep stop, inclusive [m]", (1e-3, 1e7)),
    "sweep.x_step_m": (_FLOAT, "distance sweep step [m]", (1e-6, 1e7)),
}


def _db(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def _dbm_to_w(value_dbm: float) -> float:
    return 10.0 ** ((value_dbm - 30.0) / 10.0)


def _parse_value(key: str, text: str):
    kind, unit, bounds = SCHEMA[key]
    try:
        if kind == _INT:
            value = int(text)
        elif kind == _FLOAT:
            value = float(text)
        elif kind == _FLOAT_LIST:
            value = tuple(float(tok) for tok in text.split(",") if tok.strip())
        else:
            value = text.strip()
    except ValueError as exc:
        raise ConfigError(
            f"key {key!r} expects a {kind} ({unit}), got {text!r}"
        ) from exc
    if bounds is not None and kind in (_INT, _FLOAT):
        lo, hi = bounds
        if not lo <= value <= hi:
            raise ConfigError(
                f"key {key!r} ({unit}) must be in [{lo}, {hi}], got {value}"
            )
    if kind == _STR and bounds is not None and value not in bounds:
        raise ConfigError(f"key {key!r} ({unit}) must be one of {bounds}, got {value!r}")
    return value


def _format_value(value) -> str:
    if isinstance(value, tuple):
        return ", ".join(repr(float(v)) for v in value)
    if isinstance(value, bool):
        raise TypeError("booleans are not part of the config grammar")
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass(frozen=True)
class ToolkitConfig:
    """Validated raw configuration plus typed accessors for the modules."""

    values: dict

    def __post_init__(self):
        missing = sorted(set(SCHEMA) - set(self.values))
        if missing:
            raise ConfigError(
                "missing configuration keys: " + ", ".join(
                    f"{k} ({SCHEMA[k][1]})" for k in missing
                )
            )
        unknown = sorted(set(self.values) - set(SCHEMA))
        if unknown:
            raise ConfigError("unknown configuration keys: " + ", ".join(unknown))
        dcb_phi = self.values["beam.dcb_phi_deg"]
        dcb_theta = self.values["beam.dcb_theta_deg"]
        if len(dcb_phi) != len(dcb_theta):
            raise ConfigError(
                f"beam.dcb_phi_deg has {len(dcb_phi)} entries but "
                f"beam.dcb_theta_deg has {len(dcb_theta)}"
            )

    def __getitem__(self, key: str):
        return self.values[key]

    # -- derived quantities -------------------------------------------------

    @property
    def wavelength(self) -> float:
        return C_LIGHT / self.values["radio.f_c_hz"]

    def dump(self) -> str:
        """Canonical text form; load(dump()) round-trips every value."""
        lines = [f"{key} = {_format_value(self.values[key])}" for key in SCHEMA]
        return "\n".join(lines) + "\n"

    def sha256(self) -> str:
        return hashlib.sha256(self.dump().encode()).hexdigest()

    # -- module-level accessors ----------------------------------------------

    def array_config(self) -> ArrayConfig:
        return ArrayConfig(
            p=self["array.p"],
            b=self["array.b"],
            d=self["array.d_m"],
            lam=self.wavelength,
        )

    def beam_spec(self) -> BeamSpec:
        dcbs = tuple(
            Direction(phi, theta)
            for phi, theta in zip(self["beam.dcb_phi_deg"], self["beam.dcb_theta_deg"])
        )
        return BeamSpec(
            fdb=Direction(self["beam.fdb_phi_deg"], self["beam.fdb_theta_deg"]),
            dcbs=dcbs,
            beta=self["beam.beta"],
        )

    def beam_grid(self):
        step = self["beam.grid_step_deg"]
        if self["beam.grid_mode"] == "full_2d":
            return full_grid(step, step)
        return azimuth_cut(self["beam.fdb_theta_deg"], step)

    def radio_params(self, rho: float = None) -> RadioParams:
        return RadioParams(
            p_t_w=_dbm_to_w(self["radio.p_t_dbm"]),
            rho=self["radio.rho"] if rho is None else rho,
            g_t=_db(self["radio.g_t_db"]),
            g_r_c=_db(self["radio.g_r_c_db"]),
            g_r_s=_db(self["radio.g_r_s_db"]),
            g_p_c=_db(self["radio.g_p_c_db"]),
            g_p_s=_db(self["radio.g_p_s_db"]),
            lam=self.wavelength,
            alpha=self["radio.alpha"],
            k_factor=self["radio.k_factor"],
            p_n_w=_dbm_to_w(self["radio.p_n_dbm"]),
            f_n=_db(self["radio.f_n_db"]),
            xi_th=_db(self["radio.xi_th_db"]),
            epsilon=self["radio.epsilon"],
            sigma_rcs=self["radio.sigma_rcs_m2"],
            p_i_w=_dbm_to_w(self["radio.p_i_dbm"]),
            gamma_min=_db(self["radio.gamma_min_db"]),
            bandwidth=self["radio.b_hz"],
        )

    def ofdm_config(self) -> OfdmConfig:
        delta_f = self["ofdm.delta_f_hz"]
        return OfdmConfig(
            m_symbols=self["ofdm.m"],
            n_subcarriers=self["ofdm.n"],
            delta_f=delta_f,
            f_c=self["radio.f_c_hz"],
            t_guard=self["ofdm.t_guard_ratio"] / delta_f,
            m_dft=self["ofdm.m_dft"],
            n_idft=self["ofdm.n_idft"],
        )

    def mc_ofdm_config(self) -> OfdmConfig:
        """Monte Carlo numerology: unpadded transforms, theory-comparable."""
        delta_f = self["ofdm.delta_f_hz"]
        return OfdmConfig(
            m_symbols=self["mc.m"],
            n_subcarriers=self["mc.n"],
            delta_f=delta_f,
            f_c=self["radio.f_c_hz"],
            t_guard=self["ofdm.t_guard_ratio"] / delta_f,
        )

    def mc_gammas_db(self) -> list:
        start = self["mc.gamma_db_start"]
        stop = self["mc.gamma_db_stop"]
        step = self["mc.gamma_db_step"]
        if stop < start:
            raise ConfigError("mc.gamma_db_stop must be >= mc.gamma_db_start")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [start + i * step for i in range(count)]

    def scene_geometry(self, r_max_s: float) -> SceneGeometry:
        return SceneGeometry(
            h=self["scene.h_m"],
            w_r=self["scene.w_r_m"],
            r_max_s=r_max_s,
            tau=self["scene.tau_s"],
        )

    def frame_config(self) -> FrameConfig:
        return FrameConfig(
            t_d_ms=self["frame.t_d_ms"],
            t_g_ms=self["frame.t_g_ms"],
            t_u_ms=self["frame.t_u_ms"],
        )

    def resource_grid(self) -> ResourceGrid:
        n_dcb = len(self["beam.dcb_phi_deg"])
        return ResourceGrid(
            fdb_beam="fdb",
            dcb_beams=tuple(f"dcb{i + 1}" for i in range(n_dcb)),
            n_subframes=self["frame.subframes"],
            n_blocks=self["frame.blocks"],
        )


def loads(text: str, source: str = "<string>") -> ToolkitConfig:
    """Parse configuration text; collects per-line errors before validating."""
    values = {}
    errors = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"{source}:{lineno}: expected 'section.key = value'")
            continue
        key, _, rhs = line.partition("=")
        key = key.strip()
        rhs = rhs.strip()
        if key not in SCHEMA:
            errors.append(f"{source}:{lineno}: unknown key {key!r}")
            continue
        if key in values:
            errors.append(f"{source}:{lineno}: duplicate key {key!r}")
            continue
        try:
            values[key] = _parse_value(key, rhs)
        except ConfigError as exc:
            errors.append(f"{source}:{lineno}: {exc}")
    if errors:
        raise ConfigError("; ".join(errors))
    return ToolkitConfig(values)


def load_config(path) -> ToolkitConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read(), source=str(path))


def default_config() -> ToolkitConfig:
    """The bundled reference parameter set (paper.cfg)."""
    text = resources.files("sbs_toolkit").joinpath("data/paper.cfg").read_text()
    return loads(text, source="paper.cfg")
