"""Experiment configuration: flat key = value text with section headers.

The format is stock configparser INI (diff-friendly provenance).  Every key
has a documented default; unknown sections or keys are rejected.  Keys are
case-insensitive (configparser lowercases them).  See README for semantics.
"""

import configparser
import re
from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import ConfigurationError
from ..potentials import Family, PotentialSpec

DEFAULTS = {
    "potential": {
        "family": "eckart_barrier",
        "v0": "", "w": "", "d": "", "a": "",   # family-dependent overrides
        "sigma": "",
    },
    "experiment": {
        "e0": "1.0",
        "eps": "0.2",                  # constant, or h-dependent like "0.5*h^0.4"
        "h_list": "1/16 1/23 1/32 1/45 1/64 1/91 1/128 1/181 1/256",
        "seed": "1234",
        "out_dir": "",
    },
    "grid": {"l": "20.0", "points_per_wavelength": "8"},
    "cap": {"r_a": "14.0", "eta": "1.0"},
    "chi": {
        "plateau_pad": "1.0",          # plateau radius = hull radius + pad
        "support_pad": "2.0",          # support radius = plateau radius + pad
        "plateau_radius": "",          # explicit override
        "support_radius": "",
        "nontrapping_plateau_radius": "3.0",
        "force_zero": "false",         # test hook
    },
    "phi": {"plateau_halfwidth": "", "support_halfwidth": ""},   # default eps/2, eps
    "sweep": {
        "count": "41",
        "tol": "1e-6",
        "max_iter": "50000",
        "refine_factor": "4",
        "refine_max_passes": "40",
        "refine_tol": "0.005",
        "refine_seeds": "1",
    },
    "classify": {
        "search_box": "-12 12",
        "grid_points": "241",
        "r_escape": "15.0",
        "t_max": "200.0",
        "t_lyap": "40.0",
        "gamma_floor": "0.25",
        "flow_tol": "1e-9",
    },
    "ehrenfest": {
        "eps_cert": "0.3",
        "dt_factor": "20",             # dt = h / dt_factor
        "slack": "0.15",
        "sample_stride": "1",
        "wall_threshold": "1e-6",
    },
}

_PARAM_KEYS = {"v0": "V0", "w": "w", "d": "d", "a": "A"}

_FAMILY_DEFAULTS = {
    Family.ZERO: ({}, 1.0),
    Family.ATTRACTIVE_BUMP: ({"A": 1.0}, 4.0),
    Family.ECKART_BARRIER: ({"V0": 1.0, "w": 1.0}, 2.0),
    Family.DOUBLE_BARRIER: ({"V0": 2.0, "w": 1.0, "d": 4.0}, 2.0),
}

_EPS_POWER_RE = re.compile(r"^\s*([0-9.eE+-]+)\s*\*\s*h\s*\^\s*([0-9.eE+-]+)\s*$")


def parse_h(text: str) -> float:
    """Parse '1/64' or a float literal."""
    text = text.strip()
    if "/" in text:
        return float(Fraction(text))
    return float(text)


@dataclass
class EpsRule:
    """Sweep half-width: constant, or coeff * h^delta."""

    constant: float | None = None
    coeff: float | None = None
    delta: float | None = None

    @classmethod
    def parse(cls, text: str) -> "EpsRule":
        m = _EPS_POWER_RE.match(text)
        if m:
            return cls(None, float(m.group(1)), float(m.group(2)))
        try:
            return cls(float(text))
        except ValueError:
            raise ConfigurationError(f"cannot parse eps rule {text!r}")

    def __call__(self, h: float) -> float:
        if self.constant is not None:
            return self.constant
        return self.coeff * h ** self.delta


@dataclass
class ExperimentConfig:
    potential: PotentialSpec
    E0: float
    eps_rule: EpsRule
    h_list: list
    seed: int
    out_dir: str
    L: float
    ppw: float
    R_a: float
    eta: float
    chi_plateau_pad: float
    chi_support_pad: float
    chi_plateau_radius: float | None
    chi_support_radius: float | None
    chi_nontrapping_radius: float
    chi_force_zero: bool
    phi_plateau_halfwidth: float | None
    phi_support_halfwidth: float | None
    sweep_count: int
    sweep_tol: float
    sweep_max_iter: int
    refine_factor: int
    refine_max_passes: int
    refine_tol: float
    refine_seeds: int
    search_box: tuple
    grid_points: int
    R_escape: float
    T_max: float
    T_lyap: float
    gamma_floor: float
    flow_tol: float
    eps_cert: float
    dt_factor: float
    slack: float
    sample_stride: int
    wall_threshold: float
    raw: dict = field(default_factory=dict)

    def eps_for(self, h: float) -> float:
        eps = self.eps_rule(h)
        if eps <= 0:
            raise ConfigurationError(f"eps({h}) = {eps} must be positive")
        return eps

    def e_max(self) -> float:
        return self.E0 + max(self.eps_for(h) for h in self.h_list)


def _merged(parser: configparser.ConfigParser) -> dict:
    merged = {sec: dict(opts) for sec, opts in DEFAULTS.items()}
    for sec in parser.sections():
        key_sec = sec.lower()
        if key_sec not in DEFAULTS:
            raise ConfigurationError(f"unknown config section [{sec}]")
        for key, val in parser[sec].items():
            if key not in DEFAULTS[key_sec]:
                raise ConfigurationError(f"unknown key {key!r} in section [{sec}]")
            merged[key_sec][key] = val
    return merged


def _opt_float(text) -> float | None:
    if text is None or str(text).strip() == "":
        return None
    return float(text)


def load_config(path) -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    read = parser.read(path)
    if not read:
        raise ConfigurationError(f"cannot read config file {path}")
    return config_from_sections(_merged(parser))


def config_from_sections(merged: dict) -> ExperimentConfig:
    pot_sec = merged["potential"]
    try:
        family = Family(pot_sec["family"].strip().lower())
    except ValueError:
        raise ConfigurationError(f"unknown potential family {pot_sec['family']!r}")
    params, sigma_default = _FAMILY_DEFAULTS[family]
    params = dict(params)
    for low, name in _PARAM_KEYS.items():
        val = _opt_float(pot_sec.get(low))
        if val is not None:
            if name not in params:
                raise ConfigurationError(
                    f"parameter {name!r} not used by family {family.value}")
            params[name] = val
    sigma = _opt_float(pot_sec.get("sigma"))
    potential = PotentialSpec(family, params,
                              sigma if sigma is not None else sigma_default)

    exp = merged["experiment"]
    E0 = float(exp["e0"])
    if E0 <= 0:
        raise ConfigurationError("E0 must be positive")
    h_list = [parse_h(tok) for tok in exp["h_list"].split()]
    if not h_list:
        raise ConfigurationError("h_list is empty")
    if not all(a > b for a, b in zip(h_list, h_list[1:])):
        raise ConfigurationError("h_list must be strictly decreasing")
    if h_list[0] >= 1.0:
        raise ConfigurationError("h values must be < 1")

    L = float(merged["grid"]["l"])
    ppw = float(merged["grid"]["points_per_wavelength"])
    R_a = float(merged["cap"]["r_a"])
    eta = float(merged["cap"]["eta"])
    if not 0 < R_a < L:
        raise ConfigurationError("need 0 < R_a < L")
    if eta <= 0:
        raise ConfigurationError("cap strength eta must be positive")

    chi = merged["chi"]
    eh = merged["ehrenfest"]
    sw = merged["sweep"]
    cl = merged["classify"]
    box = tuple(float(t) for t in cl["search_box"].split())
    if len(box) != 2 or not box[0] < box[1]:
        raise ConfigurationError("search_box must be two increasing numbers")

    cfg = ExperimentConfig(
        potential=potential,
        E0=E0,
        eps_rule=EpsRule.parse(exp["eps"]),
        h_list=h_list,
        seed=int(exp["seed"]),
        out_dir=exp["out_dir"].strip(),
        L=L,
        ppw=ppw,
        R_a=R_a,
        eta=eta,
        chi_plateau_pad=float(chi["plateau_pad"]),
        chi_support_pad=float(chi["support_pad"]),
        chi_plateau_radius=_opt_float(chi["plateau_radius"]),
        chi_support_radius=_opt_float(chi["support_radius"]),
        chi_nontrapping_radius=float(chi["nontrapping_plateau_radius"]),
        chi_force_zero=str(chi["force_zero"]).strip().lower() in ("1", "true", "yes"),
        phi_plateau_halfwidth=_opt_float(merged["phi"]["plateau_halfwidth"]),
        phi_support_halfwidth=_opt_float(merged["phi"]["support_halfwidth"]),
        sweep_count=int(sw["count"]),
        sweep_tol=float(sw["tol"]),
        sweep_max_iter=int(sw["max_iter"]),
        refine_factor=int(sw["refine_factor"]),
        refine_max_passes=int(sw["refine_max_passes"]),
        refine_tol=float(sw["refine_tol"]),
        refine_seeds=int(sw["refine_seeds"]),
        search_box=box,
        grid_points=int(cl["grid_points"]),
        R_escape=float(cl["r_escape"]),
        T_max=float(cl["t_max"]),
        T_lyap=float(cl["t_lyap"]),
        gamma_floor=float(cl["gamma_floor"]),
        flow_tol=float(cl["flow_tol"]),
        eps_cert=float(eh["eps_cert"]),
        dt_factor=float(eh["dt_factor"]),
        slack=float(eh["slack"]),
        sample_stride=int(eh["sample_stride"]),
        wall_threshold=float(eh["wall_threshold"]),
        raw=merged,
    )
    for h in cfg.h_list:
        cfg.eps_for(h)
    return cfg
