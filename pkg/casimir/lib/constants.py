"""
Physical constants used throughout the package.

All values come from scipy.constants. Since the 2019 SI redefinition ħ, c, k_B
and e are exact, so these coincide with the CODATA 2018 table:

    =========  ==========================  ==========
    symbol     value                       unit
    =========  ==========================  ==========
    hbar       1.054571817e-34             J s
    c          299792458                   m / s
    k_B        1.380649e-23                J / K
    eV         1.602176634e-19             J
    =========  ==========================  ==========
"""

import hashlib
import json
from typing import Dict

from scipy.constants import Boltzmann, c, e, hbar

HBAR = hbar
C = c
K_B = Boltzmann
EV = e

CONSTANTS_SOURCE = "CODATA 2018 (scipy.constants)"


def constants_table() -> Dict[str, float]:
    """Constants as a plain dict for provenance records"""
    return {
        "hbar_J_s": HBAR,
        "c_m_per_s": C,
        "k_B_J_per_K": K_B,
        "eV_J": EV,
    }


def constants_hash() -> str:
    """Short SHA-256 digest of the constants table"""
    payload = json.dumps(constants_table(), sort_keys=True).encode("utf-8")
    return hashlib.sha256(payload).hexdigest()[:16]


def ev_to_rad_per_s(energy_ev: float) -> float:
    """Convert a photon energy in eV to an angular frequency ω = E/ħ"""
    return energy_ev * EV / HBAR
