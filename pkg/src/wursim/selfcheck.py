"""Hand-computable oracle scenarios and codec golden vectors.

Oracle scenarios use one sensor, no saturated STAs and sigma = 0, so every
quantity has a closed form in the default constants.  With cw_min = 0 the
backoff draw is always zero and the expected values are plain numbers.
"""

from __future__ import annotations

from dataclasses import dataclass

from .codec import DataRate, WurFrame, WurFrameType, compute_fcs, bytes_to_bits_msb, ppdu_airtime
from .config import ScenarioConfig
from .methods import MethodKind, run_once

# mW * us -> J
_UJ = 1e-9


def _e(mw_us: float) -> float:
    return mw_us * _UJ


# Defaults: P_tx 280, P_listen 100, P_wur 0.5, P_doze 0.05 (mW); switch-on 2000,
# AIFS 43, SIFS 16, ACK 44, CTS 44, TF 100, DATA 1480, LDR wake-up frame 920 (us).
# Trailing term of every method: SIFS + ACK listened at P_listen = 60 us.
ORACLE_CW0 = {
    #                    energy (J)                                         channel time (s)
    MethodKind.TWT_PLAIN: (_e(100 * 2000 + 100 * 43 + 280 * 1480 + 100 * 60), 1540e-6),
    MethodKind.TWT_TF: (_e(100 * 2000 + 100 * (43 + 100 + 16) + 280 * 1480 + 100 * 60), 1656e-6),
    MethodKind.TWT_GUARD: (_e(100 * 2000 + 280 * 1480 + 100 * 60), 1540e-6),
    MethodKind.WUR_CTS: (_e(0.55 * (43 + 44 + 16 + 920) + 100 * 2000 + 280 * 1480 + 100 * 60),
                         2520e-6),
}

ORACLE_CONFIG = ScenarioConfig(M=0, N=1, frames=1, cw_min=0, sigma_list=(0.0,), replications=1)
ORACLE_SEED = 12345

ENERGY_TOL_J = 1e-9
TIME_TOL_S = 1e-9


@dataclass(frozen=True)
class Check:
    name: str
    expected: object
    got: object
    ok: bool

    def line(self) -> str:
        return f"{'PASS' if self.ok else 'FAIL'}  {self.name}: expected {self.expected}, got {self.got}"


def oracle_checks(seed: int = ORACLE_SEED) -> list[Check]:
    out = []
    for m, (energy, ct) in ORACLE_CW0.items():
        r = run_once(ORACLE_CONFIG, m, 0.0, seed)
        e_got, ct_got = r.energy_per_frame, r.channel_time_per_frame
        out.append(Check(f"{m.value} energy_J", energy, e_got, abs(e_got - energy) <= ENERGY_TOL_J))
        out.append(Check(f"{m.value} channel_time_s", ct, ct_got, abs(ct_got - ct) <= TIME_TOL_S))
    return out


def codec_checks() -> list[Check]:
    out = []
    bare = WurFrame(WurFrameType.WAKE_UP, 0x001)
    for rate, want in ((DataRate.LDR, 920), (DataRate.HDR, 280)):
        got = ppdu_airtime(bare, rate).total_us
        out.append(Check(f"{rate.value} bodiless airtime_us", want, got, got == want))
    for rate, want in ((DataRate.LDR, 62.5), (DataRate.HDR, 250.0)):
        lay = ppdu_airtime(bare, rate)
        got = bare.bit_length / lay.data_us * 1000
        out.append(Check(f"{rate.value} rate_kbps", want, got, got == want))
    got = compute_fcs(bytes_to_bits_msb(b"123456789"))
    out.append(Check("crc16 check value", 0x29B1, got, got == 0x29B1))
    return out


def self_check() -> tuple[bool, list[str]]:
    checks = codec_checks() + oracle_checks()
    return all(c.ok for c in checks), [c.line() for c in checks]
