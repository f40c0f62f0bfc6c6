#!/usr/bin/env python3
"""Secrecy rate for the same channel draw under the four eavesdropper models.

Instantaneous CSI prices the actual realization; partial CSI pays a fixed
rate cost designed for a 10% outage. Colluding eavesdroppers combine their
antennas, so they always cost more than the best single one.
"""
import numpy as np

from secsched import ChannelRealization, RngStreams, SecrecyRegime, \
    TransmitParams, sample_complex_gaussian, secrecy_rate

streams = RngStreams(7)
real = ChannelRealization(
    legit=sample_complex_gaussian((1, 6), streams.legit),
    eves=sample_complex_gaussian((3, 6), streams.eves),
)

regimes = {
    "instantaneous, non-colluding": SecrecyRegime("instantaneous", False),
    "instantaneous, colluding    ": SecrecyRegime("instantaneous", True),
    "partial 10%,   non-colluding": SecrecyRegime("partial", False, eta=0.1),
    "partial 10%,   colluding    ": SecrecyRegime("partial", True, eta=0.1),
}

print(f"{'regime':30s} {'fraction':>8s} {'codeword':>9s} {'cost':>7s} {'secrecy':>8s}")
for name, regime in regimes.items():
    best = None
    for frac in np.linspace(0.05, 0.95, 19):
        res = secrecy_rate(real, 0, TransmitParams(300.0, float(frac), 6), regime)
        if best is None or res.secrecy_rate > best[1].secrecy_rate:
            best = (float(frac), res)
    frac, res = best
    print(f"{name:30s} {frac:8.2f} {res.codeword_rate:9.3f} "
          f"{res.rate_cost:7.3f} {res.secrecy_rate:8.3f}")

print()
print("the best split moves toward more artificial noise as the eavesdropper")
print("model gets stronger, and partial CSI pays a channel-independent cost.")
