"""The measurement-channel family, from trivial process to ideal measurement.

The fluorescence pulse acts on the qutrit as a one-parameter channel: the
complex factor g0 multiplies the coherences between |0> and the two spectator
levels, while populations and the spectator-spectator coherence pass through
untouched.  g0 = 1 is the do-nothing process, g0 = 0 the ideal measurement of
|0><0|.  This script walks through the family and shows the effect on the two
benchmark states (|1> + i|2>)/sqrt2 (coherence survives) and
(|0> + i|2>)/sqrt2 (coherence shrinks with |g0|).
"""

import numpy as np

from lueders import channels, states

np.set_printoptions(precision=3, suppress=True, linewidth=120)

print("Choi matrix of the ideal measurement (g0 = 0), absolute values:")
chi_ideal = channels.measurement_channel(0.0)
print(np.abs(chi_ideal))

print("\nSelf-check: the Kraus pair {sqrt(E1), G sqrt(E0)} builds the same channel.")
model = channels.MeasurementModel(0.55 * np.exp(0.3j))
diff = np.max(np.abs(channels.kraus_channel(model.kraus_operators()) - channels.measurement_channel(model.g0)))
print(f"max |difference| = {diff:.2e}")

psi_survives = np.array([0.0, 1.0, 1j], dtype=complex) / np.sqrt(2.0)
psi_decays = np.array([1.0, 0.0, 1j], dtype=complex) / np.sqrt(2.0)

print("\n|rho_12| and |rho_02| after the pulse, as the coupling grows:")
print(f"{'g0':>6} {'P_scatt':>8} {'|rho12|':>9} {'|rho02|':>9}")
for g0 in (1.0, 0.8, 0.6, 0.4, 0.2, 0.0):
    chi = channels.measurement_channel(g0)
    r12 = channels.apply_channel(chi, states.density(psi_survives))[1, 2]
    r02 = channels.apply_channel(chi, states.density(psi_decays))[0, 2]
    print(f"{g0:>6.1f} {1 - g0**2:>8.2f} {abs(r12):>9.3f} {abs(r02):>9.3f}")

print("\nProcess fidelity to the two extremes of the family:")
chi_id = channels.identity_choi()
print(f"{'g0':>6} {'F(.,identity)':>14} {'F(.,ideal)':>12}")
for g0 in (1.0, 0.8, 0.6, 0.4, 0.2, 0.0):
    chi = channels.measurement_channel(g0)
    print(
        f"{g0:>6.1f} {channels.process_fidelity(chi, chi_id):>14.4f} "
        f"{channels.process_fidelity(chi, chi_ideal):>12.4f}"
    )
print(f"\nF(identity, ideal measurement) = {channels.process_fidelity(chi_id, chi_ideal):.6f} (= 5/9)")
