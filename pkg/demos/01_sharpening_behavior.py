"""How the two sharpening transforms react to input entropy.

Temperature softmax reacts to the absolute difference between entries, so
the same temperature over-sharpens confident inputs while barely moving
ambiguous ones. Power normalization reacts to ratios only: exponent 1 is
an exact identity, and the same exponent shifts every input by the same
log-ratio regardless of its confidence.
"""
import numpy as np

from fdsim.aggregation import (
    log_ratio_enhanced_era,
    log_ratio_era,
    power_sharpen,
    temperature_sharpen,
)
from fdsim.soft_labels import entropy

high_entropy = np.array([0.15, 0.10, 0.25, 0.20, 0.30])   # ambiguous average
low_entropy = np.array([0.75, 0.10, 0.05, 0.05, 0.05])    # confident average

print("input entropies (nats):")
print(f"  ambiguous: {entropy(high_entropy):.4f}   confident: {entropy(low_entropy):.4f}")

print("\ntemperature sweep (entropy after softmax(z/T)):")
for temperature in (1.0, 0.5, 0.2, 0.1, 0.05):
    ha = entropy(temperature_sharpen(high_entropy, temperature))
    hc = entropy(temperature_sharpen(low_entropy, temperature))
    print(f"  T={temperature:<5} ambiguous -> {ha:.4f}   confident -> {hc:.4f}")

print("\nexponent sweep (entropy after z^beta / sum z^beta):")
for beta in (0.5, 1.0, 1.5, 2.0, 3.0):
    ha = entropy(power_sharpen(high_entropy, beta))
    hc = entropy(power_sharpen(low_entropy, beta))
    note = "  <- identity" if beta == 1.0 else ""
    print(f"  beta={beta:<4} ambiguous -> {ha:.4f}   confident -> {hc:.4f}{note}")

# Two inputs carrying the same relative knowledge (a 1.5x ratio between
# two classes) at different scales: the temperature transform sees two
# different signals, the power transform sees one.
print("\nsame 1.5x ratio at two scales:")
print(f"  temperature signal at scale 0.10: {log_ratio_era(0.15, 0.10, 1.0):.3f}")
print(f"  temperature signal at scale 0.20: {log_ratio_era(0.30, 0.20, 1.0):.3f}")
print(f"  power signal at scale 0.10:       {log_ratio_enhanced_era(0.15, 0.10, 1.0):.6f}")
print(f"  power signal at scale 0.20:       {log_ratio_enhanced_era(0.30, 0.20, 1.0):.6f}")
