"""Independent reference values for the C++ tests.

Everything here is worked out from closed forms with plain numpy; scipy is
only used as a cross-check when it happens to be installed.  Run from the
repo root:  python3 tools/oracles/gen_oracles.py > tests/oracle_values.hpp
"""
import math

import numpy as np


def bilinear_highpass2(fc, fs):
    # analog prototype s^2 / (s^2 + sqrt2 s + 1), prewarped, s = c (1 - z^-1) / (1 + z^-1)
    wc = 2.0 * fs * math.tan(math.pi * fc / fs)
    c = 2.0 * fs
    r2 = math.sqrt(2.0)
    a0 = c * c + r2 * wc * c + wc * wc
    b = [c * c / a0, -2.0 * c * c / a0, c * c / a0]
    a = [1.0, (2.0 * wc * wc - 2.0 * c * c) / a0, (c * c - r2 * wc * c + wc * wc) / a0]
    return b, a


def bilinear_lowpass2(fc, fs):
    wc = 2.0 * fs * math.tan(math.pi * fc / fs)
    c = 2.0 * fs
    r2 = math.sqrt(2.0)
    a0 = c * c + r2 * wc * c + wc * wc
    b = [wc * wc / a0, 2.0 * wc * wc / a0, wc * wc / a0]
    a = [1.0, (2.0 * wc * wc - 2.0 * c * c) / a0, (c * c - r2 * wc * c + wc * wc) / a0]
    return b, a


def gain(b, a, f, fs):
    z = np.exp(-1j * 2.0 * math.pi * f / fs)
    num = b[0] + b[1] * z + b[2] * z * z
    den = a[0] + a[1] * z + a[2] * z * z
    return abs(num / den)


def lstm(n_in, hidden):
    return 4 * hidden * (n_in + hidden) + 4 * hidden


def conv(k, cin, cout):
    return k * cin * cout + cout


def param_counts(h):
    # default hyper: conv1 8/9, conv2 16/5, lstm1 64, lstm2 48, kin 32, attn 16, force 16
    emg = 4 * (conv(9, 1, 8) + conv(5, 8, 16))
    kin = lstm(4, 32)
    attn = (32 * 16 + 16) + 2 * (16 * 16 + 16)
    force = conv(9, 2, 8) + conv(5, 8, 16)
    lstm2 = lstm(64, 48)
    sic = emg + lstm(64, 64) + lstm2 + 48 * h + h
    dic = emg + kin + attn + lstm(64 + 32 + 16, 64) + lstm2 + 48 * h + h
    return {
        "SIC": sic,
        "SIC_F": sic + force + 16 * h,
        "DIC": dic,
        "DIC_F": dic + force + 16 * h,
    }


def conv1d_same(x, k):
    pad = len(k) // 2
    xp = [0.0] * pad + list(x) + [0.0] * pad
    return [sum(xp[i + j] * k[j] for j in range(len(k))) for i in range(len(x))]


def main():
    hp_b, hp_a = bilinear_highpass2(20.0, 1000.0)
    lp_b, lp_a = bilinear_lowpass2(5.0, 1000.0)
    try:
        from scipy import signal

        sos = signal.butter(2, 20.0, btype="highpass", fs=1000.0, output="sos")[0]
        assert np.allclose(sos[:3], hp_b, rtol=1e-12) and np.allclose(sos[3:], hp_a, rtol=1e-12)
        sos = signal.butter(2, 5.0, btype="lowpass", fs=1000.0, output="sos")[0]
        assert np.allclose(sos[:3], lp_b, rtol=1e-12) and np.allclose(sos[3:], lp_a, rtol=1e-12)
    except ImportError:
        pass

    # Adam, first step, g = 1: m_hat = 1, v_hat = 1
    adam_delta = -0.001 * 1.0 / (math.sqrt(1.0) + 1e-8)

    out = []
    w = out.append
    w("#pragma once")
    w("// Generated by tools/oracles/gen_oracles.py. Do not edit.")
    w("")
    w("namespace oracle {")
    w("")
    w("inline constexpr double kHighPass20[5] = {%r, %r, %r, %r, %r};  // b0 b1 b2 a1 a2" %
      (hp_b[0], hp_b[1], hp_b[2], hp_a[1], hp_a[2]))
    w("inline constexpr double kLowPass5[5] = {%r, %r, %r, %r, %r};" %
      (lp_b[0], lp_b[1], lp_b[2], lp_a[1], lp_a[2]))
    w("inline constexpr double kLowPass5GainAt50 = %r;" % float(gain(lp_b, lp_a, 50.0, 1000.0)))
    w("inline constexpr double kLowPass5GainAt5 = %r;" % float(gain(lp_b, lp_a, 5.0, 1000.0)))
    w("")
    w("inline constexpr double kConvExample[4] = {%r, %r, %r, %r};" %
      tuple(float(v) for v in conv1d_same([1, 2, 3, 4], [1, 0, -1])))
    w("inline constexpr double kAdamFirstStep = %r;" % adam_delta)
    w("")
    # window counts: floor((L - W - tail) / hop) + 1
    w("inline constexpr int kWindows2800 = %d;" % ((2800 - 2000) // 40 + 1))
    w("inline constexpr int kExamples12000H50 = %d;" % ((12000 - 2000 - 500) // 40 + 1))
    w("inline constexpr int kPredictRows12000 = %d;" % ((12000 - 2000) // 40 + 1))
    w("inline constexpr int kSynthLength10x1200 = %d;" % (10 * 1200))
    w("")
    for h in (1, 26, 50):
        c = param_counts(h)
        w("inline constexpr long kParamsH%d[4] = {%d, %d, %d, %d};  // SIC SIC_F DIC DIC_F" %
          (h, c["SIC"], c["SIC_F"], c["DIC"], c["DIC_F"]))
    w("inline constexpr long kDense48to50 = %d;" % (48 * 50 + 50))
    w("")
    w("}  // namespace oracle")
    print("\n".join(out))


if __name__ == "__main__":
    main()
