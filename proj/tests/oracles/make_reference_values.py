#!/usr/bin/env python3
"""Regenerates reference_values.hpp with mpmath (50-digit arithmetic).

The values here are computed independently of the C++ implementation and
frozen into the header so the tests do not depend on having Python around.

Usage: python3 make_reference_values.py > reference_values.hpp
"""

import random

import mpmath as mp

mp.mp.dps = 50


def log_cdf(kind, a):
    a = mp.mpf(a)
    if kind == "logistic":
        return -mp.log(1 + mp.exp(-a)) if a > -30 else a - mp.log(1 + mp.exp(a))
    if kind == "normal":
        return mp.log(mp.erfc(-a / mp.sqrt(2)) / 2)
    if kind == "laplace":
        return a - mp.log(2) if a <= 0 else mp.log(1 - mp.exp(-a) / 2)
    if kind == "hs":
        return mp.log(2 / mp.pi * mp.atan(mp.exp(mp.pi * a / 2)))
    raise ValueError(kind)


def pdf(kind, a):
    a = mp.mpf(a)
    if kind == "logistic":
        return mp.sech(a / 2) ** 2 / 4
    if kind == "normal":
        return mp.exp(-a * a / 2) / mp.sqrt(2 * mp.pi)
    if kind == "laplace":
        return mp.exp(-abs(a)) / 2
    if kind == "hs":
        return mp.sech(mp.pi * a / 2) / 2
    raise ValueError(kind)


def neg_log_cdf_deriv(kind, a):
    return -pdf(kind, a) / mp.exp(log_cdf(kind, a))


def norm_quantile(u):
    return mp.sqrt(2) * mp.erfinv(2 * mp.mpf(u) - 1)


def sample_complexity(eps, delta, d, zeta, big_f, big_b, beta, big_t):
    eps, delta, zeta, big_f, big_b, beta, big_t = map(
        mp.mpf, (eps, delta, zeta, big_f, big_b, beta, big_t))
    lead = 9 * zeta * (big_f + 1) ** 2 * big_t ** 2 / (2 * eps ** 2)
    bracket = (mp.log(6 * zeta * (1 + big_f) * big_b / (eps * delta))
               + d * d * mp.log(12 * zeta * (1 + big_f) * beta / eps)
               + mp.mpf(3) / 2 * d * d * mp.log(d))
    return lead * bracket


def log_cover_size(alpha, d, big_b, beta):
    alpha, big_b, beta = map(mp.mpf, (alpha, big_b, beta))
    return mp.log(big_b / alpha) + d * d * mp.log(4 * beta * d * mp.sqrt(d) / alpha)


def log_recovery_bound(eps, d, c, omega):
    eps, c, omega = map(mp.mpf, (eps, c, omega))
    log_cd = mp.log(c) + d / mp.mpf(2) * mp.log(mp.pi) - mp.loggamma(d / mp.mpf(2) + 1)
    return 2 * mp.log(omega) + 2 * log_cd - mp.log(800) - 2 * d * mp.log(18) + 2 * mp.log(eps)


def lit(x):
    return mp.nstr(mp.mpf(x), 17, strip_zeros=False)


def emit_scalar(name, value):
    print(f"inline constexpr double {name} = {lit(value)};")


def main():
    print("// Generated by make_reference_values.py -- do not edit by hand.")
    print("#pragma once")
    print()
    print("namespace refvals {")
    print()

    emit_scalar("kLaplaceLogCdf1", log_cdf("laplace", 1))
    emit_scalar("kLogisticBigTBetaF2", -log_cdf("logistic", -2))
    emit_scalar("kNormalZetaBetaF2", -neg_log_cdf_deriv("normal", -2))
    emit_scalar("kNormalNegLogCdfDeriv2", neg_log_cdf_deriv("normal", 2))
    emit_scalar("kNormalNegLogCdfDerivM5", neg_log_cdf_deriv("normal", -5))
    emit_scalar("kNormalNegLogCdfDerivM40", neg_log_cdf_deriv("normal", -40))
    emit_scalar("kTwoPairLogisticRisk",
                (mp.log(2) + mp.log(1 + mp.exp(-3))) / 2)
    emit_scalar("kCalibrationScaleMargin1Target25", 1 / mp.log(3))
    print()

    tail_points = [-5, -10, -20, -25.5, -26.5, -30, -37, -50, -100, -300, -700]
    print("inline constexpr double kNormalTailA[] = {")
    print("    " + ", ".join(lit(a) for a in tail_points) + "};")
    print("inline constexpr double kNormalTailLogCdf[] = {")
    for a in tail_points:
        print(f"    {lit(log_cdf('normal', a))},")
    print("};")
    print()

    hs_points = [-700, -50, -2, 2, 30, 50]
    print("inline constexpr double kHsA[] = {")
    print("    " + ", ".join(lit(a) for a in hs_points) + "};")
    print("inline constexpr double kHsLogCdf[] = {")
    for a in hs_points:
        print(f"    {lit(log_cdf('hs', a))},")
    print("};")
    print()

    spot = [("logistic", -3), ("logistic", 4), ("laplace", -3), ("laplace", 2),
            ("normal", -2), ("normal", 2), ("hs", -3), ("hs", 3)]
    print("// kind index order: logistic=0 normal=1 laplace=2 hs=3")
    kind_ix = {"logistic": 0, "normal": 1, "laplace": 2, "hs": 3}
    print("inline constexpr int kSpotKind[] = {"
          + ", ".join(str(kind_ix[k]) for k, _ in spot) + "};")
    print("inline constexpr double kSpotA[] = {"
          + ", ".join(lit(a) for _, a in spot) + "};")
    print("inline constexpr double kSpotLogCdf[] = {")
    for k, a in spot:
        print(f"    {lit(log_cdf(k, a))},")
    print("};")
    print("inline constexpr double kSpotNegLogCdfDeriv[] = {")
    for k, a in spot:
        print(f"    {lit(neg_log_cdf_deriv(k, a))},")
    print("};")
    print()

    qs = [1e-9, 1e-6, 0.025, 0.3, 0.5, 0.975, 1 - 1e-6, 1 - 1e-9]
    print("inline constexpr double kNormalQuantileU[] = {"
          + ", ".join(lit(u) for u in qs) + "};")
    print("inline constexpr double kNormalQuantile[] = {")
    for u in qs:
        print(f"    {lit(norm_quantile(u))},")
    print("};")
    print()

    rng = random.Random(20240611)
    sc_tuples = []
    for i in range(20):
        d = 100 if i < 2 else rng.randint(2, 50)
        sc_tuples.append((
            round(rng.uniform(0.01, 0.5), 6), round(rng.uniform(0.01, 0.3), 6),
            d, round(rng.uniform(0.5, 5.0), 6), round(rng.uniform(0.5, 10.0), 6),
            round(rng.uniform(0.5, 10.0), 6), round(rng.uniform(0.5, 10.0), 6),
            round(rng.uniform(0.5, 20.0), 6)))
    print("// columns: eps delta d zeta F B beta T")
    print("inline constexpr double kScArgs[][8] = {")
    for t in sc_tuples:
        print("    {" + ", ".join(lit(v) for v in t) + "},")
    print("};")
    print("inline constexpr double kScValue[] = {")
    for t in sc_tuples:
        print(f"    {lit(sample_complexity(*t))},")
    print("};")
    print()

    cover_tuples = []
    for i in range(20):
        d = 100 if i < 2 else rng.randint(1, 50)
        cover_tuples.append((round(rng.uniform(0.01, 1.0), 6), d,
                             round(rng.uniform(0.5, 10.0), 6),
                             round(rng.uniform(0.5, 10.0), 6)))
    print("// columns: alpha d B beta")
    print("inline constexpr double kCoverArgs[][4] = {")
    for t in cover_tuples:
        print("    {" + ", ".join(lit(v) for v in t) + "},")
    print("};")
    print("inline constexpr double kCoverValue[] = {")
    for t in cover_tuples:
        print(f"    {lit(log_cover_size(*t))},")
    print("};")
    print()

    rec_tuples = []
    for i in range(20):
        d = 100 if i < 2 else rng.randint(1, 50)
        rec_tuples.append((round(rng.uniform(0.01, 0.5), 6), d,
                           round(rng.uniform(0.01, 2.0), 6),
                           round(rng.uniform(1e-4, 0.5), 6)))
    print("// columns: eps d c omega")
    print("inline constexpr double kRecArgs[][4] = {")
    for t in rec_tuples:
        print("    {" + ", ".join(lit(v) for v in t) + "},")
    print("};")
    print("inline constexpr double kRecLogValue[] = {")
    for t in rec_tuples:
        print(f"    {lit(log_recovery_bound(*t))},")
    print("};")
    print()
    print("}  // namespace refvals")


if __name__ == "__main__":
    main()
