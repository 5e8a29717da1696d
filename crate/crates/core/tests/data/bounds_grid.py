"""Regenerates bounds_grid.json with 50-digit arithmetic (mpmath)."""
import json
import os

from mpmath import mp, mpf, e, sqrt, ceil

mp.dps = 50
E2 = e ** 2
P_VALUES = [1.1, 1.2, 1.25, 4.0 / 3.0, 2.0, 4.0, 5.0, 6.0, 8.0, 12.0]
EPS = [0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 3.0, 0.3, 0.7, 1.5]
MU = [0.5, 1.0, 1.3, 2.0, 0.8, 3.0, 1.0, 0.6, 2.5, 1.1]


def c_p(p):
    return (2 * E2 / p ** (1 / p)) ** (p / (p - 1))


def d_p(p):
    return 2 * (p - 1) * e ** 4


def term(ratio, p, power):
    return c_p(p) * ratio ** (p / (p - 1)) if power else d_p(p) * ratio ** 2


def error_bound(k, diam, p, power):
    if power:
        return 2 * E2 / p ** (1 / p) * mpf(k) ** (1 / p - 1) * diam
    return E2 * sqrt(2 * (p - 1) / mpf(k)) * diam


def s(x):
    return mp.nstr(x, 30)


points = []
for i in range(100):
    p_f = P_VALUES[i % 10]
    eps_f = EPS[(i // 10) % 10]
    mu_f = MU[(i * 7) % 10]
    g = 1 + (i * 3) % 5
    d, n = 2 + i % 3, i % 4
    p, eps, mu = mpf(p_f), mpf(eps_f), mpf(mu_f)
    schatten_power = p_f <= 4.0 / 3.0
    lp_power = p_f < 2.0
    k = 1 + (i * 37) % 500
    rank = term(2 * mu / eps, p, schatten_power)
    delta = sqrt(1 + eps / mu ** 2) - 1
    puri = term(2 / delta, p, schatten_power)
    sep = term(2 / eps, p, schatten_power)
    nn = term(2 * mu / eps, p, lp_power)
    pt = {
        "p": p_f, "epsilon": eps_f, "mu": mu_f, "group_order": g, "d": d, "n": n, "k": k,
        "required_k_real": s(term(2 * mu / eps, p, schatten_power)),
        "error_bound": s(error_bound(k, 2 * mu, p, schatten_power)),
        "rank_real": s(rank), "rank": str(int(ceil(rank)) * g),
        "puri_real": s(puri), "puri": str(int(ceil(puri)) * g),
        "sep_real": s(sep), "sep": str(int(ceil(sep)) * g),
        "nn_real": s(nn), "nn": str(int(ceil(nn)) * g),
    }
    if p_f == 2.0:
        pt["schatten1"] = str(int(ceil(rank)) * g * d ** (n + 1))
    points.append(pt)

out = os.path.join(os.path.dirname(os.path.abspath(__file__)), "bounds_grid.json")
with open(out, "w") as f:
    json.dump({"digits": 50, "points": points}, f, indent=1)
