#!/usr/bin/env python3
"""Independent reference values for the oracle-check fixtures.

Everything here is computed with numpy/scipy from the defining formulas,
without looking at the C++ code paths. Inputs are deterministic probe
vectors u(k, salt) = sin(0.37 k + 1.91 salt + 0.5) so both sides can rebuild
them; each row carries the FNV-1a hash of its input description.

Usage: gen_fixtures.py <fixture dir>
"""
import math
import os
import sys

import numpy as np


def u(k, salt):
    return math.sin(0.37 * k + 1.91 * salt + 0.5)


def fnv1a(s):
    h = 0xcbf29ce484222325
    for b in s.encode():
        h ^= b
        h = (h * 0x100000001b3) & 0xFFFFFFFFFFFFFFFF
    return "%016x" % h


class Fixture:
    def __init__(self, name):
        self.name = name
        self.rows = []

    def add(self, ident, desc, value, tol):
        self.rows.append((ident, fnv1a(desc), float(value), float(tol)))

    def write(self, d):
        with open(os.path.join(d, self.name + ".csv"), "w") as f:
            f.write("id,input_hash,expected,tolerance\n")
            for i, h, v, t in self.rows:
                f.write("%s,%s,%s,%s\n" % (i, h, repr(v), repr(t)))


def linear_alpha_bar(n, b0, b1):
    beta = [b0 + (b1 - b0) * i / (n - 1) for i in range(n)]
    out, p = [], 1.0
    for b in beta:
        p *= 1.0 - b
        out.append(p)
    return np.array(out)


def rescaled_sqrt(ab):
    s = np.sqrt(ab)
    return (s - s[-1]) * s[0] / (s[0] - s[-1])


def schedule_fixture():
    fx = Fixture("schedule")
    ab = linear_alpha_bar(1000, 1e-4, 2e-2)
    for t in (1, 500, 1000):
        fx.add("alpha_bar_t%d" % t, "linear:n=1000:b0=1e-4:b1=2e-2:t=%d" % t, ab[t - 1], 1e-12)
    sq = rescaled_sqrt(ab)
    for t in (1, 500, 999, 1000):
        fx.add("zt_sqrt_alpha_bar_t%d" % t, "zt:linear:n=1000:b0=1e-4:b1=2e-2:t=%d" % t, sq[t - 1], 1e-12)
    return fx


def bgn_fixture():
    fx = Fixture("bgn")
    ab = linear_alpha_bar(1000, 1e-4, 2e-2)
    vt = np.array([u(j, 1) for j in range(4)])
    vc = np.array([u(j, 2) for j in range(4)])
    eps = np.array([u(j, 3) for j in range(4)])
    for tm, tn, t in ((600, 990, 990), (600, 990, 795), (0, 700, 350), (600, 990, 599)):
        a = ab[t - 1]
        lam = min(max((t - tm) / (tn - tm), 0.0), 1.0)
        ep = eps + lam * math.sqrt(a) / math.sqrt(1 - a) * (vc - vt)
        vt_t = math.sqrt(a) * vt + math.sqrt(1 - a) * ep
        for j in range(4):
            desc = "bgn:linear:n=1000:tm=%d:tn=%d:t=%d:j=%d:probe=1,2,3" % (tm, tn, t, j)
            fx.add("eps_prime_tm%d_tn%d_t%d_%d" % (tm, tn, t, j), desc + ":eps_prime", ep[j], 1e-12)
            fx.add("forward_tm%d_tn%d_t%d_%d" % (tm, tn, t, j), desc + ":forward", vt_t[j], 1e-12)
    return fx


def nn_fixture():
    fx = Fixture("nn")
    half, pos = 2, 1000.0 * 500 / 1000
    ang = [pos * 10000.0 ** (-i / half) for i in range(half)]
    emb = [math.sin(a) for a in ang] + [math.cos(a) for a in ang]
    for i, v in enumerate(emb):
        fx.add("time_embedding_%d" % i, "temb:t=500:dim=4:n=1000:i=%d" % i, v, 1e-12)

    B, dm, d, dc, KT, KI = 2, 5, 4, 3, 3, 2
    f = np.array([[u(b * dm + i, 11) for i in range(dm)] for b in range(B)])
    wq = np.array([[u(i * d + j, 12) for j in range(d)] for i in range(dm)])
    bq = np.array([u(j, 13) for j in range(d)])
    wk = [np.array([[u(p * d + j, s) for j in range(d)] for p in range(dc)]) for s in (14, 16)]
    wv = [np.array([[u(p * d + j, s) for j in range(d)] for p in range(dc)]) for s in (15, 17)]
    tok = [np.array([[[u((b * K + k) * dc + p, s) for p in range(dc)] for k in range(K)] for b in range(B)])
           for K, s in ((KT, 18), (KI, 19))]
    out = np.zeros((B, d))
    for b in range(B):
        q = f[b] @ wq + bq
        for i in range(2):
            keys = tok[i][b] @ wk[i]
            vals = tok[i][b] @ wv[i]
            sc = keys @ q / math.sqrt(d)
            w = np.exp(sc - sc.max())
            w /= w.sum()
            out[b] += w @ vals
    for b in range(B):
        for j in range(d):
            fx.add("mca_%d_%d" % (b, j), "mca:B=2:dm=5:d=4:dc=3:KT=3:KI=2:probe=11..19:b=%d:j=%d" % (b, j),
                   out[b, j], 1e-12)
    return fx


def oracle_fixture():
    fx = Fixture("oracle")
    ab = linear_alpha_bar(1000, 1e-4, 2e-2)
    t = 300
    a = ab[t - 1]
    mu = [0.3, -0.7, 1.1]
    var = [0.5, 2.0, 1.3]
    xt = [0.9, -0.4, 0.2]
    for i in range(3):
        sd = math.sqrt(var[i])
        g = np.linspace(mu[i] - 14 * sd, mu[i] + 14 * sd, 400001)
        logw = -0.5 * (g - mu[i]) ** 2 / var[i] - 0.5 * (xt[i] - math.sqrt(a) * g) ** 2 / (1 - a)
        w = np.exp(logw - logw.max())
        x0 = np.trapezoid(g * w, g) / np.trapezoid(w, g)
        eps = (xt[i] - math.sqrt(a) * x0) / math.sqrt(1 - a)
        desc = "quad:linear:n=1000:t=300:mu=0.3,-0.7,1.1:var=0.5,2,1.3:xt=0.9,-0.4,0.2:i=%d" % i
        fx.add("posterior_x0_%d" % i, desc + ":x0", x0, 1e-4 * max(1.0, abs(x0)))
        fx.add("posterior_eps_%d" % i, desc + ":eps", eps, 1e-4 * max(1.0, abs(eps)))

    # Monte-Carlo conditioning of a 2+2 joint Gaussian by kernel weighting.
    rng = np.random.default_rng(20240607)
    A = np.array([[u(i * 4 + j, 31) for j in range(4)] for i in range(4)])
    cov = A @ A.T + 0.5 * np.eye(4)
    mean = np.array([u(j, 32) for j in range(4)])
    c_star = mean[:2] + np.array([0.4, -0.3])
    n, h = 1_000_000, 0.08
    draws = np.zeros((0, 4))
    for _ in range(8):
        draws = np.vstack([draws, rng.multivariate_normal(mean, cov, size=n)])
    dc = draws[:, :2] - c_star
    w = np.exp(-0.5 * (dc ** 2).sum(1) / h ** 2)
    wsum, w2 = w.sum(), (w ** 2).sum()
    neff = wsum ** 2 / w2
    for k in range(2):
        x = draws[:, 2 + k]
        m = (w * x).sum() / wsum
        v = (w * (x - m) ** 2).sum() / wsum
        desc = "mc_transfer:probe=31,32:cstar=+0.4,-0.3:k=%d" % k
        fx.add("transfer_mean_%d" % k, desc + ":mean", m, 3 * math.sqrt(v / neff) + 0.01)
        fx.add("transfer_var_%d" % k, desc + ":var", v, 3 * v * math.sqrt(2 / neff) + 0.02)
    return fx


def metrics_fixture():
    fx = Fixture("metrics")
    m1, s1, m2, s2, n = 0.5, 1.2, -0.3, 0.7, 10000
    closed = (m1 - m2) ** 2 + (s1 - s2) ** 2
    se = math.sqrt((2 * (m1 - m2)) ** 2 * (s1 ** 2 + s2 ** 2) / n
                   + (2 * (s1 - s2)) ** 2 * (s1 ** 2 + s2 ** 2) / (2 * n))
    fx.add("frechet_1d_closed_form", "frechet1d:m1=0.5:s1=1.2:m2=-0.3:s2=0.7:n=10000", closed, 3 * se)

    P = np.array([[u(i * 3 + j, 41) for j in range(3)] for i in range(7)])
    T = np.array([[u(i * 3 + j, 42) for j in range(3)] for i in range(7)])
    fx.add("paired_mse_probe", "paired_mse:7x3:probe=41,42", ((P - T) ** 2).sum(1).mean() / 3, 1e-12)

    X = np.array([[u(i * 2 + j, 43) for j in range(2)] for i in range(6)])
    Y = np.array([[u(i * 2 + j, 44) + 0.5 for j in range(2)] for i in range(5)])
    dxy = np.linalg.norm(X[:, None] - Y[None], axis=2).mean()
    dxx = np.linalg.norm(X[:, None] - X[None], axis=2).sum() / (6 * 5)
    dyy = np.linalg.norm(Y[:, None] - Y[None], axis=2).sum() / (5 * 4)
    fx.add("energy_probe", "energy:6x2,5x2:probe=43,44+0.5", 2 * dxy - dxx - dyy, 1e-12)

    # Squared index: linear-phase probes span only two directions, which
    # would leave the covariances singular.
    S = np.array([[u((i * 4 + j) ** 2, 45) for j in range(4)] for i in range(9)])
    R = np.array([[u((i * 4 + j) ** 2, 46) for j in range(4)] for i in range(11)]) * 1.3
    def fr(a, b):
        # 40-digit arithmetic so the reference is exact to double precision.
        import mpmath
        mpmath.mp.dps = 40
        A, B = mpmath.matrix(a.tolist()), mpmath.matrix(b.tolist())
        def moments(X):
            n, d = X.rows, X.cols
            m = [mpmath.fsum(X[i, j] for i in range(n)) / n for j in range(d)]
            c = mpmath.matrix(d, d)
            for j in range(d):
                for k in range(d):
                    c[j, k] = mpmath.fsum((X[i, j] - m[j]) * (X[i, k] - m[k]) for i in range(n)) / (n - 1)
            return m, c
        ma, ca = moments(A)
        mb, cb = moments(B)
        ev = mpmath.eig(ca * cb, left=False, right=False)
        tr = mpmath.fsum(mpmath.sqrt(mpmath.re(e)) for e in ev)
        d = len(ma)
        val = mpmath.fsum((ma[j] - mb[j]) ** 2 for j in range(d)) + sum(ca[j, j] + cb[j, j] for j in range(d)) - 2 * tr
        return float(mpmath.re(val))
    fx.add("frechet_probe", "frechet:9x4,11x4:probe=45,46*1.3:squared", fr(S, R), 1e-9)
    return fx


def data_fixture():
    fx = Fixture("data")
    D = 16
    x = np.array([u(j, 51) for j in range(D)])
    k = np.exp(-0.5 * np.arange(-2, 3) ** 2)
    k /= k.sum()
    blurred = sum(k[o + 2] * np.roll(x, -o) for o in range(-2, 3))
    coarse = blurred[::2]
    pos = np.arange(D) / 2.0
    out = np.interp(pos, np.arange(len(coarse) + 1), np.append(coarse, coarse[0]))
    for j in range(D):
        fx.add("degrade_%d" % j, "degrade:w=5:sigma=1:stride=2:probe=51:j=%d" % j, out[j], 1e-12)
    return fx


def sampler_fixture():
    fx = Fixture("sampler")
    ab = np.concatenate([[1.0], linear_alpha_bar(1000, 1e-4, 2e-2)])
    mu = np.array([0.5, -1.0])
    cov = np.array([[1.0, 0.3], [0.3, 0.5]])
    x = np.array([u(0, 21), u(1, 21)])
    grid = np.unique(np.rint(np.linspace(1, 1000, 5)).astype(int))[::-1]
    for i, t in enumerate(grid):
        tp = grid[i + 1] if i + 1 < len(grid) else 0
        a, ap = ab[t], ab[tp]
        gain = math.sqrt(a) * cov @ np.linalg.inv(a * cov + (1 - a) * np.eye(2))
        x0 = mu + gain @ (x - math.sqrt(a) * mu)
        eps = (x - math.sqrt(a) * x0) / math.sqrt(1 - a)
        x = math.sqrt(ap) * x0 + math.sqrt(1 - ap) * eps
    for j in range(2):
        fx.add("ddim_gaussian_%d" % j, "ddim:linear:n=1000:steps=5:mu=0.5,-1:cov=1,0.3,0.5:probe=21:j=%d" % j, x[j],
               1e-10)
    return fx


def guidance_fixture():
    fx = Fixture("guidance")
    ab = linear_alpha_bar(1000, 1e-4, 2e-2)
    t = 420
    a = ab[t - 1]
    x0 = np.array([u(j, 61) for j in range(3)])
    eps = np.array([u(j, 62) for j in range(3)])
    xt = math.sqrt(a) * x0 + math.sqrt(1 - a) * eps
    v = math.sqrt(a) * eps - math.sqrt(1 - a) * x0
    for j in range(3):
        fx.add("v_target_%d" % j, "v:linear:n=1000:t=420:probe=61,62:j=%d" % j, v[j], 1e-12)
        fx.add("x_t_%d" % j, "xt:linear:n=1000:t=420:probe=61,62:j=%d" % j, xt[j], 1e-12)
    return fx


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "..", "..", "tests", "fixtures")
    os.makedirs(out, exist_ok=True)
    for fx in (schedule_fixture(), bgn_fixture(), nn_fixture(), oracle_fixture(), metrics_fixture(), data_fixture(),
               sampler_fixture(), guidance_fixture()):
        fx.write(out)
        print("wrote %s (%d rows)" % (fx.name, len(fx.rows)))


if __name__ == "__main__":
    main()
