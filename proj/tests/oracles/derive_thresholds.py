"""Independent oracle for the frozen acceptance thresholds.

Works on full ordered histories only (no count compression) so it shares no
algorithmic path with the C++ solvers. Run once; the printed numbers are the
constants frozen into tests/acceptance_main.cpp.
"""
import itertools
import math

import numpy as np
from scipy.optimize import minimize


def three_state():
    P = np.zeros((3, 2, 3))
    P[0, 0, 1] = 1; P[0, 1, 2] = 1
    P[1, 0, 1] = 1; P[1, 1, 0] = 1
    P[2, 0, 0] = 1; P[2, 1, 2] = 1
    mu = np.array([1.0, 0, 0])
    return P, mu


def river_swim(adv=0.6, stay=0.35, back=0.05):
    P = np.zeros((3, 2, 3))
    for s in range(3):
        P[s, 0, max(s - 1, 0)] = 1
        P[s, 1, min(s + 1, 2)] += adv
        P[s, 1, s] += stay
        P[s, 1, max(s - 1, 0)] += back
    mu = np.array([1.0, 0, 0])
    return P, mu


def H(states, S):
    c = np.bincount(states, minlength=S) / len(states)
    c = c[c > 0]
    return float(-(c * np.log(c)).sum())


def full_history_opt(P, mu, T):
    """Backward induction over ordered histories."""
    S, A, _ = P.shape

    def V(hist):
        if len(hist) == T:
            return H(np.array(hist), S)
        s = hist[-1]
        best = -1.0
        for a in range(A):
            v = sum(P[s, a, n] * V(hist + (n,)) for n in range(S) if P[s, a, n] > 0)
            best = max(best, v)
        return best

    return sum(mu[s] * V((s,)) for s in range(S) if mu[s] > 0)


def stationary_value(P, mu, T, pol):
    """pol[s] = prob of action 0. Exact by ordered-history enumeration."""
    S = P.shape[0]

    def rec(hist, p):
        if len(hist) == T:
            return p * H(np.array(hist), S)
        s = hist[-1]
        tot = 0.0
        for a, pa in ((0, pol[s]), (1, 1 - pol[s])):
            if pa <= 0:
                continue
            for n in range(S):
                if P[s, a, n] > 0:
                    tot += rec(hist + (n,), p * pa * P[s, a, n])
        return tot

    return sum(rec((s,), mu[s]) for s in range(S) if mu[s] > 0)


def three_state_grid(res=201):
    P, mu = three_state()
    T = 9
    # deterministic dynamics: every action sequence is one trajectory
    g = np.linspace(0, 1, res)
    rows = []
    for seq in itertools.product((0, 1), repeat=T - 1):
        s = 0
        states = [0]
        n = np.zeros((3, 2), dtype=int)
        for a in seq:
            n[s, a] += 1
            s = int(np.argmax(P[s, a]))
            states.append(s)
        rows.append((n, H(np.array(states), 3)))
    best = -1
    bestp = None
    p0 = g[:, None, None]
    p1 = g[None, :, None]
    p2 = g[None, None, :]
    ps = [p0, p1, p2]
    val = np.zeros((res, res, res))
    for n, h in rows:
        term = np.ones((res, res, res))
        for s in range(3):
            term = term * ps[s] ** n[s, 0] * (1 - ps[s]) ** n[s, 1]
        val += term * h
    idx = np.unravel_index(np.argmax(val), val.shape)
    return float(val.max()), tuple(g[i] for i in idx)


def nm_expected_visits(P, mu, T, tol=1e-12):
    """Expected d_h under the optimal ordered-history policy (lowest-index
    argmax), by explicit history recursion."""
    S, A, _ = P.shape
    memo = {}

    def V(hist):
        if hist in memo:
            return memo[hist]
        if len(hist) == T:
            r = (H(np.array(hist), S), None)
        else:
            s = hist[-1]
            q = [sum(P[s, a, n] * V(hist + (n,))[0] for n in range(S) if P[s, a, n] > 0) for a in range(A)]
            m = max(q)
            r = (m, next(a for a in range(A) if q[a] >= m - tol))
        memo[hist] = r
        return r

    d = np.zeros(S)

    def fwd(hist, p):
        if len(hist) == T:
            d[:] += p * np.bincount(hist, minlength=S) / T
            return
        a = V(hist)[1]
        s = hist[-1]
        for n in range(S):
            if P[s, a, n] > 0:
                fwd(hist + (n,), p * P[s, a, n])

    for s in range(S):
        if mu[s] > 0:
            fwd((s,), mu[s])
    return d


def markov_chain_oracle(P, mu, T):
    """Vectorized objective of stationary policies over all state sequences."""
    S = P.shape[0]
    seqs = np.array(list(itertools.product(range(S), repeat=T)))
    seqs = seqs[mu[seqs[:, 0]] > 0]
    ent = np.array([H(r, S) for r in seqs])
    cnt = np.stack([np.bincount(r, minlength=S) for r in seqs]) / T

    def probs(pol):
        Ppi = pol[:, None] * P[:, 0, :] + (1 - pol[:, None]) * P[:, 1, :]
        p = mu[seqs[:, 0]].copy()
        for t in range(T - 1):
            p = p * Ppi[seqs[:, t], seqs[:, t + 1]]
        return p

    return (lambda pol: float(probs(pol) @ ent)), (lambda pol: probs(pol) @ cnt)


def river_swim_margin():
    P, mu = river_swim()
    T = 10
    obj, visits = markov_chain_oracle(P, mu, T)
    g = np.linspace(0, 1, 21)
    best, arg = -1, None
    for x in itertools.product(g, repeat=3):
        v = obj(np.array(x))
        if v > best:
            best, arg = v, np.array(x)
    ref = minimize(lambda x: -obj(np.clip(x, 0, 1)), arg, method="Nelder-Mead",
                   options=dict(xatol=1e-10, fatol=1e-14, maxiter=4000))
    pol = np.clip(ref.x, 0, 1)
    dm = visits(pol)
    dn = nm_expected_visits(P, mu, T)
    l1 = lambda d: float(np.abs(d - 1 / 3).sum())
    print(f"river_swim markov best={-ref.fun:.15f} at {pol}")
    print(f"river_swim E[d_h] markov={dm} L1={l1(dm):.6f}")
    print(f"river_swim E[d_h] non-markov={dn} L1={l1(dn):.6f}")
    margin = l1(dm) - l1(dn)
    print(f"river_swim exact L1 margin={margin:.6f}")
    # 100-episode means: allow 0.1 of sampling slack, rounded down to 0.05.
    print(f"river_swim frozen margin threshold={math.floor((margin - 0.1) * 20) / 20:.2f}")


def main():
    P, mu = three_state()
    hstar = full_history_opt(P, mu, 9)
    seq_best = 0
    for seq in itertools.product((0, 1), repeat=8):
        s = 0; st = [0]
        for a in seq:
            s = int(np.argmax(P[s, a])); st.append(s)
        seq_best = max(seq_best, H(np.array(st), 3))
    grid_best, arg = three_state_grid()
    f = lambda x: -stationary_value(P, mu, 9, np.clip(x, 0, 1))
    ref = minimize(f, np.array(arg), method="Nelder-Mead",
                   options=dict(xatol=1e-10, fatol=1e-14, maxiter=4000))
    print(f"three_state H*={hstar:.15f} seq_best={seq_best:.15f}")
    # MCTS target: H* is reached exactly by some action sequences, so a
    # planner that recovers any of them scores |H - H*| = 0.
    hits = 0
    for seq in itertools.product((0, 1), repeat=8):
        s = 0; st = [0]
        for a in seq:
            s = int(np.argmax(P[s, a])); st.append(s)
        hits += abs(H(np.array(st), 3) - hstar) <= 1e-9
    print(f"three_state optimal action sequences: {hits}/256 (H* attained exactly; 95/100 threshold kept)")
    print(f"three_state grid201 best={grid_best:.15f} at {arg}")
    print(f"three_state refined stationary best={-ref.fun:.15f} at {np.clip(ref.x,0,1)}")
    print(f"three_state gap (vs grid)={hstar-grid_best:.15f} (vs refined)={hstar+ref.fun:.15f}")

    P, mu = river_swim()
    hs = full_history_opt(P, mu, 10)
    print(f"river_swim H*(T=10)={hs:.15f}")
    river_swim_margin()


if __name__ == "__main__":
    main()
