"""Compiled inner loops for the Metropolis-Hastings toggle sampler.

The model is flattened to coordinate-level arrays so a single jitted kernel
serves every term combination:

- ``kind``   int8[p]: term family code per statistic coordinate
- ``ephi``   float64[p]: exp(decay) for gw terms, unused otherwise
- ``u``      float64[p]: 1 - exp(-decay) for gw terms
- ``level``  float64[p]: kept level for differential homophily
- ``node_x`` float64[p, n]: per-coordinate node attribute values
- ``dyad_w`` float64[p, n, n]: per-coordinate dyad covariate matrices

Change scores are always evaluated with the proposal dyad forced off; the
caller/loop flips the sign when the toggle removes an edge.
"""

import numpy as np
from numba import njit

K_EDGES = 0
K_GWESP = 1
K_GWDEG = 2
K_MATCH = 3
K_MATCH_LVL = 4
K_NODECOV = 5
K_EDGECOV = 6


@njit(cache=True)
def add_delta(adj, i, j, kind, ephi, u, level, node_x, dyad_w, out):
    """Change score for adding edge (i, j); adj must have (i, j) off."""
    n = adj.shape[0]
    for c in range(kind.shape[0]):
        k = kind[c]
        if k == K_EDGES:
            out[c] = 1.0
        elif k == K_GWESP:
            uc = u[c]
            d = 0.0
            ncn = 0
            for v in range(n):
                if adj[i, v] and adj[j, v]:
                    ncn += 1
                    e1 = 0
                    e2 = 0
                    for w in range(n):
                        if adj[v, w]:
                            if adj[i, w]:
                                e1 += 1
                            if adj[j, w]:
                                e2 += 1
                    d += uc ** e1 + uc ** e2
            out[c] = d + ephi[c] * (1.0 - uc ** ncn)
        elif k == K_GWDEG:
            di = 0
            dj = 0
            for v in range(n):
                if adj[i, v]:
                    di += 1
                if adj[j, v]:
                    dj += 1
            out[c] = u[c] ** di + u[c] ** dj
        elif k == K_MATCH:
            out[c] = 1.0 if node_x[c, i] == node_x[c, j] else 0.0
        elif k == K_MATCH_LVL:
            out[c] = 1.0 if (node_x[c, i] == level[c]
                             and node_x[c, j] == level[c]) else 0.0
        elif k == K_NODECOV:
            out[c] = node_x[c, i] + node_x[c, j]
        else:
            out[c] = dyad_w[c, i, j]


@njit(cache=True)
def mh_run(adj, stats, theta, kind, ephi, u, level, node_x, dyad_w,
           free_i, free_j, burn_in, n_draws, thin, seed, use_tnt,
           states_out, stats_out):
    """Run a single MH chain over the free dyads, in place.

    ``adj`` and ``stats`` are updated as the chain moves; after ``burn_in``
    steps every ``thin``-th state is recorded: the free-dyad states into
    ``states_out[d]`` and the full statistic vector into ``stats_out[d]``.
    Proposals are uniform over free dyads, or tie/no-tie (probability 0.5 of
    proposing a current tie) with the exact Hastings correction.
    """
    np.random.seed(seed)
    p = theta.shape[0]
    nf = free_i.shape[0]
    delta = np.empty(p)

    # tie/no-tie bookkeeping over the free set
    pos = np.empty(nf, np.int64)
    ties = np.empty(nf, np.int64)
    nulls = np.empty(nf, np.int64)
    nt = 0
    nn = 0
    for f in range(nf):
        if adj[free_i[f], free_j[f]]:
            ties[nt] = f
            pos[f] = nt
            nt += 1
        else:
            nulls[nn] = f
            pos[f] = nn
            nn += 1

    total = burn_in + n_draws * thin
    drawn = 0
    for step in range(total):
        if use_tnt:
            if nt == 0:
                pick_tie = False
            elif nn == 0:
                pick_tie = True
            else:
                pick_tie = np.random.random() < 0.5
            if pick_tie:
                f = ties[np.random.randint(nt)]
            else:
                f = nulls[np.random.randint(nn)]
        else:
            f = np.random.randint(nf)
        i = free_i[f]
        j = free_j[f]
        cur = adj[i, j]
        if cur:
            adj[i, j] = False
            adj[j, i] = False
        add_delta(adj, i, j, kind, ephi, u, level, node_x, dyad_w, delta)
        s = 0.0
        for c in range(p):
            s += theta[c] * delta[c]
        logr = -s if cur else s
        if use_tnt:
            if cur:
                qf = (0.5 if nn > 0 else 1.0) / nt
                qr = (0.5 if nt - 1 > 0 else 1.0) / (nn + 1)
            else:
                qf = (0.5 if nt > 0 else 1.0) / nn
                qr = (0.5 if nn - 1 > 0 else 1.0) / (nt + 1)
            logr += np.log(qr) - np.log(qf)
        if logr >= 0.0 or np.log(np.random.random()) < logr:
            if cur:
                for c in range(p):
                    stats[c] -= delta[c]
                # tie -> null
                last = ties[nt - 1]
                ties[pos[f]] = last
                pos[last] = pos[f]
                nt -= 1
                nulls[nn] = f
                pos[f] = nn
                nn += 1
            else:
                adj[i, j] = True
                adj[j, i] = True
                for c in range(p):
                    stats[c] += delta[c]
                # null -> tie
                last = nulls[nn - 1]
                nulls[pos[f]] = last
                pos[last] = pos[f]
                nn -= 1
                ties[nt] = f
                pos[f] = nt
                nt += 1
        elif cur:
            adj[i, j] = True
            adj[j, i] = True
        if step >= burn_in and (step - burn_in + 1) % thin == 0:
            for f2 in range(nf):
                states_out[drawn, f2] = 1 if adj[free_i[f2], free_j[f2]] else 0
            for c in range(p):
                stats_out[drawn, c] = stats[c]
            drawn += 1
