"""Pure-Python Gibbs sweep kernel.

Fallback used when the compiled extension is unavailable. Operation order,
floating-point expression shape, and the SplitMix64 stream are kept exactly
in step with _gibbs_cy.pyx so both backends produce identical chains from
identical states. Any change here must be mirrored there.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_INV_2_53 = 2.0**-53


def sweep(token_words, doc_offsets, z, n_dk, n_kw, n_k, alpha, beta, rng_state):
    """One full resample pass over every token in (document, position) order.

    Mutates z and the count tables in place; returns the advanced RNG state.
    """
    D = len(doc_offsets) - 1
    K = int(n_k.shape[0])
    V = int(n_kw.shape[1])
    vbeta = V * beta
    offs = doc_offsets.tolist()
    words = token_words.tolist()
    zs = z.tolist()
    ndk = n_dk.ravel().tolist()
    nkw = n_kw.ravel().tolist()
    nk = n_k.tolist()
    cum = [0.0] * K
    s = int(rng_state) & _MASK64

    for d in range(D):
        dk = d * K
        for t in range(offs[d], offs[d + 1]):
            w = words[t]
            k = zs[t]
            ndk[dk + k] -= 1
            nkw[k * V + w] -= 1
            nk[k] -= 1
            total = 0.0
            for j in range(K):
                total += (ndk[dk + j] + alpha) * (nkw[j * V + w] + beta) / (nk[j] + vbeta)
                cum[j] = total
            # splitmix64 step, inlined
            s = (s + 0x9E3779B97F4A7C15) & _MASK64
            x = s
            x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
            x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
            x = x ^ (x >> 31)
            u = ((x >> 11) * _INV_2_53) * total
            k = 0
            while k < K - 1 and cum[k] <= u:
                k += 1
            ndk[dk + k] += 1
            nkw[k * V + w] += 1
            nk[k] += 1
            zs[t] = k

    z[:] = zs
    n_dk.ravel()[:] = ndk
    n_kw.ravel()[:] = nkw
    n_k[:] = nk
    return s
