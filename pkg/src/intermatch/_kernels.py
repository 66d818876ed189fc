"""Compiled deferred-acceptance kernels on dense integer arrays.

Conventions: ``*_pref`` is an (agents, partners) int32 matrix of acceptable
partners, best first, padded with -1; ``*_rank`` is the matching rank
matrix with the outside option at ``*_acc`` and unacceptable partners above
it. Unmatched is -1.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def interview_kernel(hosp_pref, hosp_acc, doc_rank, doc_acc, iota, kappa):
    """Hospital-proposing many-to-many DA; returns the (doctors, hospitals) interview mask.

    Proposals are processed one at a time; for responsive choice the result
    is the same hospital-optimal pairwise stable matching as the synchronous
    version in ``engines``.
    """
    n_h = hosp_pref.shape[0]
    n_d = doc_rank.shape[0]
    cap = 1
    for d in range(n_d):
        c = min(kappa[d], n_h)
        if c > cap:
            cap = c
    held = np.empty((n_d, cap), dtype=np.int32)
    cnt = np.zeros(n_d, dtype=np.int32)
    hcount = np.zeros(n_h, dtype=np.int32)
    ptr = np.zeros(n_h, dtype=np.int32)

    active = True
    while active:
        active = False
        for h in range(n_h):
            while hcount[h] < iota[h] and ptr[h] < hosp_acc[h]:
                d = hosp_pref[h, ptr[h]]
                ptr[h] += 1
                active = True
                r = doc_rank[d, h]
                if r >= doc_acc[d]:
                    continue
                if cnt[d] < kappa[d]:
                    held[d, cnt[d]] = h
                    cnt[d] += 1
                    hcount[h] += 1
                    continue
                wi = 0
                wr = doc_rank[d, held[d, 0]]
                for i in range(1, cnt[d]):
                    ri = doc_rank[d, held[d, i]]
                    if ri > wr:
                        wr = ri
                        wi = i
                if r < wr:
                    w = held[d, wi]
                    held[d, wi] = h
                    hcount[h] += 1
                    hcount[w] -= 1

    mask = np.zeros((n_d, n_h), dtype=np.bool_)
    for d in range(n_d):
        for i in range(cnt[d]):
            mask[d, held[d, i]] = True
    return mask


@njit(cache=True)
def doctor_da_kernel(doc_pref, doc_acc, hosp_rank, hosp_acc, allowed):
    """Doctor-proposing one-to-one DA restricted to ``allowed`` pairs."""
    n_d = doc_pref.shape[0]
    n_h = hosp_rank.shape[0]
    match_d = np.full(n_d, -1, dtype=np.int64)
    match_h = np.full(n_h, -1, dtype=np.int64)
    ptr = np.zeros(n_d, dtype=np.int32)
    stack = np.empty(n_d, dtype=np.int64)
    top = 0
    for d in range(n_d - 1, -1, -1):
        stack[top] = d
        top += 1
    while top > 0:
        top -= 1
        d = stack[top]
        while ptr[d] < doc_acc[d]:
            h = doc_pref[d, ptr[d]]
            ptr[d] += 1
            if not allowed[d, h]:
                continue
            r = hosp_rank[h, d]
            if r >= hosp_acc[h]:
                continue
            cur = match_h[h]
            if cur == -1:
                match_h[h] = d
                match_d[d] = h
                break
            if r < hosp_rank[h, cur]:
                match_h[h] = d
                match_d[d] = h
                match_d[cur] = -1
                stack[top] = cur
                top += 1
                break
    return match_d


@njit(cache=True)
def blocking_count_kernel(match_d, doc_rank, doc_acc, hosp_rank, hosp_acc):
    n_d = doc_rank.shape[0]
    n_h = hosp_rank.shape[0]
    hcur = hosp_acc.copy()
    dcur = doc_acc.copy()
    for d in range(n_d):
        h = match_d[d]
        if h >= 0:
            dcur[d] = doc_rank[d, h]
            hcur[h] = hosp_rank[h, d]
    total = 0
    for d in range(n_d):
        for h in range(n_h):
            if doc_rank[d, h] < dcur[d] and hosp_rank[h, d] < hcur[h]:
                total += 1
    return total
