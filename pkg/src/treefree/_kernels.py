"""Integer kernels behind ball enumeration and cone propagation.

Words are 1-D ``int64`` arrays of letter codes over the combined alphabet:
base generator ``g`` is ``g + 1``, stable letter ``i`` is ``rank + i + 1``,
inverses are negated.  Relations are packed into a padded matrix with one
row per side (row ``2i`` is ``s_i``, row ``2i + 1`` is ``t_i``) plus the
length of each row's cyclic conjugator.
"""

import numpy as np

from treefree._jit import njit

_HASH_BASE = 1_000_003
_HASH_MOD = 2_147_483_647
_HASH_SHIFT = 1 << 20

# reason / clause kinds
DECISION = 0
PRODUCT = 1
CONJ = 2


def pack_relations(relations, rank):
    """Pack ``[(s_codes, t_codes), ...]`` for the kernels."""
    words = [w for pair in relations for w in pair]
    width = max((len(w) for w in words), default=1)
    mat = np.zeros((len(words), width), dtype=np.int64)
    lens = np.zeros(len(words), dtype=np.int64)
    cls = np.zeros(len(words), dtype=np.int64)
    for r, w in enumerate(words):
        mat[r, : len(w)] = w
        lens[r] = len(w)
        i, j = 0, len(w) - 1
        while i < j and w[i] == -w[j]:
            i += 1
            j -= 1
        cls[r] = i
    return mat, lens, cls


def pack_words(words):
    width = max((len(w) for w in words), default=1) or 1
    mat = np.zeros((len(words), width), dtype=np.int64)
    lens = np.zeros(len(words), dtype=np.int64)
    for r, w in enumerate(words):
        mat[r, : len(w)] = w
        lens[r] = len(w)
    return mat, lens


@njit
def free_reduce(w):
    out = np.empty(w.shape[0], dtype=np.int64)
    n = 0
    for idx in range(w.shape[0]):
        c = w[idx]
        if n > 0 and out[n - 1] == -c:
            n -= 1
        else:
            out[n] = c
            n += 1
    return out[:n].copy()


@njit
def inverse(w):
    n = w.shape[0]
    out = np.empty(n, dtype=np.int64)
    for idx in range(n):
        out[idx] = -w[n - 1 - idx]
    return out


@njit
def _same(a, b):
    if a.shape[0] != b.shape[0]:
        return False
    for idx in range(a.shape[0]):
        if a[idx] != b[idx]:
            return False
    return True


@njit
def _power(word, cl, k):
    """``word**k`` for ``word = c p c^-1`` with ``|c| = cl`` and ``p`` cyclically reduced."""
    if k == 0:
        return np.empty(0, dtype=np.int64)
    n = word.shape[0]
    core = word[cl : n - cl]
    if k < 0:
        core = inverse(core)
        k = -k
    pl = core.shape[0]
    out = np.empty(2 * cl + k * pl, dtype=np.int64)
    out[:cl] = word[:cl]
    for r in range(k):
        out[cl + r * pl : cl + (r + 1) * pl] = core
    out[cl + k * pl :] = word[n - cl :]
    return out


@njit
def _power_at(word, cl, k, idx):
    """Letter ``idx`` of ``word**k`` without building it."""
    n = word.shape[0]
    pl = n - 2 * cl
    total = 2 * cl + abs(k) * pl
    if idx < cl:
        return word[idx]
    if idx >= total - cl:
        return word[n - (total - idx)]
    r = (idx - cl) % pl
    if k > 0:
        return word[cl + r]
    return -word[cl + pl - 1 - r]


@njit
def power_membership(w, word, cl):
    """Return ``(True, k)`` if ``w == word**k`` else ``(False, 0)``; ``w`` reduced."""
    n = w.shape[0]
    if n == 0:
        return True, 0
    pl = word.shape[0] - 2 * cl
    if n <= 2 * cl or (n - 2 * cl) % pl != 0:
        return False, 0
    m = (n - 2 * cl) // pl
    for k in (m, -m):
        ok = True
        for idx in range(n):
            if _power_at(word, cl, k, idx) != w[idx]:
                ok = False
                break
        if ok:
            return True, k
    return False, 0


@njit
def britton_reduce(w, rank, rel_mat, rel_len, rel_cl):
    """Free reduction plus pinch removal to a fixpoint."""
    w = free_reduce(w)
    changed = True
    while changed:
        changed = False
        prev = -1
        for idx in range(w.shape[0]):
            c = w[idx]
            if abs(c) <= rank:
                continue
            if prev >= 0 and w[prev] == -c:
                letter = abs(c) - rank - 1
                side = 0 if w[prev] > 0 else 1
                row = 2 * letter + side
                other = 2 * letter + 1 - side
                inside = rel_mat[row, : rel_len[row]]
                ok, k = power_membership(w[prev + 1 : idx], inside, rel_cl[row])
                if ok:
                    outside = _power(rel_mat[other, : rel_len[other]], rel_cl[other], k)
                    w = free_reduce(np.concatenate((w[:prev], outside, w[idx + 1 :])))
                    changed = True
                    break
            prev = idx
    return w


@njit
def _coset_letter(w, word, cl, k, cut, idx):
    # letter idx of reduce(word**k w), where cut letters cancel at the seam
    head = 2 * cl + abs(k) * (word.shape[0] - 2 * cl) - cut
    if idx < head:
        return _power_at(word, cl, k, idx)
    return w[idx - head + cut]


@njit
def _coset_rep(w, word, cl):
    """Shortlex-least ``word**n * w`` over all ``n``; returns ``(rep, n)``."""
    pl = word.shape[0] - 2 * cl
    wl = w.shape[0]
    # |word^n w| >= 2cl + |n| pl - |w| > |w| once |n| pl > 2|w|
    bound = 2 * wl // pl + 1
    best_n = 0
    best_cut = 0
    best_len = wl
    for n in range(-bound, bound + 1):
        if n == 0:
            continue
        plen = 2 * cl + abs(n) * pl
        cut = 0
        while cut < wl and cut < plen and _power_at(word, cl, n, plen - 1 - cut) == -w[cut]:
            cut += 1
        length = plen + wl - 2 * cut
        if length > best_len:
            continue
        better = length < best_len
        if not better:
            for idx in range(length):
                x = _coset_letter(w, word, cl, n, cut, idx)
                y = _coset_letter(w, word, cl, best_n, best_cut, idx)
                if x != y:
                    better = abs(x) < abs(y) or (abs(x) == abs(y) and x > 0)
                    break
        if better:
            best_n = n
            best_cut = cut
            best_len = length
    rep = np.empty(best_len, dtype=np.int64)
    for idx in range(best_len):
        rep[idx] = _coset_letter(w, word, cl, best_n, best_cut, idx)
    return rep, best_n


@njit
def _stable_count(w, rank):
    m = 0
    for idx in range(w.shape[0]):
        if abs(w[idx]) > rank:
            m += 1
    return m


@njit
def normal_form(w, rank, rel_mat, rel_len, rel_cl):
    """Canonical spelling: Britton-reduced, each base word after a stable
    letter replaced by its shortlex-least coset representative."""
    return _canonical(britton_reduce(w, rank, rel_mat, rel_len, rel_cl), rank, rel_mat, rel_len, rel_cl)


@njit
def _canonical(w, rank, rel_mat, rel_len, rel_cl):
    # w must be Britton-reduced
    m = _stable_count(w, rank)
    if m == 0:
        return w
    pos = np.empty(m, dtype=np.int64)
    m = 0
    for idx in range(w.shape[0]):
        if abs(w[idx]) > rank:
            pos[m] = idx
            m += 1
    out = np.empty(0, dtype=np.int64)
    cur = w[pos[m - 1] + 1 :].copy()
    for j in range(m - 1, -1, -1):
        e = w[pos[j]]
        letter = abs(e) - rank - 1
        side = 0 if e > 0 else 1
        row = 2 * letter + side
        other = 2 * letter + 1 - side
        rep, n = _coset_rep(cur, rel_mat[row, : rel_len[row]], rel_cl[row])
        head = np.empty(1, dtype=np.int64)
        head[0] = e
        out = np.concatenate((head, rep, out))
        start = pos[j - 1] + 1 if j > 0 else 0
        # cur = s^-n rep and e s^-n = t^-n e, so t^-n joins the word on the left
        shift = _power(rel_mat[other, : rel_len[other]], rel_cl[other], -n)
        cur = free_reduce(np.concatenate((w[start : pos[j]], shift)))
    return np.concatenate((cur, out))


@njit
def word_hash(w):
    h = w.shape[0] % _HASH_MOD
    for idx in range(w.shape[0]):
        h = (h * _HASH_BASE + (w[idx] + _HASH_SHIFT)) % _HASH_MOD
    return h


@njit
def normal_forms(mat, lens, rank, rel_mat, rel_len, rel_cl):
    """Normal forms of every row, padded; returns ``(nf_mat, nf_len, hashes)``."""
    count = mat.shape[0]
    forms = []
    width = 1
    for r in range(count):
        nf = normal_form(mat[r, : lens[r]], rank, rel_mat, rel_len, rel_cl)
        forms.append(nf)
        if nf.shape[0] > width:
            width = nf.shape[0]
    nf_mat = np.zeros((count, width), dtype=np.int64)
    nf_len = np.zeros(count, dtype=np.int64)
    hashes = np.zeros(count, dtype=np.int64)
    for r in range(count):
        nf = forms[r]
        nf_mat[r, : nf.shape[0]] = nf
        nf_len[r] = nf.shape[0]
        hashes[r] = word_hash(nf)
    return nf_mat, nf_len, hashes


@njit
def _lookup(nf, sorted_hashes, order, nf_mat, nf_len):
    h = word_hash(nf)
    pos = np.searchsorted(sorted_hashes, h)
    while pos < sorted_hashes.shape[0] and sorted_hashes[pos] == h:
        r = order[pos]
        if nf_len[r] == nf.shape[0] and _same(nf_mat[r, : nf_len[r]], nf):
            return r
        pos += 1
    return -1


@njit
def _resolve(w, rank, rel_mat, rel_len, rel_cl, max_stable, sorted_hashes, order, nf_mat, nf_len):
    r = britton_reduce(w, rank, rel_mat, rel_len, rel_cl)
    # the stable letters of a Britton-reduced word are an invariant of the element
    if _stable_count(r, rank) > max_stable:
        return -1
    nf = _canonical(r, rank, rel_mat, rel_len, rel_cl)
    return _lookup(nf, sorted_hashes, order, nf_mat, nf_len)


@njit
def element_tables(mat, lens, rank, rel_mat, rel_len, rel_cl, nf_mat, nf_len, hashes, with_conj):
    """Inverse, product and conjugation tables of a set of distinct elements.

    ``product[i, j]`` is the index of ``e_i e_j`` and ``conj[i, h]`` the index
    of ``e_h^-1 e_i e_h``, or -1 when the result is not in the set.
    """
    count = mat.shape[0]
    max_stable = 0
    for r in range(count):
        m = _stable_count(nf_mat[r, : nf_len[r]], rank)
        if m > max_stable:
            max_stable = m
    order = np.argsort(hashes, kind="mergesort")
    sorted_hashes = hashes[order]
    inv = np.full(count, -1, dtype=np.int32)
    product = np.full((count, count), -1, dtype=np.int32)
    conj = np.full((count, count) if with_conj else (0, 0), -1, dtype=np.int32)
    for i in range(count):
        a = mat[i, : lens[i]]
        nf = normal_form(inverse(a), rank, rel_mat, rel_len, rel_cl)
        inv[i] = _lookup(nf, sorted_hashes, order, nf_mat, nf_len)
        for j in range(count):
            w = np.concatenate((a, mat[j, : lens[j]]))
            product[i, j] = _resolve(w, rank, rel_mat, rel_len, rel_cl, max_stable,
                                     sorted_hashes, order, nf_mat, nf_len)
    if with_conj:
        for h in range(count):
            b = mat[h, : lens[h]]
            b_inv = inverse(b)
            for i in range(count):
                w = np.concatenate((b_inv, mat[i, : lens[i]], b))
                conj[i, h] = _resolve(w, rank, rel_mat, rel_len, rel_cl, max_stable,
                                      sorted_hashes, order, nf_mat, nf_len)
    return inv, product, conj


# --- cone propagation -------------------------------------------------------
#
# state[e] is 1 when e is in the cone, -1 when its inverse is (or e is the
# identity), 0 when undecided.  Every clause is a disjunction of membership
# literals "e in C":
#   product  e_i e_j = e_k :  inv(i) | inv(j) | k
#   conj     e_h^-1 e_i e_h = e_k :  inv(i) | k


@njit
def _push(m, kind, a, b, c, state, inv, trail, tail, reason):
    state[m] = 1
    state[inv[m]] = -1
    trail[tail[0]] = m
    tail[0] += 1
    reason[m, 0] = kind
    reason[m, 1] = a
    reason[m, 2] = b
    reason[m, 3] = c


@njit
def _clause(kind, i, j, k, l0, l1, l2, nlit, state, inv, trail, tail, reason, conflict):
    """Evaluate one clause; assign its unit literal.  Returns 1 on conflict."""
    unknown0 = -1
    unknown1 = -1
    lits = (l0, l1, l2)
    for t in range(nlit):
        e = lits[t]
        s = state[e]
        if s == 1:
            return 0
        if s == 0:
            if unknown0 == -1 or unknown0 == e:
                unknown0 = e
            elif unknown1 == -1 or unknown1 == e:
                unknown1 = e
            else:
                return 0
    if unknown0 == -1:
        conflict[0] = kind
        conflict[1] = i
        conflict[2] = j
        conflict[3] = k
        return 1
    if unknown1 == -1:
        _push(unknown0, kind, i, j, k, state, inv, trail, tail, reason)
    return 0


@njit
def propagate(state, inv, trail, tail, head, reason, product, rev_ptr, rev_i, rev_j,
              conj, crev_ptr, crev_i, crev_h, conflict):
    """Unit propagation from ``trail[head[0]:tail[0]]`` to a fixpoint.

    Returns 1 and fills ``conflict`` with ``(kind, i, j, k)`` when a clause is
    falsified, else 0.
    """
    count = state.shape[0]
    use_conj = conj.shape[0] > 0
    while head[0] < tail[0]:
        m = trail[head[0]]
        head[0] += 1
        mi = inv[m]
        # clauses with literal inv(m), now false: m as a factor or conj source
        for j in range(1, count):
            k = product[m, j]
            if k >= 0:
                if _clause(PRODUCT, m, j, k, mi, inv[j], k, 3,
                           state, inv, trail, tail, reason, conflict):
                    return 1
            k = product[j, m]
            if k >= 0:
                if _clause(PRODUCT, j, m, k, inv[j], mi, k, 3,
                           state, inv, trail, tail, reason, conflict):
                    return 1
        if use_conj:
            for h in range(count):
                k = conj[m, h]
                if k >= 0 and k != m:
                    if _clause(CONJ, m, h, k, mi, k, k, 2,
                               state, inv, trail, tail, reason, conflict):
                        return 1
        # clauses with literal mi, now false: mi as a product or conjugate
        for r in range(rev_ptr[mi], rev_ptr[mi + 1]):
            i = rev_i[r]
            j = rev_j[r]
            if i == 0 or j == 0:
                continue
            if _clause(PRODUCT, i, j, mi, inv[i], inv[j], mi, 3,
                       state, inv, trail, tail, reason, conflict):
                return 1
        if use_conj:
            for r in range(crev_ptr[mi], crev_ptr[mi + 1]):
                i = crev_i[r]
                if i == mi:
                    continue
                if _clause(CONJ, i, crev_h[r], mi, inv[i], mi, mi, 2,
                           state, inv, trail, tail, reason, conflict):
                    return 1
    return 0


@njit
def assign(m, kind, a, b, c, state, inv, trail, tail, reason):
    _push(m, kind, a, b, c, state, inv, trail, tail, reason)


@njit
def undo(state, inv, trail, tail, head, mark):
    for t in range(mark, tail[0]):
        m = trail[t]
        state[m] = 0
        state[inv[m]] = 0
    tail[0] = mark
    head[0] = mark
