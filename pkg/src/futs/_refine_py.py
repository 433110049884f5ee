"""Pure-Python refinement round over the integer encoding (see ``kernels``)."""


def refine_round(row_ptr, keys, targets, weights, is_bool_key, blocks, nblocks):
    """Split every block by the signature ``(key, target block) -> class sum``.

    Returns ``(new_blocks, count)``; new block ids are numbered in order of
    first occurrence over the states.
    """
    n = len(blocks)
    seen = {}
    out = [0] * n
    for s in range(n):
        acc = {}
        for e in range(row_ptr[s], row_ptr[s + 1]):
            code = keys[e] * nblocks + blocks[targets[e]]
            acc[code] = acc.get(code, 0) + weights[e]
        sig = []
        for code in sorted(acc):
            v = acc[code]
            if is_bool_key[code // nblocks] and v > 1:
                v = 1
            sig.append((code, v))
        k = (blocks[s], tuple(sig))
        b = seen.get(k)
        if b is None:
            b = seen[k] = len(seen)
        out[s] = b
    return out, len(seen)
