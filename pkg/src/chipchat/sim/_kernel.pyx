# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled simulation kernel: topologically ordered cell evaluation and
two-phase register commit, mirroring kernel_py/fold_op exactly."""

ctypedef unsigned long long u64

cdef u64 ALLONES = <u64>0xFFFFFFFFFFFFFFFF


cdef inline u64 _wmask(long long w) noexcept nogil:
    if w >= 64:
        return ALLONES
    return ((<u64>1) << w) - 1


cdef int _eval(int ncells,
               const int[::1] op, const int[::1] A, const int[::1] B, const int[::1] C,
               const long long[::1] imm, const int[::1] OUT, const u64[::1] mask,
               u64[::1] vals) noexcept nogil:
    cdef int i, o
    cdef u64 a, b, c, m, r
    cdef int divz = 0
    for i in range(ncells):
        o = op[i]
        a = vals[A[i]]
        m = mask[i]
        if o == 28:    # MUX
            c = vals[C[i]]
            r = (vals[A[i]] if c != 0 else vals[B[i]]) & m
        elif o == 7:   # AND
            r = (a & vals[B[i]]) & m
        elif o == 8:   # OR
            r = (a | vals[B[i]]) & m
        elif o == 18:  # EQ
            r = 1 if a == vals[B[i]] else 0
        elif o == 27:  # SLICE
            r = (a >> imm[i]) & m
        elif o == 11:  # ADD
            r = (a + vals[B[i]]) & m
        elif o == 26:  # CONCAT
            r = ((a << imm[i]) | vals[B[i]]) & m
        elif o == 9:   # XOR
            r = (a ^ vals[B[i]]) & m
        elif o == 0:   # COPY
            r = a & m
        elif o == 1:   # NOT
            r = (~a) & m
        elif o == 2:   # NEG
            r = (0 - a) & m
        elif o == 3:   # REDAND
            r = 1 if a == _wmask(imm[i]) else 0
        elif o == 4:   # REDOR
            r = 1 if a != 0 else 0
        elif o == 5:   # REDXOR
            b = a
            b ^= b >> 32
            b ^= b >> 16
            b ^= b >> 8
            b ^= b >> 4
            b ^= b >> 2
            b ^= b >> 1
            r = b & 1
        elif o == 6:   # LOGICNOT
            r = 1 if a == 0 else 0
        elif o == 10:  # XNOR
            r = (~(a ^ vals[B[i]])) & m
        elif o == 12:  # SUB
            r = (a - vals[B[i]]) & m
        elif o == 13:  # MUL
            r = (a * vals[B[i]]) & m
        elif o == 14:  # DIV
            b = vals[B[i]]
            if b == 0:
                divz = 1
                r = m
            else:
                r = (a // b) & m
        elif o == 15:  # MOD
            b = vals[B[i]]
            if b == 0:
                divz = 1
                r = m
            else:
                r = (a % b) & m
        elif o == 16:  # SHL
            b = vals[B[i]]
            r = 0 if b >= 64 else (a << b) & m
        elif o == 17:  # SHR
            b = vals[B[i]]
            r = 0 if b >= 64 else (a >> b) & m
        elif o == 19:  # NE
            r = 1 if a != vals[B[i]] else 0
        elif o == 20:  # LT
            r = 1 if a < vals[B[i]] else 0
        elif o == 21:  # LE
            r = 1 if a <= vals[B[i]] else 0
        elif o == 22:  # GT
            r = 1 if a > vals[B[i]] else 0
        elif o == 23:  # GE
            r = 1 if a >= vals[B[i]] else 0
        elif o == 24:  # LAND
            r = 1 if (a != 0 and vals[B[i]] != 0) else 0
        elif o == 25:  # LOR
            r = 1 if (a != 0 or vals[B[i]] != 0) else 0
        else:
            r = 0
        vals[OUT[i]] = r
    return divz


def eval_comb(const int[::1] op, const int[::1] a, const int[::1] b, const int[::1] c,
              const long long[::1] imm, const int[::1] out, const u64[::1] mask,
              u64[::1] vals):
    """One full combinational sweep; returns 1 if a divide-by-zero happened."""
    return _eval(op.shape[0], op, a, b, c, imm, out, mask, vals)


def run_cycles(const int[::1] op, const int[::1] a, const int[::1] b, const int[::1] c,
               const long long[::1] imm, const int[::1] out, const u64[::1] mask,
               u64[::1] vals,
               const int[::1] reg_q, const int[::1] reg_d, const u64[::1] reg_mask,
               u64[::1] reg_tmp,
               long long n_cycles, long long start_cycle,
               int sample_net, u64[::1] samples,
               const long long[::1] sched_cycle, const int[::1] sched_net,
               const u64[::1] sched_val, long long sched_pos):
    """Advance n_cycles clock cycles: scheduled pokes, sample, two-phase
    commit, combinational sweep. Returns (new schedule position, divz)."""
    cdef long long k, cyc
    cdef int i
    cdef int ncells = op.shape[0]
    cdef int nregs = reg_q.shape[0]
    cdef long long nsched = sched_cycle.shape[0]
    cdef int divz = 0
    cdef bint dirty = 0
    with nogil:
        for k in range(n_cycles):
            cyc = start_cycle + k
            while sched_pos < nsched and sched_cycle[sched_pos] <= cyc:
                vals[sched_net[sched_pos]] = sched_val[sched_pos]
                sched_pos += 1
                dirty = 1
            if dirty:
                divz |= _eval(ncells, op, a, b, c, imm, out, mask, vals)
                dirty = 0
            if sample_net >= 0:
                samples[k] = vals[sample_net]
            for i in range(nregs):
                reg_tmp[i] = vals[reg_d[i]]
            for i in range(nregs):
                vals[reg_q[i]] = reg_tmp[i] & reg_mask[i]
            divz |= _eval(ncells, op, a, b, c, imm, out, mask, vals)
    return sched_pos, divz
