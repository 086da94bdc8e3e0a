#!/usr/bin/env python3
"""Convert a trilinear-form listing (.tri) into the fmm tensor format.

Each non-comment line is one summand written as three linear forms separated
by ';' -- the A form, the B form and the C form, e.g.

    a11 + a22 ; b11 + b22 ; c11 + c22

A monomial is  [-]var[*e^k]  where var is aIJ, bJK or cKI (1-based indices).
The C form uses the trilinear convention Trace(A.B.C): c_ki pairs with the
output entry (i, k).  Directives:  %dims m n p   %support <row> <row> ...
"""
import re
import sys
from fractions import Fraction

MONO = re.compile(r'\s*([+-])?\s*(?:(\d+(?:/\d+)?)\*)?([abc])(\d)(\d)(?:\*e\^(-?\d+))?\s*')


def parse_form(text, letter, lineno):
    out = {}
    pos = 0
    while pos < len(text):
        m = MONO.match(text, pos)
        if not m or m.end() == pos:
            sys.exit(f"line {lineno}: cannot parse '{text[pos:]}'")
        if m.group(3) != letter:
            sys.exit(f"line {lineno}: '{m.group(0).strip()}' found in the {letter} form")
        coeff = Fraction(m.group(2) or 1) * (-1 if m.group(1) == '-' else 1)
        key = (int(m.group(4)) - 1, int(m.group(5)) - 1)
        k = int(m.group(6) or 0)
        slot = out.setdefault(key, {})
        slot[k] = slot.get(k, 0) + coeff
        pos = m.end()
    return out


def fmt_scalar(poly):
    items = [(k, c) for k, c in sorted(poly.items()) if c != 0]
    if not items:
        return '0'
    return ' + '.join(str(c) + ('' if k == 0 else f'*e^{k}') for k, c in items)


def fmt_matrix(entries, rows, cols):
    lines = []
    for r in range(rows):
        lines.append(', '.join(fmt_scalar(entries.get((r, c), {})) for c in range(cols)))
    return '\n'.join(lines)


def main(src, dst):
    dims = None
    support = None
    terms = []
    for lineno, raw in enumerate(open(src), 1):
        line = raw.strip()
        if line.startswith('%dims'):
            dims = tuple(int(x) for x in line.split()[1:4])
            continue
        if line.startswith('%support'):
            support = line.split()[1:]
            continue
        line = line.split('#')[0].strip()
        if not line:
            continue
        forms = [f.strip() for f in line.split(';')]
        if len(forms) != 3:
            sys.exit(f'line {lineno}: expected three forms')
        terms.append([parse_form(f, l, lineno) for f, l in zip(forms, 'abc')])
    m, n, p = dims
    laurent = any(k != 0 for t in terms for f in t for v in f.values() for k in v)
    out = [f'fmm 1', f'dims {m} {n} {p}', f'rank {len(terms)}', f'field {"laurent" if laurent else "rational"}']
    if support:
        out.append('support')
        out.extend(support)
    for idx, (P, Q, S) in enumerate(terms, 1):
        out.append('')
        out.append(f'term {idx}')
        out.append(fmt_matrix(P, m, n))
        out.append('')
        out.append(fmt_matrix(Q, n, p))
        out.append('')
        out.append(fmt_matrix(S, p, m))
    with open(dst, 'w') as fh:
        fh.write('\n'.join(out) + '\n')


if __name__ == '__main__':
    if len(sys.argv) != 3:
        sys.exit('usage: tri2fmm.py input.tri output.fmm')
    main(sys.argv[1], sys.argv[2])
