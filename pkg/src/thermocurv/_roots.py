"""Safeguarded scalar root finding shared by the Legendre solver and the
divergence-line scans."""

from __future__ import annotations


class NoBracketError(RuntimeError):
    """No sign change could be found around the starting guess."""


class ToleranceNotMetError(RuntimeError):
    """The bracket collapsed before the residual tolerance was reached."""


def refine_bracket(func, a: float, b: float, fa: float, fb: float,
                   *, tol_f: float, tol_x: float = 1e-13,
                   max_iter: int = 200) -> tuple[float, float, int]:
    """Drive ``func`` to zero inside a sign-change bracket.

    Secant steps with bisection fallback; the bracket is maintained at every
    iteration.  Returns ``(root, residual, iterations)`` once
    ``|f| <= tol_f`` or raises :class:`ToleranceNotMetError`.
    """
    if fa == 0.0:
        return a, 0.0, 0
    if fb == 0.0:
        return b, 0.0, 0
    if (fa > 0.0) == (fb > 0.0):
        raise ValueError("refine_bracket needs a sign change")
    x_prev, f_prev = a, fa
    x_cur, f_cur = b, fb
    for it in range(1, max_iter + 1):
        if f_prev != f_cur:
            cand = x_cur - f_cur * (x_cur - x_prev) / (f_cur - f_prev)
        else:
            cand = 0.5 * (a + b)
        lo, hi = min(a, b), max(a, b)
        if not (lo < cand < hi):
            cand = 0.5 * (a + b)
        f_cand = func(cand)
        if abs(f_cand) <= tol_f:
            return cand, abs(f_cand), it
        if (f_cand > 0.0) == (fa > 0.0):
            a, fa = cand, f_cand
        else:
            b, fb = cand, f_cand
        x_prev, f_prev = x_cur, f_cur
        x_cur, f_cur = cand, f_cand
        if abs(b - a) <= tol_x * max(1.0, abs(cand)):
            # bracket exhausted; accept if the residual is merely loose
            if abs(f_cand) <= 1e3 * tol_f:
                return cand, abs(f_cand), it
            raise ToleranceNotMetError(
                f"bracket collapsed at {cand!r} with residual {f_cand!r}")
    raise ToleranceNotMetError(f"no convergence in {max_iter} iterations")


def expand_bracket(func, guess: float, lo: float, hi: float,
                   *, first_step: float, max_expand: int = 60):
    """Search outward from ``guess`` for the nearest sign change of ``func``.

    Samples ``guess +- first_step * 2**k`` clipped to ``(lo, hi)`` and keeps
    the sampled points ordered; the first adjacent pair with opposite signs
    whose midpoint lies nearest the guess is returned as
    ``(a, b, fa, fb)``.
    """
    pts = [(guess, func(guess))]

    def scan():
        best = None
        for (x0, f0), (x1, f1) in zip(pts, pts[1:]):
            if f0 == 0.0 or f1 == 0.0 or (f0 > 0.0) != (f1 > 0.0):
                mid = 0.5 * (x0 + x1)
                dist = abs(mid - guess)
                if best is None or dist < best[0]:
                    best = (dist, x0, x1, f0, f1)
        return best

    seen = {guess}
    for k in range(max_expand):
        step = first_step * (2.0 ** k)
        for cand in (guess - step, guess + step):
            cand = min(max(cand, lo), hi)
            if cand in seen or not (lo < cand < hi):
                continue
            seen.add(cand)
            pts.append((cand, func(cand)))
        pts.sort(key=lambda p: p[0])
        found = scan()
        if found is not None:
            _, a, b, fa, fb = found
            return a, b, fa, fb
        if guess - step <= lo and guess + step >= hi:
            break
    raise NoBracketError(
        f"no sign change found around {guess!r} within ({lo!r}, {hi!r})")
