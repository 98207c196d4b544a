"""Numba-compiled inner kernels for the game solver hot path.

Pure-numpy fallbacks keep the package importable without numba; the compiled
versions cut per-evaluation cost by an order of magnitude, which the per-frame
virtual-game estimator depends on.
"""
from __future__ import annotations

import numpy as np

try:  # pragma: no cover - exercised implicitly by every solver call
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(f):
            return f

        return wrap


@njit(cache=True)
def rollout_pos_jac(s0, u, dt, wheelbase, with_jac):
    """Bicycle rollout plus d position / d controls (flat layout [a1, s1, ...])."""
    n = u.shape[0]
    states = np.empty((n + 1, 4))
    states[0] = s0
    jac = np.zeros((n + 1, 2, 2 * n))
    dstate = np.zeros((4, 2 * n))
    for k in range(n):
        x, y, psi, v = states[k, 0], states[k, 1], states[k, 2], states[k, 3]
        a, steer = u[k, 0], u[k, 1]
        v1 = v + a * dt
        clamped = v1 < 0.0
        if clamped:
            v1 = 0.0
        vmid = 0.5 * (v + v1)
        c = np.cos(psi)
        s = np.sin(psi)
        tan_steer = np.tan(steer)
        states[k + 1, 0] = x + vmid * c * dt
        states[k + 1, 1] = y + vmid * s * dt
        psi1 = psi + (v / wheelbase) * tan_steer * dt
        # wrap to (-pi, pi]
        states[k + 1, 2] = np.pi - (np.pi - psi1) % (2.0 * np.pi)
        states[k + 1, 3] = v1
        if with_jac:
            dv1_dv = 0.0 if clamped else 1.0
            dv1_da = 0.0 if clamped else dt
            dvm_dv = 0.5 * (1.0 + dv1_dv)
            dvm_da = 0.5 * dv1_da
            a00 = 1.0
            a02 = -vmid * s * dt
            a03 = dvm_dv * c * dt
            a12 = vmid * c * dt
            a13 = dvm_dv * s * dt
            a23 = tan_steer * dt / wheelbase
            b00 = dvm_da * c * dt
            b10 = dvm_da * s * dt
            b21 = v * dt / (wheelbase * np.cos(steer) ** 2)
            b30 = dv1_da
            new = np.empty((4, 2 * n))
            for j in range(2 * n):
                d0, d1, d2, d3 = dstate[0, j], dstate[1, j], dstate[2, j], dstate[3, j]
                new[0, j] = a00 * d0 + a02 * d2 + a03 * d3
                new[1, j] = d1 + a12 * d2 + a13 * d3
                new[2, j] = d2 + a23 * d3
                new[3, j] = dv1_dv * d3
            new[0, 2 * k] += b00
            new[1, 2 * k] += b10
            new[2, 2 * k + 1] += b21
            new[3, 2 * k] += b30
            dstate = new
            jac[k + 1, 0, :] = dstate[0, :]
            jac[k + 1, 1, :] = dstate[1, :]
    return states, jac


@njit(cache=True)
def rollout_states(s0, u, dt, wheelbase):
    """Plain bicycle rollout (no sensitivities)."""
    n = u.shape[0]
    states = np.empty((n + 1, 4))
    states[0] = s0
    for k in range(n):
        x, y, psi, v = states[k, 0], states[k, 1], states[k, 2], states[k, 3]
        v1 = v + u[k, 0] * dt
        if v1 < 0.0:
            v1 = 0.0
        vmid = 0.5 * (v + v1)
        states[k + 1, 0] = x + vmid * np.cos(psi) * dt
        states[k + 1, 1] = y + vmid * np.sin(psi) * dt
        psi1 = psi + (v / wheelbase) * np.tan(u[k, 1]) * dt
        states[k + 1, 2] = np.pi - (np.pi - psi1) % (2.0 * np.pi)
        states[k + 1, 3] = v1
    return states


@njit(cache=True)
def first_intersection(a_pts, b_pts):
    """First crossing of polyline a with polyline b, walking a in arc order.

    Returns (found, x, y, s_a, s_b). Near-parallel segment pairs are skipped.
    """
    s_a = 0.0
    for i in range(a_pts.shape[0] - 1):
        pax, pay = a_pts[i, 0], a_pts[i, 1]
        rax = a_pts[i + 1, 0] - pax
        ray = a_pts[i + 1, 1] - pay
        seg_a_len = np.sqrt(rax * rax + ray * ray)
        best_t = 2.0
        best_sb = 0.0
        s_b = 0.0
        for j in range(b_pts.shape[0] - 1):
            pbx, pby = b_pts[j, 0], b_pts[j, 1]
            rbx = b_pts[j + 1, 0] - pbx
            rby = b_pts[j + 1, 1] - pby
            seg_b_len = np.sqrt(rbx * rbx + rby * rby)
            cross = rax * rby - ray * rbx
            if abs(cross) > 1e-14:
                qpx = pbx - pax
                qpy = pby - pay
                t = (qpx * rby - qpy * rbx) / cross
                uu = (qpx * ray - qpy * rax) / cross
                if 0.0 <= t <= 1.0 and 0.0 <= uu <= 1.0 and t < best_t:
                    best_t = t
                    best_sb = s_b + uu * seg_b_len
            s_b += seg_b_len
        if best_t <= 1.0:
            return True, pax + best_t * rax, pay + best_t * ray, s_a + best_t * seg_a_len, best_sb
        s_a += seg_a_len
    return False, 0.0, 0.0, 0.0, 0.0


@njit(cache=True)
def project_points(pts, seg_a, seg_d, len2, arclen):
    """Closest point, arc length, deviation, tangent and outward normal per point."""
    p_n = pts.shape[0]
    s_n = seg_a.shape[0]
    closest = np.empty((p_n, 2))
    s_out = np.empty(p_n)
    dev = np.empty(p_n)
    tangent = np.empty((p_n, 2))
    normal = np.empty((p_n, 2))
    for i in range(p_n):
        px, py = pts[i, 0], pts[i, 1]
        best_d2 = 1e30
        best_j = 0
        best_t = 0.0
        for j in range(s_n):
            dx = seg_d[j, 0]
            dy = seg_d[j, 1]
            t = ((px - seg_a[j, 0]) * dx + (py - seg_a[j, 1]) * dy) / len2[j]
            if t < 0.0:
                t = 0.0
            elif t > 1.0:
                t = 1.0
            cx = seg_a[j, 0] + t * dx
            cy = seg_a[j, 1] + t * dy
            d2 = (px - cx) ** 2 + (py - cy) ** 2
            if d2 < best_d2:
                best_d2 = d2
                best_j = j
                best_t = t
        j = best_j
        seg_len = np.sqrt(len2[j])
        cx = seg_a[j, 0] + best_t * seg_d[j, 0]
        cy = seg_a[j, 1] + best_t * seg_d[j, 1]
        closest[i, 0] = cx
        closest[i, 1] = cy
        s_out[i] = arclen[j] + best_t * seg_len
        d = np.sqrt(best_d2)
        dev[i] = d
        tangent[i, 0] = seg_d[j, 0] / seg_len
        tangent[i, 1] = seg_d[j, 1] / seg_len
        if d > 1e-9:
            normal[i, 0] = (px - cx) / d
            normal[i, 1] = (py - cy) / d
        else:
            normal[i, 0] = 0.0
            normal[i, 1] = 0.0
    return closest, s_out, dev, tangent, normal


@njit(cache=True)
def side_eval_kernel(
    s0, u, dt, wheelbase, pos_other,
    seg_a, seg_d, len2, arclen,
    alpha, ci, si, ind_mean, ind_std, grp_mean, grp_std,
    margin2, dev_band, with_jac,
):
    """Fused rollout + projection + utility/lane evaluation for one side.

    Returns (states, jac, pos, value, g_own, grp_coef, n_m, delta_nm, resid,
    g_lane).
    """
    states, jac = rollout_pos_jac(s0, u, dt, wheelbase, with_jac)
    n = u.shape[0]
    pos = states[:, 0:2].copy()
    closest, s_arc, dev, tangent, normal = project_points(
        pos, seg_a, seg_d, len2, arclen
    )
    # smoothed deviation magnitude
    sdev_sum = 0.0
    slope = np.empty(n + 1)
    for i in range(n + 1):
        if dev[i] < dev_band:
            if i >= 1:
                sdev_sum += dev[i] * dev[i] / (2.0 * dev_band) + 0.5 * dev_band
            slope[i] = dev[i] / dev_band
        else:
            if i >= 1:
                sdev_sum += dev[i]
            slope[i] = 1.0
    r_ind = (s_arc[n] - s_arc[0]) - alpha * sdev_sum
    # group reward
    n_m = 1
    best_d2 = 1e30
    for i in range(1, n + 1):
        dx = pos[i, 0] - pos_other[i, 0]
        dy = pos[i, 1] - pos_other[i, 1]
        d2 = dx * dx + dy * dy
        if d2 < best_d2 - 1e-15:
            best_d2 = d2
            n_m = i
    w_t = n - n_m + 1
    r_grp = w_t * best_d2
    value = ci * (r_ind - ind_mean) / ind_std + si * (r_grp - grp_mean) / grp_std
    w_ind = ci / ind_std
    w_grp = si / grp_std
    g_own = np.zeros((n + 1, 2))
    g_own[n, 0] += w_ind * tangent[n, 0]
    g_own[n, 1] += w_ind * tangent[n, 1]
    for i in range(1, n + 1):
        g_own[i, 0] -= w_ind * alpha * slope[i] * normal[i, 0]
        g_own[i, 1] -= w_ind * alpha * slope[i] * normal[i, 1]
    grp_coef = w_grp * 2.0 * w_t
    delta_nm = np.empty(2)
    delta_nm[0] = pos[n_m, 0] - pos_other[n_m, 0]
    delta_nm[1] = pos[n_m, 1] - pos_other[n_m, 1]
    g_own[n_m, 0] += grp_coef * delta_nm[0]
    g_own[n_m, 1] += grp_coef * delta_nm[1]
    resid = np.empty((n, 2))
    g_lane = np.empty(n)
    for i in range(n):
        resid[i, 0] = pos[i + 1, 0] - closest[i + 1, 0]
        resid[i, 1] = pos[i + 1, 1] - closest[i + 1, 1]
        g_lane[i] = dev[i + 1] * dev[i + 1] - margin2
    return states, jac, pos, value, g_own, grp_coef, n_m, delta_nm, resid, g_lane


def warmup():
    """Trigger compilation of the kernels (no-op without numba)."""
    s0 = np.array([0.0, 0.0, 0.0, 5.0])
    u = np.zeros((2, 2))
    seg_a = np.array([[0.0, 0.0], [1.0, 0.0]])
    seg_d = np.array([[1.0, 0.0], [1.0, 0.0]])
    len2 = np.array([1.0, 1.0])
    arclen = np.array([0.0, 1.0])
    pos_other = np.zeros((3, 2))
    side_eval_kernel(
        s0, u, 0.3, 2.7, pos_other, seg_a, seg_d, len2, arclen,
        0.5, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.7225, 0.05, True,
    )
