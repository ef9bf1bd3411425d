//! Right-hand sides of the Schrödinger and two-sided Lindblad equations on
//! index subsets.

use crate::hamiltonian::TimeDependentHamiltonian;
use crate::numerics::{SparseMatrix, C64, ONE, ZERO};

/// An index subset closed under a set of operators.
#[derive(Clone, Debug)]
pub(crate) struct Support {
    pub indices: Vec<usize>,
    pub local: Vec<Option<usize>>,
}

impl Support {
    pub fn from_seed(dim: usize, seed: impl IntoIterator<Item = usize>) -> Self {
        let mut local = vec![None; dim];
        let mut indices = Vec::new();
        for i in seed {
            if local[i].is_none() {
                local[i] = Some(0);
                indices.push(i);
            }
        }
        indices.sort_unstable();
        for (k, &i) in indices.iter().enumerate() {
            local[i] = Some(k);
        }
        Self { indices, local }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    /// Smallest superset closed under `adjacency[j] = {i : op_ij ≠ 0}`.
    pub fn closure(&self, adjacency: &[Vec<usize>]) -> Self {
        let mut seen: Vec<bool> = self.local.iter().map(Option::is_some).collect();
        let mut stack = self.indices.clone();
        while let Some(j) = stack.pop() {
            for &i in &adjacency[j] {
                if !seen[i] {
                    seen[i] = true;
                    stack.push(i);
                }
            }
        }
        Self::from_seed(seen.len(), (0..seen.len()).filter(|&i| seen[i]))
    }
}

pub(crate) fn adjacency<'a>(dim: usize, edges: impl Iterator<Item = (usize, usize)> + 'a) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); dim];
    for (i, j) in edges {
        if i != j {
            adj[j].push(i);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    adj
}

/// `factor·H(t) − G/2` without the diagonal of the static part, stored as
/// entries whose value is `base · coeff[term] · e^{iωτ}`, with
/// `coeff = [1, c_1..c_n, conj(c_1)..conj(c_n)]` and `ω = d_i − d_j` the
/// frame frequency of the entry.
pub(crate) struct SideOp {
    entries: Vec<(usize, usize, usize, C64)>,
    omegas: Vec<f64>,
    values: Vec<C64>,
}

/// Real diagonal of the static part, removed into the rotating frame, or
/// zeros for the lab frame.
pub(crate) fn frame_energies(h: &TimeDependentHamiltonian, rotating: bool) -> Vec<f64> {
    let mut d = vec![0.0; h.dim()];
    if !rotating {
        return d;
    }
    for &(i, j, v) in h.static_part().entries() {
        if i == j {
            d[i] = v.re;
        }
    }
    d
}

impl SideOp {
    pub fn new(h: &TimeDependentHamiltonian, loss: Option<&SparseMatrix>, factor: C64, frame: &[f64]) -> Self {
        let n = h.n_drives();
        let mut entries: Vec<(usize, usize, usize, C64)> =
            h.static_part().entries().iter().filter(|e| e.0 != e.1).map(|&(i, j, v)| (i, j, 0, factor * v)).collect();
        if let Some(g) = loss {
            entries.extend(g.entries().iter().map(|&(i, j, v)| (i, j, 0, v * -0.5)));
        }
        for (k, (m, md)) in h.drives().iter().zip(h.drives_dag()).enumerate() {
            entries.extend(m.entries().iter().map(|&(i, j, v)| (i, j, 1 + k, factor * v)));
            entries.extend(md.entries().iter().map(|&(i, j, v)| (i, j, 1 + n + k, factor * v)));
        }
        // the static diagonal stays in the generator unless the frame absorbs it
        for &(i, _, v) in h.static_part().entries().iter().filter(|e| e.0 == e.1) {
            let rest = v.re - frame[i];
            if rest != 0.0 {
                entries.push((i, i, 0, factor * rest));
            }
        }
        entries.sort_by_key(|e| (e.0, e.1, e.2));
        entries.dedup_by(|b, a| {
            let same = a.0 == b.0 && a.1 == b.1 && a.2 == b.2;
            if same {
                a.3 += b.3;
            }
            same
        });
        let omegas = entries.iter().map(|e| frame[e.0] - frame[e.1]).collect();
        let values = vec![ZERO; entries.len()];
        Self { entries, omegas, values }
    }

    fn evaluate(&mut self, coeffs: &[C64], tau: f64) {
        for ((v, e), &w) in self.values.iter_mut().zip(&self.entries).zip(&self.omegas) {
            let base = e.3 * coeffs[e.2];
            *v = if w == 0.0 { base } else { base * C64::cis(w * tau) };
        }
    }
}

/// A jump operator restricted to the row and column subsets, with frame
/// frequencies per entry.
pub(crate) struct FramedJump {
    left: Vec<(usize, usize, C64, f64)>,
    right: Vec<(usize, usize, C64, f64)>,
    left_values: Vec<C64>,
    right_values: Vec<C64>,
}

impl FramedJump {
    pub fn new(left: &SparseMatrix, right: &SparseMatrix, frame_left: &[f64], frame_right: &[f64]) -> Self {
        let framed = |a: &SparseMatrix, d: &[f64]| -> Vec<(usize, usize, C64, f64)> {
            a.entries().iter().map(|&(i, j, v)| (i, j, v, d[i] - d[j])).collect()
        };
        let left = framed(left, frame_left);
        let right = framed(right, frame_right);
        let (nl, nr) = (left.len(), right.len());
        Self { left, right, left_values: vec![ZERO; nl], right_values: vec![ZERO; nr] }
    }
}

pub(crate) struct Rhs<'a> {
    left_h: &'a TimeDependentHamiltonian,
    right_h: Option<&'a TimeDependentHamiltonian>,
    left: SideOp,
    right: Option<SideOp>,
    jumps: Vec<FramedJump>,
    rows: usize,
    cols: usize,
    coeffs: Vec<C64>,
    /// Start of the segment; the frame phases are `e^{iωτ}` with `τ = t − t0`.
    t0: f64,
}

fn fill_coefficients(h: &TimeDependentHamiltonian, t: f64, out: &mut Vec<C64>) {
    let n = h.n_drives();
    out.resize(1 + 2 * n, ZERO);
    out[0] = ONE;
    h.coefficients_into(t, &mut out[1..=n]);
    for k in 0..n {
        out[1 + n + k] = out[1 + k].conj();
    }
}

impl<'a> Rhs<'a> {
    /// Ket right-hand side `−iHψ` (`cols = 1`, no right action) in the frame
    /// rotating with the static diagonal, `ψ̃ = e^{iD(t−t0)}ψ`.
    pub fn ket(h: &'a TimeDependentHamiltonian, frame: &[f64], t0: f64) -> Self {
        Self {
            left_h: h,
            right_h: None,
            left: SideOp::new(h, None, C64::new(0.0, -1.0), frame),
            right: None,
            jumps: Vec::new(),
            rows: h.dim(),
            cols: 1,
            coeffs: Vec::new(),
            t0,
        }
    }

    /// `dX/dt = K_L X + X K_R† + Σ a X a†` with `K = −iH − G/2`, in the
    /// frame `X̃ = e^{iD_L(t−t0)} X e^{−iD_R(t−t0)}`.
    #[allow(clippy::too_many_arguments)]
    pub fn two_sided(
        left_h: &'a TimeDependentHamiltonian,
        right_h: &'a TimeDependentHamiltonian,
        left_loss: &SparseMatrix,
        right_loss: &SparseMatrix,
        jumps: &[(SparseMatrix, SparseMatrix)],
        frame_left: &[f64],
        frame_right: &[f64],
        t0: f64,
    ) -> Self {
        Self {
            left_h,
            right_h: Some(right_h),
            left: SideOp::new(left_h, Some(left_loss), C64::new(0.0, -1.0), frame_left),
            right: Some(SideOp::new(right_h, Some(right_loss), C64::new(0.0, 1.0), frame_right)),
            jumps: jumps.iter().map(|(l, r)| FramedJump::new(l, r, frame_left, frame_right)).collect(),
            rows: left_h.dim(),
            cols: right_h.dim(),
            coeffs: Vec::new(),
            t0,
        }
    }

    pub fn apply(&mut self, t: f64, x: &[C64], dx: &mut [C64]) {
        let nb = self.cols;
        let tau = t - self.t0;
        fill_coefficients(self.left_h, t, &mut self.coeffs);
        self.left.evaluate(&self.coeffs, tau);
        dx.fill(ZERO);
        for (e, &v) in self.left.entries.iter().zip(&self.left.values) {
            let (i, j) = (e.0, e.1);
            let src = &x[j * nb..(j + 1) * nb];
            let dst = &mut dx[i * nb..(i + 1) * nb];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += v * s;
            }
        }
        if let (Some(right), Some(h)) = (self.right.as_mut(), self.right_h) {
            fill_coefficients(h, t, &mut self.coeffs);
            right.evaluate(&self.coeffs, tau);
            for r in 0..self.rows {
                let row = &x[r * nb..(r + 1) * nb];
                let out = &mut dx[r * nb..(r + 1) * nb];
                for (e, &v) in right.entries.iter().zip(&right.values) {
                    out[e.1] += row[e.0] * v;
                }
            }
        }
        for jump in &mut self.jumps {
            let phase = |v: C64, w: f64| if w == 0.0 { v } else { v * C64::cis(w * tau) };
            for (out, e) in jump.left_values.iter_mut().zip(&jump.left) {
                *out = phase(e.2, e.3);
            }
            for (out, e) in jump.right_values.iter_mut().zip(&jump.right) {
                *out = phase(e.2, e.3).conj();
            }
            for (l, &v) in jump.left.iter().zip(&jump.left_values) {
                let dst = l.0 * nb;
                let src = l.1 * nb;
                for (r, &w) in jump.right.iter().zip(&jump.right_values) {
                    dx[dst + r.0] += v * w * x[src + r.1];
                }
            }
        }
    }
}

/// Undo the frame rotation at the end of a segment of length `tau`:
/// `X = e^{−iD_L τ} X̃ e^{iD_R τ}` (a ket is the case `cols = 1`, `D_R = 0`).
pub(crate) fn leave_frame(x: &mut [C64], frame_left: &[f64], frame_right: Option<&[f64]>, tau: f64) {
    let nb = frame_right.map_or(1, <[f64]>::len);
    for (r, &dl) in frame_left.iter().enumerate() {
        for c in 0..nb {
            let dr = frame_right.map_or(0.0, |f| f[c]);
            let w = dr - dl;
            if w != 0.0 {
                x[r * nb + c] *= C64::cis(w * tau);
            }
        }
    }
}
