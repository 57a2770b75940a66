//! Thin QR by modified Gram–Schmidt with one reorthogonalization pass.

/// Relative norm below which a column counts as dependent on earlier ones.
const DEPENDENCE_TOL: f64 = 1e-10;

pub(crate) struct Qr {
    /// Columns of Q, each of length n.
    q: Vec<Vec<f64>>,
    /// Upper-triangular R, row-major p × p.
    r: Vec<Vec<f64>>,
}

impl Qr {
    /// Factor the n × p matrix given as rows. On rank deficiency returns the
    /// indices of the dependent columns.
    pub fn factor(rows: &[Vec<f64>], p: usize) -> Result<Self, Vec<usize>> {
        let n = rows.len();
        let mut q: Vec<Vec<f64>> = (0..p).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
        let mut r = vec![vec![0.0; p]; p];
        let mut dependent = Vec::new();
        for j in 0..p {
            let original = norm(&q[j]);
            for _pass in 0..2 {
                for i in 0..j {
                    if dependent.contains(&i) {
                        continue;
                    }
                    let d = dot(&q[i], &q[j]);
                    r[i][j] += d;
                    let (qi, qj) = split(&mut q, i, j);
                    for k in 0..n {
                        qj[k] -= d * qi[k];
                    }
                }
            }
            let nj = norm(&q[j]);
            if nj <= DEPENDENCE_TOL * original.max(f64::MIN_POSITIVE) || nj == 0.0 {
                dependent.push(j);
                continue;
            }
            r[j][j] = nj;
            q[j].iter_mut().for_each(|v| *v /= nj);
        }
        if dependent.is_empty() {
            Ok(Self { q, r })
        } else {
            Err(dependent)
        }
    }

    /// Least-squares solution of X β ≈ y.
    pub fn solve(&self, y: &[f64]) -> Vec<f64> {
        let p = self.r.len();
        let qty: Vec<f64> = self.q.iter().map(|qj| dot(qj, y)).collect();
        let mut beta = vec![0.0; p];
        for i in (0..p).rev() {
            let s: f64 = (i + 1..p).map(|k| self.r[i][k] * beta[k]).sum();
            beta[i] = (qty[i] - s) / self.r[i][i];
        }
        beta
    }

    /// Diagonal of (XᵀX)⁻¹ = R⁻¹R⁻ᵀ, i.e. squared row norms of R⁻¹.
    pub fn r_inverse_row_norms_sq(&self) -> Vec<f64> {
        let p = self.r.len();
        let mut inv = vec![vec![0.0; p]; p];
        for col in 0..p {
            for i in (0..=col).rev() {
                let rhs = if i == col { 1.0 } else { 0.0 };
                let s: f64 = (i + 1..=col).map(|k| self.r[i][k] * inv[k][col]).sum();
                inv[i][col] = (rhs - s) / self.r[i][i];
            }
        }
        inv.iter().map(|row| row.iter().map(|v| v * v).sum()).collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn split(q: &mut [Vec<f64>], i: usize, j: usize) -> (&[f64], &mut [f64]) {
    debug_assert!(i < j);
    let (lo, hi) = q.split_at_mut(j);
    (&lo[i], &mut hi[0])
}
