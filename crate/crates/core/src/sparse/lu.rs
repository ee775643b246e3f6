use std::collections::VecDeque;

use super::{norm2, CsrMatrix, LinearSolution, Method, SolverError};

/// Banded LU factorization with partial pivoting of a symmetrically permuted
/// matrix `P A Pᵀ`, where `P` is a reverse Cuthill–McKee ordering.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    /// `perm[new] = old`
    perm: Vec<usize>,
    kl: usize,
    ku: usize,
    width: usize,
    /// Row `r` holds columns `r − kl ..= r + kl + ku`.
    band: Vec<f64>,
    /// Multipliers of step `k` for rows `k+1 ..= k+kl`.
    mult: Vec<f64>,
    pivots: Vec<usize>,
    norm1: f64,
    rcond: f64,
}

impl BandLu {
    /// Factors `a`. A pivot that is exactly zero reports
    /// [`SolverError::Singular`] with `rcond = 0`.
    pub fn factor(a: &CsrMatrix) -> Result<Self, SolverError> {
        super::check_square(a, a.nrows())?;
        let n = a.nrows();
        let perm = reverse_cuthill_mckee(a);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }

        let (mut kl, mut ku) = (0, 0);
        for r in 0..n {
            let (cols, _) = a.row(r);
            for &c in cols {
                let (i, j) = (inv[r], inv[c]);
                if i > j {
                    kl = kl.max(i - j);
                } else {
                    ku = ku.max(j - i);
                }
            }
        }
        let width = 2 * kl + ku + 1;
        let mut band = vec![0.0; n * width];
        for r in 0..n {
            let (cols, vals) = a.row(r);
            let i = inv[r];
            for (&c, &v) in cols.iter().zip(vals) {
                band[i * width + inv[c] + kl - i] += v;
            }
        }

        let mut lu = BandLu {
            n,
            perm,
            kl,
            ku,
            width,
            band,
            mult: vec![0.0; n * kl],
            pivots: vec![0; n],
            norm1: a.norm_1(),
            rcond: 0.0,
        };
        lu.eliminate()?;
        lu.rcond = lu.estimate_rcond();
        Ok(lu)
    }

    fn at(&self, r: usize, c: usize) -> usize {
        r * self.width + c + self.kl - r
    }

    fn eliminate(&mut self) -> Result<(), SolverError> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + kl + ku).min(n - 1);
            let mut p = k;
            let mut best = self.band[self.at(k, k)].abs();
            for i in k + 1..=last_row {
                let v = self.band[self.at(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(SolverError::Singular { rcond: 0.0 });
            }
            self.pivots[k] = p;
            if p != k {
                for j in k..=last_col {
                    let (x, y) = (self.at(k, j), self.at(p, j));
                    self.band.swap(x, y);
                }
            }
            let pivot = self.band[self.at(k, k)];
            for i in k + 1..=last_row {
                let ik = self.at(i, k);
                let m = self.band[ik] / pivot;
                self.band[ik] = 0.0;
                self.mult[k * kl + (i - k - 1)] = m;
                if m != 0.0 {
                    for j in k + 1..=last_col {
                        let kj = self.band[self.at(k, j)];
                        let ij = self.at(i, j);
                        self.band[ij] -= m * kj;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Lower and upper bandwidth of the reordered matrix.
    pub fn bandwidth(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    /// Estimate of `1 / (‖A‖₁ ‖A⁻¹‖₁)`.
    pub fn rcond(&self) -> f64 {
        self.rcond
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        self.solve_permuted(&mut y);
        let mut x = vec![0.0; self.n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }

    /// Solves `Aᵀ x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        self.solve_permuted_transpose(&mut y);
        let mut x = vec![0.0; self.n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }

    fn solve_permuted(&self, y: &mut [f64]) {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        for k in 0..n {
            y.swap(k, self.pivots[k]);
            let yk = y[k];
            for i in k + 1..=(k + kl).min(n.saturating_sub(1)) {
                y[i] -= self.mult[k * kl + (i - k - 1)] * yk;
            }
        }
        for k in (0..n).rev() {
            let mut s = y[k];
            for j in k + 1..=(k + kl + ku).min(n - 1) {
                s -= self.band[self.at(k, j)] * y[j];
            }
            y[k] = s / self.band[self.at(k, k)];
        }
    }

    fn solve_permuted_transpose(&self, y: &mut [f64]) {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        for k in 0..n {
            let mut s = y[k];
            for i in k.saturating_sub(kl + ku)..k {
                s -= self.band[self.at(i, k)] * y[i];
            }
            y[k] = s / self.band[self.at(k, k)];
        }
        for k in (0..n).rev() {
            let mut s = y[k];
            for i in k + 1..=(k + kl).min(n - 1) {
                s -= self.mult[k * kl + (i - k - 1)] * y[i];
            }
            y[k] = s;
            y.swap(k, self.pivots[k]);
        }
    }

    /// Solves and refines up to three times until
    /// `‖b − Ax‖₂ ≤ tolerance·‖b‖₂`.
    pub fn solve_refined(&self, a: &CsrMatrix, b: &[f64], tolerance: f64) -> Result<LinearSolution, SolverError> {
        super::check_square(a, b.len())?;
        let bnorm = norm2(b);
        let mut x = self.solve(b);
        let mut r = vec![0.0; self.n];
        let mut steps = 0;
        loop {
            a.mul_into(&x, &mut r);
            for (ri, bi) in r.iter_mut().zip(b) {
                *ri = bi - *ri;
            }
            let res = if bnorm == 0.0 { norm2(&r) } else { norm2(&r) / bnorm };
            if res <= tolerance {
                return Ok(LinearSolution {
                    x,
                    method: Method::BandLu,
                    iterations: steps,
                    residual: res,
                    rcond: Some(self.rcond),
                });
            }
            if steps == 3 {
                return Err(SolverError::NonConvergence {
                    iterations: steps,
                    residual: res,
                });
            }
            let d = self.solve(&r);
            for (xi, di) in x.iter_mut().zip(&d) {
                *xi += di;
            }
            steps += 1;
        }
    }

    /// Hager's estimate of `‖A⁻¹‖₁`, with Higham's alternating test vector
    /// as a safeguard.
    fn estimate_rcond(&self) -> f64 {
        let n = self.n;
        if n == 0 {
            return 1.0;
        }
        if self.norm1 == 0.0 {
            return 0.0;
        }
        let norm_1 = |v: &[f64]| v.iter().map(|x| x.abs()).sum::<f64>();
        let mut x = vec![1.0 / n as f64; n];
        let mut est: f64 = 0.0;
        for iter in 0..5 {
            let y = self.solve(&x);
            let e = norm_1(&y);
            if iter > 0 && e <= est {
                break;
            }
            est = e;
            let xi: Vec<f64> = y.iter().map(|v| if *v >= 0.0 { 1.0 } else { -1.0 }).collect();
            let z = self.solve_transpose(&xi);
            let (j, zj) = z.iter().enumerate().fold(
                (0, -1.0),
                |(bj, bv), (i, v)| if v.abs() > bv { (i, v.abs()) } else { (bj, bv) },
            );
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
            if iter > 0 && zj <= ztx {
                break;
            }
            x = vec![0.0; n];
            x[j] = 1.0;
        }
        if n > 1 {
            let alt: Vec<f64> = (0..n)
                .map(|i| {
                    let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                    s * (1.0 + i as f64 / (n - 1) as f64)
                })
                .collect();
            est = est.max(2.0 * norm_1(&self.solve(&alt)) / (3.0 * n as f64));
        }
        if !est.is_finite() {
            return 0.0;
        }
        1.0 / (self.norm1 * est)
    }
}

/// Reverse Cuthill–McKee ordering of the symmetrized pattern of `a`, as
/// `perm[new] = old`. Each connected component starts from a
/// pseudo-peripheral node; ties are broken by lowest index.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.nrows();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for r in 0..n {
        for &c in a.row(r).0 {
            if c != r && c < n {
                adj[r].push(c);
                adj[c].push(r);
            }
        }
    }
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();

    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while let Some(seed) = (0..n).filter(|&i| !visited[i]).min_by_key(|&i| (degree[i], i)) {
        let start = pseudo_peripheral(seed, &adj, &degree, &visited);
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&u| !visited[u]).collect();
            next.sort_by_key(|&u| (degree[u], u));
            for u in next {
                visited[u] = true;
                queue.push_back(u);
            }
        }
    }
    order.reverse();
    order
}

fn pseudo_peripheral(seed: usize, adj: &[Vec<usize>], degree: &[usize], blocked: &[bool]) -> usize {
    let mut node = seed;
    let (mut ecc, mut last) = levels(node, adj, blocked);
    for _ in 0..adj.len() {
        let candidate = *last.iter().min_by_key(|&&u| (degree[u], u)).unwrap();
        let (e, l) = levels(candidate, adj, blocked);
        if e <= ecc {
            break;
        }
        node = candidate;
        ecc = e;
        last = l;
    }
    node
}

/// Eccentricity of `start` and the nodes of its last BFS level.
fn levels(start: usize, adj: &[Vec<usize>], blocked: &[bool]) -> (usize, Vec<usize>) {
    let mut depth = vec![usize::MAX; adj.len()];
    depth[start] = 0;
    let mut frontier = vec![start];
    let mut ecc = 0;
    loop {
        let mut next = Vec::new();
        for &v in &frontier {
            for &u in &adj[v] {
                if !blocked[u] && depth[u] == usize::MAX {
                    depth[u] = ecc + 1;
                    next.push(u);
                }
            }
        }
        if next.is_empty() {
            return (ecc, frontier);
        }
        ecc += 1;
        frontier = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_mul(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
        a.iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    #[test]
    fn nonsymmetric_needs_pivoting() {
        let d = vec![vec![0.0, 2.0, 1.0], vec![1.0, 1.0, 0.0], vec![3.0, 0.0, 1.0]];
        let a = CsrMatrix::from_dense(&d);
        let lu = BandLu::factor(&a).unwrap();
        let b = vec![1.0, 2.0, 3.0];
        let x = lu.solve(&b);
        for (u, v) in dense_mul(&d, &x).iter().zip(&b) {
            assert!((u - v).abs() < 1e-14);
        }
        let t: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| d[j][i]).collect()).collect();
        let xt = lu.solve_transpose(&b);
        for (u, v) in dense_mul(&t, &xt).iter().zip(&b) {
            assert!((u - v).abs() < 1e-14);
        }
    }

    #[test]
    fn rcm_reduces_bandwidth_of_shuffled_path() {
        // path graph 0-5-2-7-1-4-6-3 stored with scattered indices
        let path = [0, 5, 2, 7, 1, 4, 6, 3];
        let mut t = Vec::new();
        for w in path.windows(2) {
            t.push((w[0], w[1], -1.0));
            t.push((w[1], w[0], -1.0));
        }
        for i in 0..8 {
            t.push((i, i, 3.0));
        }
        let a = CsrMatrix::from_triplets(8, 8, &t);
        let lu = BandLu::factor(&a).unwrap();
        assert_eq!(lu.bandwidth(), (1, 1));
        let mut perm = reverse_cuthill_mckee(&a);
        perm.sort_unstable();
        assert_eq!(perm, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn condition_estimate_of_diagonal() {
        let a = CsrMatrix::from_dense(&[vec![1.0, 0.0, 0.0], vec![0.0, 1e-6, 0.0], vec![0.0, 0.0, 2.0]]);
        let lu = BandLu::factor(&a).unwrap();
        assert!((lu.rcond() - 0.5e-6).abs() < 1e-18);
    }

    #[test]
    fn exactly_singular_reports_zero_rcond() {
        let a = CsrMatrix::from_dense(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert_eq!(BandLu::factor(&a).unwrap_err(), SolverError::Singular { rcond: 0.0 });
    }

    #[test]
    fn disconnected_blocks() {
        let a = CsrMatrix::from_dense(&[
            vec![2.0, 0.0, 1.0, 0.0],
            vec![0.0, 3.0, 0.0, 0.0],
            vec![1.0, 0.0, 2.0, 0.0],
            vec![0.0, 0.0, 0.0, 5.0],
        ]);
        let lu = BandLu::factor(&a).unwrap();
        let x = lu.solve(&[3.0, 3.0, 3.0, 5.0]);
        for v in x {
            assert!((v - 1.0).abs() < 1e-15);
        }
    }
}
