//! Compressed sparse rows and an envelope (skyline) Cholesky factorization
//! under reverse Cuthill-McKee ordering. The graphs assembled here are thin
//! (paths, stars and their fiber copies), so envelopes stay small.

use std::collections::VecDeque;

use nalgebra::DMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Duplicates are summed in insertion order, so the result does not depend
    /// on anything but the order of `triplets`.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0; n + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < n && c < n, "triplet ({r}, {c}) outside {n}x{n}");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                values.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..n {
            indptr[r + 1] += indptr[r];
        }
        CsrMatrix { n, indptr, indices, values }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).find(|&(j, _)| j == c).map_or(0.0, |(_, v)| v)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n).map(|r| self.row(r).map(|(c, v)| v * x[c]).sum()).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|r| self.get(r, r)).collect()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.n, self.n);
        for r in 0..self.n {
            for (c, v) in self.row(r) {
                d[(r, c)] = v;
            }
        }
        d
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.n {
            for (c, v) in self.row(r) {
                worst = worst.max((v - self.get(c, r)).abs());
            }
        }
        worst
    }

    /// Gershgorin bound on the spectral radius of `diag(scale) * self`.
    pub fn gershgorin(&self, scale: &[f64]) -> f64 {
        (0..self.n)
            .map(|r| scale[r] * self.row(r).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Reverse Cuthill-McKee permutation: `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.dim();
    let neighbours: Vec<Vec<usize>> = (0..n)
        .map(|r| a.row(r).map(|(c, _)| c).filter(|&c| c != r).collect())
        .collect();
    let degree: Vec<usize> = neighbours.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);

    let bfs_last = |start: usize, visited: &[bool]| -> usize {
        let mut seen = visited.to_vec();
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut last = start;
        while let Some(x) = queue.pop_front() {
            last = x;
            for &y in &neighbours[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        last
    };

    while order.len() < n {
        let seed = (0..n).filter(|&i| !visited[i]).min_by_key(|&i| (degree[i], i)).unwrap();
        // two sweeps towards a pseudo-peripheral start
        let start = bfs_last(bfs_last(seed, &visited), &visited);
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        while let Some(x) = queue.pop_front() {
            order.push(x);
            let mut next: Vec<usize> = neighbours[x].iter().copied().filter(|&y| !visited[y]).collect();
            next.sort_by_key(|&y| (degree[y], y));
            for y in next {
                visited[y] = true;
                queue.push_back(y);
            }
        }
    }
    order.reverse();
    order
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotPositiveDefinite {
    pub row: usize,
}

/// `P K P^T = L L^T` with `L` stored row-wise over its envelope.
#[derive(Debug, Clone)]
pub struct SkylineCholesky {
    perm: Vec<usize>,
    first: Vec<usize>,
    start: Vec<usize>,
    data: Vec<f64>,
}

impl SkylineCholesky {
    pub fn factor(k: &CsrMatrix) -> Result<Self, NotPositiveDefinite> {
        let n = k.dim();
        let perm = reverse_cuthill_mckee(k);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for (new, &old) in perm.iter().enumerate() {
            for (c, _) in k.row(old) {
                let j = inv[c];
                if j < first[new] {
                    first[new] = j;
                }
            }
        }
        let mut start = vec![0; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + (i - first[i] + 1);
        }
        let mut data = vec![0.0; start[n]];
        for (new, &old) in perm.iter().enumerate() {
            for (c, v) in k.row(old) {
                let j = inv[c];
                if j <= new {
                    data[start[new] + j - first[new]] += v;
                }
            }
        }
        let at = |i: usize, j: usize| start[i] + j - first[i];
        for i in 0..n {
            for j in first[i]..i {
                let lo = first[i].max(first[j]);
                let mut s = data[at(i, j)];
                for m in lo..j {
                    s -= data[at(i, m)] * data[at(j, m)];
                }
                data[at(i, j)] = s / data[at(j, j)];
            }
            let mut d = data[at(i, i)];
            for m in first[i]..i {
                d -= data[at(i, m)] * data[at(i, m)];
            }
            if !(d > 0.0) {
                return Err(NotPositiveDefinite { row: perm[i] });
            }
            data[at(i, i)] = d.sqrt();
        }
        Ok(SkylineCholesky { perm, first, start, data })
    }

    pub fn envelope_size(&self) -> usize {
        self.data.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.perm.len();
        let at = |i: usize, j: usize| self.start[i] + j - self.first[i];
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let mut s = y[i];
            for j in self.first[i]..i {
                s -= self.data[at(i, j)] * y[j];
            }
            y[i] = s / self.data[at(i, i)];
        }
        for i in (0..n).rev() {
            y[i] /= self.data[at(i, i)];
            let yi = y[i];
            for j in self.first[i]..i {
                y[j] -= self.data[at(i, j)] * yi;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}
