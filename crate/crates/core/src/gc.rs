//! Weighted coded matrix multiplication lifted from gradient coding.
//!
//! A gradient code is an `n×t` encoding matrix `G` plus, for every set `F` of
//! responding workers, a decoding vector `a_F` supported on `F` with
//! `a_Fᵀ G = 𝟏`. Worker `i` returns `Σ_j G[i,j] w̃_j X_j`; the server returns
//! `Σ_{i∈F} a_F[i] · (worker i's sum) = Σ_j w̃_j X_j`.
//!
//! The base code is fractional repetition: workers are split into replica
//! groups of at least `s+1` members, the `t` tasks are split across groups,
//! and every member of a group holds all of its group's tasks. Decoding picks
//! the lowest responding worker of each group.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use crate::matrix::DenseMatrix;
use crate::tasks::WeightedBlocks;
use crate::{Error, Result};

/// Encoding structure of a binary fractional-repetition gradient code.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GcScheme {
    /// Workers.
    n: usize,
    /// Tolerated stragglers.
    s: usize,
    /// Tasks (block pairs).
    t: usize,
    /// Compression factor this scheme was derived with (1 for a base scheme).
    rho: usize,
    /// Task indices held by each worker, ascending.
    assignments: Vec<Vec<usize>>,
}

/// Fractional repetition with replica groups of size at least `s + 1`.
///
/// Uses `⌊n/(s+1)⌋` groups; when `s + 1` does not divide `n` the leftover
/// workers join the first groups. Tasks are dealt to groups in contiguous
/// runs, earlier groups taking one extra when `t` does not split evenly.
fn fractional_repetition(n: usize, s: usize, t: usize) -> Result<Vec<Vec<usize>>> {
    if n == 0 || s >= n {
        return Err(Error::InvalidScheme(format!("need 0 <= s < n, got n={n}, s={s}")));
    }
    if t == 0 {
        return Err(Error::InvalidScheme("t must be positive".into()));
    }
    let groups = n / (s + 1);
    let mut assignments = Vec::with_capacity(n);
    let (wbase, wextra) = (n / groups, n % groups);
    let (tbase, textra) = (t / groups, t % groups);
    let mut task_lo = 0;
    for g in 0..groups {
        let members = wbase + usize::from(g < wextra);
        let held = tbase + usize::from(g < textra);
        let tasks: Vec<usize> = (task_lo..task_lo + held).collect();
        task_lo += held;
        for _ in 0..members {
            assignments.push(tasks.clone());
        }
    }
    Ok(assignments)
}

impl GcScheme {
    /// Base fractional-repetition code with `t = n` tasks; requires
    /// `(s+1) | n`.
    pub fn new(n: usize, s: usize) -> Result<Self> {
        if s >= n {
            return Err(Error::InvalidScheme(format!("need 0 <= s < n, got n={n}, s={s}")));
        }
        if !n.is_multiple_of(s + 1) {
            return Err(Error::InvalidScheme(format!("s+1={} does not divide n={n}", s + 1)));
        }
        Self::with_tasks(n, s, n)
    }

    /// Fractional-repetition code over an arbitrary number of tasks.
    pub fn with_tasks(n: usize, s: usize, t: usize) -> Result<Self> {
        Ok(Self {
            n,
            s,
            t,
            rho: 1,
            assignments: fractional_repetition(n, s, t)?,
        })
    }

    /// The same workers on `t/ρ` tasks, each now replicated `ρ(s+1)` times,
    /// so `ρ(s+1) − 1` stragglers are tolerated.
    ///
    /// When `ρ(s+1)` does not divide `n` the replica groups are larger than
    /// `ρ(s+1)` and the scheme tolerates more than the declared count.
    pub fn compressed_tolerance(&self, rho: usize) -> Result<Self> {
        if rho == 0 {
            return Err(Error::InvalidScheme("rho must be positive".into()));
        }
        if !self.t.is_multiple_of(rho) {
            return Err(Error::InvalidScheme(format!(
                "rho={rho} does not divide t={}",
                self.t
            )));
        }
        let replication = rho * (self.s + 1);
        if replication > self.n {
            return Err(Error::InvalidScheme(format!(
                "rho(s+1)={replication} exceeds n={}",
                self.n
            )));
        }
        let mut scheme = Self::with_tasks(self.n, replication - 1, self.t / rho)?;
        scheme.rho = self.rho * rho;
        Ok(scheme)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn rho(&self) -> usize {
        self.rho
    }

    /// `f = n − s`.
    pub fn recovery_threshold(&self) -> usize {
        self.n - self.s
    }

    /// Nonzero pattern of row `worker` of `G`.
    pub fn task_support(&self, worker: usize) -> &[usize] {
        &self.assignments[worker]
    }

    pub fn assignments(&self) -> &[Vec<usize>] {
        &self.assignments
    }

    /// The dense `n×t` encoding matrix `G`.
    pub fn encoding_matrix(&self) -> DenseMatrix {
        let mut g = vec![0.0; self.n * self.t];
        for (i, row) in self.assignments.iter().enumerate() {
            for &j in row {
                g[i * self.t + j] = 1.0;
            }
        }
        DenseMatrix::from_raw(self.n, self.t, g)
    }

    /// `a_F` for the responder set `F`: one live replica per task, the lowest
    /// responding worker id winning. Fails if some task has no live replica.
    pub fn decoding_vector(&self, responders: &[usize]) -> Result<Vec<f64>> {
        let mut live = vec![false; self.n];
        for &w in responders {
            if w >= self.n {
                return Err(Error::InvalidScheme(format!("worker {w} out of range")));
            }
            live[w] = true;
        }
        let mut holders: Vec<Vec<usize>> = vec![Vec::new(); self.t];
        for (w, row) in self.assignments.iter().enumerate() {
            if live[w] {
                for &j in row {
                    holders[j].push(w);
                }
            }
        }
        let mut covered = vec![false; self.t];
        let mut a = vec![0.0; self.n];
        for j in 0..self.t {
            if covered[j] {
                continue;
            }
            let &w = holders[j].first().ok_or(Error::Undecodable { block: j })?;
            for &jj in &self.assignments[w] {
                if covered[jj] {
                    return Err(Error::InvalidScheme(format!(
                        "worker {w} overlaps an already covered task {jj}"
                    )));
                }
                covered[jj] = true;
            }
            a[w] = 1.0;
        }
        Ok(a)
    }

    /// Splits `tasks` across workers: worker `i` gets `(j, G[i,j]·w̃_j)` for
    /// every `j` in its support.
    pub fn encode_tasks(&self, tasks: &WeightedBlocks<'_>) -> Result<Vec<TaskAssignment>> {
        if tasks.len() != self.t {
            return Err(Error::DimensionMismatch(format!(
                "scheme has t={} but {} tasks were given",
                self.t,
                tasks.len()
            )));
        }
        Ok(self
            .assignments
            .iter()
            .enumerate()
            .map(|(worker, row)| TaskAssignment {
                worker,
                coefficients: row.iter().map(|&j| (j, tasks.weights()[j])).collect(),
            })
            .collect())
    }

    /// `Σ_{i∈F} a_F[i] · partial_sum_i`. Duplicate responses from one worker
    /// are ignored after the first.
    pub fn decode(&self, responses: &[WeightedTask]) -> Result<DenseMatrix> {
        let first = responses.first().ok_or(Error::Undecodable { block: 0 })?;
        let (l, m) = first.partial_sum.shape();
        let ids: Vec<usize> = responses.iter().map(|r| r.worker).collect();
        let a = self.decoding_vector(&ids)?;
        let mut used = vec![false; self.n];
        let mut out = vec![0.0; l * m];
        for r in responses {
            if r.partial_sum.shape() != (l, m) {
                return Err(Error::DimensionMismatch("responses differ in shape".into()));
            }
            let coeff = a[r.worker];
            if used[r.worker] || coeff == 0.0 {
                continue;
            }
            used[r.worker] = true;
            for (o, v) in out.iter_mut().zip(r.partial_sum.data()) {
                *o += coeff * v;
            }
        }
        Ok(DenseMatrix::from_raw(l, m, out))
    }
}

/// Base code for `n` workers tolerating `s` stragglers.
pub fn build_gc_scheme(n: usize, s: usize) -> Result<GcScheme> {
    GcScheme::new(n, s)
}

/// What one worker must compute: `(task j, G[i,j]·w̃_j)` pairs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TaskAssignment {
    pub worker: usize,
    pub coefficients: Vec<(usize, f64)>,
}

/// A worker's reply: its weighted partial sum.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedTask {
    pub worker: usize,
    pub partial_sum: DenseMatrix,
}

/// `Σ_j G[i,j]·w̃_j·X_j` for one worker.
pub fn worker_compute(assignment: &TaskAssignment, tasks: &WeightedBlocks<'_>) -> WeightedTask {
    let (l, m) = tasks.output_shape();
    let mut out = vec![0.0; l * m];
    for &(j, coeff) in &assignment.coefficients {
        tasks.accumulate(&mut out, j, coeff);
    }
    WeightedTask {
        worker: assignment.worker,
        partial_sum: DenseMatrix::from_raw(l, m, out),
    }
}
