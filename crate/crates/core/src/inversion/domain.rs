//! Lower bounds for `sup_A ‖T(f χ_A)‖_{L¹}` over unions of dyadic cells.
//!
//! The sup is finite exactly when `f ∈ L log L`. At depth `k` the cells are
//! the `2^k` dyadic intervals of (-1, 1) and `f` is replaced by its cell
//! averages, so every `T(f_k χ_A)` is a sum of closed forms
//! `(1/π) log|(b - x)/(a - x)|`. The `L¹` norm is bounded below by
//! `Σ_J |∫_J T(f_k χ_A)|` over four sub-cells `J` per cell.
//! Sets are chosen by alternating maximization over signs and cells.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::func::{integrate_fn, ScalarFn};
use crate::quad::QuadConfig;

const SUBCELLS: usize = 4;
const MAX_DEPTH: u32 = 12;
const MAX_SWEEPS: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DepthSup {
    pub depth: u32,
    /// Best bound found at this depth.
    pub value: f64,
    /// Running max over depths up to this one.
    pub sup: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MembershipDiagnostic {
    pub catalogue_depth: u32,
    pub start_depth: u32,
    pub sup_lower_bound: f64,
    /// The running sup grew by more than `growth_rtol` at every step from `start_depth`.
    pub growth_flag: bool,
    pub growth_rtol: f64,
    pub per_depth: Vec<DepthSup>,
    /// Cells whose average was not finite; they were left out of every set.
    pub failures: usize,
}

impl MembershipDiagnostic {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("diagnostic serializes")
    }
}

/// Relative growth per depth step counted as unbounded growth.
pub const DEFAULT_GROWTH_RTOL: f64 = 5e-3;

fn g(y: f64) -> f64 {
    if y == 0.0 {
        0.0
    } else {
        y * y.abs().ln()
    }
}

/// `K(m) = ∫_{J_{j}} T(χ_{cell c}) dx` for `m = j - 4c`, in units where sub-cells have width `δ`.
fn kernel_table(n: usize, delta: f64) -> (Vec<f64>, isize) {
    let s = SUBCELLS as isize;
    let lo = -s * (n as isize - 1);
    let hi = s * n as isize - 1;
    let table = (lo..=hi)
        .map(|m| {
            let m = m as f64;
            let sf = s as f64;
            delta / std::f64::consts::PI * (g(m + 1.0 - sf) - g(m - sf) - g(m + 1.0) + g(m))
        })
        .collect();
    (table, lo)
}

struct Level {
    n: usize,
    avg: Vec<f64>,
    table: Vec<f64>,
    offset: isize,
}

impl Level {
    fn k(&self, j: usize, c: usize) -> f64 {
        self.table[(j as isize - (SUBCELLS * c) as isize - self.offset) as usize]
    }

    fn sums(&self, set: &[bool]) -> Vec<f64> {
        let mut s = vec![0.0; self.n * SUBCELLS];
        for (c, _) in set.iter().enumerate().filter(|(_, &on)| on) {
            let a = self.avg[c];
            if a == 0.0 {
                continue;
            }
            for (j, sj) in s.iter_mut().enumerate() {
                *sj += a * self.k(j, c);
            }
        }
        s
    }

    fn objective(&self, set: &[bool]) -> f64 {
        self.sums(set).iter().map(|v| v.abs()).sum()
    }

    /// Alternate `θ = sign(s(A))` and `A = {c : a_c Σ_j θ_j K_{jc} > 0}` until fixed.
    fn improve(&self, mut set: Vec<bool>) -> (Vec<bool>, f64) {
        let mut best = self.objective(&set);
        for _ in 0..MAX_SWEEPS {
            let theta: Vec<f64> = self.sums(&set).iter().map(|v| if *v >= 0.0 { 1.0 } else { -1.0 }).collect();
            let next: Vec<bool> = (0..self.n)
                .map(|c| {
                    let a = self.avg[c];
                    a != 0.0 && a * theta.iter().enumerate().map(|(j, t)| t * self.k(j, c)).sum::<f64>() > 0.0
                })
                .collect();
            let value = self.objective(&next);
            if next == set || value <= best {
                if value > best {
                    best = value;
                    set = next;
                }
                break;
            }
            best = value;
            set = next;
        }
        (set, best)
    }
}

/// Dyadic-catalogue diagnostic up to `depth`; growth is judged from `start_depth` on.
pub fn optimal_domain_diag<F: ScalarFn + ?Sized>(
    f: &F,
    depth: u32,
    start_depth: u32,
    growth_rtol: f64,
) -> Result<MembershipDiagnostic> {
    if depth == 0 || depth > MAX_DEPTH {
        return Err(Error::Precondition(format!("depth must be in 1..={MAX_DEPTH}, got {depth}")));
    }
    if start_depth == 0 || start_depth > depth {
        return Err(Error::Precondition("start depth must be in 1..=depth".into()));
    }
    let cfg = QuadConfig::default();
    let mut failures = 0;
    let mut per_depth = Vec::with_capacity(depth as usize);
    let mut previous: Option<Vec<bool>> = None;
    let mut running: f64 = 0.0;
    for k in 1..=depth {
        let n = 1usize << k;
        let width = 2.0 / n as f64;
        let mut avg: Vec<f64> = (0..n)
            .map(|c| {
                let a = -1.0 + c as f64 * width;
                integrate_fn(f, a, a + width, &cfg) / width
            })
            .collect();
        for v in avg.iter_mut().filter(|v| !v.is_finite()) {
            *v = 0.0;
            failures += 1;
        }
        let (table, offset) = kernel_table(n, width / SUBCELLS as f64);
        let level = Level { n, avg, table, offset };
        let mut seeds = vec![
            vec![true; n],
            level.avg.iter().map(|a| *a > 0.0).collect(),
            level.avg.iter().map(|a| *a < 0.0).collect(),
            (0..n).map(|c| c < n / 2).collect(),
            (0..n).map(|c| c >= n / 2).collect(),
        ];
        if let Some(prev) = &previous {
            seeds.push((0..n).map(|c| prev[c / 2]).collect());
        }
        let (set, value) = seeds
            .into_iter()
            .map(|s| level.improve(s))
            .fold((vec![false; n], 0.0), |acc, cand| if cand.1 > acc.1 { cand } else { acc });
        running = running.max(value);
        per_depth.push(DepthSup { depth: k, value, sup: running });
        previous = Some(set);
    }
    let window: Vec<f64> = per_depth.iter().filter(|d| d.depth >= start_depth).map(|d| d.sup).collect();
    let growth_flag = window.len() >= 2 && window.windows(2).all(|w| w[1] > w[0] * (1.0 + growth_rtol));
    Ok(MembershipDiagnostic {
        catalogue_depth: depth,
        start_depth,
        sup_lower_bound: running,
        growth_flag,
        growth_rtol,
        per_depth,
        failures,
    })
}
