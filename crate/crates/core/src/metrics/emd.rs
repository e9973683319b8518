//! Earth Mover's Distance between equal-size point clouds: the minimum
//! over bijections of the mean unsquared Euclidean distance.
//!
//! Two routes are provided. `emd_exact` runs a dense shortest-augmenting-
//! path assignment solve (O(n³), size-capped). `emd_approx` runs entropic-
//! regularized transport with ε-annealing, rounds the plan to a feasible
//! matching, refines it with deterministic pairwise swaps, and certifies
//! the result against a dual lower bound so the returned value is within
//! the requested relative tolerance of the exact optimum.

use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::vec3;

/// Largest cloud size the exact solver accepts.
pub const EXACT_SIZE_CAP: usize = 1024;

/// Dense-matrix guard for the approximate solver (memory is O(n²)).
const APPROX_SIZE_CAP: usize = 4096;

struct CostMatrix {
    n: usize,
    data: Vec<f64>,
}

impl CostMatrix {
    fn build(s1: &PointCloud, s2: &PointCloud) -> Self {
        let n = s1.len();
        let mut data = vec![0.0; n * n];
        for (i, p) in s1.iter().enumerate() {
            let row = &mut data[i * n..(i + 1) * n];
            for (j, q) in s2.iter().enumerate() {
                row[j] = vec3::distance(p, q);
            }
        }
        Self { n, data }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    /// Mean cost of a row -> column matching, summed in row order.
    fn matching_mean(&self, assignment: &[usize]) -> f64 {
        let mut sum = 0.0;
        for (i, &j) in assignment.iter().enumerate() {
            sum += self.at(i, j);
        }
        sum / self.n as f64
    }
}

fn check_sizes(s1: &PointCloud, s2: &PointCloud) -> Result<usize> {
    if s1.is_empty() || s2.is_empty() {
        return Err(Error::InvalidInput(
            "earth mover's distance requires non-empty clouds".into(),
        ));
    }
    if s1.len() != s2.len() {
        return Err(Error::InvalidInput(format!(
            "earth mover's distance requires equal sizes, got {} and {}",
            s1.len(),
            s2.len()
        )));
    }
    Ok(s1.len())
}

/// Dense shortest-augmenting-path assignment (Jonker-Volgenant family).
/// Returns, for each row, the column it is matched to.
fn solve_assignment(cost: &CostMatrix) -> Vec<usize> {
    let n = cost.n;
    // 1-based arrays; index 0 is the virtual unmatched column.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut matched_row = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];

    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0usize;
        let mut min_slack = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            let row = cost.row(i0 - 1);
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let slack = row[j - 1] - u[i0] - v[j];
                if slack < min_slack[j] {
                    min_slack[j] = slack;
                    way[j] = j0;
                }
                if min_slack[j] < delta {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_slack[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        if matched_row[j] > 0 {
            assignment[matched_row[j] - 1] = j - 1;
        }
    }
    assignment
}

/// Exact EMD under the default size cap of [`EXACT_SIZE_CAP`] points.
pub fn emd_exact(s1: &PointCloud, s2: &PointCloud) -> Result<f64> {
    emd_exact_capped(s1, s2, EXACT_SIZE_CAP)
}

/// Exact EMD, refusing clouds larger than `cap` points.
pub fn emd_exact_capped(s1: &PointCloud, s2: &PointCloud, cap: usize) -> Result<f64> {
    let n = check_sizes(s1, s2)?;
    if n > cap {
        return Err(Error::TooLarge { size: n, cap });
    }
    let cost = CostMatrix::build(s1, s2);
    let assignment = solve_assignment(&cost);
    Ok(cost.matching_mean(&assignment))
}

/// Stabilized-scaling Sinkhorn over uniform marginals: the kernel
/// K̄_ij = exp((f_i + g_j − C_ij)/ε) is cached per stage with the running
/// duals absorbed, and iterations are plain scaling-vector updates.
/// Oversized scalings are absorbed back into the duals, which keeps the
/// kernel bounded at small ε.
struct Sinkhorn<'a> {
    cost: &'a CostMatrix,
    /// absorbed row potentials, cost units
    f: Vec<f64>,
    /// absorbed column potentials, cost units
    g: Vec<f64>,
    /// row/column scaling vectors relative to the absorbed duals
    u: Vec<f64>,
    v: Vec<f64>,
    kernel: Vec<f64>,
    eps: f64,
}

const ABSORB_LIMIT: f64 = 1e6;

impl<'a> Sinkhorn<'a> {
    fn new(cost: &'a CostMatrix, eps: f64) -> Self {
        let n = cost.n;
        let mut state = Self {
            cost,
            f: vec![0.0; n],
            g: vec![0.0; n],
            u: vec![1.0; n],
            v: vec![1.0; n],
            kernel: vec![0.0; n * n],
            eps,
        };
        state.rebuild_kernel();
        state
    }

    fn rebuild_kernel(&mut self) {
        let n = self.cost.n;
        for i in 0..n {
            let row = self.cost.row(i);
            let out = &mut self.kernel[i * n..(i + 1) * n];
            for j in 0..n {
                out[j] = ((self.f[i] + self.g[j] - row[j]) / self.eps).exp();
            }
        }
    }

    /// Lowers ε, folding current scalings into the absorbed duals.
    fn set_eps(&mut self, eps: f64) {
        self.absorb();
        self.eps = eps;
        self.rebuild_kernel();
    }

    fn absorb(&mut self) {
        for (fi, ui) in self.f.iter_mut().zip(&mut self.u) {
            *fi += self.eps * ui.ln();
            *ui = 1.0;
        }
        for (gj, vj) in self.g.iter_mut().zip(&mut self.v) {
            *gj += self.eps * vj.ln();
            *vj = 1.0;
        }
        self.rebuild_kernel();
    }

    /// One u-then-v scaling round; returns the L1 violation of the row
    /// marginals measured right after the v-update.
    fn iterate(&mut self) -> f64 {
        let n = self.cost.n;
        let weight = 1.0 / n as f64;
        // u_i = a_i / (K v)_i
        for i in 0..n {
            let row = &self.kernel[i * n..(i + 1) * n];
            let mut dot = 0.0;
            for j in 0..n {
                dot += row[j] * self.v[j];
            }
            self.u[i] = weight / dot.max(f64::MIN_POSITIVE);
        }
        // v_j = b_j / (Kᵀ u)_j
        let mut ktu = vec![0.0; n];
        for i in 0..n {
            let row = &self.kernel[i * n..(i + 1) * n];
            let ui = self.u[i];
            for j in 0..n {
                ktu[j] += row[j] * ui;
            }
        }
        for j in 0..n {
            self.v[j] = weight / ktu[j].max(f64::MIN_POSITIVE);
        }
        // rows were exact before the v-update; measure their violation now
        let mut err = 0.0;
        for i in 0..n {
            let row = &self.kernel[i * n..(i + 1) * n];
            let mut sum = 0.0;
            for j in 0..n {
                sum += row[j] * self.v[j];
            }
            err += (self.u[i] * sum - weight).abs();
        }
        let spread = |s: &[f64]| {
            s.iter().fold(1.0f64, |m, &x| m.max(x.max(1.0 / x.max(f64::MIN_POSITIVE))))
        };
        if spread(&self.u) > ABSORB_LIMIT || spread(&self.v) > ABSORB_LIMIT {
            self.absorb();
        }
        err
    }

    /// Column potentials including unabsorbed scalings.
    fn column_potentials(&self) -> Vec<f64> {
        self.g
            .iter()
            .zip(&self.v)
            .map(|(g, v)| g + self.eps * v.ln())
            .collect()
    }

    /// Feasible dual objective via c-transform of the column potentials:
    /// a valid lower bound on the mean-cost optimum.
    fn dual_lower_bound(&self, g: &[f64]) -> f64 {
        let n = self.cost.n;
        let mut total = 0.0;
        for i in 0..n {
            let row = self.cost.row(i);
            let mut alpha = f64::INFINITY;
            for j in 0..n {
                alpha = alpha.min(row[j] - g[j]);
            }
            total += alpha;
        }
        total += g.iter().sum::<f64>();
        total / n as f64
    }

    /// Rounds the current plan to a bijection: per-row argmin of reduced
    /// cost, greedy conflict resolution, exact completion of the
    /// leftover block.
    fn round_to_matching(&self, g: &[f64]) -> Vec<usize> {
        let n = self.cost.n;
        let mut assignment = vec![usize::MAX; n];
        let mut col_taken = vec![false; n];
        let mut deferred = Vec::new();
        for i in 0..n {
            let row = self.cost.row(i);
            let mut best_j = 0;
            let mut best = f64::INFINITY;
            for j in 0..n {
                let reduced = row[j] - g[j];
                if reduced < best {
                    best = reduced;
                    best_j = j;
                }
            }
            if col_taken[best_j] {
                deferred.push(i);
            } else {
                assignment[i] = best_j;
                col_taken[best_j] = true;
            }
        }
        if !deferred.is_empty() {
            let free_cols: Vec<usize> = (0..n).filter(|&j| !col_taken[j]).collect();
            let m = deferred.len();
            let mut sub = CostMatrix {
                n: m,
                data: vec![0.0; m * m],
            };
            for (a, &i) in deferred.iter().enumerate() {
                for (b, &j) in free_cols.iter().enumerate() {
                    sub.data[a * m + b] = self.cost.at(i, j);
                }
            }
            let sub_assignment = solve_assignment(&sub);
            for (a, &i) in deferred.iter().enumerate() {
                assignment[i] = free_cols[sub_assignment[a]];
            }
        }
        assignment
    }
}

/// Deterministic 2-swap descent on a matching; first-improvement scan
/// repeated until a clean pass.
fn refine_matching(cost: &CostMatrix, assignment: &mut [usize]) {
    let n = cost.n;
    const MAX_PASSES: usize = 60;
    for _ in 0..MAX_PASSES {
        let mut improved = false;
        for i in 0..n {
            for k in (i + 1)..n {
                let (ji, jk) = (assignment[i], assignment[k]);
                let current = cost.at(i, ji) + cost.at(k, jk);
                let swapped = cost.at(i, jk) + cost.at(k, ji);
                if swapped + 1e-15 * current.max(1.0) < current {
                    assignment.swap(i, k);
                    improved = true;
                }
            }
        }
        if !improved {
            return;
        }
    }
}

/// Approximate EMD certified within `tolerance` (relative) of the exact
/// optimum.
///
/// Runs ε-annealed log-domain Sinkhorn over uniform marginals; after each
/// stage the plan is rounded to a feasible bijection, refined by swaps,
/// and accepted once matching cost and dual lower bound agree within
/// `tolerance`. The returned value is the mean cost of a real matching,
/// so it always upper-bounds the exact EMD. Deterministic for fixed
/// inputs and tolerance.
pub fn emd_approx(s1: &PointCloud, s2: &PointCloud, tolerance: f64) -> Result<f64> {
    let n = check_sizes(s1, s2)?;
    if !(tolerance > 0.0) || !tolerance.is_finite() {
        return Err(Error::InvalidInput(format!(
            "tolerance must be a positive finite number, got {tolerance}"
        )));
    }
    if n > APPROX_SIZE_CAP {
        return Err(Error::InvalidInput(format!(
            "cloud size {n} exceeds the dense transport cap of {APPROX_SIZE_CAP}; downsample first"
        )));
    }

    let cost = CostMatrix::build(s1, s2);
    let c_max = cost.max();
    if c_max == 0.0 {
        return Ok(0.0); // all points coincide across both clouds
    }

    let marginal_target = 1e-3;
    let stage_cap = 200usize;
    let mut iterations = 0usize;
    let mut best_upper = f64::INFINITY;
    let mut best_lower = f64::NEG_INFINITY;

    let mut eps = 0.3 * c_max;
    let eps_floor = 1e-5 * c_max;
    let mut state = Sinkhorn::new(&cost, eps);
    loop {
        let mut stage_iter = 0;
        loop {
            let err = state.iterate();
            iterations += 1;
            stage_iter += 1;
            if err < marginal_target || stage_iter >= stage_cap {
                break;
            }
        }

        let g = state.column_potentials();
        let lower = state.dual_lower_bound(&g);
        best_lower = best_lower.max(lower);
        let mut assignment = state.round_to_matching(&g);
        refine_matching(&cost, &mut assignment);
        let upper = cost.matching_mean(&assignment);
        best_upper = best_upper.min(upper);

        // gap <= tol * lower bounds the true relative error by tol, since
        // lower <= exact <= upper; the absolute floor covers vanishing
        // optima where relative error is meaningless.
        let gap = best_upper - best_lower;
        let scale = best_lower.max(1e-12 * c_max);
        if gap <= tolerance * scale || best_upper <= 1e-12 * c_max {
            return Ok(best_upper);
        }
        if eps <= eps_floor {
            return Err(Error::Convergence {
                gap: gap / best_upper.max(f64::MIN_POSITIVE),
                iterations,
            });
        }
        eps *= 0.2;
        state.set_eps(eps);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vec3::Point3;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cloud(points: &[Point3]) -> PointCloud {
        PointCloud::new(points.to_vec()).unwrap()
    }

    fn random_cloud(rng: &mut ChaCha8Rng, n: usize) -> PointCloud {
        PointCloud::new(
            (0..n)
                .map(|_| {
                    [
                        rng.random_range(-1.0..1.0),
                        rng.random_range(-1.0..1.0),
                        rng.random_range(-1.0..1.0),
                    ]
                })
                .collect(),
        )
        .unwrap()
    }

    /// Factorial-enumeration oracle for tiny clouds.
    pub(crate) fn brute_emd(s1: &[Point3], s2: &[Point3]) -> f64 {
        fn permute(rest: &mut Vec<usize>, chosen: &mut Vec<usize>, s1: &[Point3], s2: &[Point3], best: &mut f64) {
            if rest.is_empty() {
                let sum: f64 = chosen
                    .iter()
                    .enumerate()
                    .map(|(i, &j)| vec3::distance(&s1[i], &s2[j]))
                    .sum();
                let mean = sum / s1.len() as f64;
                if mean < *best {
                    *best = mean;
                }
                return;
            }
            for idx in 0..rest.len() {
                let j = rest.remove(idx);
                chosen.push(j);
                permute(rest, chosen, s1, s2, best);
                chosen.pop();
                rest.insert(idx, j);
            }
        }
        let mut best = f64::INFINITY;
        permute(
            &mut (0..s2.len()).collect(),
            &mut Vec::new(),
            s1,
            s2,
            &mut best,
        );
        best
    }

    #[test]
    fn rejects_size_mismatch_and_empty() {
        let a = cloud(&[[0.0; 3]]);
        let b = cloud(&[[0.0; 3], [1.0, 0.0, 0.0]]);
        assert!(matches!(emd_exact(&a, &b), Err(Error::InvalidInput(_))));
        let empty = PointCloud::from_validated(vec![]);
        assert!(emd_exact(&empty, &empty).is_err());
    }

    #[test]
    fn exact_solver_refuses_above_cap() {
        let n = 8;
        let a = cloud(&vec![[0.0; 3]; n]);
        let b = cloud(&vec![[1.0, 0.0, 0.0]; n]);
        match emd_exact_capped(&a, &b, 4) {
            Err(Error::TooLarge { size, cap }) => {
                assert_eq!((size, cap), (8, 4));
            }
            other => panic!("expected TooLarge, got {other:?}"),
        }
    }

    #[test]
    fn identical_clouds_have_zero_distance() {
        let c = cloud(&[[0.5, -0.25, 1.0], [2.0, 0.0, 0.0], [0.0, 3.0, 1.5]]);
        assert_eq!(emd_exact(&c, &c).unwrap(), 0.0);
        assert!(emd_approx(&c, &c, 0.01).unwrap() <= 1e-9);
    }

    #[test]
    fn prefers_identity_over_crossed_matching() {
        let a = cloud(&[[0.0; 3], [1.0, 0.0, 0.0]]);
        let b = cloud(&[[0.0, 1.0, 0.0], [1.0, 1.0, 0.0]]);
        let d = emd_exact(&a, &b).unwrap();
        assert!((d - 1.0).abs() < 1e-12, "got {d}");
    }

    #[test]
    fn matches_factorial_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for trial in 0..60 {
            let n = rng.random_range(1..=8);
            let a = random_cloud(&mut rng, n);
            let b = random_cloud(&mut rng, n);
            let exact = emd_exact(&a, &b).unwrap();
            let brute = brute_emd(a.points(), b.points());
            assert_eq!(exact, brute, "trial {trial} (n = {n})");
        }
    }

    #[test]
    fn exact_is_a_metric_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..25 {
            let n = rng.random_range(2..=16);
            let a = random_cloud(&mut rng, n);
            let b = random_cloud(&mut rng, n);
            let c = random_cloud(&mut rng, n);
            let ab = emd_exact(&a, &b).unwrap();
            let ba = emd_exact(&b, &a).unwrap();
            assert!((ab - ba).abs() <= 1e-12);
            let bc = emd_exact(&b, &c).unwrap();
            let ac = emd_exact(&a, &c).unwrap();
            assert!(ac <= ab + bc + 1e-12, "triangle inequality");
            assert!(ab >= 0.0);
        }
    }

    #[test]
    fn zero_iff_equal_multisets() {
        let a = cloud(&[[0.0; 3], [1.0, 0.0, 0.0]]);
        // same multiset, permuted
        let b = cloud(&[[1.0, 0.0, 0.0], [0.0; 3]]);
        assert_eq!(emd_exact(&a, &b).unwrap(), 0.0);
        let c = cloud(&[[0.0; 3], [1.0 + 1e-6, 0.0, 0.0]]);
        assert!(emd_exact(&a, &c).unwrap() > 0.0);
    }

    #[test]
    fn approx_tracks_exact_within_one_percent() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for &n in &[16usize, 64] {
            for trial in 0..12 {
                let a = random_cloud(&mut rng, n);
                let b = random_cloud(&mut rng, n);
                let exact = emd_exact(&a, &b).unwrap();
                let approx = emd_approx(&a, &b, 0.01).unwrap();
                assert!(approx >= exact - 1e-9, "matching cost lower-bounds exact");
                let rel = (approx - exact) / exact;
                assert!(rel <= 0.01, "n {n} trial {trial}: rel err {rel}");
            }
        }
    }

    #[test]
    fn translation_cost_equals_the_shift() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let a = random_cloud(&mut rng, 40);
        let d = 0.75;
        let b = PointCloud::new(a.iter().map(|p| [p[0] + d, p[1], p[2]]).collect()).unwrap();
        let approx = emd_approx(&a, &b, 0.01).unwrap();
        assert!((approx - d).abs() <= 0.01 * d, "got {approx}");
        let exact = emd_exact(&a, &b).unwrap();
        assert!((exact - d).abs() <= 1e-9);
    }

    #[test]
    fn approx_rejects_bad_tolerance() {
        let c = cloud(&[[0.0; 3]]);
        assert!(emd_approx(&c, &c, 0.0).is_err());
        assert!(emd_approx(&c, &c, f64::NAN).is_err());
    }
}
