//! Operator norms, Frobenius norms and trace moments `tr((M Mᵀ)^k)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    check_len, DenseMatrix, IntegerMatrix, LinearOperator, RealMatrix, Transposed,
};

pub const DEFAULT_TOL: f64 = 1e-6;
/// Largest dimension accepted by the Jacobi singular-value routine.
pub const SVD_MAX_DIM: usize = 64;
const SVD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormMethod {
    PowerIteration,
    ExactSingularValues,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralEstimate {
    pub value: f64,
    pub method: NormMethod,
    pub iterations: usize,
    /// Relative change of the squared estimate in the last iteration.
    pub residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerOptions {
    pub tol: f64,
    /// `None` selects [`default_max_iter`].
    pub max_iter: Option<usize>,
    pub seed: u64,
}

impl Default for PowerOptions {
    fn default() -> Self {
        PowerOptions {
            tol: DEFAULT_TOL,
            max_iter: None,
            seed: 0,
        }
    }
}

/// `10·⌈log₂ dim⌉ + 500`.
pub fn default_max_iter(dim: usize) -> usize {
    let log = usize::BITS - dim.max(1).saturating_sub(1).leading_zeros();
    10 * log as usize + 500
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Largest singular value by power iteration on `MᵀM` (or `MMᵀ`, whichever
/// is smaller) from a seeded uniform start vector. The estimate never
/// exceeds the true norm beyond rounding; a run that hits `max_iter` before
/// the relative change drops below `tol` is returned with `converged = false`.
pub fn operator_norm<M: LinearOperator + ?Sized>(
    m: &M,
    opts: &PowerOptions,
) -> Result<SpectralEstimate> {
    if m.ncols() <= m.nrows() {
        power_iteration(m, opts)
    } else {
        power_iteration(&Transposed(m), opts)
    }
}

fn power_iteration<M: LinearOperator + ?Sized>(
    m: &M,
    opts: &PowerOptions,
) -> Result<SpectralEstimate> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidArgument(
            "power iteration tolerance must be positive".into(),
        ));
    }
    let dim = m.ncols();
    let max_iter = opts.max_iter.unwrap_or_else(|| default_max_iter(dim));
    if max_iter == 0 {
        return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
    }
    let zero = SpectralEstimate {
        value: 0.0,
        method: NormMethod::PowerIteration,
        iterations: 0,
        residual: 0.0,
        converged: true,
    };
    if dim == 0 || m.nrows() == 0 {
        return Ok(zero);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let nv = norm2(&v);
    v.iter_mut().for_each(|x| *x /= nv);

    let mut previous = f64::NAN;
    let mut residual = f64::INFINITY;
    for iteration in 1..=max_iter {
        let u = m.apply(&v)?;
        let sq = u.iter().map(|x| x * x).sum::<f64>();
        if sq == 0.0 {
            return Ok(SpectralEstimate {
                iterations: iteration,
                ..zero
            });
        }
        if previous.is_finite() {
            residual = (sq - previous).abs() / sq;
            if residual < opts.tol {
                return Ok(SpectralEstimate {
                    value: sq.sqrt(),
                    method: NormMethod::PowerIteration,
                    iterations: iteration,
                    residual,
                    converged: true,
                });
            }
        }
        previous = sq;
        let w = m.apply_transpose(&u)?;
        let nw = norm2(&w);
        if nw == 0.0 {
            return Ok(SpectralEstimate {
                value: sq.sqrt(),
                method: NormMethod::PowerIteration,
                iterations: iteration,
                residual: 0.0,
                converged: true,
            });
        }
        v = w.into_iter().map(|x| x / nw).collect();
    }
    Ok(SpectralEstimate {
        value: previous.sqrt(),
        method: NormMethod::PowerIteration,
        iterations: max_iter,
        residual,
        converged: false,
    })
}

/// Largest singular value from the Jacobi decomposition (dims ≤ 64).
pub fn exact_norm(m: &RealMatrix) -> Result<SpectralEstimate> {
    let sv = singular_values(m)?;
    Ok(SpectralEstimate {
        value: sv.first().copied().unwrap_or(0.0),
        method: NormMethod::ExactSingularValues,
        iterations: 0,
        residual: 0.0,
        converged: true,
    })
}

/// Singular values in descending order by one-sided Jacobi rotations.
pub fn singular_values(m: &RealMatrix) -> Result<Vec<f64>> {
    let (rows, cols) = (m.rows(), m.cols());
    if rows > SVD_MAX_DIM || cols > SVD_MAX_DIM {
        return Err(Error::CapExceeded {
            what: "singular value decomposition dimension".into(),
            size: rows.max(cols) as u128,
            cap: SVD_MAX_DIM as u128,
        });
    }
    // Orthogonalize the columns of a tall matrix.
    let a = if rows >= cols {
        m.clone()
    } else {
        m.transpose()
    };
    let (h, w) = (a.rows(), a.cols());
    let mut col: Vec<Vec<f64>> = (0..w)
        .map(|j| (0..h).map(|i| a.get(i, j)).collect())
        .collect();
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..w {
            for q in (p + 1)..w {
                let alpha: f64 = col[p].iter().map(|x| x * x).sum();
                let beta: f64 = col[q].iter().map(|x| x * x).sum();
                let gamma: f64 = col[p].iter().zip(&col[q]).map(|(x, y)| x * y).sum();
                if gamma == 0.0 || gamma.abs() <= SVD_TOL * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..h {
                    let xp = col[p][i];
                    let xq = col[q][i];
                    col[p][i] = c * xp - s * xq;
                    col[q][i] = s * xp + c * xq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = col.iter().map(|c| norm2(c)).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// `‖M‖_Fr`, summing squares exactly before the final root.
pub fn frobenius_norm<M: IntegerMatrix + ?Sized>(m: &M) -> f64 {
    let mut acc: i128 = 0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let e = m.entry_at(i, j) as i128;
            acc += e * e;
        }
    }
    (acc as f64).sqrt()
}

fn matmul_checked(a: &[Vec<i128>], b: &[Vec<i128>]) -> Result<Vec<Vec<i128>>> {
    let d = a.len();
    let mut out = vec![vec![0i128; d]; d];
    for i in 0..d {
        for l in 0..d {
            let ail = a[i][l];
            if ail == 0 {
                continue;
            }
            for j in 0..d {
                let term = ail
                    .checked_mul(b[l][j])
                    .ok_or_else(|| Error::Overflow("trace moment".into()))?;
                out[i][j] = out[i][j]
                    .checked_add(term)
                    .ok_or_else(|| Error::Overflow("trace moment".into()))?;
            }
        }
    }
    Ok(out)
}

fn trace_of_power(g: &[Vec<i128>], k: usize) -> Result<i128> {
    let overflow = || Error::Overflow("trace moment".into());
    let half = k / 2;
    let mut p = g.to_vec();
    for _ in 1..half.max(1) {
        p = matmul_checked(&p, g)?;
    }
    if k == 1 {
        return g
            .iter()
            .enumerate()
            .try_fold(0i128, |acc, (i, row)| acc.checked_add(row[i]))
            .ok_or_else(overflow);
    }
    // tr(G^k) = Σ_ij P_ij Q_ji with P = G^half and Q = G^(k − half).
    let q = if k - half == half {
        p.clone()
    } else {
        matmul_checked(&p, g)?
    };
    let mut acc: i128 = 0;
    for (i, prow) in p.iter().enumerate() {
        for (j, &pij) in prow.iter().enumerate() {
            let term = pij.checked_mul(q[j][i]).ok_or_else(overflow)?;
            acc = acc.checked_add(term).ok_or_else(overflow)?;
        }
    }
    Ok(acc)
}

/// Exact `tr((M Mᵀ)^k)` for an explicit integer matrix; overflow of the
/// 128-bit accumulator is an error.
pub fn trace_moment(m: &DenseMatrix, k: usize) -> Result<i128> {
    if k == 0 {
        return Err(Error::InvalidArgument("trace moment needs k >= 1".into()));
    }
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(0);
    }
    trace_of_power(&m.gram_smaller_side()?, k)
}

fn apply_i128<M: IntegerMatrix + ?Sized>(m: &M, x: &[i128], transpose: bool) -> Result<Vec<i128>> {
    let (outer, inner) = if transpose {
        (m.ncols(), m.nrows())
    } else {
        (m.nrows(), m.ncols())
    };
    check_len(inner, x.len())?;
    let mut out = vec![0i128; outer];
    for (o, slot) in out.iter_mut().enumerate() {
        let mut acc: i128 = 0;
        for (l, &xl) in x.iter().enumerate() {
            if xl == 0 {
                continue;
            }
            let e = if transpose {
                m.entry_at(l, o)
            } else {
                m.entry_at(o, l)
            } as i128;
            acc = e
                .checked_mul(xl)
                .and_then(|t| acc.checked_add(t))
                .ok_or_else(|| Error::Overflow("trace moment".into()))?;
        }
        *slot = acc;
    }
    Ok(out)
}

/// Exact `tr((M Mᵀ)^k)` for any integer matrix by applying `(MᵀM)^k` to the
/// standard basis vectors; cost is `ncols · 2k` exact products.
pub fn trace_moment_operator<M: IntegerMatrix + ?Sized>(m: &M, k: usize) -> Result<i128> {
    if k == 0 {
        return Err(Error::InvalidArgument("trace moment needs k >= 1".into()));
    }
    let mut total: i128 = 0;
    for j in 0..m.ncols() {
        let mut v = vec![0i128; m.ncols()];
        v[j] = 1;
        for _ in 0..k {
            let u = apply_i128(m, &v, false)?;
            v = apply_i128(m, &u, true)?;
        }
        total = total
            .checked_add(v[j])
            .ok_or_else(|| Error::Overflow("trace moment".into()))?;
    }
    Ok(total)
}

/// `tr((M Mᵀ)^k)` in floating point.
pub fn trace_moment_real(m: &RealMatrix, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("trace moment needs k >= 1".into()));
    }
    let (dim, len) = (m.rows().min(m.cols()), m.rows().max(m.cols()));
    let get = |a: usize, l: usize| {
        if m.rows() <= m.cols() {
            m.get(a, l)
        } else {
            m.get(l, a)
        }
    };
    let mut g = vec![vec![0.0; dim]; dim];
    for a in 0..dim {
        for b in a..dim {
            let s: f64 = (0..len).map(|l| get(a, l) * get(b, l)).sum();
            g[a][b] = s;
            g[b][a] = s;
        }
    }
    let mut p = g.clone();
    for _ in 1..k {
        let mut next = vec![vec![0.0; dim]; dim];
        for i in 0..dim {
            for l in 0..dim {
                for j in 0..dim {
                    next[i][j] += p[i][l] * g[l][j];
                }
            }
        }
        p = next;
    }
    Ok((0..dim).map(|i| p[i][i]).sum())
}

/// `tr^{1/(2k)}`, the moment-method upper bound on `‖M‖`.
pub fn moment_root(trace: f64, k: usize) -> f64 {
    trace.max(0.0).powf(1.0 / (2.0 * k as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::gmatrix::GraphMatrix;
    use crate::rgraph::InputGraph;
    use proptest::prelude::*;
    use rand::Rng;

    fn random_real(rows: usize, cols: usize, seed: u64) -> RealMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        RealMatrix::from_fn(rows, cols, |_, _| rng.random_range(-5i32..=5) as f64)
    }

    #[test]
    fn zero_and_rank_one() {
        let z = RealMatrix::zeros(4, 3);
        assert_eq!(
            operator_norm(&z, &PowerOptions::default()).unwrap().value,
            0.0
        );
        let ones = RealMatrix::from_fn(6, 6, |_, _| 1.0);
        let est = operator_norm(&ones, &PowerOptions::default()).unwrap();
        assert!(est.converged);
        assert!((est.value - 6.0).abs() < 1e-6);
        assert!((exact_norm(&ones).unwrap().value - 6.0).abs() < 1e-10);
    }

    #[test]
    fn bad_options_are_rejected() {
        let m = RealMatrix::zeros(2, 2);
        assert!(operator_norm(
            &m,
            &PowerOptions {
                tol: 0.0,
                ..Default::default()
            }
        )
        .is_err());
        assert!(operator_norm(
            &m,
            &PowerOptions {
                max_iter: Some(0),
                ..Default::default()
            }
        )
        .is_err());
        assert!(singular_values(&RealMatrix::zeros(65, 2)).is_err());
    }

    #[test]
    fn non_convergence_is_flagged() {
        let m = random_real(30, 30, 3);
        let est = operator_norm(
            &m,
            &PowerOptions {
                tol: 1e-15,
                max_iter: Some(2),
                seed: 0,
            },
        )
        .unwrap();
        assert!(!est.converged);
        assert_eq!(est.iterations, 2);
    }

    #[test]
    fn power_iteration_matches_jacobi_on_small_matrices() {
        for seed in 0..20 {
            let m = random_real(5, 5, seed);
            let exact = singular_values(&m).unwrap()[0];
            let est = operator_norm(
                &m,
                &PowerOptions {
                    tol: 1e-14,
                    max_iter: Some(100_000),
                    seed,
                },
            )
            .unwrap();
            assert!(
                ((est.value - exact) / exact).abs() < 1e-6,
                "seed {seed}: {} vs {exact}",
                est.value
            );
        }
    }

    #[test]
    fn single_edge_frobenius_and_trace() {
        for n in 2..8 {
            let g = InputGraph::sample(n, n as u64).unwrap();
            let m = GraphMatrix::new(&catalog::single_edge(), &g).unwrap();
            let d = m.to_dense(1000).unwrap();
            let expect = (n * (n - 1)) as f64;
            assert!((frobenius_norm(&d) - expect.sqrt()).abs() < 1e-12);
            assert_eq!(trace_moment(&d, 1).unwrap(), (n * (n - 1)) as i128);
            assert_eq!(
                trace_moment_operator(&m, 2).unwrap(),
                trace_moment(&d, 2).unwrap()
            );
        }
        assert_eq!(trace_moment(&DenseMatrix::zeros(3, 3), 4).unwrap(), 0);
        assert!(trace_moment(&DenseMatrix::zeros(3, 3), 0).is_err());
    }

    #[test]
    fn trace_moment_matches_singular_values() {
        for seed in 0..10 {
            let m = random_real(4, 4, seed);
            let d = DenseMatrix::from_fn(4, 4, |i, j| m.get(i, j) as i64);
            let sv = singular_values(&m).unwrap();
            let expected: f64 = sv.iter().map(|s| s.powi(6)).sum();
            let exact = trace_moment(&d, 3).unwrap() as f64;
            assert!(((exact - expected) / expected).abs() < 1e-9);
            assert!(((trace_moment_real(&m, 3).unwrap() - expected) / expected).abs() < 1e-9);
        }
    }

    #[test]
    fn overflow_is_reported() {
        let d = DenseMatrix::from_fn(8, 8, |_, _| i64::MAX / 2);
        assert!(matches!(trace_moment(&d, 4), Err(Error::Overflow(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn moment_roots_bound_the_norm_and_decrease(seed in any::<u64>(), rows in 1usize..10, cols in 1usize..10) {
            let m = random_real(rows, cols, seed);
            let d = DenseMatrix::from_fn(rows, cols, |i, j| m.get(i, j) as i64);
            let sigma = singular_values(&m).unwrap()[0];
            let mut last = f64::INFINITY;
            for k in 1..=4 {
                let root = moment_root(trace_moment(&d, k).unwrap() as f64, k);
                prop_assert!(root >= sigma - 1e-9 * sigma.max(1.0));
                prop_assert!(root <= last + 1e-9 * last.max(1.0).min(1e300));
                last = root;
            }
            prop_assert!(sigma <= frobenius_norm(&d) + 1e-9);
        }

        #[test]
        fn transpose_has_the_same_norm(seed in any::<u64>()) {
            let m = random_real(7, 4, seed);
            let opts = PowerOptions { tol: 1e-13, max_iter: Some(50_000), seed };
            let a = operator_norm(&m, &opts).unwrap().value;
            let b = operator_norm(&m.transpose(), &opts).unwrap().value;
            prop_assert!((a - b).abs() <= 1e-6 * a.max(1.0));
        }
    }
}
