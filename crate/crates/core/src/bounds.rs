//! Closed-form spectral norm bounds for `R_H`.
//!
//! Every bound is a product of a few factors that overflow `f64` quickly
//! (`t^t` alone does past `t = 143`), so evaluation happens in log-space with
//! 128-bit binary floats and is exponentiated only for reporting.

use astro_float::{BigFloat, Consts, RoundingMode};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::shape::ShapeGraph;

const PRECISION: usize = 128;
const RM: RoundingMode = RoundingMode::ToEven;

/// The shape statistics every bound depends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ShapeStats {
    pub t: usize,
    pub z: usize,
    /// Minimum `U`–`V` separator size, shared vertices included.
    pub q: usize,
    /// `|U ∩ V|`; zero outside intersection mode.
    pub r: usize,
    /// `W` is empty and no edge lies inside `U` or inside `V`.
    pub bipartite: bool,
}

impl ShapeStats {
    pub fn from_shape(shape: &ShapeGraph) -> Self {
        ShapeStats {
            t: shape.t(),
            z: shape.z(),
            q: shape.separator_size(),
            r: shape.r(),
            bipartite: shape.z() == 0 && shape.r() == 0 && shape.is_bipartite_uv(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.q > self.t || self.z > self.t || self.r > self.q {
            return Err(Error::InvalidArgument(format!(
                "inconsistent shape statistics t={} z={} q={} r={}",
                self.t, self.z, self.q, self.r
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Warmup,
    Bipartite,
    General,
    Intersection,
    FrobeniusFallback,
}

/// One multiplicative factor of a bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormulaTerm {
    pub name: &'static str,
    pub ln_value: f64,
    /// `exp(ln_value)`; infinite if it overflows `f64`.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormBoundReport {
    pub t: usize,
    pub z: usize,
    pub q: usize,
    pub r: usize,
    pub t_prime: usize,
    pub q_prime: usize,
    pub n: u64,
    pub epsilon: f64,
    pub upper_bound: f64,
    pub ln_upper_bound: f64,
    /// Full-precision decimal rendering of `upper_bound`.
    pub upper_bound_decimal: String,
    /// `n^{(t−q)/2}`.
    pub lower_scale: f64,
    pub theorem_used: BoundKind,
    /// Value of the general formula, when it applies.
    pub general_value: Option<f64>,
    /// Value of the bipartite formula, when the shape is bipartite with `q ≥ 1`.
    pub bipartite_value: Option<f64>,
    pub formula_terms: Vec<FormulaTerm>,
}

/// Log-space evaluation of one bound: the sum of its factor logarithms.
#[derive(Debug, Clone)]
struct LogBound {
    total: BigFloat,
    terms: Vec<(&'static str, BigFloat)>,
}

impl LogBound {
    fn new() -> Self {
        LogBound {
            total: BigFloat::from_u8(0, PRECISION),
            terms: Vec::new(),
        }
    }

    fn push(&mut self, name: &'static str, ln_value: BigFloat) {
        self.total = self.total.add(&ln_value, PRECISION, RM);
        self.terms.push((name, ln_value));
    }

    fn report_terms(&self, cc: &mut Consts) -> Vec<FormulaTerm> {
        self.terms
            .iter()
            .map(|(name, l)| FormulaTerm {
                name,
                ln_value: to_f64(l),
                value: exp_f64(l, cc),
            })
            .collect()
    }
}

fn to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    x.to_string()
        .parse()
        .expect("astro-float renders parseable decimals")
}

fn exp_f64(x: &BigFloat, cc: &mut Consts) -> f64 {
    to_f64(&x.exp(PRECISION, RM, cc))
}

fn big(v: u64) -> BigFloat {
    BigFloat::from_u64(v, PRECISION)
}

fn ln_big(v: &BigFloat, cc: &mut Consts) -> BigFloat {
    v.ln(PRECISION, RM, cc)
}

fn consts() -> Consts {
    Consts::new().expect("astro-float constant cache")
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must lie in (0,1), got {epsilon}"
        )));
    }
    Ok(())
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    Ok(())
}

/// `ln(2·a^a·(e(a+z)(ln(8n^c/ε)/(2(b+z))+1))^{b+z}·n^{(a−b)/2})`, the
/// common skeleton of the general, bipartite and intersection bounds.
/// Requires `b ≤ a` and `b + z ≥ 1`.
fn log_main_form(
    a: usize,
    z: usize,
    b: usize,
    c: usize,
    n: u64,
    epsilon: f64,
    cc: &mut Consts,
) -> LogBound {
    debug_assert!(b <= a && b + z >= 1);
    let d = b + z;
    let mut out = LogBound::new();
    let ln_n = ln_big(&big(n), cc);
    out.push("2", ln_big(&big(2), cc));
    let ln_aa = if a == 0 {
        big(0)
    } else {
        big(a as u64).mul(&ln_big(&big(a as u64), cc), PRECISION, RM)
    };
    out.push("t^t", ln_aa);

    // ln(8 n^c / ε) = ln 8 + c ln n − ln ε
    let eps = BigFloat::from_f64(epsilon, PRECISION);
    let inner = ln_big(&big(8), cc)
        .add(&big(c as u64).mul(&ln_n, PRECISION, RM), PRECISION, RM)
        .sub(&ln_big(&eps, cc), PRECISION, RM);
    let base = inner
        .div(&big(2 * d as u64), PRECISION, RM)
        .add(&big(1), PRECISION, RM)
        .mul(&big((a + z) as u64), PRECISION, RM);
    // ln(e · base) = 1 + ln(base)
    let ln_poly = big(d as u64).mul(
        &big(1).add(&ln_big(&base, cc), PRECISION, RM),
        PRECISION,
        RM,
    );
    out.push("polylog", ln_poly);

    let half_power = big((a - b) as u64).div(&big(2), PRECISION, RM);
    out.push("n_power", half_power.mul(&ln_n, PRECISION, RM));
    out
}

fn log_power_of_n(n: u64, numerator: usize, cc: &mut Consts) -> LogBound {
    let mut out = LogBound::new();
    let ln_n = ln_big(&big(n), cc);
    out.push(
        "n_power",
        big(numerator as u64)
            .div(&big(2), PRECISION, RM)
            .mul(&ln_n, PRECISION, RM),
    );
    out
}

/// General bound `2t^t(e(t+z)(ln(8n^q/ε)/(2(q+z))+1))^{q+z}·n^{(t−q)/2}`,
/// as a natural logarithm. `None` when `q + z = 0`.
pub fn ln_general_bound(t: usize, z: usize, q: usize, n: u64, epsilon: f64) -> Result<Option<f64>> {
    check_epsilon(epsilon)?;
    check_n(n)?;
    if q + z == 0 {
        return Ok(None);
    }
    let mut cc = consts();
    Ok(Some(to_f64(
        &general_form(t, z, q, n, epsilon, &mut cc).total,
    )))
}

fn general_form(t: usize, z: usize, q: usize, n: u64, epsilon: f64, cc: &mut Consts) -> LogBound {
    log_main_form(t, z, q, q, n, epsilon, cc)
}

/// Bipartite bound `2t^t(et(ln(8n^q/ε)/(2q)+1))^q·n^{(t−q)/2}`; coincides
/// with the general bound at `z = 0`.
fn bipartite_form(t: usize, q: usize, n: u64, epsilon: f64, cc: &mut Consts) -> LogBound {
    log_main_form(t, 0, q, q, n, epsilon, cc)
}

/// Intersection bound with `t′ = t − r`, `q′ = q − r`:
/// `2t′^{t′}(e(t′+z)(ln(8n^{q′+r}/ε)/(2(q′+z))+1))^{q′+z}·n^{(t′−q′)/2}`.
fn intersection_form(
    t: usize,
    z: usize,
    q: usize,
    r: usize,
    n: u64,
    epsilon: f64,
    cc: &mut Consts,
) -> LogBound {
    let (tp, qp) = (t - r, q - r);
    log_main_form(tp, z, qp, qp + r, n, epsilon, cc)
}

/// Full-precision decimal value of the intersection-mode bound. With
/// `r = 0` this must agree digit for digit with [`general_bound_decimal`].
pub fn intersection_bound_decimal(
    t: usize,
    z: usize,
    q: usize,
    r: usize,
    n: u64,
    epsilon: f64,
) -> Result<String> {
    check_epsilon(epsilon)?;
    check_n(n)?;
    if r > q || q > t || q - r + z == 0 {
        return Err(Error::InvalidArgument(format!(
            "intersection form undefined for t={t} z={z} q={q} r={r}"
        )));
    }
    let mut cc = consts();
    Ok(intersection_form(t, z, q, r, n, epsilon, &mut cc)
        .total
        .exp(PRECISION, RM, &mut cc)
        .to_string())
}

/// Full-precision decimal value of the general bound.
pub fn general_bound_decimal(t: usize, z: usize, q: usize, n: u64, epsilon: f64) -> Result<String> {
    check_epsilon(epsilon)?;
    check_n(n)?;
    if q > t || q + z == 0 {
        return Err(Error::InvalidArgument(format!(
            "general form undefined for t={t} z={z} q={q}"
        )));
    }
    let mut cc = consts();
    Ok(general_form(t, z, q, n, epsilon, &mut cc)
        .total
        .exp(PRECISION, RM, &mut cc)
        .to_string())
}

/// Evaluates the applicable norm upper bound for a shape with statistics
/// `stats` on `n` vertices at failure probability `epsilon`.
///
/// Dispatch: `r > 0` uses the intersection form (falling back to `n^{t/2}`
/// when `q′ + z = 0`); `q + z = 0` uses `n^{t/2}`; otherwise the general
/// form. Bipartite shapes also report the bipartite form, and the smaller
/// of the two is operative (ties go to the general form).
pub fn norm_upper_bound(stats: ShapeStats, n: u64, epsilon: f64) -> Result<NormBoundReport> {
    check_epsilon(epsilon)?;
    check_n(n)?;
    stats.validate()?;
    let ShapeStats {
        t,
        z,
        q,
        r,
        bipartite,
    } = stats;
    let mut cc = consts();
    let (tp, qp) = (t - r, q - r);

    let mut general_value = None;
    let mut bipartite_value = None;
    let (kind, chosen) = if r > 0 {
        if qp + z == 0 {
            (BoundKind::FrobeniusFallback, log_power_of_n(n, t, &mut cc))
        } else {
            (
                BoundKind::Intersection,
                intersection_form(t, z, q, r, n, epsilon, &mut cc),
            )
        }
    } else if q + z == 0 {
        (BoundKind::FrobeniusFallback, log_power_of_n(n, t, &mut cc))
    } else {
        let general = general_form(t, z, q, n, epsilon, &mut cc);
        general_value = Some(exp_f64(&general.total, &mut cc));
        if bipartite && z == 0 && q >= 1 {
            let bip = bipartite_form(t, q, n, epsilon, &mut cc);
            bipartite_value = Some(exp_f64(&bip.total, &mut cc));
            if bip.total < general.total {
                (BoundKind::Bipartite, bip)
            } else {
                (BoundKind::General, general)
            }
        } else {
            (BoundKind::General, general)
        }
    };

    let exp_total = chosen.total.exp(PRECISION, RM, &mut cc);
    Ok(NormBoundReport {
        t,
        z,
        q,
        r,
        t_prime: tp,
        q_prime: qp,
        n,
        epsilon,
        upper_bound: to_f64(&exp_total),
        ln_upper_bound: to_f64(&chosen.total),
        upper_bound_decimal: exp_total.to_string(),
        lower_scale: (n as f64).powf((t - q) as f64 / 2.0),
        theorem_used: kind,
        general_value,
        bipartite_value,
        formula_terms: chosen.report_terms(&mut cc),
    })
}

/// Warm-up bound `e·√n·(ln(n/ε)+2)` for the single-edge shape.
pub fn warmup_bound(n: u64, epsilon: f64) -> Result<f64> {
    Ok(warmup_report(n, epsilon)?.upper_bound)
}

/// [`warmup_bound`] with its factor breakdown.
pub fn warmup_report(n: u64, epsilon: f64) -> Result<NormBoundReport> {
    check_epsilon(epsilon)?;
    check_n(n)?;
    let mut cc = consts();
    let mut lb = LogBound::new();
    let ln_n = ln_big(&big(n), &mut cc);
    lb.push("e", big(1));
    lb.push("n_power", ln_n.div(&big(2), PRECISION, RM));
    let eps = BigFloat::from_f64(epsilon, PRECISION);
    let poly = ln_n
        .sub(&ln_big(&eps, &mut cc), PRECISION, RM)
        .add(&big(2), PRECISION, RM);
    lb.push("polylog", ln_big(&poly, &mut cc));
    let exp_total = lb.total.exp(PRECISION, RM, &mut cc);
    Ok(NormBoundReport {
        t: 2,
        z: 0,
        q: 1,
        r: 0,
        t_prime: 2,
        q_prime: 1,
        n,
        epsilon,
        upper_bound: to_f64(&exp_total),
        ln_upper_bound: to_f64(&lb.total),
        upper_bound_decimal: exp_total.to_string(),
        lower_scale: (n as f64).sqrt(),
        theorem_used: BoundKind::Warmup,
        general_value: None,
        bipartite_value: None,
        formula_terms: lb.report_terms(&mut cc),
    })
}

/// Expected order `n^{(t−q)/2}` of `‖R_H‖`. Fails when some middle vertex
/// has no path to `U ∪ V`, since the norm can then be much smaller.
pub fn lower_bound_scale(shape: &ShapeGraph, n: u64) -> Result<f64> {
    check_n(n)?;
    if !shape.middle_vertices_reach_boundary() {
        return Err(Error::HypothesisViolated(
            "a middle vertex has no path to U or V".into(),
        ));
    }
    let exponent = (shape.t() - shape.separator_size()) as f64 / 2.0;
    Ok((n as f64).powf(exponent))
}
