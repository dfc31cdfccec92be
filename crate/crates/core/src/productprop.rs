//! The `⊙` product property and the constructive argument that any cone
//! family strictly between PSD and copositive loses it.
//!
//! Starting from a non-PSD member `Q` with `vᵀQv < 0`, the pipeline builds
//! `B = Λ ⊙ (k₁Q)` with `w = (v; -v)` satisfying `Σw = 0`, `wᵀBw < 0`, then
//! `C = (k₂Λ) ⊙ B` together with a non-negative `u` such that `uᵀCu < 0`.
//! Since `C` is not copositive, one of the two products must leave the cone.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::bounds::{parrilo_membership, sos_cone_membership, ParriloMembership, SosMembership};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::symmat::{is_copositive_oracle_with, write_matrix_text, SymMatrix};
use crate::tolerance::CONE;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConeId {
    Psd,
    /// `P + N`, equal to the degree-0 sum-of-squares cone.
    Parrilo,
    SosR(u32),
    /// The copositive cone itself, decided exactly for small orders.
    CopositiveOracle,
}

impl fmt::Display for ConeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConeId::Psd => f.write_str("psd"),
            ConeId::Parrilo => f.write_str("parrilo"),
            ConeId::SosR(r) => write!(f, "sos_r({r})"),
            ConeId::CopositiveOracle => f.write_str("copositive_oracle"),
        }
    }
}

impl FromStr for ConeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "psd" => Ok(ConeId::Psd),
            "parrilo" => Ok(ConeId::Parrilo),
            "oracle" | "copositive_oracle" | "copositive" => Ok(ConeId::CopositiveOracle),
            other => {
                let r = other
                    .strip_prefix("sos_r(")
                    .and_then(|t| t.strip_suffix(')'))
                    .or_else(|| other.strip_prefix("sos"))
                    .and_then(|t| t.parse::<u32>().ok())
                    .ok_or_else(|| Error::invalid(format!("unknown cone '{other}'")))?;
                Ok(ConeId::SosR(r))
            }
        }
    }
}

impl Serialize for ConeId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Member,
    NonMember,
    /// The test could not be run (size cap) or was inconclusive (solver).
    Unverified,
}

#[derive(Clone, Debug, Serialize)]
pub struct MembershipVerdict {
    pub subject: String,
    pub cone: ConeId,
    pub dim: usize,
    pub outcome: Outcome,
    pub detail: String,
}

impl MembershipVerdict {
    pub fn is_member(&self) -> bool {
        self.outcome == Outcome::Member
    }
}

/// Membership of `q` in `cone`. Size caps surface as `ResourceLimit`.
pub fn cone_membership(cone: ConeId, q: &SymMatrix, subject: &str, limits: &Limits) -> Result<MembershipVerdict> {
    if q.dim() == 0 {
        return Err(Error::invalid("empty matrix"));
    }
    let (outcome, detail) = match cone {
        ConeId::Psd => {
            let v = q.is_psd(CONE);
            let outcome = if v.is_psd { Outcome::Member } else { Outcome::NonMember };
            (outcome, format!("smallest eigenvalue {:e}", v.min_eigenvalue))
        }
        ConeId::Parrilo => match parrilo_membership(q)? {
            ParriloMembership::Member { p, n } => (
                Outcome::Member,
                format!(
                    "P + N decomposition, min eigenvalue of P {:e}, smallest N entry {:e}",
                    p.min_eigenvalue(),
                    n.rows().iter().flatten().copied().fold(f64::INFINITY, f64::min)
                ),
            ),
            ParriloMembership::NonMember { certificate, violation } => {
                let inner: f64 = (0..q.dim())
                    .flat_map(|i| (0..q.dim()).map(move |j| (i, j)))
                    .map(|(i, j)| certificate.get(i, j) * q.get(i, j))
                    .sum();
                (
                    Outcome::NonMember,
                    format!("separating W ⪰ 0, W ≥ 0 with <W, Q> = {inner:e} (phase-1 value {violation:e})"),
                )
            }
        },
        ConeId::SosR(r) => match sos_cone_membership(q, r)? {
            SosMembership::Member { basis, residual, .. } => (
                Outcome::Member,
                format!("Gram certificate over {} monomials, coefficient residual {residual:e}", basis.len()),
            ),
            SosMembership::NonMember { violation, .. } => (
                Outcome::NonMember,
                format!("Farkas certificate, phase-1 value {violation:e}"),
            ),
        },
        ConeId::CopositiveOracle => {
            let v = is_copositive_oracle_with(q, limits)?;
            let outcome = if v.is_copositive { Outcome::Member } else { Outcome::NonMember };
            (outcome, format!("simplex minimum {:e}", v.minimum))
        }
    };
    Ok(MembershipVerdict {
        subject: subject.to_string(),
        cone,
        dim: q.dim(),
        outcome,
        detail,
    })
}

/// Like [`cone_membership`] but records caps and solver failures as
/// `Unverified` instead of failing.
pub fn cone_membership_or_unverified(
    cone: ConeId,
    q: &SymMatrix,
    subject: &str,
    limits: &Limits,
) -> Result<MembershipVerdict> {
    match cone_membership(cone, q, subject, limits) {
        Ok(v) => Ok(v),
        Err(e @ (Error::ResourceLimit(_) | Error::Solver { .. })) => Ok(MembershipVerdict {
            subject: subject.to_string(),
            cone,
            dim: q.dim(),
            outcome: Outcome::Unverified,
            detail: e.to_string(),
        }),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug)]
pub struct ProductCheck {
    pub cone: ConeId,
    pub holds: bool,
    pub product: SymMatrix,
    pub left: MembershipVerdict,
    pub right: MembershipVerdict,
    pub result: MembershipVerdict,
}

pub fn check_product_pair(cone: ConeId, q: &SymMatrix, r: &SymMatrix) -> Result<ProductCheck> {
    check_product_pair_with(cone, q, r, &Limits::default())
}

pub fn check_product_pair_with(cone: ConeId, q: &SymMatrix, r: &SymMatrix, limits: &Limits) -> Result<ProductCheck> {
    let left = cone_membership(cone, q, "left", limits)?;
    if !left.is_member() {
        return Err(Error::invalid(format!("left input is not in the {cone} cone: {}", left.detail)));
    }
    let right = cone_membership(cone, r, "right", limits)?;
    if !right.is_member() {
        return Err(Error::invalid(format!("right input is not in the {cone} cone: {}", right.detail)));
    }
    let product = q.odot_with(r, limits)?;
    let result = cone_membership(cone, &product, "left ⊙ right", limits)?;
    Ok(ProductCheck {
        cone,
        holds: result.is_member(),
        product,
        left,
        right,
        result,
    })
}

fn check_vector(q: &SymMatrix, v: &[f64]) -> Result<()> {
    if v.len() != q.dim() {
        return Err(Error::invalid(format!("vector of length {} for a {}x{} matrix", v.len(), q.dim(), q.dim())));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("vector has non-finite entries"));
    }
    Ok(())
}

/// `-vᵀJv / vᵀQv`; any `k₁` above it (and positive) makes `wᵀBw < 0`.
pub fn k1_threshold(q: &SymMatrix, v: &[f64]) -> Result<f64> {
    check_vector(q, v)?;
    let vqv = q.quad_form(v)?;
    if vqv >= -1e-10 {
        return Err(Error::invalid(format!("vᵀQv = {vqv:e} is not strictly negative")));
    }
    let sum: f64 = v.iter().sum();
    Ok(-(sum * sum) / vqv)
}

pub fn choose_k1(q: &SymMatrix, v: &[f64]) -> Result<f64> {
    Ok(k1_threshold(q, v)?.max(0.0) + 1.0)
}

/// `B = Λ ⊙ (k₁Q)` and `w = (v; -v)`.
pub fn build_b(q: &SymMatrix, v: &[f64], k1: f64) -> Result<(SymMatrix, Vec<f64>)> {
    check_vector(q, v)?;
    if !(k1.is_finite() && k1 > 0.0) {
        return Err(Error::invalid(format!("k1 = {k1} must be positive")));
    }
    let b = SymMatrix::lambda2().odot(&q.scale(k1))?;
    let w: Vec<f64> = v.iter().copied().chain(v.iter().map(|x| -x)).collect();
    let sum: f64 = w.iter().sum();
    if sum.abs() > 1e-10 {
        return Err(Error::Internal(format!("Σw = {sum:e} is not zero")));
    }
    let wbw = b.quad_form(&w)?;
    if wbw >= 0.0 {
        return Err(Error::Internal(format!(
            "wᵀBw = {wbw:e} is not negative (k1 = {k1}, vᵀQv = {:e})",
            q.quad_form(v)?
        )));
    }
    Ok((b, w))
}

/// Positive and negative parts of `w`.
pub fn split_parts(w: &[f64]) -> (Vec<f64>, Vec<f64>) {
    (w.iter().map(|x| x.max(0.0)).collect(), w.iter().map(|x| (-x).max(0.0)).collect())
}

/// `(s + 2t) / (2t - s)` with `s = xᵀBx + yᵀBy`, `t = xᵀBy`: every larger
/// `k₂` gives `(k₂ + 1)s < 2(k₂ - 1)t`.
pub fn k2_threshold(b: &SymMatrix, w: &[f64]) -> Result<f64> {
    check_vector(b, w)?;
    let wbw = b.quad_form(w)?;
    if wbw >= 0.0 {
        return Err(Error::invalid(format!("wᵀBw = {wbw:e} is not negative")));
    }
    let (x, y) = split_parts(w);
    let s = b.quad_form(&x)? + b.quad_form(&y)?;
    let t: f64 = b.mul_vec(&y)?.iter().zip(&x).map(|(a, c)| a * c).sum();
    let denom = 2.0 * t - s;
    if denom <= 0.0 {
        return Err(Error::Internal(format!("2t - s = {denom:e} is not positive although wᵀBw < 0")));
    }
    Ok((s + 2.0 * t) / denom)
}

/// Threshold plus one, with the threshold floored at zero so that `k₂Λ`
/// stays in every cone containing `Λ`.
pub fn choose_k2(b: &SymMatrix, w: &[f64]) -> Result<f64> {
    Ok(k2_threshold(b, w)?.max(0.0) + 1.0)
}

#[derive(Clone, Debug)]
pub struct CStep {
    pub c: SymMatrix,
    pub u: Vec<f64>,
    pub u_value: f64,
    /// Exact copositivity verdict on `C` when its order is within the oracle cap.
    pub oracle_copositive: Option<bool>,
}

/// `C = (k₂Λ) ⊙ B` and `u = (max(w, 0); max(-w, 0))`.
pub fn build_c(b: &SymMatrix, w: &[f64], k2: f64) -> Result<CStep> {
    build_c_with(b, w, k2, &Limits::default())
}

pub fn build_c_with(b: &SymMatrix, w: &[f64], k2: f64, limits: &Limits) -> Result<CStep> {
    check_vector(b, w)?;
    if !(k2.is_finite() && k2 > 0.0) {
        return Err(Error::invalid(format!("k2 = {k2} must be positive")));
    }
    let c = SymMatrix::lambda2().scale(k2).odot_with(b, limits)?;
    let (x, y) = split_parts(w);
    let u: Vec<f64> = x.into_iter().chain(y).collect();
    let u_value = c.quad_form(&u)?;
    if u.iter().any(|&e| e < 0.0) {
        return Err(Error::Internal("u has a negative entry".into()));
    }
    if u_value >= 0.0 {
        return Err(Error::Internal(format!("uᵀCu = {u_value:e} is not negative (k2 = {k2})")));
    }
    let oracle_copositive = if c.dim() <= limits.max_copositive_dim {
        let verdict = is_copositive_oracle_with(&c, limits)?;
        if verdict.is_copositive {
            return Err(Error::Internal(format!(
                "oracle reports C copositive (minimum {:e}) despite uᵀCu = {u_value:e}",
                verdict.minimum
            )));
        }
        Some(false)
    } else {
        None
    };
    Ok(CStep {
        c,
        u,
        u_value,
        oracle_copositive,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ViolatingPair {
    pub left: String,
    pub right: String,
    /// False when the membership test needed to single out the pair could
    /// not be run or was inconclusive.
    pub verified: bool,
    pub explanation: String,
}

#[derive(Clone, Debug)]
pub struct CounterexampleReport {
    pub cone: ConeId,
    pub seed: SymMatrix,
    /// Negativity witness for the seed, scaled to unit max-norm.
    pub v: Vec<f64>,
    pub v_value: f64,
    pub k1: f64,
    pub k1_threshold: f64,
    pub b: SymMatrix,
    pub w: Vec<f64>,
    pub w_b_w: f64,
    pub k2: f64,
    pub k2_threshold: f64,
    pub c: SymMatrix,
    pub u: Vec<f64>,
    pub u_value: f64,
    pub oracle_copositive: Option<bool>,
    pub violating_pair: ViolatingPair,
    pub memberships: Vec<MembershipVerdict>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CounterexampleRecord {
    pub cone: ConeId,
    pub seed: String,
    pub v: Vec<f64>,
    pub k1: f64,
    pub k1_threshold: f64,
    #[serde(rename = "B")]
    pub b: String,
    pub w: Vec<f64>,
    #[serde(rename = "wBw")]
    pub w_b_w: f64,
    pub k2: f64,
    pub k2_threshold: f64,
    #[serde(rename = "C_dim")]
    pub c_dim: usize,
    pub u: Vec<f64>,
    pub u_value: f64,
    pub c_copositive_oracle: Option<bool>,
    pub violating_pair: ViolatingPair,
    pub memberships: Vec<MembershipVerdict>,
    pub conclusion: String,
}

impl CounterexampleReport {
    pub fn conclusion(&self) -> String {
        let locus = if self.violating_pair.verified {
            format!(
                "the product {} ⊙ {} leaves the {} cone",
                self.violating_pair.left, self.violating_pair.right, self.cone
            )
        } else {
            "violation certified, locus unverified".to_string()
        };
        format!(
            "C = ({}·Λ) ⊙ B is not copositive (uᵀCu = {:e} with u ≥ 0), so the {} cone family is not closed under ⊙: {locus}. \
             This concerns the cone family only; it does not decide whether the associated graph bound is an upper bound on the Shannon capacity.",
            fmt_num(self.k2),
            self.u_value,
            self.cone
        )
    }

    pub fn record(&self) -> CounterexampleRecord {
        CounterexampleRecord {
            cone: self.cone,
            seed: write_matrix_text(&self.seed),
            v: self.v.clone(),
            k1: self.k1,
            k1_threshold: self.k1_threshold,
            b: write_matrix_text(&self.b),
            w: self.w.clone(),
            w_b_w: self.w_b_w,
            k2: self.k2,
            k2_threshold: self.k2_threshold,
            c_dim: self.c.dim(),
            u: self.u.clone(),
            u_value: self.u_value,
            c_copositive_oracle: self.oracle_copositive,
            violating_pair: self.violating_pair.clone(),
            memberships: self.memberships.clone(),
            conclusion: self.conclusion(),
        }
    }
}

fn fmt_num(x: f64) -> String {
    if x == x.round() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

pub fn construct_counterexample(cone: ConeId, q: &SymMatrix) -> Result<CounterexampleReport> {
    construct_counterexample_with(cone, q, &Limits::default())
}

pub fn construct_counterexample_with(cone: ConeId, q: &SymMatrix, limits: &Limits) -> Result<CounterexampleReport> {
    let seed_verdict = cone_membership(cone, q, "Q", limits)?;
    if !seed_verdict.is_member() {
        return Err(Error::invalid(format!("seed is not in the {cone} cone: {}", seed_verdict.detail)));
    }
    let psd = q.is_psd(CONE);
    let Some(witness) = psd.witness.filter(|_| !psd.is_psd) else {
        return Err(Error::NoCounterexample(format!(
            "seed is positive semidefinite (smallest eigenvalue {:e})",
            psd.min_eigenvalue
        )));
    };
    let scale = witness.vector.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let v: Vec<f64> = witness.vector.iter().map(|x| x / scale).collect();
    let v_value = q.quad_form(&v)?;

    let k1_threshold = k1_threshold(q, &v)?;
    let k1 = k1_threshold.max(0.0) + 1.0;
    let (b, w) = build_b(q, &v, k1)?;
    let w_b_w = b.quad_form(&w)?;
    let k2_threshold = k2_threshold(&b, &w)?;
    let k2 = k2_threshold.max(0.0) + 1.0;
    let step = build_c_with(&b, &w, k2, limits)?;

    let lambda = SymMatrix::lambda2();
    let mut memberships = vec![
        seed_verdict,
        cone_membership_or_unverified(cone, &lambda, "Λ", limits)?,
        cone_membership_or_unverified(cone, &b, "B", limits)?,
        cone_membership_or_unverified(cone, &step.c, "C", limits)?,
    ];
    let k1q = format!("{}·Q", fmt_num(k1));
    let k2l = format!("{}·Λ", fmt_num(k2));
    let violating_pair = match memberships[2].outcome {
        Outcome::NonMember => ViolatingPair {
            left: "Λ".into(),
            right: k1q,
            verified: memberships[1].is_member(),
            explanation: "B = Λ ⊙ (k1·Q) fails the membership test although both factors are members".into(),
        },
        Outcome::Member => ViolatingPair {
            left: k2l,
            right: "B".into(),
            verified: memberships[1].is_member(),
            explanation: "B is a member, while C = (k2·Λ) ⊙ B is not copositive and so lies outside every cone contained in the copositive cone".into(),
        },
        Outcome::Unverified => ViolatingPair {
            left: "unknown".into(),
            right: "unknown".into(),
            verified: false,
            explanation: format!("membership of B could not be decided: {}", memberships[2].detail),
        },
    };
    if memberships[3].outcome == Outcome::Member {
        // C is certified non-copositive by u; a membership claim contradicts it.
        memberships[3].outcome = Outcome::Unverified;
        memberships[3].detail = format!(
            "membership test accepted C although uᵀCu = {:e} (tolerance breach): {}",
            step.u_value, memberships[3].detail
        );
    }
    Ok(CounterexampleReport {
        cone,
        seed: q.clone(),
        v,
        v_value,
        k1,
        k1_threshold,
        b,
        w,
        w_b_w,
        k2,
        k2_threshold,
        c: step.c,
        u: step.u,
        u_value: step.u_value,
        oracle_copositive: step.oracle_copositive,
        violating_pair,
        memberships,
    })
}
