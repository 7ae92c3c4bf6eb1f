use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};
use crate::qmath::{kl_raw, ProbabilityVector, C64};
use crate::schur::{wigner_d, BlockDecomposition, BlockLabel};

use super::search::maximize_periodic;

/// Schur sampling followed, inside block `j`, by a projective measurement in
/// the rotated basis `e^{−iη_j J_x}|j,m⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMeasurement {
    pub l: u32,
    pub angles: BTreeMap<BlockLabel, f64>,
}

impl BlockMeasurement {
    /// Angles are reduced into `[0, π)`; every block label of `l` needs one.
    pub fn new(l: u32, angles: BTreeMap<BlockLabel, f64>) -> Result<Self> {
        let mut reduced = BTreeMap::new();
        for (label, eta) in angles {
            label.validate(l)?;
            if !eta.is_finite() {
                return Err(invalid("angles", format!("angle for 2j={} is not finite", label.two_j())));
            }
            reduced.insert(label, eta.rem_euclid(PI));
        }
        if reduced.len() != BlockLabel::all(l).count() {
            return Err(invalid("angles", format!("need one angle per block label of l={l}")));
        }
        Ok(Self { l, angles: reduced })
    }

    pub fn angle(&self, label: BlockLabel) -> f64 {
        self.angles.get(&label).copied().unwrap_or(0.0)
    }
}

/// The measurement with every angle zero: it depends only on the block
/// structure, never on the post-change state.
pub fn hayashi_measurement(l: u32) -> Result<BlockMeasurement> {
    if l == 0 {
        return Err(invalid("l", "block length must be positive"));
    }
    BlockMeasurement::new(l, BlockLabel::all(l).map(|b| (b, 0.0)).collect())
}

/// Pre- and post-change outcome distributions of a block measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomePair {
    pub l: u32,
    /// `(2j, 2m)` per outcome, in the same order as `p` and `q`.
    pub outcomes: Vec<(u32, i32)>,
    pub p: ProbabilityVector,
    pub q: ProbabilityVector,
    /// `D(q‖p)/l` in nats.
    pub per_copy_rate: f64,
}

fn outcome_label(two_j: u32, two_m: i32) -> String {
    let half = |x: i64| if x % 2 == 0 { format!("{}", x / 2) } else { format!("{x}/2") };
    format!("j={},m={}", half(two_j as i64), half(two_m as i64))
}

/// Diagonal of `R† B R` with `R = e^{−iηJ_x}`, clamped at zero.
fn rotated_diagonal(block: &DMatrix<C64>, rotation: &DMatrix<C64>) -> Vec<f64> {
    let n = block.nrows();
    let br = block * rotation;
    (0..n)
        .map(|m| {
            let mut acc = 0.0;
            for k in 0..n {
                acc += (rotation[(k, m)].conj() * br[(k, m)]).re;
            }
            acc.max(0.0)
        })
        .collect()
}

fn check_pair(pre: &BlockDecomposition, post: &BlockDecomposition) -> Result<()> {
    if pre.l != post.l {
        return Err(Error::BlockLengthMismatch(pre.l, post.l));
    }
    if pre.blocks.keys().ne(post.blocks.keys()) {
        return Err(invalid("post", "block labels differ from the pre-change decomposition"));
    }
    Ok(())
}

fn scaled(weight_log: f64, values: &[f64]) -> impl Iterator<Item = f64> + '_ {
    values.iter().map(move |&v| if v == 0.0 { 0.0 } else { (weight_log + v.ln()).exp() })
}

/// `P(j,m) = ν_j e^{s_j} ⟨j,m| R_j† B_j R_j |j,m⟩` for both decompositions.
pub fn outcome_distribution(
    pre: &BlockDecomposition,
    post: &BlockDecomposition,
    meas: &BlockMeasurement,
) -> Result<OutcomePair> {
    check_pair(pre, post)?;
    if meas.l != pre.l {
        return Err(Error::BlockLengthMismatch(meas.l, pre.l));
    }
    let mut outcomes = Vec::new();
    let (mut p, mut q) = (Vec::new(), Vec::new());
    for (label, pb) in &pre.blocks {
        let qb = &post.blocks[label];
        let rot = wigner_d(label.two_j(), meas.angle(*label)).x_rotation();
        let pd = rotated_diagonal(pb.operator.matrix(), &rot);
        let qd = rotated_diagonal(qb.operator.matrix(), &rot);
        p.extend(scaled(pb.log_weight(), &pd));
        q.extend(scaled(qb.log_weight(), &qd));
        let tj = label.two_j() as i32;
        outcomes.extend((0..=tj).map(|a| (label.two_j(), tj - 2 * a)));
    }
    let labels: Vec<String> = outcomes.iter().map(|&(j, m)| outcome_label(j, m)).collect();
    let rate = kl_raw(&q, &p) / pre.l as f64;
    Ok(OutcomePair {
        l: pre.l,
        outcomes,
        p: ProbabilityVector::new(p, labels.clone())?,
        q: ProbabilityVector::new(q, labels)?,
        per_copy_rate: rate,
    })
}

/// `D(q‖p)/l` for the outcome distributions of `meas`.
pub fn measured_rate(pre: &BlockDecomposition, post: &BlockDecomposition, meas: &BlockMeasurement) -> Result<f64> {
    Ok(outcome_distribution(pre, post, meas)?.per_copy_rate)
}

/// `Σ_m q̃ ln(q̃/p̃)` over one block's rotated diagonals (unscaled).
fn block_objective(pre: &DMatrix<C64>, post: &DMatrix<C64>, two_j: u32, eta: f64) -> f64 {
    let rot = wigner_d(two_j, eta).x_rotation();
    kl_raw(&rotated_diagonal(post, &rot), &rotated_diagonal(pre, &rot))
}

/// j-angle-optimized measurement.
///
/// The j-marginal of both distributions does not depend on the angles, so
/// the rate splits into independent per-block terms and each `η_j` is found
/// by a one-dimensional search over `[0, π)`.
pub fn optimize_angles(pre: &BlockDecomposition, post: &BlockDecomposition) -> Result<BlockMeasurement> {
    check_pair(pre, post)?;
    let mut angles = BTreeMap::new();
    for (label, pb) in &pre.blocks {
        let qb = &post.blocks[label];
        let eta = if label.two_j() == 0 || qb.log_scale == f64::NEG_INFINITY {
            0.0
        } else {
            let (pm, qm) = (pb.operator.matrix(), qb.operator.matrix());
            maximize_periodic(|eta| block_objective(pm, qm, label.two_j(), eta)).0
        };
        angles.insert(*label, eta);
    }
    BlockMeasurement::new(pre.l, angles)
}
