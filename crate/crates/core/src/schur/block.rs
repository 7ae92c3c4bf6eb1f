use std::collections::BTreeMap;

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::qmath::{HermitianOperator, OperatorJson};

use super::wigner::wigner_d;

/// Copy counts above this are rejected; multiplicities stay within u128.
pub const MAX_COPIES: u32 = 126;

/// Total angular momentum label, stored as `2j` so half-integers are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BlockLabel(pub u32);

impl BlockLabel {
    pub fn two_j(self) -> u32 {
        self.0
    }

    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }

    pub fn j(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// Valid labels for `l` copies, ascending.
    pub fn all(l: u32) -> impl Iterator<Item = BlockLabel> {
        (l % 2..=l).step_by(2).map(BlockLabel)
    }

    pub fn validate(self, l: u32) -> Result<()> {
        if self.0 > l || !(l - self.0).is_multiple_of(2) {
            return Err(Error::InvalidBlock { l, two_j: self.0 });
        }
        Ok(())
    }
}

impl std::fmt::Display for BlockLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_multiple_of(2) {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

fn binomial(n: u32, k: u32) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k as u128 {
        // acc · (n − i + 1) / i is exact; split the gcd first to avoid overflow
        let num = n as u128 - i + 1;
        let g = gcd(acc, i);
        let (a, d) = (acc / g, i / g);
        acc = a.checked_mul(num / d)?;
    }
    Some(acc)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Number of equivalent irreducible representations with label `j` in `l`
/// qubits, `C(l, l/2−j)·(2j+1)/(l/2+j+1)`.
///
/// Evaluated as the ballot difference `C(l, k) − C(l, k−1)` with
/// `k = l/2 − j`, which equals the closed form and never leaves the integers.
pub fn multiplicity(l: u32, two_j: u32) -> Result<u128> {
    BlockLabel(two_j).validate(l)?;
    if l > MAX_COPIES {
        return Err(Error::Overflow(l));
    }
    let k = (l - two_j) / 2;
    let top = binomial(l, k).ok_or(Error::Overflow(l))?;
    let below = if k == 0 { 0 } else { binomial(l, k - 1).ok_or(Error::Overflow(l))? };
    Ok(top - below)
}

/// One irreducible block: the `(2j+1)`-dimensional operator, scaled by
/// `exp(log_scale)`, appears `multiplicity` times in the l-copy state.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub operator: HermitianOperator,
    pub log_scale: f64,
    pub multiplicity: u128,
}

impl Block {
    /// `exp(log_scale) · operator`.
    pub fn scaled_operator(&self) -> DMatrix<crate::qmath::C64> {
        let s = if self.log_scale == f64::NEG_INFINITY { 0.0 } else { self.log_scale.exp() };
        self.operator.matrix() * Complex::new(s, 0.0)
    }

    /// `ln(multiplicity) + log_scale`: the log-weight of this block's entries.
    pub fn log_weight(&self) -> f64 {
        (self.multiplicity as f64).ln() + self.log_scale
    }
}

/// Angular-momentum block form of the `l`-fold tensor power of a qubit state:
/// `ρ^{⊗l} = ⊕_j B_j ⊗ I_{ν_j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDecomposition {
    pub l: u32,
    /// Bloch length of the single-copy state.
    pub r: f64,
    /// x-rotation applied to the z-diagonal single-copy state.
    pub theta: f64,
    pub blocks: BTreeMap<BlockLabel, Block>,
}

fn check_inputs(r: f64, l: u32) -> Result<()> {
    if !(0.0..=1.0).contains(&r) {
        return Err(invalid("r", format!("{r} is outside [0, 1]")));
    }
    if l == 0 {
        return Err(invalid("l", "block length must be positive"));
    }
    if l > MAX_COPIES {
        return Err(Error::Overflow(l));
    }
    Ok(())
}

/// Blocks of `((I + r σ_z)/2)^{⊗l}`.
///
/// Block `j` is diagonal in `|j,m⟩` with entries
/// `((1+r)/2)^{j+m} ((1−r)/2)^{j−m}` and
/// `log_scale = (l/2 − j)·ln((1−r²)/4)`.
pub fn block_state(r: f64, l: u32) -> Result<BlockDecomposition> {
    check_inputs(r, l)?;
    let up = (1.0 + r) / 2.0;
    let down = (1.0 - r) / 2.0;
    let log_pair = ((1.0 - r * r) / 4.0).ln();
    let mut blocks = BTreeMap::new();
    for label in BlockLabel::all(l) {
        let tj = label.two_j() as i32;
        let diag: Vec<f64> = (0..=tj)
            .map(|a| {
                // index a ↔ m = j − a: j + m = 2j − a, j − m = a
                pow0(up, tj - a) * pow0(down, a)
            })
            .collect();
        let pairs = (l - label.two_j()) / 2;
        let log_scale = if pairs == 0 { 0.0 } else { pairs as f64 * log_pair };
        blocks.insert(
            label,
            Block {
                operator: HermitianOperator::from_real_diagonal(&diag),
                log_scale,
                multiplicity: multiplicity(l, label.two_j())?,
            },
        );
    }
    Ok(BlockDecomposition { l, r, theta: 0.0, blocks })
}

fn pow0(x: f64, n: i32) -> f64 {
    if n == 0 {
        1.0
    } else {
        x.powi(n)
    }
}

/// Blocks of `(e^{−iθσ_x/2} (I + rσ_z)/2 e^{iθσ_x/2})^{⊗l}`: each block of
/// [`block_state`] conjugated by `e^{−iθJ_x}`.
pub fn rotated_block_state(r: f64, theta: f64, l: u32) -> Result<BlockDecomposition> {
    if !theta.is_finite() {
        return Err(invalid("theta", "must be finite"));
    }
    let mut dec = block_state(r, l)?;
    for (label, block) in dec.blocks.iter_mut() {
        let rot = wigner_d(label.two_j(), theta).x_rotation();
        block.operator = block.operator.conjugate_by(&rot);
    }
    dec.theta = theta;
    Ok(dec)
}

impl BlockDecomposition {
    /// `Σ_j ν_j · exp(log_scale_j) · tr B_j`.
    pub fn total_trace(&self) -> f64 {
        self.blocks
            .values()
            .map(|b| {
                let tr = b.operator.trace();
                if tr == 0.0 {
                    0.0
                } else {
                    (b.log_weight() + tr.ln()).exp()
                }
            })
            .sum()
    }

    /// `Σ_j (2j+1)·ν_j`, which must equal `2^l`.
    pub fn total_dimension(&self) -> u128 {
        self.blocks.iter().map(|(label, b)| label.dim() as u128 * b.multiplicity).sum()
    }

    pub fn labels(&self) -> impl Iterator<Item = BlockLabel> + '_ {
        self.blocks.keys().copied()
    }

    /// Largest block-wise difference of scaled operators; `+∞` if the label
    /// sets or multiplicities differ.
    pub fn max_block_diff(&self, other: &Self) -> f64 {
        if self.l != other.l || self.blocks.len() != other.blocks.len() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for (label, a) in &self.blocks {
            let Some(b) = other.blocks.get(label) else {
                return f64::INFINITY;
            };
            if a.multiplicity != b.multiplicity {
                return f64::INFINITY;
            }
            let d = (a.scaled_operator() - b.scaled_operator()).iter().map(|c| c.norm()).fold(0.0, f64::max);
            worst = worst.max(d);
        }
        worst
    }

    pub fn to_json(&self) -> BlockDecompositionJson {
        BlockDecompositionJson {
            l: self.l,
            blocks: self
                .blocks
                .iter()
                .map(|(label, b)| BlockJson {
                    two_j: label.two_j(),
                    multiplicity: b.multiplicity,
                    log_scale: b.log_scale.is_finite().then_some(b.log_scale),
                    matrix: b.operator.to_json(),
                })
                .collect(),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("block JSON is always serializable")
    }

    /// Rebuilds a decomposition from its wire form, checking labels,
    /// multiplicities and block dimensions. `r` and `theta` are not part of
    /// the wire form and come back as NaN.
    pub fn from_json(json: &BlockDecompositionJson) -> Result<Self> {
        if json.l == 0 || json.l > MAX_COPIES {
            return Err(invalid("l", format!("{} is outside 1..={MAX_COPIES}", json.l)));
        }
        let mut blocks = BTreeMap::new();
        for b in &json.blocks {
            let label = BlockLabel(b.two_j);
            label.validate(json.l)?;
            let want = multiplicity(json.l, b.two_j)?;
            if b.multiplicity != want {
                return Err(invalid(
                    "multiplicity",
                    format!("2j={} has multiplicity {}, expected {want}", b.two_j, b.multiplicity),
                ));
            }
            if b.matrix.dim != label.dim() {
                return Err(Error::DimensionMismatch(b.matrix.dim, label.dim()));
            }
            let log_scale = match b.log_scale {
                Some(x) if x.is_finite() => x,
                Some(_) => return Err(invalid("log_scale", "must be finite or null")),
                None => f64::NEG_INFINITY,
            };
            let operator = HermitianOperator::from_json(&b.matrix)?;
            if blocks.insert(label, Block { operator, log_scale, multiplicity: want }).is_some() {
                return Err(invalid("blocks", format!("duplicate label 2j={}", b.two_j)));
            }
        }
        if blocks.len() != BlockLabel::all(json.l).count() {
            return Err(invalid("blocks", "missing block labels"));
        }
        Ok(Self { l: json.l, r: f64::NAN, theta: f64::NAN, blocks })
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let json: BlockDecompositionJson = serde_json::from_str(text)?;
        Self::from_json(&json)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockDecompositionJson {
    pub l: u32,
    pub blocks: Vec<BlockJson>,
}

/// `log_scale` is `null` for an identically zero block.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockJson {
    pub two_j: u32,
    pub multiplicity: u128,
    pub log_scale: Option<f64>,
    pub matrix: OperatorJson,
}
