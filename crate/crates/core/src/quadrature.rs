//! Quadrature building blocks: adaptive Gauss–Kronrod, a fixed tanh-sinh
//! rule on the unit interval, and Gauss–Jacobi rules with algebraic endpoint
//! weights.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::log_beta_unchecked;

/// Integration scheme used for the λ-integrals of the predictive density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Gauss–Jacobi nodes carrying the algebraic endpoint behaviour in the weight.
    GaussJacobi,
    /// Fixed-step double-exponential rule after the t = z^ν substitution.
    TanhSinh,
    /// Globally adaptive Gauss–Kronrod (7/15) bisection.
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub node_count: usize,
    pub scheme: Scheme,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            node_count: 128,
            scheme: Scheme::TanhSinh,
            abs_tol: 1e-300,
            rel_tol: 1e-10,
        }
    }
}

impl QuadratureConfig {
    pub fn adaptive(rel_tol: f64) -> Self {
        Self {
            node_count: 15,
            scheme: Scheme::Adaptive,
            abs_tol: 1e-300,
            rel_tol,
        }
    }

    pub fn fixed(scheme: Scheme, node_count: usize) -> Self {
        Self {
            node_count,
            scheme,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.node_count < 8 {
            return Err(Error::InvalidArgument(format!(
                "quadrature node_count = {} must be at least 8",
                self.node_count
            )));
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidArgument("quadrature tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOutcome {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
///
/// The interval with the largest error estimate is bisected until the summed
/// estimate drops below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Result<QuadOutcome> {
    if a == b {
        return Ok(QuadOutcome {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
        });
    }
    let (v, e) = kronrod15(&mut f, a, b);
    let mut segments = vec![(a, b, v, e)];
    let mut evaluations = 15;
    loop {
        let value: f64 = segments.iter().map(|s| s.2).sum();
        let error: f64 = segments.iter().map(|s| s.3).sum();
        if !value.is_finite() {
            return Err(Error::QuadratureNonConvergence {
                subdivisions: segments.len(),
                error: f64::INFINITY,
            });
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(QuadOutcome {
                value,
                abs_error: error,
                evaluations,
            });
        }
        if segments.len() >= max_subdivisions {
            return Err(Error::QuadratureNonConvergence {
                subdivisions: segments.len(),
                error,
            });
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .expect("segment list is never empty");
        let (lo, hi, _, _) = segments.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if !(lo < mid && mid < hi) {
            // Interval can no longer be split in floating point.
            return Err(Error::QuadratureNonConvergence {
                subdivisions: segments.len() + 1,
                error,
            });
        }
        let (v1, e1) = kronrod15(&mut f, lo, mid);
        let (v2, e2) = kronrod15(&mut f, mid, hi);
        evaluations += 30;
        segments.push((lo, mid, v1, e1));
        segments.push((mid, hi, v2, e2));
    }
}

/// A node on the unit interval with its complement stored separately, so
/// that integrands singular at 1 can be evaluated without cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitNode {
    pub x: f64,
    pub one_minus_x: f64,
    pub weight: f64,
}

/// Fixed-step tanh-sinh rule on `[0, 1]`.
#[derive(Debug, Clone)]
pub struct TanhSinhRule {
    nodes: Vec<UnitNode>,
}

impl TanhSinhRule {
    /// Half-width of the truncated τ-range; the weights there are below 1e-100.
    const TAU_MAX: f64 = 5.0;

    pub fn new(node_count: usize) -> Self {
        let n = node_count.max(2);
        let h = 2.0 * Self::TAU_MAX / (n - 1) as f64;
        let half_pi = std::f64::consts::FRAC_PI_2;
        let nodes = (0..n)
            .map(|k| {
                let tau = -Self::TAU_MAX + k as f64 * h;
                let s = half_pi * tau.sinh();
                let (x, one_minus_x) = if s >= 0.0 {
                    let e = (-2.0 * s).exp();
                    (1.0 / (1.0 + e), e / (1.0 + e))
                } else {
                    let e = (2.0 * s).exp();
                    (e / (1.0 + e), 1.0 / (1.0 + e))
                };
                let weight = h * std::f64::consts::PI * tau.cosh() * x * one_minus_x;
                UnitNode { x, one_minus_x, weight }
            })
            .filter(|node| node.weight > 0.0)
            .collect();
        Self { nodes }
    }

    pub fn nodes(&self) -> &[UnitNode] {
        &self.nodes
    }

    pub fn integrate<F: FnMut(f64, f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .map(|node| node.weight * f(node.x, node.one_minus_x))
            .sum()
    }
}

/// Gauss–Jacobi rule on `[0, 1]` for the weight `z^left (1 − z)^right`.
///
/// Nodes and weights come from the eigen-decomposition of the Jacobi matrix
/// (Golub–Welsch).
#[derive(Debug, Clone)]
pub struct GaussJacobiRule {
    nodes: Vec<UnitNode>,
    left: f64,
    right: f64,
}

impl GaussJacobiRule {
    pub fn new(node_count: usize, left: f64, right: f64) -> Result<Self> {
        if !(left > -1.0 && right > -1.0) {
            return Err(Error::InvalidArgument(format!(
                "Gauss-Jacobi exponents must exceed -1 (left = {left}, right = {right})"
            )));
        }
        if node_count == 0 {
            return Err(Error::InvalidArgument(
                "Gauss-Jacobi rule needs at least one node".into(),
            ));
        }
        // On [-1, 1] the weight is (1 - x)^alpha (1 + x)^beta.
        let alpha = right;
        let beta = left;
        let n = node_count;
        let ab = alpha + beta;
        let mut jacobi = DMatrix::<f64>::zeros(n, n);
        jacobi[(0, 0)] = (beta - alpha) / (ab + 2.0);
        for k in 1..n {
            let kf = k as f64;
            let two_k = 2.0 * kf + ab;
            jacobi[(k, k)] = (beta * beta - alpha * alpha) / (two_k * (two_k + 2.0));
            let b2 = if k == 1 {
                4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab) / (two_k * two_k * (two_k + 1.0) * (two_k - 1.0))
            };
            let off = b2.sqrt();
            jacobi[(k, k - 1)] = off;
            jacobi[(k - 1, k)] = off;
        }
        let eig = SymmetricEigen::new(jacobi);
        let mass = log_beta_unchecked(alpha + 1.0, beta + 1.0).exp();
        let mut nodes: Vec<UnitNode> = (0..n)
            .map(|i| {
                let x = eig.eigenvalues[i];
                let v0 = eig.eigenvectors[(0, i)];
                UnitNode {
                    x: 0.5 * (1.0 + x),
                    one_minus_x: 0.5 * (1.0 - x),
                    weight: mass * v0 * v0,
                }
            })
            .collect();
        nodes.sort_by(|p, q| p.x.total_cmp(&q.x));
        Ok(Self { nodes, left, right })
    }

    pub fn nodes(&self) -> &[UnitNode] {
        &self.nodes
    }

    pub fn exponents(&self) -> (f64, f64) {
        (self.left, self.right)
    }

    /// ∫₀¹ z^left (1 − z)^right f(z) dz.
    pub fn integrate<F: FnMut(f64, f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .map(|node| node.weight * f(node.x, node.one_minus_x))
            .sum()
    }
}
