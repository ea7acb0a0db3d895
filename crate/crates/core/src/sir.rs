//! SIR at a base station whose strongest neighbor belongs to tier `k` of a
//! K-tier Poisson network with Rayleigh fading and no thermal noise.
//!
//! Tier indices are zero-based.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{domain, ensure_positive, Error, ErrorSlot, Result};
use crate::numerics::{
    find_root, integrate, integrate_with_breakpoints, QuadratureSpec, RootSpec, UniformPchip,
};

/// Converts a wall loss in dB to the linear gain `10^{−dB/10}`.
pub fn wall_loss_from_db(db: f64) -> f64 {
    10f64.powf(-db / 10.0)
}

/// One tier of base stations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTier")]
pub struct TierParams {
    /// Density λ in BS per m².
    pub density_lambda: f64,
    /// Transmit power in watts.
    pub power: f64,
    /// Path-loss exponent, > 2.
    pub alpha: f64,
    /// Linear wall-loss gain in (0, 1].
    pub wall_loss: f64,
}

#[derive(Deserialize)]
struct RawTier {
    density_lambda: f64,
    power: f64,
    alpha: f64,
    wall_loss: f64,
}

impl TryFrom<RawTier> for TierParams {
    type Error = Error;

    fn try_from(r: RawTier) -> Result<Self> {
        TierParams::new(r.density_lambda, r.power, r.alpha, r.wall_loss)
    }
}

impl TierParams {
    pub fn new(density_lambda: f64, power: f64, alpha: f64, wall_loss: f64) -> Result<Self> {
        ensure_positive("tier density", density_lambda)?;
        ensure_positive("tier power", power)?;
        check_alpha(alpha)?;
        if !(wall_loss > 0.0 && wall_loss <= 1.0) {
            return Err(domain(
                "wall loss",
                format!("linear gain must lie in (0, 1], got {wall_loss}"),
            ));
        }
        Ok(Self {
            density_lambda,
            power,
            alpha,
            wall_loss,
        })
    }

    /// `P·L`, the power that decides association.
    pub fn effective_power(&self) -> f64 {
        self.power * self.wall_loss
    }
}

/// K tiers plus the tier of the coordinating neighbor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHcn")]
pub struct HcnConfig {
    tiers: Vec<TierParams>,
    neighbor_tier: usize,
}

#[derive(Deserialize)]
struct RawHcn {
    tiers: Vec<TierParams>,
    neighbor_tier: usize,
}

impl TryFrom<RawHcn> for HcnConfig {
    type Error = Error;

    fn try_from(r: RawHcn) -> Result<Self> {
        HcnConfig::new(r.tiers, r.neighbor_tier)
    }
}

impl HcnConfig {
    pub fn new(tiers: Vec<TierParams>, neighbor_tier: usize) -> Result<Self> {
        if tiers.is_empty() {
            return Err(domain("hcn", "need at least one tier"));
        }
        check_tier(tiers.len(), neighbor_tier)?;
        Ok(Self {
            tiers,
            neighbor_tier,
        })
    }

    pub fn tiers(&self) -> &[TierParams] {
        &self.tiers
    }

    pub fn neighbor_tier(&self) -> usize {
        self.neighbor_tier
    }

    pub fn with_neighbor_tier(&self, k: usize) -> Result<Self> {
        Self::new(self.tiers.clone(), k)
    }

    /// Every tier set to path-loss exponent `alpha`.
    pub fn with_common_alpha(&self, alpha: f64) -> Result<Self> {
        let tiers = self
            .tiers
            .iter()
            .map(|t| TierParams::new(t.density_lambda, t.power, alpha, t.wall_loss))
            .collect::<Result<_>>()?;
        Self::new(tiers, self.neighbor_tier)
    }

    /// The shared exponent when all tiers have the same one.
    pub fn common_alpha(&self) -> Option<f64> {
        let a = self.tiers[0].alpha;
        self.tiers.iter().all(|t| t.alpha == a).then_some(a)
    }

    /// Best available SIR law for the neighbor tier: closed form for a
    /// common exponent, the general integral otherwise.
    pub fn sir_model(&self) -> Result<SirModel> {
        Ok(match self.common_alpha() {
            Some(alpha) => SirModel::EqualAlpha(EqualAlphaSir::new(alpha)?),
            None => SirModel::General(TierSir::new(self, self.neighbor_tier)?),
        })
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 2.0 {
        Ok(())
    } else {
        Err(domain(
            "path-loss exponent",
            format!("must be finite and > 2, got {alpha}"),
        ))
    }
}

fn check_tier(k_total: usize, k: usize) -> Result<()> {
    if k < k_total {
        Ok(())
    } else {
        Err(domain(
            "tier index",
            format!("{k} is out of range for {k_total} tiers (zero-based)"),
        ))
    }
}

/// `(2π/α)·csc(2π/α)`.
fn kappa(alpha: f64) -> f64 {
    let x = 2.0 * PI / alpha;
    x / x.sin()
}

/// `Z(β, α) = ∫₁^∞ ds / (1 + s^{α/2}/β)`.
///
/// For `β ≤ 1` the substitution `s = w^{−1/(δ−1)}`, `δ = α/2`, gives the
/// smooth form `β/(δ−1) ∫₀¹ dw / (1 + β w^{δ/(δ−1)})`. For `β > 1` the
/// complement `β^{1/δ}(π/δ)csc(π/δ) − ∫₀¹ ds/(1 + s^δ/β)` is used.
pub fn z_function(beta: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if beta.is_nan() || beta < 0.0 {
        return Err(domain(
            "z_function",
            format!("beta must be >= 0, got {beta}"),
        ));
    }
    if beta == 0.0 {
        return Ok(0.0);
    }
    if beta.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let delta = alpha / 2.0;
    let spec = QuadratureSpec::tight();
    if beta <= 1.0 {
        let e = delta / (delta - 1.0);
        let v = integrate(|w: f64| 1.0 / (1.0 + beta * w.powf(e)), 0.0, 1.0, &spec)?;
        Ok(beta / (delta - 1.0) * v)
    } else {
        let knee = beta.powf(1.0 / delta);
        let mut points = vec![0.0, 1.0];
        if knee < 1.0 {
            points.insert(1, knee);
        }
        let j = integrate_with_breakpoints(
            |s: f64| 1.0 / (1.0 + s.powf(delta) / beta),
            &points,
            &spec,
        )?;
        Ok((knee * kappa(alpha) - j).max(0.0))
    }
}

/// `ζ(α) = ((2π/α)csc(2π/α))^{−α/2}`.
pub fn zeta(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(kappa(alpha).powf(-alpha / 2.0))
}

/// `q{β} = 1 − 1/(1 + Z(β, α))` for a common path-loss exponent.
pub fn sir_cdf_equal_alpha(beta: f64, alpha: f64) -> Result<f64> {
    EqualAlphaSir::new(alpha)?.cdf(beta)
}

/// Probability that the strongest neighbor belongs to tier `k`.
pub fn association_probability(h: &HcnConfig, k: usize) -> Result<f64> {
    Ok(TierSir::new(h, k)?.association())
}

/// `q_k{β} = P(SIR ≤ β | neighbor in tier k)` by the general integral.
pub fn sir_cdf(h: &HcnConfig, k: usize, beta: f64) -> Result<f64> {
    TierSir::new(h, k)?.cdf(beta)
}

/// `E[log₂(1 + SIR)] = ∫₀^∞ (1 − q{2^t − 1}) dt`.
pub fn mean_log_spectral_efficiency<D: SirDistribution + ?Sized>(dist: &D) -> Result<f64> {
    let slot = ErrorSlot::default();
    let r = integrate_with_breakpoints(
        |t: f64| slot.take_value(dist.ccdf((t * std::f64::consts::LN_2).exp_m1())),
        &[0.0, 1.0, 8.0, f64::INFINITY],
        &QuadratureSpec::default(),
    );
    slot.finish(r)
}

/// A conditional SIR distribution `β ↦ q{β}`.
pub trait SirDistribution: Send + Sync {
    /// `P(SIR ≤ β)`.
    fn cdf(&self, beta: f64) -> Result<f64>;

    /// `P(SIR > β)`, computed without cancellation where possible.
    fn ccdf(&self, beta: f64) -> Result<f64> {
        self.cdf(beta).map(|q| 1.0 - q)
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_nan() || beta < 0.0 {
        return Err(domain("sir threshold", format!("must be >= 0, got {beta}")));
    }
    Ok(())
}

/// Closed form for a common exponent; independent of densities and powers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EqualAlphaSir {
    alpha: f64,
}

impl EqualAlphaSir {
    pub fn new(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self { alpha })
    }
}

impl SirDistribution for EqualAlphaSir {
    fn cdf(&self, beta: f64) -> Result<f64> {
        check_beta(beta)?;
        if beta.is_infinite() {
            return Ok(1.0);
        }
        let z = z_function(beta, self.alpha)?;
        Ok(z / (1.0 + z))
    }

    fn ccdf(&self, beta: f64) -> Result<f64> {
        check_beta(beta)?;
        Ok(1.0 / (1.0 + z_function(beta, self.alpha)?))
    }
}

/// General K-tier law for one neighbor tier.
///
/// Both the association probability and the coverage reduce to
/// `I(c) = ∫₀^∞ x exp(−π Σ_j c_j x^{p_j}) dx` with `p_j = 2α_k/α_j` and
/// `c_j = λ_j P̂_j^{2/α_j}` (times `1 + Z(β, α_j)` for coverage), where
/// `P̂_j = P_jL_j / (P_kL_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TierSir {
    alphas: Vec<f64>,
    base: Vec<f64>,
    powers: Vec<f64>,
    association: f64,
    i0: f64,
}

impl TierSir {
    pub fn new(h: &HcnConfig, k: usize) -> Result<Self> {
        check_tier(h.tiers.len(), k)?;
        let serving = h.tiers[k];
        let alphas: Vec<f64> = h.tiers.iter().map(|t| t.alpha).collect();
        let base: Vec<f64> = h
            .tiers
            .iter()
            .map(|t| {
                let ln_ratio = (t.effective_power() / serving.effective_power()).ln();
                t.density_lambda * (2.0 / t.alpha * ln_ratio).exp()
            })
            .collect();
        let powers: Vec<f64> = alphas.iter().map(|a| 2.0 * serving.alpha / a).collect();
        let i0 = radial_integral(&base, &powers)?;
        let association = (2.0 * PI * serving.density_lambda * i0).clamp(0.0, 1.0);
        Ok(Self {
            alphas,
            base,
            powers,
            association,
            i0,
        })
    }

    pub fn association(&self) -> f64 {
        self.association
    }
}

impl SirDistribution for TierSir {
    fn cdf(&self, beta: f64) -> Result<f64> {
        Ok(1.0 - self.ccdf(beta)?)
    }

    fn ccdf(&self, beta: f64) -> Result<f64> {
        check_beta(beta)?;
        if beta == 0.0 {
            return Ok(1.0);
        }
        if beta.is_infinite() {
            return Ok(0.0);
        }
        let scaled = self
            .base
            .iter()
            .zip(&self.alphas)
            .map(|(c, &a)| Ok(c * (1.0 + z_function(beta, a)?)))
            .collect::<Result<Vec<f64>>>()?;
        Ok((radial_integral(&scaled, &self.powers)? / self.i0).clamp(0.0, 1.0))
    }
}

/// `∫₀^∞ x exp(−π Σ c_j x^{p_j}) dx`, rescaled so the exponent is 1 at `y = 1`.
fn radial_integral(c: &[f64], p: &[f64]) -> Result<f64> {
    if p.iter().all(|&pj| pj == 2.0) {
        return Ok(1.0 / (2.0 * PI * c.iter().sum::<f64>()));
    }
    // Solve ln(π Σ c_j e^{p_j s}) = 0 for s = ln x0.
    let logs: Vec<f64> = c.iter().map(|cj| (PI * cj).ln()).collect();
    let h = |s: f64| {
        let terms: Vec<f64> = logs.iter().zip(p).map(|(l, pj)| l + pj * s).collect();
        let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln()
    };
    let crossings: Vec<f64> = logs.iter().zip(p).map(|(l, pj)| -l / pj).collect();
    let p_min = p.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = crossings.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo =
        crossings.iter().copied().fold(f64::INFINITY, f64::min) - (c.len() as f64).ln() / p_min;
    let s0 = find_root(h, lo, hi, &RootSpec::default())?;
    let weights: Vec<f64> = logs
        .iter()
        .zip(p)
        .map(|(l, pj)| (l + pj * s0).exp())
        .collect();
    let body = integrate_with_breakpoints(
        |y: f64| {
            if y == 0.0 {
                return 0.0;
            }
            let ln_y = y.ln();
            let e: f64 = weights
                .iter()
                .zip(p)
                .map(|(w, pj)| w * (pj * ln_y).exp())
                .sum();
            y * (-e).exp()
        },
        &[0.0, 1.0, 3.0, f64::INFINITY],
        &QuadratureSpec::tight(),
    )?;
    Ok((2.0 * s0).exp() * body)
}

/// Either SIR law, chosen by [`HcnConfig::sir_model`].
#[derive(Debug, Clone, PartialEq)]
pub enum SirModel {
    EqualAlpha(EqualAlphaSir),
    General(TierSir),
}

impl SirDistribution for SirModel {
    fn cdf(&self, beta: f64) -> Result<f64> {
        match self {
            Self::EqualAlpha(s) => s.cdf(beta),
            Self::General(s) => s.cdf(beta),
        }
    }

    fn ccdf(&self, beta: f64) -> Result<f64> {
        match self {
            Self::EqualAlpha(s) => s.ccdf(beta),
            Self::General(s) => s.ccdf(beta),
        }
    }
}

const GRID_LN_LO: f64 = -18.0;
const GRID_LN_HI: f64 = 45.0;
const GRID_STEP: f64 = 0.05;

/// `q{β}` tabulated on a uniform `ln β` grid and interpolated in
/// `logit q` with a monotone cubic. Thresholds off the grid are evaluated
/// directly.
#[derive(Debug, Clone)]
pub struct TabulatedSir {
    base: SirModel,
    logit: UniformPchip,
}

impl TabulatedSir {
    pub fn new(base: SirModel) -> Result<Self> {
        let n = ((GRID_LN_HI - GRID_LN_LO) / GRID_STEP).round() as usize + 1;
        let logit = (0..n)
            .map(|i| {
                let beta = (GRID_LN_LO + i as f64 * GRID_STEP).exp();
                let q = base.cdf(beta)?;
                let qc = base.ccdf(beta)?;
                Ok(q.ln() - qc.ln())
            })
            .collect::<Result<Vec<f64>>>()?;
        if logit.iter().any(|v| !v.is_finite()) {
            return Err(domain(
                "sir table",
                "SIR law saturates inside the tabulation range",
            ));
        }
        Ok(Self {
            base,
            logit: UniformPchip::new(GRID_LN_LO, GRID_STEP, logit),
        })
    }

    pub fn base(&self) -> &SirModel {
        &self.base
    }

    fn logit_at(&self, beta: f64) -> Option<f64> {
        if beta > 0.0 {
            self.logit.eval(beta.ln())
        } else {
            None
        }
    }
}

impl SirDistribution for TabulatedSir {
    fn cdf(&self, beta: f64) -> Result<f64> {
        check_beta(beta)?;
        match self.logit_at(beta) {
            Some(l) => Ok(1.0 / (1.0 + (-l).exp())),
            None => self.base.cdf(beta),
        }
    }

    fn ccdf(&self, beta: f64) -> Result<f64> {
        check_beta(beta)?;
        match self.logit_at(beta) {
            Some(l) => Ok(1.0 / (1.0 + l.exp())),
            None => self.base.ccdf(beta),
        }
    }
}

/// Lazily built per-tier SIR tables, shareable across threads.
#[derive(Debug)]
pub struct SirCache {
    hcn: HcnConfig,
    tables: Vec<OnceLock<TabulatedSir>>,
}

impl SirCache {
    pub fn new(hcn: HcnConfig) -> Self {
        let tables = (0..hcn.tiers.len()).map(|_| OnceLock::new()).collect();
        Self { hcn, tables }
    }

    pub fn hcn(&self) -> &HcnConfig {
        &self.hcn
    }

    /// Table for neighbor tier `k`, built on first use.
    pub fn tier(&self, k: usize) -> Result<&TabulatedSir> {
        check_tier(self.tables.len(), k)?;
        let cell = &self.tables[k];
        if let Some(t) = cell.get() {
            return Ok(t);
        }
        let table = TabulatedSir::new(self.hcn.with_neighbor_tier(k)?.sir_model()?)?;
        Ok(cell.get_or_init(|| table))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn closed_z4(beta: f64) -> f64 {
        beta.sqrt() * beta.sqrt().atan()
    }

    fn two_tier(ratio: f64) -> HcnConfig {
        HcnConfig::new(
            vec![
                TierParams::new(1e-6, 1.0, 4.0, 1.0).unwrap(),
                TierParams::new(ratio * 1e-6, 1.0, 4.0, 1.0).unwrap(),
            ],
            0,
        )
        .unwrap()
    }

    pub(crate) fn table1() -> HcnConfig {
        HcnConfig::new(
            vec![
                TierParams::new(5e-7, 40.0, 3.0, 1.0).unwrap(),
                TierParams::new(5e-6, 1.0, 3.5, 1.0).unwrap(),
                TierParams::new(5e-5, 0.2, 4.0, wall_loss_from_db(5.0)).unwrap(),
            ],
            0,
        )
        .unwrap()
    }

    #[test]
    fn z_examples() {
        assert_eq!(z_function(0.0, 3.0).unwrap(), 0.0);
        assert!((z_function(1.0, 4.0).unwrap() - PI / 4.0).abs() < 1e-12);
        assert!((z_function(4.0, 4.0).unwrap() - 2.0 * 2f64.atan()).abs() < 1e-12);
        for beta in [1e-8, 1e-3, 0.3, 0.999, 1.001, 7.0, 1e4, 1e12] {
            let z = z_function(beta, 4.0).unwrap();
            let want = closed_z4(beta);
            assert!(((z - want) / want).abs() < 1e-10, "{beta}: {z} vs {want}");
        }
        assert!(z_function(1.0, 2.0).is_err());
        assert!(z_function(-1.0, 3.0).is_err());
    }

    #[test]
    fn z_matches_direct_half_line_quadrature() {
        for alpha in [2.6, 3.0, 3.5, 5.0] {
            for beta in [0.01f64, 0.5, 2.0, 50.0] {
                // s = e^v turns the algebraic tail into an exponential one.
                let f = |v: f64| 1.0 / ((-v).exp() + ((alpha / 2.0 - 1.0) * v).exp() / beta);
                let direct = integrate(f, 0.0, f64::INFINITY, &QuadratureSpec::tight()).unwrap();
                let z = z_function(beta, alpha).unwrap();
                assert!(
                    ((z - direct) / direct).abs() < 1e-7,
                    "α={alpha} β={beta}: {z} vs {direct}"
                );
            }
        }
    }

    #[test]
    fn zeta_examples() {
        assert!((zeta(4.0).unwrap() - (PI / 2.0).powi(-2)).abs() < 1e-14);
        assert!((zeta(3.0).unwrap() - 0.265_89).abs() < 1e-5);
        let big = zeta(40.0).unwrap();
        assert!(big < 1.0 && big > zeta(4.0).unwrap() && zeta(4.0).unwrap() > zeta(3.0).unwrap());
        assert!(zeta(2.0).is_err());
    }

    #[test]
    fn equal_alpha_examples() {
        let q = sir_cdf_equal_alpha(1.0, 4.0).unwrap();
        assert!((q - (1.0 - 1.0 / (1.0 + PI / 4.0))).abs() < 1e-12);
        assert!((q - 0.4399).abs() < 1e-4);
        assert_eq!(sir_cdf_equal_alpha(0.0, 4.0).unwrap(), 0.0);
        let q = sir_cdf_equal_alpha(100.0, 4.0).unwrap();
        assert!((q - (1.0 - 1.0 / (1.0 + 10.0 * 10f64.atan()))).abs() < 1e-12);
    }

    #[test]
    fn association_examples() {
        let one = HcnConfig::new(vec![TierParams::new(1e-6, 1.0, 3.0, 1.0).unwrap()], 0).unwrap();
        assert!((association_probability(&one, 0).unwrap() - 1.0).abs() < 1e-12);
        let h = two_tier(4.0);
        assert!((association_probability(&h, 0).unwrap() - 0.2).abs() < 1e-12);
        let sum: f64 = (0..3)
            .map(|k| association_probability(&table1(), k).unwrap())
            .sum();
        assert!((sum - 1.0).abs() < 1e-9, "{sum}");
    }

    #[test]
    fn general_integral_matches_equal_alpha_closed_form() {
        // Distinct powers keep the weights unequal while exponents coincide.
        let h = HcnConfig::new(
            vec![
                TierParams::new(5e-7, 40.0, 3.5, 1.0).unwrap(),
                TierParams::new(5e-6, 1.0, 3.5, 1.0).unwrap(),
                TierParams::new(5e-5, 0.2, 3.5, 0.3).unwrap(),
            ],
            1,
        )
        .unwrap();
        for k in 0..3 {
            for beta in [0.1, 1.0, 10.0] {
                let general = sir_cdf(&h, k, beta).unwrap();
                let closed = sir_cdf_equal_alpha(beta, 3.5).unwrap();
                assert!((general - closed).abs() < 1e-9, "k={k} β={beta}");
            }
        }
    }

    #[test]
    fn general_radial_integral_matches_quadrature() {
        let c = [0.3, 2.0, 0.01];
        let p = [2.0, 1.5, 8.0 / 3.0];
        let got = radial_integral(&c, &p).unwrap();
        let want = integrate(
            |x: f64| x * (-PI * c.iter().zip(&p).map(|(c, p)| c * x.powf(*p)).sum::<f64>()).exp(),
            0.0,
            f64::INFINITY,
            &QuadratureSpec::tight(),
        )
        .unwrap();
        assert!(((got - want) / want).abs() < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn table1_cdf_is_monotone_with_limits() {
        let h = table1();
        for k in 0..3 {
            let s = TierSir::new(&h, k).unwrap();
            assert_eq!(s.cdf(0.0).unwrap(), 0.0);
            let mut last = 0.0;
            for i in 0..20 {
                let beta = 10f64.powf(-4.0 + 0.5 * i as f64);
                let q = s.cdf(beta).unwrap();
                assert!(q >= last - 1e-12 && q <= 1.0, "k={k} β={beta}");
                last = q;
            }
            assert!(s.cdf(1e30).unwrap() > 0.999);
        }
    }

    #[test]
    fn tabulated_matches_direct() {
        let h = table1();
        let cache = SirCache::new(h.clone());
        for k in 0..3 {
            let table = cache.tier(k).unwrap();
            let direct = TierSir::new(&h, k).unwrap();
            for i in 0..200 {
                let beta = (-17.9 + 0.3137 * i as f64).exp();
                let (a, b) = (table.cdf(beta).unwrap(), direct.cdf(beta).unwrap());
                assert!((a - b).abs() < 1e-6, "k={k} β={beta}: {a} vs {b}");
                let (a, b) = (table.ccdf(beta).unwrap(), direct.ccdf(beta).unwrap());
                assert!(
                    (a - b).abs() <= 1e-6 * b.max(1e-3),
                    "k={k} β={beta}: {a} vs {b}"
                );
            }
            assert_eq!(table.cdf(1e30).unwrap(), direct.cdf(1e30).unwrap());
        }
    }

    #[test]
    fn mean_log_efficiency_is_scale_free_for_equal_alpha() {
        let a = mean_log_spectral_efficiency(&TierSir::new(&two_tier(4.0), 0).unwrap()).unwrap();
        let b = mean_log_spectral_efficiency(&EqualAlphaSir::new(4.0).unwrap()).unwrap();
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        assert!(a > 1.0 && a < 5.0);
    }

    struct NoInterference;
    impl SirDistribution for NoInterference {
        fn cdf(&self, _beta: f64) -> Result<f64> {
            Ok(0.0)
        }
    }

    #[test]
    fn interference_free_stub_diverges() {
        let err = mean_log_spectral_efficiency(&NoInterference).unwrap_err();
        assert!(matches!(err, Error::Accuracy { .. }), "{err:?}");
    }

    #[test]
    fn appendix_inequality_for_z() {
        for alpha in [2.2, 3.0, 4.0, 6.0] {
            for beta in [1e-3f64, 0.5, 3.0, 1e6] {
                let z = z_function(beta, alpha).unwrap();
                assert!(z >= beta.powf(2.0 / alpha) * kappa(alpha) - 1.0 - 1e-12);
            }
        }
    }

    #[test]
    fn serde_validates_tiers() {
        let json = r#"{"tiers":[{"density_lambda":1e-6,"power":1.0,"alpha":2.0,"wall_loss":1.0}],"neighbor_tier":0}"#;
        assert!(serde_json::from_str::<HcnConfig>(json).is_err());
        let json = r#"{"tiers":[{"density_lambda":1e-6,"power":1.0,"alpha":3.0,"wall_loss":1.0}],"neighbor_tier":1}"#;
        assert!(serde_json::from_str::<HcnConfig>(json).is_err());
    }
}
