//! Hamiltonian builders and the parameter matching that lets a
//! nearest-neighbour Heisenberg chain reproduce one-axis twisting.
//!
//! Chains use open boundaries unless [`SpinChainParams::periodic`] is set.
//! The staggered field is `alpha/2 sum_i (-1)^i sigma_i^z` with 1-based `i`,
//! so site 1 carries `-alpha/2`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::spin_algebra::{
    collective_power, collective_spin, op_combine_real, pauli_pair, Axis, HilbertSpace,
    Operator,
};

/// Odd-chain constant quoted in the literature; exact only for `N = 3`.
pub const ODD_CHAIN_CONSTANT: f64 = 1.299;

/// Default cap on the number of `gamma_n` coefficients of a `Z_POLY` Hamiltonian.
pub const DEFAULT_MAX_ZPOLY_TERMS: usize = 8;

/// Physical parameters of the one-axis-twisting target and its chain simulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinChainParams {
    pub n_sites: usize,
    /// One-axis-twisting strength.
    pub chi: f64,
    /// Exchange coupling.
    pub beta: f64,
    /// Staggered-field amplitude.
    pub alpha: f64,
    /// Rotating-frame frequency, `alpha / N` for odd chains.
    pub omega: f64,
    pub periodic: bool,
}

impl SpinChainParams {
    pub fn new(n_sites: usize, chi: f64, beta: f64, alpha: f64) -> Self {
        SpinChainParams {
            n_sites,
            chi,
            beta,
            alpha,
            omega: alpha / n_sites as f64,
            periodic: false,
        }
    }

    /// Parameters whose `alpha` satisfies the matching rule at the given
    /// `beta / alpha` ratio.
    pub fn matched(n_sites: usize, chi: f64, ratio: f64, rule: &MatchingRule) -> Result<Self> {
        let (alpha, beta) = rule.solve(n_sites, chi, ratio)?;
        Ok(Self::new(n_sites, chi, beta, alpha))
    }

    pub fn space(&self) -> Result<HilbertSpace> {
        HilbertSpace::new(self.n_sites)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("chi", self.chi), ("beta", self.beta), ("alpha", self.alpha), ("omega", self.omega)] {
            if !v.is_finite() {
                return Err(Error::param(format!("{name} must be finite, got {v}")));
            }
        }
        if self.beta < 0.0 {
            return Err(Error::param(format!("beta must be >= 0, got {}", self.beta)));
        }
        if self.alpha < 0.0 {
            return Err(Error::param(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        Ok(())
    }

    fn chain_space(&self) -> Result<HilbertSpace> {
        self.validate()?;
        if self.n_sites < 2 {
            return Err(Error::param(format!(
                "chain Hamiltonians need N >= 2, got {}",
                self.n_sites
            )));
        }
        self.space()
    }
}

/// Bonds `(i, i+1)` of an open chain, plus `(N, 1)` when periodic.
fn bonds(n: usize, periodic: bool) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = (1..n).map(|i| (i, i + 1)).collect();
    if periodic && n > 2 {
        out.push((n, 1));
    }
    out
}

/// `sum over bonds of sum_{a in axes} sigma_i^a sigma_j^a`.
fn exchange(space: HilbertSpace, axes: &[Axis], bond_list: &[(usize, usize)]) -> Result<Operator> {
    let mut terms = Vec::new();
    for &(i, j) in bond_list {
        for &a in axes {
            terms.push(pauli_pair(a, i, a, j, space)?);
        }
    }
    if terms.is_empty() {
        return Ok(Operator::zero(space));
    }
    let weighted: Vec<(f64, &Operator)> = terms.iter().map(|t| (1.0, t)).collect();
    op_combine_real(&weighted)
}

/// `1/2 sum_i fields[i-1] sigma_i^z`, built directly as a diagonal.
pub fn z_field(space: HilbertSpace, fields: &[f64]) -> Result<Operator> {
    if fields.len() != space.n_sites() {
        return Err(Error::param(format!(
            "expected {} site fields, got {}",
            space.n_sites(),
            fields.len()
        )));
    }
    let diag: Vec<f64> = (0..space.dim())
        .map(|idx| {
            fields
                .iter()
                .enumerate()
                .map(|(k, h)| {
                    let down = idx & (1usize << (space.n_sites() - 1 - k)) != 0;
                    0.5 * h * if down { -1.0 } else { 1.0 }
                })
                .sum()
        })
        .collect();
    Operator::diagonal(space, &diag)
}

/// Site fields `alpha (-1)^i` of the staggered term.
pub fn staggered_fields(n_sites: usize, alpha: f64) -> Vec<f64> {
    (1..=n_sites)
        .map(|i| if i % 2 == 0 { alpha } else { -alpha })
        .collect()
}

/// One-axis twisting `chi S_z^2`.
pub fn build_oat(params: &SpinChainParams) -> Result<Operator> {
    params.validate()?;
    let space = params.space()?;
    let diag: Vec<f64> = (0..space.dim())
        .map(|i| params.chi * space.magnetization(i).powi(2))
        .collect();
    Operator::diagonal(space, &diag)
}

/// XX chain `beta/4 sum_i (sigma^x_i sigma^x_{i+1} + sigma^y_i sigma^y_{i+1})`.
pub fn build_xx(params: &SpinChainParams) -> Result<Operator> {
    let space = params.chain_space()?;
    let hop = exchange(space, &[Axis::X, Axis::Y], &bonds(params.n_sites, params.periodic))?;
    Ok(hop.scale_real(params.beta / 4.0))
}

/// The XX chain split into bonds starting on odd sites and on even sites.
pub fn build_xx_bond_split(params: &SpinChainParams) -> Result<(Operator, Operator)> {
    let space = params.chain_space()?;
    let all = bonds(params.n_sites, params.periodic);
    let (odd, even): (Vec<_>, Vec<_>) = all.into_iter().partition(|(i, _)| i % 2 == 1);
    let scale = params.beta / 4.0;
    Ok((
        exchange(space, &[Axis::X, Axis::Y], &odd)?.scale_real(scale),
        exchange(space, &[Axis::X, Axis::Y], &even)?.scale_real(scale),
    ))
}

/// Heisenberg chain `beta/4 sum_i sigma_i . sigma_{i+1} + 1/2 sum_i h_i sigma_i^z`.
pub fn build_xxx_field(space: HilbertSpace, beta: f64, fields: &[f64], periodic: bool) -> Result<Operator> {
    if space.n_sites() < 2 {
        return Err(Error::param("chain Hamiltonians need N >= 2"));
    }
    let ex = exchange(space, &Axis::ALL, &bonds(space.n_sites(), periodic))?;
    let field = z_field(space, fields)?;
    op_combine_real(&[(beta / 4.0, &ex), (1.0, &field)])
}

/// Heisenberg XXX chain with staggered field,
/// `beta/4 sum_i sigma_i . sigma_{i+1} + alpha/2 sum_i (-1)^i sigma_i^z`.
pub fn build_xxx_staggered(params: &SpinChainParams) -> Result<Operator> {
    let space = params.chain_space()?;
    build_xxx_field(space, params.beta, &staggered_fields(params.n_sites, params.alpha), params.periodic)
}

/// Chain Hamiltonian used as the analog simulator of `chi S_z^2`.
///
/// This is `-build_xxx_staggered`: with antiferromagnetic `beta > 0` the
/// fully symmetric multiplet sits at the top of the spectrum and the
/// second-order twisting comes out as `-chi S_z^2`. Reversing the overall
/// sign gives `+chi S_z^2`, plus a precession `+(alpha/N) S_z` for odd `N`.
pub fn analog_simulator(params: &SpinChainParams) -> Result<Operator> {
    Ok(build_xxx_staggered(params)?.scale_real(-1.0))
}

/// Lipkin-Meshkov-Glick special case `S_x^2 + S_y^2 + omega S_z`.
pub fn build_lmg(space: HilbertSpace, omega: f64) -> Result<Operator> {
    op_combine_real(&[
        (1.0, &collective_power(Axis::X, 2, space)),
        (1.0, &collective_power(Axis::Y, 2, space)),
        (omega, &collective_spin(Axis::Z, space)),
    ])
}

/// `sum_n gamma_n S_z^n` with `gamma[0]` multiplying `S_z^1`.
pub fn build_zpoly(space: HilbertSpace, gamma: &[f64]) -> Result<Operator> {
    build_zpoly_capped(space, gamma, DEFAULT_MAX_ZPOLY_TERMS)
}

pub fn build_zpoly_capped(space: HilbertSpace, gamma: &[f64], max_terms: usize) -> Result<Operator> {
    if gamma.len() > max_terms {
        return Err(Error::param(format!(
            "{} polynomial coefficients exceeds the maximum of {max_terms}",
            gamma.len()
        )));
    }
    let diag: Vec<f64> = (0..space.dim())
        .map(|i| {
            let m = space.magnetization(i);
            gamma
                .iter()
                .enumerate()
                .map(|(k, g)| g * m.powi(k as i32 + 1))
                .sum()
        })
        .collect();
    Operator::diagonal(space, &diag)
}

/// Generalized two-axis counter-twisting
/// `chi (S_x S_y + S_y S_x) + alpha S_x + beta S_y + gamma S_z`.
pub fn build_tact(space: HilbertSpace, chi: f64, alpha: f64, beta: f64, gamma: f64) -> Result<Operator> {
    let sx = collective_spin(Axis::X, space);
    let sy = collective_spin(Axis::Y, space);
    let sz = collective_spin(Axis::Z, space);
    let anti = sx.mul(&sy)?.add(&sy.mul(&sx)?)?;
    let op = op_combine_real(&[(chi, &anti), (alpha, &sx), (beta, &sy), (gamma, &sz)])?;
    // SxSy + SySx is Hermitian, but the flag on a product is measured,
    // so re-measure the sum as a whole.
    Operator::new(space, op.matrix().clone())
}

/// How the odd-`N` matching constant is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum OddConstant {
    /// A fixed constant for every odd `N`.
    Fixed(f64),
    /// `sqrt(3 N^2 / (2 (N^2 - 1)))`, the value for which the second-order
    /// twisting strength of the chain equals `chi` at large `beta`.
    #[default]
    SizeDependent,
}

impl OddConstant {
    pub fn value(&self, n_sites: usize) -> f64 {
        match *self {
            OddConstant::Fixed(c) => c,
            OddConstant::SizeDependent => {
                let n2 = (n_sites * n_sites) as f64;
                (3.0 * n2 / (2.0 * (n2 - 1.0))).sqrt()
            }
        }
    }
}

impl fmt::Display for OddConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OddConstant::Fixed(c) => write!(f, "{c}"),
            OddConstant::SizeDependent => f.write_str("auto"),
        }
    }
}

impl FromStr for OddConstant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "auto" => Ok(OddConstant::SizeDependent),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|c| c.is_finite() && *c > 0.0)
                .map(OddConstant::Fixed)
                .ok_or_else(|| Error::param(format!("odd constant must be 'auto' or a positive number, got '{other}'"))),
        }
    }
}

/// Relation between the staggered field and the exchange that makes the
/// chain twist at rate `chi`:
/// `alpha = c_N sqrt(N - 1) sqrt(chi^2 + chi beta)` with `c_N = 1` for
/// even `N` and the [`OddConstant`] otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MatchingRule {
    pub odd: OddConstant,
}

impl MatchingRule {
    pub fn with_odd(odd: OddConstant) -> Self {
        MatchingRule { odd }
    }

    pub fn parity_constant(&self, n_sites: usize) -> f64 {
        if n_sites.is_multiple_of(2) {
            1.0
        } else {
            self.odd.value(n_sites)
        }
    }

    pub fn alpha(&self, n_sites: usize, chi: f64, beta: f64) -> Result<f64> {
        check_matching_inputs(n_sites, chi)?;
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::param(format!("beta must be finite and >= 0, got {beta}")));
        }
        let c = self.parity_constant(n_sites);
        Ok(c * ((n_sites - 1) as f64).sqrt() * (chi * chi + chi * beta).sqrt())
    }

    /// Solves for `(alpha, beta)` with `beta = ratio * alpha` on the
    /// matching curve, i.e. the positive root of
    /// `alpha^2 - c^2 ratio chi alpha - c^2 chi^2 = 0`, `c = c_N sqrt(N-1)`.
    pub fn solve(&self, n_sites: usize, chi: f64, ratio: f64) -> Result<(f64, f64)> {
        check_matching_inputs(n_sites, chi)?;
        if !(ratio > 0.0 && ratio.is_finite()) {
            return Err(Error::param(format!("ratio must be finite and > 0, got {ratio}")));
        }
        let c2 = self.parity_constant(n_sites).powi(2) * (n_sites - 1) as f64;
        let b = c2 * ratio * chi;
        let disc = b * b + 4.0 * c2 * chi * chi;
        let alpha = 0.5 * (b + disc.sqrt());
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::numeric(format!("no positive root for ratio {ratio}, chi {chi}")));
        }
        Ok((alpha, ratio * alpha))
    }
}

fn check_matching_inputs(n_sites: usize, chi: f64) -> Result<()> {
    if n_sites < 2 {
        return Err(Error::param(format!("matching needs N >= 2, got {n_sites}")));
    }
    if !(chi > 0.0 && chi.is_finite()) {
        return Err(Error::param(format!("chi must be finite and > 0, got {chi}")));
    }
    Ok(())
}

/// Matched staggered-field amplitude under the default [`MatchingRule`].
pub fn alpha_matched(n_sites: usize, chi: f64, beta: f64) -> Result<f64> {
    MatchingRule::default().alpha(n_sites, chi, beta)
}

/// `(alpha, beta)` on the default matching curve with `beta / alpha = ratio`.
pub fn solve_params(n_sites: usize, chi: f64, ratio: f64) -> Result<(f64, f64)> {
    MatchingRule::default().solve(n_sites, chi, ratio)
}

/// Which Hamiltonian a [`HamiltonianSpec`] describes, with kind-specific extras.
#[derive(Debug, Clone, PartialEq)]
pub enum HamiltonianKind {
    Oat,
    Xx,
    XxxStaggered,
    /// `-XxxStaggered`, see [`analog_simulator`].
    AnalogSimulator,
    Lmg { omega: f64 },
    ZPoly { gamma: Vec<f64> },
    Tact { chi: f64, alpha: f64, beta: f64, gamma: f64 },
}

impl HamiltonianKind {
    pub fn name(&self) -> &'static str {
        match self {
            HamiltonianKind::Oat => "oat",
            HamiltonianKind::Xx => "xx",
            HamiltonianKind::XxxStaggered => "xxx_staggered",
            HamiltonianKind::AnalogSimulator => "analog_simulator",
            HamiltonianKind::Lmg { .. } => "lmg",
            HamiltonianKind::ZPoly { .. } => "zpoly",
            HamiltonianKind::Tact { .. } => "tact",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec {
    pub kind: HamiltonianKind,
    pub params: SpinChainParams,
}

impl HamiltonianSpec {
    pub fn new(kind: HamiltonianKind, params: SpinChainParams) -> Self {
        HamiltonianSpec { kind, params }
    }

    pub fn build(&self) -> Result<Operator> {
        let space = || self.params.space();
        match &self.kind {
            HamiltonianKind::Oat => build_oat(&self.params),
            HamiltonianKind::Xx => build_xx(&self.params),
            HamiltonianKind::XxxStaggered => build_xxx_staggered(&self.params),
            HamiltonianKind::AnalogSimulator => analog_simulator(&self.params),
            HamiltonianKind::Lmg { omega } => build_lmg(space()?, *omega),
            HamiltonianKind::ZPoly { gamma } => build_zpoly(space()?, gamma),
            HamiltonianKind::Tact { chi, alpha, beta, gamma } => build_tact(space()?, *chi, *alpha, *beta, *gamma),
        }
    }

    /// Flat `key = value` pairs, in a fixed order.
    pub fn to_key_values(&self) -> Vec<(String, String)> {
        let p = &self.params;
        let mut kv = vec![
            ("hamiltonian".to_string(), self.kind.name().to_string()),
            ("n_sites".to_string(), p.n_sites.to_string()),
            ("chi".to_string(), p.chi.to_string()),
            ("beta".to_string(), p.beta.to_string()),
            ("alpha".to_string(), p.alpha.to_string()),
            ("omega".to_string(), p.omega.to_string()),
            ("periodic".to_string(), p.periodic.to_string()),
        ];
        match &self.kind {
            HamiltonianKind::Lmg { omega } => kv.push(("lmg_omega".into(), omega.to_string())),
            HamiltonianKind::ZPoly { gamma } => kv.push((
                "zpoly_gamma".into(),
                gamma.iter().map(f64::to_string).collect::<Vec<_>>().join(","),
            )),
            HamiltonianKind::Tact { chi, alpha, beta, gamma } => {
                kv.push(("tact_chi".into(), chi.to_string()));
                kv.push(("tact_alpha".into(), alpha.to_string()));
                kv.push(("tact_beta".into(), beta.to_string()));
                kv.push(("tact_gamma".into(), gamma.to_string()));
            }
            _ => {}
        }
        kv
    }

    pub fn from_key_values(kv: &BTreeMap<String, String>) -> Result<Self> {
        let get = |k: &str| kv.get(k).map(|s| s.trim());
        let num = |k: &str, default: f64| -> Result<f64> {
            match get(k) {
                None => Ok(default),
                Some(v) => v
                    .parse()
                    .map_err(|_| Error::param(format!("{k}: '{v}' is not a number"))),
            }
        };
        let n_sites = match get("n_sites") {
            Some(v) => v
                .parse()
                .map_err(|_| Error::param(format!("n_sites: '{v}' is not an integer")))?,
            None => return Err(Error::param("missing key n_sites")),
        };
        let alpha = num("alpha", 0.0)?;
        let mut params = SpinChainParams::new(n_sites, num("chi", 1.0)?, num("beta", 0.0)?, alpha);
        params.omega = num("omega", params.omega)?;
        params.periodic = match get("periodic") {
            None => false,
            Some(v) => v
                .parse()
                .map_err(|_| Error::param(format!("periodic: '{v}' is not true/false")))?,
        };
        let kind = match get("hamiltonian").unwrap_or("oat") {
            "oat" => HamiltonianKind::Oat,
            "xx" => HamiltonianKind::Xx,
            "xxx_staggered" => HamiltonianKind::XxxStaggered,
            "analog_simulator" => HamiltonianKind::AnalogSimulator,
            "lmg" => HamiltonianKind::Lmg { omega: num("lmg_omega", 0.0)? },
            "zpoly" => HamiltonianKind::ZPoly {
                gamma: match get("zpoly_gamma") {
                    None | Some("") => Vec::new(),
                    Some(list) => list
                        .split(',')
                        .map(|s| {
                            s.trim()
                                .parse()
                                .map_err(|_| Error::param(format!("zpoly_gamma: '{s}' is not a number")))
                        })
                        .collect::<Result<_>>()?,
                },
            },
            "tact" => HamiltonianKind::Tact {
                chi: num("tact_chi", 0.0)?,
                alpha: num("tact_alpha", 0.0)?,
                beta: num("tact_beta", 0.0)?,
                gamma: num("tact_gamma", 0.0)?,
            },
            other => return Err(Error::param(format!("unknown hamiltonian '{other}'"))),
        };
        Ok(HamiltonianSpec { kind, params })
    }
}

/// Largest entry of `AB - BA`.
pub(crate) fn commutator_max_norm(a: &Operator, b: &Operator) -> Result<f64> {
    let ab = a.mul(b)?;
    let ba = b.mul(a)?;
    Ok(ab.sub(&ba)?.max_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C64;

    fn params(n: usize, chi: f64, beta: f64, alpha: f64) -> SpinChainParams {
        SpinChainParams::new(n, chi, beta, alpha)
    }

    fn diag_re(op: &Operator) -> Vec<f64> {
        op.matrix().diagonal().iter().map(|d| d.re).collect()
    }

    fn rel_comm(a: &Operator, b: &Operator) -> f64 {
        let scale = a.max_norm().max(1e-300) * b.max_norm().max(1e-300);
        commutator_max_norm(a, b).unwrap() / scale
    }

    #[test]
    fn oat_examples() {
        assert_eq!(diag_re(&build_oat(&params(1, 1.0, 0.0, 0.0)).unwrap()), vec![0.25, 0.25]);
        assert_eq!(diag_re(&build_oat(&params(2, 1.0, 0.0, 0.0)).unwrap()), vec![1.0, 0.0, 0.0, 1.0]);
        let h = build_oat(&params(3, 2.0, 0.0, 0.0)).unwrap();
        assert!(h.matrix().is_diagonal());
        let mut d = diag_re(&h);
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(d, vec![0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 4.5, 4.5]);
        // |uuu> and |ddd> carry m = +-3/2
        assert_eq!(diag_re(&h)[0], 4.5);
        assert_eq!(diag_re(&h)[7], 4.5);
    }

    #[test]
    fn xx_examples() {
        let h = build_xx(&params(2, 1.0, 4.0, 0.0)).unwrap().to_dense();
        for r in 0..4 {
            for c in 0..4 {
                let want = if (r, c) == (1, 2) || (r, c) == (2, 1) { 2.0 } else { 0.0 };
                assert!((h[(r, c)] - C64::new(want, 0.0)).norm() < 1e-15);
            }
        }
        let zero = build_xx(&params(4, 1.0, 0.0, 0.0)).unwrap();
        assert_eq!(zero.matrix().nnz(), 0);
        assert!(build_xx(&params(1, 1.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn xx_conserves_magnetization_and_commutes_with_oat() {
        for n in 2..=6 {
            let p = params(n, 1.3, 2.7, 0.0);
            let xx = build_xx(&p).unwrap();
            let sz = collective_spin(Axis::Z, p.space().unwrap());
            assert!(rel_comm(&xx, &sz) <= 1e-12);
            assert!(rel_comm(&xx, &build_oat(&p).unwrap()) <= 1e-12);
        }
    }

    #[test]
    fn staggered_field_examples() {
        let h = build_xxx_staggered(&params(2, 1.0, 0.0, 2.0)).unwrap();
        assert!(h.matrix().is_diagonal());
        assert_eq!(diag_re(&h), vec![0.0, -2.0, 2.0, 0.0]);

        let p = params(5, 1.0, 3.1, 0.7);
        let h = build_xxx_staggered(&p).unwrap();
        assert!(h.is_hermitian());
        assert!(rel_comm(&h, &build_oat(&p).unwrap()) <= 1e-12);
        assert!(rel_comm(&h, &collective_spin(Axis::Z, p.space().unwrap())) <= 1e-12);

        let iso = build_xxx_staggered(&params(4, 1.0, 1.7, 0.0)).unwrap();
        for a in Axis::ALL {
            assert!(rel_comm(&iso, &collective_spin(a, HilbertSpace::new(4).unwrap())) <= 1e-12);
        }
        assert!(build_xxx_staggered(&params(1, 1.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn field_terms_are_exactly_diagonal() {
        let s = HilbertSpace::new(5).unwrap();
        let f = z_field(s, &staggered_fields(5, 1.7)).unwrap();
        assert!(f.matrix().is_diagonal());
        assert!(build_oat(&params(5, 0.3, 0.0, 0.0)).unwrap().matrix().is_diagonal());
    }

    #[test]
    fn periodic_flag_adds_closing_bond() {
        let mut p = params(4, 1.0, 1.0, 0.0);
        let open = build_xx(&p).unwrap();
        p.periodic = true;
        let closed = build_xx(&p).unwrap();
        assert!(closed.matrix().nnz() > open.matrix().nnz());
    }

    #[test]
    fn lmg_zpoly_tact_examples() {
        let s1 = HilbertSpace::new(1).unwrap();
        let lmg = build_lmg(s1, 0.0).unwrap();
        assert_eq!(lmg, Operator::identity(s1).scale_real(0.5));

        let s3 = HilbertSpace::new(3).unwrap();
        let zp = build_zpoly(s3, &[0.0, 1.0]).unwrap();
        assert_eq!(zp, build_oat(&params(3, 1.0, 0.0, 0.0)).unwrap());
        assert!(build_zpoly(s3, &[1.0; 9]).is_err());

        let tact = build_tact(s3, 0.7, 0.2, -0.4, 1.1).unwrap();
        assert!(tact.is_hermitian());
        assert!(build_lmg(s3, 0.3).unwrap().is_hermitian());
    }

    #[test]
    fn commutation_ledger_entries() {
        for n in [2usize, 3, 4, 5, 6] {
            let s = HilbertSpace::new(n).unwrap();
            let uniform = build_xxx_field(s, 1.3, &vec![0.8; n], false).unwrap();
            let bare = build_xxx_field(s, 1.3, &vec![0.0; n], false).unwrap();
            assert!(rel_comm(&uniform, &build_lmg(s, 0.45).unwrap()) <= 1e-12, "lmg n={n}");
            assert!(rel_comm(&uniform, &build_zpoly(s, &[0.3, -1.2, 0.5]).unwrap()) <= 1e-12, "zpoly n={n}");
            assert!(rel_comm(&bare, &build_tact(s, 0.9, 0.4, -0.6, 0.25).unwrap()) <= 1e-12, "tact n={n}");
        }
    }

    #[test]
    fn alpha_matched_examples() {
        let fixed = MatchingRule::with_odd(OddConstant::Fixed(ODD_CHAIN_CONSTANT));
        let a6 = fixed.alpha(6, 1.0, 100.0).unwrap();
        assert!((a6 - 5f64.sqrt() * 101f64.sqrt()).abs() < 1e-12);
        assert!((a6 - 22.472).abs() < 1e-3);
        let a5 = fixed.alpha(5, 1.0, 100.0).unwrap();
        assert!((a5 - 1.299 * 2.0 * 101f64.sqrt()).abs() < 1e-12);
        assert!((a5 - 26.109).abs() < 1e-3);
        assert_eq!(alpha_matched(2, 1.0, 0.0).unwrap(), 1.0);
        assert!(alpha_matched(4, 0.0, 1.0).is_err());
        assert!(alpha_matched(4, -1.0, 1.0).is_err());
        assert!(alpha_matched(1, 1.0, 1.0).is_err());
    }

    #[test]
    fn size_dependent_odd_constant() {
        let c = OddConstant::SizeDependent;
        assert!((c.value(3) - 0.75 * 3f64.sqrt()).abs() < 1e-15);
        assert!((c.value(5) - 1.25).abs() < 1e-15);
        assert!((c.value(3) - ODD_CHAIN_CONSTANT).abs() < 1e-3);
        assert_eq!("auto".parse::<OddConstant>().unwrap(), c);
        assert_eq!("1.299".parse::<OddConstant>().unwrap(), OddConstant::Fixed(1.299));
        assert!("-1".parse::<OddConstant>().is_err());
    }

    #[test]
    fn solve_params_examples() {
        let fixed = MatchingRule::with_odd(OddConstant::Fixed(ODD_CHAIN_CONSTANT));
        let (a5, b5) = fixed.solve(5, 1.0, 40.0).unwrap();
        assert!((a5 - 270.01).abs() < 5e-3, "alpha = {a5}");
        assert!((b5 - 10800.4).abs() < 0.05, "beta = {b5}");
        assert!((fixed.alpha(5, 1.0, b5).unwrap() - a5).abs() <= 1e-10 * a5);

        let (a6, b6) = solve_params(6, 1.0, 40.0).unwrap();
        // root of a^2 - 200 a - 5 = 0
        let root = 100.0 + (100.0f64 * 100.0 + 5.0).sqrt();
        assert!((a6 - root).abs() < 1e-10);
        assert!((a6 - 200.025).abs() < 1e-3);
        assert_eq!(b6, 40.0 * a6);
        assert!(solve_params(6, 1.0, 0.0).is_err());
        assert!(solve_params(6, 0.0, 1.0).is_err());
    }

    #[test]
    fn spec_round_trips_through_key_values() {
        let mut p = params(6, 1.0, 8001.0, 200.0);
        p.periodic = true;
        for kind in [
            HamiltonianKind::XxxStaggered,
            HamiltonianKind::ZPoly { gamma: vec![0.5, -1.0, 2.0] },
            HamiltonianKind::Tact { chi: 1.0, alpha: 0.1, beta: 0.2, gamma: 0.3 },
            HamiltonianKind::Lmg { omega: 0.7 },
        ] {
            let spec = HamiltonianSpec::new(kind, p);
            let map: BTreeMap<String, String> = spec.to_key_values().into_iter().collect();
            assert_eq!(HamiltonianSpec::from_key_values(&map).unwrap(), spec);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn solve_params_lies_on_matching_curve(n in 2usize..=12, chi in 0.05f64..5.0, ratio in 0.1f64..200.0, fixed in proptest::bool::ANY) {
                let rule = if fixed { MatchingRule::with_odd(OddConstant::Fixed(ODD_CHAIN_CONSTANT)) } else { MatchingRule::default() };
                let (alpha, beta) = rule.solve(n, chi, ratio).unwrap();
                prop_assert!(alpha > 0.0);
                prop_assert!((beta / alpha - ratio).abs() <= 1e-12 * ratio);
                let back = rule.alpha(n, chi, beta).unwrap();
                prop_assert!((back - alpha).abs() <= 1e-10 * alpha);
            }
        }
    }
}
