//! Spin-1/2 operators and states on an `N`-site chain.
//!
//! Collective spins follow `S_a = 1/2 sum_i sigma_i^a`, so the coherent
//! state along `+x` has `S_x = N/2`.

mod operator;
mod space;
mod sparse;
mod state;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;

pub use operator::{op_combine, op_combine_real, Operator, HERMITIAN_TOL};
pub use space::{HilbertSpace, DEFAULT_MAX_SITES};
pub use sparse::SparseMatrix;
pub use state::{coherent_x_state, ghz_state, polarized_state, StateVector, NORM_TOL};

pub(crate) use state::{inner, l2_norm};

use crate::error::{Error, Result};

/// Cartesian spin axis, also used to name Pauli matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            other => Err(Error::param(format!("unknown axis '{other}'"))),
        }
    }
}

/// Pauli matrix `kind` acting on `site` (1-based), identity elsewhere.
pub fn pauli_site(kind: Axis, site: usize, space: HilbertSpace) -> Result<Operator> {
    space.check_site(site)?;
    let mask = space.site_mask(site);
    let entries = (0..space.dim()).map(|col| {
        let down = col & mask != 0;
        match kind {
            Axis::X => (col ^ mask, col, C64::new(1.0, 0.0)),
            // sigma_y |up> = i |down>, sigma_y |down> = -i |up>
            Axis::Y => (col ^ mask, col, C64::new(0.0, if down { -1.0 } else { 1.0 })),
            Axis::Z => (col, col, C64::new(if down { -1.0 } else { 1.0 }, 0.0)),
        }
    });
    Ok(Operator::from_parts(
        space,
        SparseMatrix::from_triplets(space.dim(), entries),
        true,
    ))
}

/// Product `sigma_i^a sigma_j^b` of Paulis on two distinct sites.
pub fn pauli_pair(a: Axis, i: usize, b: Axis, j: usize, space: HilbertSpace) -> Result<Operator> {
    let left = pauli_site(a, i, space)?;
    let right = pauli_site(b, j, space)?;
    left.mul(&right)
}

/// Collective spin `S_axis = 1/2 sum_i sigma_i^axis`.
pub fn collective_spin(axis: Axis, space: HilbertSpace) -> Operator {
    if axis == Axis::Z {
        let diag: Vec<f64> = (0..space.dim()).map(|i| space.magnetization(i)).collect();
        return Operator::diagonal(space, &diag).expect("diagonal length equals dim");
    }
    let sites: Vec<Operator> = (1..=space.n_sites())
        .map(|s| pauli_site(axis, s, space).expect("site within range"))
        .collect();
    let terms: Vec<(f64, &Operator)> = sites.iter().map(|op| (0.5, op)).collect();
    op_combine_real(&terms).expect("all terms share one space")
}

/// `S_axis^k` for a collective spin.
pub fn collective_power(axis: Axis, k: u32, space: HilbertSpace) -> Operator {
    let s = collective_spin(axis, space);
    let mut out = Operator::identity(space);
    for _ in 0..k {
        out = out.mul(&s).expect("same space");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::expect;
    use proptest::prelude::*;

    fn space(n: usize) -> HilbertSpace {
        HilbertSpace::new(n).unwrap()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn assert_dense_eq(op: &Operator, expected: &[[C64; 4]]) {
        let d = op.to_dense();
        for (r, row) in expected.iter().enumerate() {
            for (cidx, &v) in row.iter().enumerate() {
                assert!((d[(r, cidx)] - v).norm() < 1e-15, "entry ({r},{cidx}) = {}", d[(r, cidx)]);
            }
        }
    }

    fn commutator_max(a: &Operator, b: &Operator) -> f64 {
        a.mul(b).unwrap().sub(&b.mul(a).unwrap()).unwrap().max_norm()
    }

    #[test]
    fn single_site_paulis() {
        let s1 = space(1);
        let z = pauli_site(Axis::Z, 1, s1).unwrap().to_dense();
        assert_eq!(z[(0, 0)], c(1.0, 0.0));
        assert_eq!(z[(1, 1)], c(-1.0, 0.0));
        assert_eq!(z[(0, 1)], c(0.0, 0.0));
        let x = pauli_site(Axis::X, 1, s1).unwrap().to_dense();
        assert_eq!(x[(0, 1)], c(1.0, 0.0));
        assert_eq!(x[(1, 0)], c(1.0, 0.0));
        assert_eq!(x[(0, 0)], c(0.0, 0.0));
        let y = pauli_site(Axis::Y, 1, s1).unwrap().to_dense();
        assert_eq!(y[(0, 1)], c(0.0, -1.0));
        assert_eq!(y[(1, 0)], c(0.0, 1.0));
    }

    #[test]
    fn second_site_z_follows_basis_order() {
        let z2 = pauli_site(Axis::Z, 2, space(2)).unwrap();
        assert_eq!(
            z2.matrix().diagonal(),
            vec![c(1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)]
        );
    }

    #[test]
    fn pauli_site_structure() {
        let s = space(5);
        for kind in Axis::ALL {
            for site in 1..=5 {
                let p = pauli_site(kind, site, s).unwrap();
                assert!(p.is_hermitian());
                assert_eq!(p.matrix().nnz(), s.dim());
                let sq = p.mul(&p).unwrap();
                assert_eq!(sq, Operator::identity(s));
            }
        }
        assert_eq!(
            pauli_site(Axis::X, 0, s).unwrap_err(),
            Error::SiteIndex { site: 0, n_sites: 5 }
        );
        assert!(pauli_site(Axis::X, 6, s).is_err());
    }

    #[test]
    fn collective_spin_examples() {
        let sz = collective_spin(Axis::Z, space(2));
        assert_eq!(
            sz.matrix().diagonal(),
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]
        );
        let sx = collective_spin(Axis::X, space(1)).to_dense();
        assert_eq!(sx[(0, 1)], c(0.5, 0.0));
        assert_eq!(sx[(1, 0)], c(0.5, 0.0));
    }

    #[test]
    fn sz_spectrum_is_binomial() {
        let s = space(4);
        let sz = collective_spin(Axis::Z, s);
        let mut counts = std::collections::BTreeMap::new();
        for d in sz.matrix().diagonal() {
            *counts.entry((2.0 * d.re) as i64).or_insert(0) += 1;
        }
        let got: Vec<(i64, i32)> = counts.into_iter().collect();
        assert_eq!(got, vec![(-4, 1), (-2, 4), (0, 6), (2, 4), (4, 1)]);
    }

    #[test]
    fn coherent_state_examples() {
        let psi1 = coherent_x_state(space(1));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(psi1.amplitudes().iter().all(|a| (a - c(h, 0.0)).norm() < 1e-15));
        let psi2 = coherent_x_state(space(2));
        assert!(psi2.amplitudes().iter().all(|a| (a - c(0.5, 0.0)).norm() < 1e-15));

        let s5 = space(5);
        let psi = coherent_x_state(s5);
        assert!((psi.norm() - 1.0).abs() < NORM_TOL);
        assert!((expect(&collective_spin(Axis::X, s5), &psi).unwrap() - 2.5).abs() < 1e-12);
        assert!(expect(&collective_spin(Axis::Y, s5), &psi).unwrap().abs() < 1e-12);
        assert!(expect(&collective_spin(Axis::Z, s5), &psi).unwrap().abs() < 1e-12);
        let sx_psi = collective_spin(Axis::X, s5).apply(&psi).unwrap();
        for (a, b) in sx_psi.iter().zip(psi.amplitudes()) {
            assert!((a - b * 2.5).norm() < 1e-12);
        }
    }

    #[test]
    fn ghz_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let g = ghz_state(space(2), Axis::Z, 0.0);
        let want = [c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)];
        for (a, b) in g.amplitudes().iter().zip(want) {
            assert!((a - b).norm() < 1e-15);
        }
        let g3 = ghz_state(space(3), Axis::Z, std::f64::consts::PI);
        assert!((g3.amplitudes()[0] - c(h, 0.0)).norm() < 1e-15);
        assert!((g3.amplitudes()[7] - c(-h, 0.0)).norm() < 1e-15);
        assert!(g3.amplitudes()[1..7].iter().all(|a| a.norm() < 1e-15));
        // |++> + |--> = |uu> + |dd> after expansion
        let gx = ghz_state(space(2), Axis::X, 0.0);
        for (a, b) in gx.amplitudes().iter().zip(want) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn op_combine_examples() {
        let s1 = space(1);
        let x = pauli_site(Axis::X, 1, s1).unwrap();
        let two_x = op_combine(&[(c(1.0, 0.0), &x), (c(1.0, 0.0), &x)]).unwrap();
        assert_eq!(two_x, x.scale_real(2.0));
        assert!(two_x.is_hermitian());

        let ix = op_combine(&[(c(0.0, 1.0), &x)]).unwrap();
        assert!(!ix.is_hermitian());

        let s2 = space(2);
        let xx = pauli_pair(Axis::X, 1, Axis::X, 2, s2).unwrap();
        let yy = pauli_pair(Axis::Y, 1, Axis::Y, 2, s2).unwrap();
        let bond = op_combine_real(&[(0.5, &xx), (0.5, &yy)]).unwrap();
        let z = c(0.0, 0.0);
        let o = c(1.0, 0.0);
        assert_dense_eq(&bond, &[[z, z, z, z], [z, z, o, z], [z, o, z, z], [z, z, z, z]]);

        let mixed = op_combine(&[(o, &x), (o, &xx)]);
        assert_eq!(mixed.unwrap_err(), Error::Dimension { expected: 2, found: 4 });
    }

    #[test]
    fn total_spin_of_coherent_state() {
        for n in 1..=6 {
            let s = space(n);
            let psi = coherent_x_state(s);
            let s2 = op_combine_real(&[
                (1.0, &collective_power(Axis::X, 2, s)),
                (1.0, &collective_power(Axis::Y, 2, s)),
                (1.0, &collective_power(Axis::Z, 2, s)),
            ])
            .unwrap();
            let j = n as f64 / 2.0;
            let out = s2.apply(&psi).unwrap();
            for (a, b) in out.iter().zip(psi.amplitudes()) {
                assert!((a - b * (j * (j + 1.0))).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn su2_commutation_relations() {
        for n in 1..=6 {
            let s = space(n);
            let [sx, sy, sz] = Axis::ALL.map(|a| collective_spin(a, s));
            let i = c(0.0, 1.0);
            for (a, b, cc) in [(&sx, &sy, &sz), (&sy, &sz, &sx), (&sz, &sx, &sy)] {
                let comm = a.mul(b).unwrap().sub(&b.mul(a).unwrap()).unwrap();
                let dev = op_combine(&[(c(1.0, 0.0), &comm), (-i, cc)]).unwrap();
                assert!(dev.max_norm() <= 1e-12, "n={n}: {}", dev.max_norm());
            }
        }
    }

    proptest! {
        #[test]
        fn paulis_on_different_sites_commute(n in 2usize..=6, i in 1usize..=6, j in 1usize..=6, a in 0usize..3, b in 0usize..3) {
            prop_assume!(i <= n && j <= n && i != j);
            let s = space(n);
            let pa = pauli_site(Axis::ALL[a], i, s).unwrap();
            let pb = pauli_site(Axis::ALL[b], j, s).unwrap();
            prop_assert!(commutator_max(&pa, &pb) <= 1e-12);
        }
    }
}
