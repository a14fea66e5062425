//! Brauer classes presented as B-fields `B / ell` relative to a Picard
//! sublattice of the K3^[n] lattice.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{content, factorize};
use crate::error::{invalid, Error, Result};
use crate::lattice::{build_k3n_lattice, IntegerLattice, LatticeVector};
use crate::matrix::{self, Matrix};

/// A primitive sublattice `Pic` of the ambient lattice together with the
/// data derived from it: the restricted form and an integral basis of `Pic^perp`.
#[derive(Clone, Debug)]
pub struct PicardEmbedding {
    ambient: IntegerLattice,
    pic_basis: Vec<LatticeVector>,
    pic_gram: Matrix,
    transcendental_basis: Vec<LatticeVector>,
    // v * basis_change has Pic in the first mu coordinates
    basis_change: Matrix,
    // pic_basis * basis_change = [pic_reduction | 0]
    pic_reduction: Matrix,
}

impl PicardEmbedding {
    pub fn new(ambient: IntegerLattice, pic_basis: Vec<LatticeVector>) -> Result<Self> {
        let rank = ambient.rank();
        let mu = pic_basis.len();
        if mu == 0 {
            return invalid("Picard basis must be nonempty");
        }
        if mu >= rank {
            return invalid("Picard rank must be smaller than the ambient rank");
        }
        for (i, p) in pic_basis.iter().enumerate() {
            if p.len() != rank {
                return invalid(format!(
                    "Picard vector {i} has length {}, expected {rank}",
                    p.len()
                ));
            }
        }
        let coords: Matrix = pic_basis.iter().map(|p| p.0.clone()).collect();
        let invariants = matrix::smith_invariants(&coords);
        if invariants.len() < mu {
            return Err(Error::Validation(
                "Picard basis vectors are linearly dependent".into(),
            ));
        }
        if invariants.iter().any(|d| !d.is_one()) {
            return Err(Error::Validation(
                "Picard basis does not span a primitive sublattice".into(),
            ));
        }
        let pic_gram: Matrix = pic_basis
            .iter()
            .map(|x| {
                pic_basis
                    .iter()
                    .map(|y| ambient.pairing_unchecked(x, y))
                    .collect()
            })
            .collect();
        if matrix::determinant(&pic_gram).is_zero() {
            return Err(Error::Validation("Picard form is degenerate".into()));
        }

        let (h, basis_change, _) = matrix::column_echelon(&coords);
        let pic_reduction: Matrix = h.iter().map(|row| row[..mu].to_vec()).collect();

        // T = kernel of v -> (q(p_i, v))_i
        let pairing_rows: Matrix = pic_basis
            .iter()
            .map(|p| ambient.dual_coords(p))
            .collect::<Result<_>>()?;
        let transcendental_basis = matrix::integer_kernel(&pairing_rows, rank)
            .into_iter()
            .map(LatticeVector)
            .collect();

        Ok(PicardEmbedding {
            ambient,
            pic_basis,
            pic_gram,
            transcendental_basis,
            basis_change,
            pic_reduction,
        })
    }

    pub fn ambient(&self) -> &IntegerLattice {
        &self.ambient
    }

    pub fn pic_basis(&self) -> &[LatticeVector] {
        &self.pic_basis
    }

    /// Gram matrix of the restricted form, the quadratic form `Q` on `Pic`.
    pub fn pic_gram(&self) -> &Matrix {
        &self.pic_gram
    }

    pub fn transcendental_basis(&self) -> &[LatticeVector] {
        &self.transcendental_basis
    }

    pub fn picard_rank(&self) -> usize {
        self.pic_basis.len()
    }

    pub fn from_pic_coords(&self, x: &[BigInt]) -> LatticeVector {
        LatticeVector::combination(x, &self.pic_basis, self.ambient.rank())
    }

    fn adapted_coords(&self, v: &LatticeVector) -> Vec<BigInt> {
        let row = vec![v.0.clone()];
        matrix::mul(&row, &self.basis_change).remove(0)
    }

    /// Coordinates of the image of `v` in the free group `ambient / Pic`.
    pub fn quotient_coords(&self, v: &LatticeVector) -> Vec<BigInt> {
        self.adapted_coords(v).split_off(self.picard_rank())
    }

    /// Coordinates of `v` in the Picard basis, or `None` if `v` is not in `Pic`.
    pub fn pic_coords(&self, v: &LatticeVector) -> Option<Vec<BigInt>> {
        if v.len() != self.ambient.rank() {
            return None;
        }
        let mu = self.picard_rank();
        let y = self.adapted_coords(v);
        if y[mu..].iter().any(|c| !c.is_zero()) {
            return None;
        }
        // x * pic_reduction = y[..mu] with pic_reduction lower triangular
        let h = &self.pic_reduction;
        let mut x = vec![BigInt::zero(); mu];
        for j in (0..mu).rev() {
            let mut rhs = y[j].clone();
            for i in j + 1..mu {
                rhs -= &x[i] * &h[i][j];
            }
            let (q, r) = rhs.div_rem(&h[j][j]);
            if !r.is_zero() {
                return None;
            }
            x[j] = q;
        }
        Some(x)
    }
}

/// Index of the transcendental lattice inside `ambient / Pic`, from the Smith
/// invariants of the composite map `T -> ambient / Pic`.
pub fn compute_index_ix(emb: &PicardEmbedding) -> Result<BigInt> {
    let image: Matrix = emb
        .transcendental_basis
        .iter()
        .map(|t| emb.quotient_coords(t))
        .collect();
    let size = emb.ambient.rank() - emb.picard_rank();
    let invariants = matrix::smith_invariants(&image);
    if image.len() != size || invariants.len() != size {
        return invalid("degenerate Picard embedding: transcendental image has lower rank");
    }
    Ok(invariants.iter().product())
}

/// A Brauer class `[B / ell]` together with its Picard embedding.
#[derive(Clone, Debug)]
pub struct BrauerScenario {
    pub n: u32,
    pub embedding: PicardEmbedding,
    pub b_class: LatticeVector,
    pub ell: BigInt,
    /// Designated primitive polarization, used by the weak-bound route.
    pub polarization: Option<LatticeVector>,
}

impl BrauerScenario {
    /// Builds the scenario on the standard K3^[n] lattice and checks every invariant.
    pub fn new(
        n: u32,
        pic_basis: Vec<LatticeVector>,
        b_class: LatticeVector,
        ell: BigInt,
        polarization: Option<LatticeVector>,
    ) -> Result<Self> {
        let ambient = build_k3n_lattice(n)?;
        let embedding = PicardEmbedding::new(ambient, pic_basis)?;
        let s = BrauerScenario {
            n,
            embedding,
            b_class,
            ell,
            polarization,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn lattice(&self) -> &IntegerLattice {
        self.embedding.ambient()
    }

    pub fn validate(&self) -> Result<()> {
        let lat = self.lattice();
        if !self.ell.is_positive() {
            return Err(Error::Validation(format!("ell must be positive, got {}", self.ell)));
        }
        if self.b_class.len() != lat.rank() {
            return Err(Error::Validation(format!(
                "B has length {}, expected {}",
                self.b_class.len(),
                lat.rank()
            )));
        }
        for (i, p) in self.embedding.pic_basis().iter().enumerate() {
            if !lat.pairing_unchecked(&self.b_class, p).is_zero() {
                return Err(Error::Validation(format!(
                    "B not transcendental: q(B, pic[{i}]) != 0"
                )));
            }
        }
        let g = self.b_class.content().gcd(&self.ell);
        if !g.is_one() {
            let p = factorize(&g)
                .ok()
                .and_then(|f| f.first().map(|(p, _)| p.clone()))
                .unwrap_or(g);
            return Err(Error::Validation(format!(
                "B divisible by prime factor {p} of ell"
            )));
        }
        if let Some(pol) = &self.polarization {
            if pol.len() != lat.rank() {
                return Err(Error::Validation("polarization has wrong length".into()));
            }
            if self.embedding.pic_coords(pol).is_none() {
                return Err(Error::Validation("polarization not in Pic".into()));
            }
            if pol.is_zero() || !pol.content().is_one() {
                return Err(Error::Validation("polarization not primitive".into()));
            }
            if !lat.pairing_unchecked(pol, pol).is_positive() {
                return Err(Error::Validation("polarization has non-positive norm".into()));
            }
        }
        Ok(())
    }

    /// `q(B)`.
    pub fn q_b(&self) -> BigInt {
        self.lattice().pairing_unchecked(&self.b_class, &self.b_class)
    }
}

/// Order of the class `B / ell` in `(ambient / Pic) (x) Q/Z`.
pub fn period_of(s: &BrauerScenario) -> BigInt {
    let c = content(&s.embedding.quotient_coords(&s.b_class));
    &s.ell / s.ell.gcd(&c)
}

pub fn is_nonspecial(s: &BrauerScenario) -> bool {
    s.q_b().gcd(&s.ell).is_one()
}
