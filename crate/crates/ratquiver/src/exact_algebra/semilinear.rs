use super::field::{Galois, QuadElement, QuadField};
use super::matrix::{QuadMatrix, QuadVector};
use super::AlgebraError;

/// A sigma-semilinear map v -> matrix * sigma(v).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemilinearMap {
    pub sigma: Galois,
    pub matrix: QuadMatrix,
}

impl SemilinearMap {
    pub fn new(sigma: Galois, matrix: QuadMatrix) -> Self {
        SemilinearMap { sigma, matrix }
    }

    pub fn identity(field: &QuadField, n: usize) -> Self {
        SemilinearMap { sigma: Galois::Id, matrix: QuadMatrix::identity(field, n) }
    }

    /// Entrywise conjugation on L^n.
    pub fn conjugation(field: &QuadField, n: usize) -> Self {
        SemilinearMap { sigma: Galois::Conj, matrix: QuadMatrix::identity(field, n) }
    }

    pub fn domain_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn codomain_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn apply(&self, v: &[QuadElement]) -> QuadVector {
        let tw: QuadVector = v.iter().map(|x| self.sigma.apply(x)).collect();
        self.matrix.mul_vec(&tw)
    }

    /// self after `first`: matrix = M2 * sigma2(M1), sigma = sigma2 sigma1.
    pub fn after(&self, first: &SemilinearMap) -> SemilinearMap {
        SemilinearMap {
            sigma: self.sigma.compose(first.sigma),
            matrix: &self.matrix * &first.matrix.galois(self.sigma),
        }
    }

    /// Precomposition with an L-linear map.
    pub fn after_linear(&self, first: &QuadMatrix) -> SemilinearMap {
        SemilinearMap { sigma: self.sigma, matrix: &self.matrix * &first.galois(self.sigma) }
    }

    /// Postcomposition with an L-linear map.
    pub fn then_linear(&self, next: &QuadMatrix) -> SemilinearMap {
        SemilinearMap { sigma: self.sigma, matrix: next * &self.matrix }
    }

    pub fn inverse(&self) -> Option<SemilinearMap> {
        let inv = self.matrix.inverse()?;
        Some(SemilinearMap { sigma: self.sigma, matrix: inv.galois(self.sigma) })
    }

    pub fn is_identity(&self) -> bool {
        self.sigma == Galois::Id && self.matrix.is_identity()
    }
}

/// K-basis of the fixed space of a c-semilinear involution, in L-coordinates.
///
/// Writes v = x + sqrt(d) y with x, y rational and solves the resulting
/// 2n x 2n rational system.
pub fn fixed_space(phi: &SemilinearMap) -> Result<Vec<QuadVector>, AlgebraError> {
    if phi.sigma != Galois::Conj || !phi.matrix.is_square() {
        return Err(AlgebraError::CocycleViolation("fixed_space needs a square c-semilinear map".into()));
    }
    if !phi.after(phi).is_identity() {
        return Err(AlgebraError::CocycleViolation("phi o phi is not the identity".into()));
    }
    let field = phi.matrix.field().clone();
    let n = phi.domain_dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let d = field.rational(field.d().clone());
    let a = phi.matrix.map(|x| field.rational(x.a().clone()));
    let b = phi.matrix.map(|x| field.rational(x.b().clone()));
    let id = QuadMatrix::identity(&field, n);
    // (A - I) x - d B y = 0 ;  B x - (A + I) y = 0
    let top = (&a - &id).hstack(&(-&b.scale(&d)));
    let bottom = b.hstack(&(-&(&a + &id)));
    let system = top.vstack(&bottom);
    let kernel = system.kernel_basis();
    let root = field.root();
    let basis: Vec<QuadVector> = kernel
        .iter()
        .map(|v| (0..n).map(|i| &v[i] + &(&v[n + i] * &root)).collect())
        .collect();
    if basis.len() != n {
        return Err(AlgebraError::CocycleViolation(format!(
            "fixed space has rational dimension {} instead of {n}",
            basis.len()
        )));
    }
    Ok(basis)
}

/// Descends an L-subspace stable under a c-semilinear involution.
///
/// `basis` spans W (as columns); `image_of` returns the involution applied to
/// a vector of W. Returns a K-basis of the fixed vectors.
pub fn descend_subspace(
    field: &QuadField,
    ambient: usize,
    basis: &[QuadVector],
    image_of: impl Fn(&[QuadElement]) -> QuadVector,
) -> Result<Vec<QuadVector>, AlgebraError> {
    let k = basis.len();
    if k == 0 {
        return Ok(Vec::new());
    }
    let b = QuadMatrix::from_columns(field, ambient, basis);
    let images: Vec<QuadVector> = basis.iter().map(|w| image_of(w)).collect();
    let rhs = QuadMatrix::from_columns(field, ambient, &images);
    let r = b
        .solve_right(&rhs)
        .ok_or_else(|| AlgebraError::CocycleViolation("subspace is not stable under the involution".into()))?;
    let coords = fixed_space(&SemilinearMap::new(Galois::Conj, r))?;
    Ok(coords.iter().map(|alpha| b.mul_vec(alpha)).collect())
}
