//! Exact symbolic verification that every special-fiber class representative
//! lifts to the generic fiber.
//!
//! The arithmetic lives in the polynomial ring `Q[s]` with the uniformizer
//! `s` formal and `π = s²`; the valuation ring is the localization at `s`
//! (scalars with no `s` in denominators — here always plain polynomials).
//! Lattices are column spans of `2n × m` polynomial matrices. The moduli
//! conditions checked for a pair `(F_i, F_{−i})`:
//!
//! - (a) each module is a locally direct summand of rank `n` in the ambient
//!   rank-`2n` lattice;
//! - (b) `F_{−i}` is the orthogonal complement of `F_i` under the split
//!   symmetric pairing with anti-diagonal Gram matrix;
//! - (c) `λ₁(F_{−i}) ⊆ F_i` and `λ₂(F_i) ⊆ F_{−i}`, where `λ₁` and `λ₂` are
//!   the diagonal transition maps of the trivialized lattice chain;
//! - (d) reduction mod `s` recovers the intended coordinate subspaces.
//!
//! Passing over `Q[s]` certifies the identities for every odd residue
//! characteristic, since all inclusions are identities over `Z[1/2][s]`.

use std::collections::BTreeSet;

use num::{BigRational, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::permissible::IsoSubset;
use crate::weyl::validate_rank;

/// A scalar of the quadratic extension: a polynomial in the formal square
/// root `s` of the uniformizer, with exact rational coefficients. Stored
/// densely, lowest degree first, with no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SqrtPiScalar {
    coeffs: Vec<BigRational>,
}

impl SqrtPiScalar {
    /// The zero scalar.
    pub fn zero() -> Self {
        SqrtPiScalar { coeffs: Vec::new() }
    }

    /// The unit scalar.
    pub fn one() -> Self {
        SqrtPiScalar::from_integer(1)
    }

    /// The square root `s` of the uniformizer.
    pub fn sqrt_pi() -> Self {
        SqrtPiScalar { coeffs: vec![BigRational::zero(), BigRational::one()] }
    }

    /// The uniformizer `π = s²`.
    pub fn pi() -> Self {
        SqrtPiScalar {
            coeffs: vec![BigRational::zero(), BigRational::zero(), BigRational::one()],
        }
    }

    /// An integer constant.
    pub fn from_integer(c: i64) -> Self {
        SqrtPiScalar::from_rational(BigRational::from_integer(c.into()))
    }

    /// A rational constant.
    pub fn from_rational(c: BigRational) -> Self {
        if c.is_zero() {
            SqrtPiScalar::zero()
        } else {
            SqrtPiScalar { coeffs: vec![c] }
        }
    }

    /// Build from raw coefficients (lowest degree first).
    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        let mut s = SqrtPiScalar { coeffs };
        s.trim();
        s
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    /// Whether this is the zero scalar.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The `s`-adic valuation: the lowest degree with a nonzero coefficient
    /// (`None` for zero).
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Whether this scalar is a unit of the valuation ring (valuation zero).
    pub fn is_unit(&self) -> bool {
        self.valuation() == Some(0)
    }

    /// The image under reduction mod `s` (the constant term).
    pub fn constant_term(&self) -> BigRational {
        self.coeffs.first().cloned().unwrap_or_else(BigRational::zero)
    }

    /// Exact division by `s^k`; panics if the valuation is smaller than `k`.
    fn shift_down(&self, k: usize) -> SqrtPiScalar {
        if self.is_zero() {
            return SqrtPiScalar::zero();
        }
        assert!(
            self.valuation().is_some_and(|v| v >= k),
            "inexact division by a power of the uniformizer"
        );
        SqrtPiScalar { coeffs: self.coeffs[k..].to_vec() }
    }

    /// Sum.
    pub fn add(&self, other: &SqrtPiScalar) -> SqrtPiScalar {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(len);
        for k in 0..len {
            let a = self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero);
            let b = other.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero);
            coeffs.push(a + b);
        }
        SqrtPiScalar::from_coeffs(coeffs)
    }

    /// Difference.
    pub fn sub(&self, other: &SqrtPiScalar) -> SqrtPiScalar {
        self.add(&other.neg())
    }

    /// Negation.
    pub fn neg(&self) -> SqrtPiScalar {
        SqrtPiScalar { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    /// Product.
    pub fn mul(&self, other: &SqrtPiScalar) -> SqrtPiScalar {
        if self.is_zero() || other.is_zero() {
            return SqrtPiScalar::zero();
        }
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (a, ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in other.coeffs.iter().enumerate() {
                coeffs[a + b] += ca * cb;
            }
        }
        SqrtPiScalar::from_coeffs(coeffs)
    }
}

impl std::fmt::Display for SqrtPiScalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            let mag = c.abs();
            match k {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}·")?;
                    }
                    match k {
                        1 => f.write_str("s")?,
                        _ => write!(f, "s^{k}")?,
                    }
                }
            }
            first = false;
        }
        Ok(())
    }
}

/// The split symmetric pairing on the trivialized rank-`2n` lattice: the
/// anti-diagonal unit Gram matrix, `⟨e_a, e_b⟩ = 1` iff `b = 2n + 1 − a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GramForm {
    n: usize,
}

impl GramForm {
    /// The form for half-rank `n`.
    pub fn new(n: usize) -> Result<Self> {
        validate_rank(n)?;
        Ok(GramForm { n })
    }

    /// The ambient dimension `2n`.
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// The Gram matrix entry at 1-based `(a, b)`.
    pub fn entry(&self, a: usize, b: usize) -> i64 {
        if a + b == 2 * self.n + 1 {
            1
        } else {
            0
        }
    }

    /// The pairing of two coordinate vectors.
    pub fn pairing(&self, x: &[SqrtPiScalar], y: &[SqrtPiScalar]) -> SqrtPiScalar {
        assert_eq!(x.len(), self.dim());
        assert_eq!(y.len(), self.dim());
        let mut acc = SqrtPiScalar::zero();
        for a in 0..self.dim() {
            acc = acc.add(&x[a].mul(&y[self.dim() - 1 - a]));
        }
        acc
    }
}

/// The diagonal entries of the two transition maps of the trivialized
/// lattice chain at vertex `i`: the first scales the outer `i` coordinates
/// on each side by `π`, the second scales the middle `2n − 2i` coordinates.
/// Their composite in either order is multiplication by `π`.
pub fn lambda_maps(i: usize, n: usize) -> Result<(Vec<SqrtPiScalar>, Vec<SqrtPiScalar>)> {
    validate_rank(n)?;
    if i > n {
        return Err(Error::InvalidIndex(format!("chain index {i} out of range 0..={n}")));
    }
    let outer = |j: usize| j < i || j >= 2 * n - i;
    let lambda1 = (0..2 * n)
        .map(|j| if outer(j) { SqrtPiScalar::pi() } else { SqrtPiScalar::one() })
        .collect();
    let lambda2 = (0..2 * n)
        .map(|j| if outer(j) { SqrtPiScalar::one() } else { SqrtPiScalar::pi() })
        .collect();
    Ok((lambda1, lambda2))
}

/// A finitely generated lattice in the ambient rank-`2n` space: the column
/// span, over the valuation ring, of a polynomial matrix.
#[derive(Debug, Clone)]
pub struct SqrtPiModule {
    dim: usize,
    cols: Vec<Vec<SqrtPiScalar>>,
}

/// A column echelon form over the valuation ring: pivot positions with their
/// valuations, reached by unimodular column operations only.
struct Echelon {
    cols: Vec<Vec<SqrtPiScalar>>,
    /// `(row, valuation)` per pivot column, in processing order.
    pivots: Vec<(usize, usize)>,
}

/// Reduce columns over the valuation ring by unimodular operations: repeatedly
/// pick the minimum-valuation entry among untouched rows and columns as a
/// pivot and clear its row from the remaining columns via
/// `c ← unit(p)·c − (entry/s^v)·p`. When a tracker is supplied, every
/// operation is mirrored on it, so the tracker columns under the zero
/// columns form a basis of the saturated kernel.
fn column_reduce(
    dim: usize,
    cols: &mut [Vec<SqrtPiScalar>],
    mut tracker: Option<&mut Vec<Vec<SqrtPiScalar>>>,
) -> Vec<(usize, usize)> {
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut pivot_rows: Vec<bool> = vec![false; dim];
    let mut start = 0;
    while start < cols.len() {
        // Minimum-valuation entry in the remaining submatrix.
        let mut best: Option<(usize, usize, usize)> = None; // (val, row, col)
        for (c, col) in cols.iter().enumerate().skip(start) {
            for (r, entry) in col.iter().enumerate() {
                if pivot_rows[r] {
                    continue;
                }
                if let Some(v) = entry.valuation() {
                    if best.is_none_or(|(bv, br, bc)| (v, r, c) < (bv, br, bc)) {
                        best = Some((v, r, c));
                    }
                }
            }
        }
        let Some((v, row, col)) = best else {
            break; // remaining columns are zero
        };
        cols.swap(start, col);
        if let Some(t) = tracker.as_deref_mut() {
            t.swap(start, col);
        }
        let p_hat = cols[start][row].shift_down(v);
        for c in start + 1..cols.len() {
            let g = cols[c][row].clone();
            if g.is_zero() {
                continue;
            }
            let g_tilde = g.shift_down(v); // valuation ≥ v by minimality
            let (head, tail) = cols.split_at_mut(c);
            for (x, p) in tail[0].iter_mut().zip(&head[start]) {
                *x = p_hat.mul(x).sub(&g_tilde.mul(p));
            }
            if let Some(t) = tracker.as_deref_mut() {
                let (head, tail) = t.split_at_mut(c);
                for (x, p) in tail[0].iter_mut().zip(&head[start]) {
                    *x = p_hat.mul(x).sub(&g_tilde.mul(p));
                }
            }
        }
        pivot_rows[row] = true;
        pivots.push((row, v));
        start += 1;
    }
    pivots
}

impl Echelon {
    fn of(m: &SqrtPiModule) -> Echelon {
        let mut cols = m.cols.clone();
        let pivots = column_reduce(m.dim, &mut cols, None);
        cols.truncate(pivots.len());
        Echelon { cols, pivots }
    }

    /// Membership of a vector in the column span over the valuation ring.
    fn contains(&self, v: &[SqrtPiScalar]) -> bool {
        let mut a: Vec<SqrtPiScalar> = v.to_vec();
        for (c, &(row, val)) in self.pivots.iter().enumerate() {
            let entry = a[row].clone();
            if entry.is_zero() {
                continue;
            }
            match entry.valuation() {
                Some(ev) if ev >= val => {
                    let p_hat = self.cols[c][row].shift_down(val);
                    let coeff = entry.shift_down(val);
                    for (x, base) in a.iter_mut().zip(&self.cols[c]) {
                        *x = p_hat.mul(x).sub(&coeff.mul(base));
                    }
                }
                _ => return false, // pivot coordinate not divisible
            }
        }
        a.iter().all(|x| x.is_zero())
    }
}

impl SqrtPiModule {
    /// Build from generator columns in an ambient space of the given
    /// dimension.
    pub fn from_columns(cols: Vec<Vec<SqrtPiScalar>>, dim: usize) -> Result<Self> {
        if cols.is_empty() {
            return Err(Error::DegenerateModule("a lattice needs at least one generator".into()));
        }
        for col in &cols {
            if col.len() != dim {
                return Err(Error::VectorLength { expected: dim, got: col.len() });
            }
        }
        Ok(SqrtPiModule { dim, cols })
    }

    /// The coordinate lattice spanned by the standard vectors indexed by a
    /// 1-based subset.
    pub fn coordinate(indices: &BTreeSet<usize>, dim: usize) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::DegenerateModule("empty coordinate lattice".into()));
        }
        if indices.iter().any(|&j| j == 0 || j > dim) {
            return Err(Error::InvalidIndex(format!("coordinate index out of range 1..={dim}")));
        }
        let cols = indices
            .iter()
            .map(|&j| {
                let mut col = vec![SqrtPiScalar::zero(); dim];
                col[j - 1] = SqrtPiScalar::one();
                col
            })
            .collect();
        SqrtPiModule::from_columns(cols, dim)
    }

    /// Ambient dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored generators.
    pub fn num_gens(&self) -> usize {
        self.cols.len()
    }

    /// The stored generator columns.
    pub fn columns(&self) -> &[Vec<SqrtPiScalar>] {
        &self.cols
    }

    /// The rank over the fraction field.
    pub fn generic_rank(&self) -> usize {
        Echelon::of(self).pivots.len()
    }

    /// Whether the lattice is a locally direct summand of the ambient
    /// lattice, of rank equal to its generator count: full generic rank and
    /// full rank after reduction mod `s`.
    pub fn is_direct_summand(&self) -> bool {
        self.generic_rank() == self.num_gens() && self.mod_s_rank() == self.num_gens()
    }

    /// Membership of a vector in the lattice.
    pub fn contains_vector(&self, v: &[SqrtPiScalar]) -> Result<bool> {
        if v.len() != self.dim {
            return Err(Error::VectorLength { expected: self.dim, got: v.len() });
        }
        Ok(Echelon::of(self).contains(v))
    }

    /// Containment of another lattice in this one.
    pub fn contains_module(&self, other: &SqrtPiModule) -> Result<bool> {
        if other.dim != self.dim {
            return Err(Error::VectorLength { expected: self.dim, got: other.dim });
        }
        let ech = Echelon::of(self);
        Ok(other.cols.iter().all(|c| ech.contains(c)))
    }

    /// Equality of lattices (mutual containment).
    pub fn equals(&self, other: &SqrtPiModule) -> Result<bool> {
        Ok(self.contains_module(other)? && other.contains_module(self)?)
    }

    /// The image lattice under a diagonal map given by its diagonal entries.
    pub fn apply_diagonal(&self, diag: &[SqrtPiScalar]) -> Result<SqrtPiModule> {
        if diag.len() != self.dim {
            return Err(Error::VectorLength { expected: self.dim, got: diag.len() });
        }
        let cols = self
            .cols
            .iter()
            .map(|col| col.iter().zip(diag).map(|(x, d)| x.mul(d)).collect())
            .collect();
        SqrtPiModule::from_columns(cols, self.dim)
    }

    /// The reduction mod `s`: rational generator columns of the special
    /// fiber.
    pub fn reduction_mod_s(&self) -> Vec<Vec<BigRational>> {
        self.cols
            .iter()
            .map(|col| col.iter().map(SqrtPiScalar::constant_term).collect())
            .collect()
    }

    /// The rank of the reduction mod `s`.
    pub fn mod_s_rank(&self) -> usize {
        rational_rank(&self.reduction_mod_s())
    }

    /// Whether the reduction mod `s` spans exactly the coordinate subspace
    /// of the given 1-based index set.
    pub fn reduction_spans(&self, indices: &BTreeSet<usize>) -> bool {
        let reduced = self.reduction_mod_s();
        let target: Vec<Vec<BigRational>> = indices
            .iter()
            .map(|&j| {
                let mut col = vec![BigRational::zero(); self.dim];
                col[j - 1] = BigRational::one();
                col
            })
            .collect();
        let ra = rational_rank(&reduced);
        let rb = rational_rank(&target);
        let mut joint = reduced;
        joint.extend(target);
        ra == rb && rational_rank(&joint) == ra
    }

    /// The orthogonal complement lattice: the saturation of the kernel of
    /// pairing against the generators, computed by tracked column reduction
    /// (the transformation columns under the zero columns of the reduced
    /// pairing matrix form a basis of the saturated kernel).
    pub fn dual(&self, gram: &GramForm) -> Result<SqrtPiModule> {
        if gram.dim() != self.dim {
            return Err(Error::VectorLength { expected: self.dim, got: gram.dim() });
        }
        if self.generic_rank() != self.num_gens() {
            return Err(Error::DegenerateModule(
                "orthogonal complement of a rank-deficient lattice".into(),
            ));
        }
        // Pairing matrix rows: one per generator g, row entries
        // ⟨x, g⟩-coefficients, i.e. (Hg)ᵀ. Arrange as columns over x-space.
        let m = self.num_gens();
        let mut cols: Vec<Vec<SqrtPiScalar>> = (0..self.dim)
            .map(|x| {
                (0..m).map(|g| self.cols[g][self.dim - 1 - x].clone()).collect()
            })
            .collect();
        let mut tracker: Vec<Vec<SqrtPiScalar>> = (0..self.dim)
            .map(|c| {
                let mut col = vec![SqrtPiScalar::zero(); self.dim];
                col[c] = SqrtPiScalar::one();
                col
            })
            .collect();
        let pivots = column_reduce(m, &mut cols, Some(&mut tracker));
        let kernel: Vec<Vec<SqrtPiScalar>> = tracker.into_iter().skip(pivots.len()).collect();
        if kernel.len() != self.dim - m {
            return Err(Error::DegenerateModule(
                "orthogonal complement has unexpected rank".into(),
            ));
        }
        SqrtPiModule::from_columns(kernel, self.dim)
    }
}

/// The rank of a rational matrix given by columns.
fn rational_rank(cols: &[Vec<BigRational>]) -> usize {
    let mut work: Vec<Vec<BigRational>> = cols.iter().filter(|c| !c.is_empty()).cloned().collect();
    let dim = match work.first() {
        Some(c) => c.len(),
        None => return 0,
    };
    let mut rank = 0;
    let mut used = vec![false; dim];
    for c in 0..work.len() {
        let Some(row) = (0..dim).find(|&r| !used[r] && !work[c][r].is_zero()) else {
            continue;
        };
        used[row] = true;
        rank += 1;
        let pivot = work[c][row].clone();
        let (head, tail) = work.split_at_mut(c + 1);
        for other in tail.iter_mut() {
            if other[row].is_zero() {
                continue;
            }
            let factor = &other[row] / &pivot;
            for (x, p) in other.iter_mut().zip(&head[c]) {
                *x -= &factor * p;
            }
        }
    }
    rank
}

/// Build the generic-fiber lift of the class representative `(ℓ, d)` at
/// vertex `i`: the pair of rank-`n` lattices whose reductions are the
/// coordinate subspaces of `E^ℓ_d` and its complement-dual.
///
/// For `ℓ = i` the representative subspaces are totally isotropic and lift
/// as constant coordinate lattices. For `ℓ < i` (where only `d = 1` exists)
/// the lift mixes coordinates with `±s` coefficients, pairing the low block
/// against the middle and the post-middle block against the high block.
pub fn build_lift(ell: usize, d: usize, i: usize, n: usize) -> Result<(SqrtPiModule, SqrtPiModule)> {
    validate_rank(n)?;
    if i == 0 || i >= n {
        return Err(Error::InvalidIndex(format!(
            "lifts are built for interior vertices, got i = {i}"
        )));
    }
    let min_ell = (2 * i).saturating_sub(n);
    if ell < min_ell || ell > i {
        return Err(Error::InvalidStratum(format!("rank {ell} out of range {min_ell}..={i}")));
    }
    let dim = 2 * n;
    if ell == i {
        let e = IsoSubset::top_representative(i, d, n)?;
        let first = SqrtPiModule::coordinate(e.elements(), dim)?;
        let second = SqrtPiModule::coordinate(&e.perp(), dim)?;
        return Ok((first, second));
    }
    if d != 1 {
        return Err(Error::InvalidStratum(format!(
            "class label {d} invalid below the top rank"
        )));
    }
    let unit = |j: usize| {
        let mut col = vec![SqrtPiScalar::zero(); dim];
        col[j - 1] = SqrtPiScalar::one();
        col
    };
    let mixed = |j: usize, k: usize, sign: i64| {
        let mut col = vec![SqrtPiScalar::zero(); dim];
        col[j - 1] = SqrtPiScalar::one();
        col[k - 1] = if sign >= 0 { SqrtPiScalar::sqrt_pi() } else { SqrtPiScalar::sqrt_pi().neg() };
        col
    };

    let mut first = Vec::with_capacity(n);
    for j in i + 1 - ell..=n - i + ell {
        first.push(unit(j));
    }
    for k in 1..=i - ell {
        first.push(mixed(n - i + ell + k, i - ell + 1 - k, 1));
    }
    for k in 1..=i - ell {
        first.push(mixed(n + k, 2 * n + 1 - k, -1));
    }

    let mut second = Vec::with_capacity(n);
    for k in 1..=i - ell {
        second.push(mixed(k, n + 1 - k, 1));
    }
    for j in i - ell + 1..=n - i + ell {
        second.push(unit(j));
    }
    for k in 1..=i - ell {
        second.push(mixed(2 * n - i + ell + k, n + i - ell + 1 - k, -1));
    }

    Ok((SqrtPiModule::from_columns(first, dim)?, SqrtPiModule::from_columns(second, dim)?))
}

/// The verification report for one lifted pair: each moduli clause passes
/// (`None`) or fails with a witness description.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftReport {
    /// Clause (a): both lattices are rank-`n` direct summands.
    pub direct_summand: Option<String>,
    /// Clause (b): the second lattice is the orthogonal complement of the
    /// first.
    pub duality: Option<String>,
    /// Clause (c): the two transition-map inclusions.
    pub lambda_inclusions: Option<String>,
    /// Clause (d): the reductions mod `s` are the intended coordinate
    /// subspaces.
    pub reduction: Option<String>,
}

impl LiftReport {
    /// Whether every clause passed.
    pub fn all_pass(&self) -> bool {
        self.direct_summand.is_none()
            && self.duality.is_none()
            && self.lambda_inclusions.is_none()
            && self.reduction.is_none()
    }

    /// The first failure witness, if any.
    pub fn first_failure(&self) -> Option<&str> {
        [&self.direct_summand, &self.duality, &self.lambda_inclusions, &self.reduction]
            .into_iter()
            .find_map(|w| w.as_deref())
    }
}

/// Find the first generator of `sub` mapped outside `sup`, as a witness
/// string, applying an optional diagonal map first.
fn inclusion_witness(
    sub: &SqrtPiModule,
    sup: &SqrtPiModule,
    diag: Option<&[SqrtPiScalar]>,
    label: &str,
) -> Result<Option<String>> {
    let mapped = match diag {
        Some(d) => sub.apply_diagonal(d)?,
        None => sub.clone(),
    };
    for col in mapped.columns() {
        if !sup.contains_vector(col)? {
            let pretty: Vec<String> = col.iter().map(|x| x.to_string()).collect();
            return Ok(Some(format!("{label}: generator image ({}) escapes", pretty.join(", "))));
        }
    }
    Ok(None)
}

/// Check the four moduli clauses on a lifted pair at vertex `i` against the
/// intended class `(ℓ, d)`.
pub fn check_lm_conditions(
    pair: &(SqrtPiModule, SqrtPiModule),
    i: usize,
    ell: usize,
    d: usize,
    n: usize,
) -> Result<LiftReport> {
    validate_rank(n)?;
    let (f_pos, f_neg) = pair;
    let dim = 2 * n;
    if f_pos.dim() != dim || f_neg.dim() != dim {
        return Err(Error::VectorLength { expected: dim, got: f_pos.dim().max(f_neg.dim()) });
    }
    let gram = GramForm::new(n)?;

    let direct_summand = if f_pos.num_gens() != n || !f_pos.is_direct_summand() {
        Some("first lattice is not a rank-n direct summand".to_string())
    } else if f_neg.num_gens() != n || !f_neg.is_direct_summand() {
        Some("second lattice is not a rank-n direct summand".to_string())
    } else {
        None
    };

    let duality = {
        let perp = f_pos.dual(&gram)?;
        if perp.equals(f_neg)? {
            None
        } else {
            // Witness: a generator on either side of the mismatch.
            inclusion_witness(&perp, f_neg, None, "complement generator missing")?
                .or(inclusion_witness(f_neg, &perp, None, "second lattice not orthogonal")?)
                .or(Some("orthogonal complement mismatch".to_string()))
        }
    };

    let (lambda1, lambda2) = lambda_maps(i, n)?;
    let lambda_inclusions = inclusion_witness(f_neg, f_pos, Some(&lambda1), "first transition")?
        .or(inclusion_witness(f_pos, f_neg, Some(&lambda2), "second transition")?);

    let rep = if ell == i {
        IsoSubset::top_representative(i, d, n)?
    } else {
        IsoSubset::lower_representative(i, ell, n)?
    };
    let reduction = if !f_pos.reduction_spans(rep.elements()) {
        Some("first reduction misses the coordinate subspace".to_string())
    } else if !f_neg.reduction_spans(&rep.perp()) {
        Some("second reduction misses the dual coordinate subspace".to_string())
    } else {
        None
    };

    Ok(LiftReport { direct_summand, duality, lambda_inclusions, reduction })
}

/// Rank oracle for the stratum invariant: the composite transition map from
/// the chain member at `i` to the one at `2n − i` (the product of the single
/// coordinate-scaling maps), reduced mod `s` and applied to the coordinate
/// subspace of `E`, as honest rational linear algebra.
pub fn chain_map_rank(e: &IsoSubset) -> usize {
    let (i, n) = (e.vertex(), e.rank());
    let dim = 2 * n;
    // Composite of the maps scaling one coordinate each, for positions
    // i+1 ..= 2n−i; assemble as an actual diagonal product.
    let mut diag = vec![SqrtPiScalar::one(); dim];
    for k in i + 1..=2 * n - i {
        diag[k - 1] = diag[k - 1].mul(&SqrtPiScalar::pi());
    }
    let cols: Vec<Vec<BigRational>> = e
        .elements()
        .iter()
        .map(|&j| {
            let mut col = vec![BigRational::zero(); dim];
            col[j - 1] = diag[j - 1].constant_term();
            col
        })
        .collect();
    rational_rank(&cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permissible::stratum_rank;
    use proptest::prelude::*;

    fn poly(coeffs: &[i64]) -> SqrtPiScalar {
        SqrtPiScalar::from_coeffs(
            coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect(),
        )
    }

    #[test]
    fn scalar_basics() {
        assert!(SqrtPiScalar::zero().is_zero());
        assert_eq!(SqrtPiScalar::zero().valuation(), None);
        assert_eq!(SqrtPiScalar::sqrt_pi().mul(&SqrtPiScalar::sqrt_pi()), SqrtPiScalar::pi());
        assert_eq!(SqrtPiScalar::pi().valuation(), Some(2));
        assert!(SqrtPiScalar::one().is_unit());
        assert!(!SqrtPiScalar::sqrt_pi().is_unit());
        assert_eq!(poly(&[3, 1]).to_string(), "3 + s");
        assert_eq!(poly(&[0, -1, 2]).to_string(), "-s + 2·s^2");
    }

    proptest! {
        #[test]
        fn scalar_ring_axioms(
            a in proptest::collection::vec(-6i64..=6, 0..4),
            b in proptest::collection::vec(-6i64..=6, 0..4),
            c in proptest::collection::vec(-6i64..=6, 0..4),
        ) {
            let (a, b, c) = (poly(&a), poly(&b), poly(&c));
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.mul(&SqrtPiScalar::one()), a.clone());
            prop_assert_eq!(a.add(&a.neg()), SqrtPiScalar::zero());
            // Reduction mod s is a ring homomorphism.
            prop_assert_eq!(a.add(&b).constant_term(), a.constant_term() + b.constant_term());
            prop_assert_eq!(a.mul(&b).constant_term(), a.constant_term() * b.constant_term());
        }
    }

    #[test]
    fn coordinate_lattice_is_self_dual_and_split() {
        let n = 4usize;
        let gram = GramForm::new(n).unwrap();
        let e: BTreeSet<usize> = (1..=n).collect();
        let m = SqrtPiModule::coordinate(&e, 2 * n).unwrap();
        assert!(m.is_direct_summand());
        let dual = m.dual(&gram).unwrap();
        assert!(dual.equals(&m).unwrap());
        // Isotropy: the Gram pairing vanishes on the span.
        for a in m.columns() {
            for b in m.columns() {
                assert!(gram.pairing(a, b).is_zero());
            }
        }
    }

    #[test]
    fn gram_matches_the_delta_description() {
        let n = 4usize;
        let gram = GramForm::new(n).unwrap();
        for a in 1..=2 * n {
            for b in 1..=2 * n {
                let expected = i64::from(a + b == 2 * n + 1);
                assert_eq!(gram.entry(a, b), expected);
                assert_eq!(gram.entry(a, b), gram.entry(b, a));
            }
        }
    }

    #[test]
    fn lambda_maps_are_gram_symmetric_and_compose_to_pi() {
        for n in [4usize, 5] {
            for i in 0..=n {
                let (l1, l2) = lambda_maps(i, n).unwrap();
                for j in 0..2 * n {
                    // Composite is multiplication by the uniformizer.
                    assert_eq!(l1[j].mul(&l2[j]), SqrtPiScalar::pi());
                    // Gram symmetry: diagonal invariant under coordinate
                    // reversal, so ⟨λx, y⟩ = ⟨x, λy⟩.
                    assert_eq!(l1[j], l1[2 * n - 1 - j]);
                    assert_eq!(l2[j], l2[2 * n - 1 - j]);
                }
            }
        }
    }

    #[test]
    fn lift_generators_match_the_stated_columns() {
        let (n, i, ell) = (4usize, 3usize, 2usize);
        let (first, _) = build_lift(ell, 1, i, n).unwrap();
        // Plain block ε_{i+1−ℓ} .. ε_{n−i+ℓ}.
        let mut expected_first = vec![SqrtPiScalar::zero(); 2 * n];
        expected_first[i - ell] = SqrtPiScalar::one();
        assert_eq!(first.columns()[0], expected_first);
        // The first minus-sign column is ε_{n+1} − s·ε_{2n}.
        let mut minus_col = vec![SqrtPiScalar::zero(); 2 * n];
        minus_col[n] = SqrtPiScalar::one();
        minus_col[2 * n - 1] = SqrtPiScalar::sqrt_pi().neg();
        assert!(first.columns().contains(&minus_col));
        // Top case: the columns are exactly ε_1..ε_n.
        let (top, top_dual) = build_lift(i, 1, i, n).unwrap();
        let coord = SqrtPiModule::coordinate(&(1..=n).collect(), 2 * n).unwrap();
        assert!(top.equals(&coord).unwrap());
        assert!(top_dual.equals(&coord).unwrap());
    }

    #[test]
    fn stated_dual_generators_agree_with_the_computed_complement() {
        let gram4 = GramForm::new(4).unwrap();
        let gram5 = GramForm::new(5).unwrap();
        for (n, gram) in [(4usize, gram4), (5usize, gram5)] {
            for i in 1..n {
                let min_ell = (2 * i).saturating_sub(n);
                for ell in min_ell..i {
                    let (first, second) = build_lift(ell, 1, i, n).unwrap();
                    let computed = first.dual(&gram).unwrap();
                    assert!(
                        computed.equals(&second).unwrap(),
                        "stated dual differs at n={n}, i={i}, rank {ell}"
                    );
                }
            }
        }
    }

    #[test]
    fn biduality_holds_on_the_lift_lattices() {
        let n = 4usize;
        let gram = GramForm::new(n).unwrap();
        for i in 1..n {
            let min_ell = (2 * i).saturating_sub(n);
            for ell in min_ell..=i {
                let dees: &[usize] = if ell == i { &[1, 2, 3, 4] } else { &[1] };
                for &d in dees {
                    let (first, second) = build_lift(ell, d, i, n).unwrap();
                    for m in [&first, &second] {
                        let twice = m.dual(&gram).unwrap().dual(&gram).unwrap();
                        assert!(twice.equals(m).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn all_lift_pairs_satisfy_the_moduli_conditions() {
        let n = 4usize;
        for i in 1..n {
            let min_ell = (2 * i).saturating_sub(n);
            for ell in min_ell..=i {
                let dees: &[usize] = if ell == i { &[1, 2, 3, 4] } else { &[1] };
                for &d in dees {
                    let pair = build_lift(ell, d, i, n).unwrap();
                    let report = check_lm_conditions(&pair, i, ell, d, n).unwrap();
                    assert!(
                        report.all_pass(),
                        "clause fails at i={i}, rank {ell}, class {d}: {:?}",
                        report.first_failure()
                    );
                }
            }
        }
    }

    #[test]
    fn reductions_recover_the_representative_subsets() {
        let n = 5usize;
        for i in 1..n {
            let min_ell = (2 * i).saturating_sub(n);
            for ell in min_ell..i {
                let (first, second) = build_lift(ell, 1, i, n).unwrap();
                let e = IsoSubset::lower_representative(i, ell, n).unwrap();
                assert!(first.reduction_spans(e.elements()));
                assert!(second.reduction_spans(&e.perp()));
                assert_eq!(first.mod_s_rank(), n);
                assert_eq!(second.mod_s_rank(), n);
            }
        }
    }

    #[test]
    fn perturbed_generator_fails_with_a_witness() {
        let (n, i, ell) = (4usize, 2usize, 1usize);
        let (first, second) = build_lift(ell, 1, i, n).unwrap();
        // Flip the sign of the s-part in one mixed generator of the first
        // lattice.
        let mut cols = first.columns().to_vec();
        let mixed_at = cols
            .iter()
            .position(|c| c.iter().any(|x| x.valuation() == Some(1)))
            .expect("a mixed generator exists below the top rank");
        for x in &mut cols[mixed_at] {
            if x.valuation() == Some(1) {
                *x = x.neg();
            }
        }
        let broken = SqrtPiModule::from_columns(cols, 2 * n).unwrap();
        let report = check_lm_conditions(&(broken, second), i, ell, 1, n).unwrap();
        assert!(!report.all_pass());
        assert!(report.duality.is_some() || report.lambda_inclusions.is_some());
        assert!(report.first_failure().is_some());
    }

    #[test]
    fn chain_map_rank_agrees_with_the_combinatorial_count() {
        let n = 4usize;
        for i in 0..=n {
            for e in IsoSubset::enumerate_permissible(i, n).unwrap() {
                assert_eq!(chain_map_rank(&e), stratum_rank(&e), "rank mismatch at i={i}");
            }
        }
    }

    #[test]
    fn degenerate_and_invalid_inputs_are_rejected() {
        let n = 4usize;
        let gram = GramForm::new(n).unwrap();
        // Dependent columns: rejected by dual.
        let col = {
            let mut c = vec![SqrtPiScalar::zero(); 2 * n];
            c[0] = SqrtPiScalar::one();
            c
        };
        let dep = SqrtPiModule::from_columns(vec![col.clone(), col], 2 * n).unwrap();
        assert!(dep.dual(&gram).is_err());
        // Out-of-range stratum labels.
        assert!(build_lift(3, 1, 2, 4).is_err());
        assert!(build_lift(1, 2, 2, 4).is_err());
        assert!(build_lift(2, 5, 2, 4).is_err());
        assert!(build_lift(0, 1, 0, 4).is_err());
        // A non-summand lattice is detected.
        let scaled = SqrtPiModule::coordinate(&(1..=n).collect(), 2 * n)
            .unwrap()
            .apply_diagonal(&vec![SqrtPiScalar::pi(); 2 * n])
            .unwrap();
        assert!(!scaled.is_direct_summand());
        assert_eq!(scaled.generic_rank(), n);
    }
}
