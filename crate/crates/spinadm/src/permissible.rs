//! Faces of the standard lattice chain, naive and signed permissibility,
//! permissible index subsets, and enumeration of the permissible classes.
//!
//! A point of the chain is a vector `v ∈ Z^{2n}` (the lattice spanned by
//! `π^{v(j)} e_j`); the standard chain member at position `j = 2nd + i` is
//! `ω_j = ((−1)^{(i)}, 0^{(2n−i)}) − d·1`. An `I`-face is a periodic,
//! entrywise-monotone family `(v_j)` over `±I + 2nZ` with `v_{j+2n} = v_j − 1`
//! and a duality constant `d` such that `v_j + (v_{−j})* = d·1` (the star is
//! coordinate reversal). Group elements act componentwise.
//!
//! An element `w` is *naively permissible* at a vertex when its face stays in
//! the unit box over the standard one (condition `ω_j ≤ wω_j ≤ ω_j + 1`) with
//! the correct entry sum; the signed refinement further demands that every
//! totally isotropic difference vector `μ_j^w = wω_j − ω_j` lie in the
//! `S°_{2n}`-orbit of the chosen minuscule cocharacter. The zero set
//! `E^w = {j : μ_j^w(j) = 0}` reduces everything to combinatorics of
//! `n`-element subsets of `[1, 2n]`, which this module classifies into
//! `min{i, n−i} + 4` vertex-group orbits.

use std::collections::{BTreeMap, BTreeSet};

use crate::alcove::{
    canonical_rep, double_cosets, double_cosets_stable_keys, weyl_orbit, Cochar, DoubleCoset,
    StabilizerGroup,
};
use crate::error::{Error, Result};
use crate::weyl::{
    enumerate_circ, epsilon, special_elements, star, validate_rank, AffineElement, SignedPerm,
    TransVec,
};

/// One of the two minuscule-cocharacter signs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    /// The sign of `μ+ = (1^{(n)}, 0^{(n)})`.
    Plus,
    /// The sign of `μ− = (1^{(n−1)}, 0, 1, 0^{(n−1)})`.
    Minus,
}

impl Sign {
    /// Both signs, in canonical order.
    pub const ALL: [Sign; 2] = [Sign::Plus, Sign::Minus];

    /// The distinguished cocharacter of this sign.
    pub fn cochar(self, n: usize) -> Result<Cochar> {
        match self {
            Sign::Plus => Cochar::plus(n),
            Sign::Minus => Cochar::minus(n),
        }
    }

    /// The spin parity of this sign's cocharacter.
    pub fn epsilon(self, n: usize) -> bool {
        match self {
            Sign::Plus => n % 2 == 1,
            Sign::Minus => (n - 1) % 2 == 1,
        }
    }

    /// The opposite sign.
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// The standard chain member `ω_j` for any `j ∈ Z`: writing `j = 2nd + i`
/// with `0 ≤ i < 2n`, the vector has `−1` in the first `i` slots, `0` in the
/// rest, and `−d` added to every entry.
pub fn omega(j: i64, n: usize) -> Result<Vec<i64>> {
    validate_rank(n)?;
    let m = 2 * n as i64;
    let d = j.div_euclid(m);
    let i = j.rem_euclid(m) as usize;
    let mut v = vec![-d; 2 * n];
    for slot in v.iter_mut().take(i) {
        *slot -= 1;
    }
    Ok(v)
}

/// A face of the lattice chain over a nonempty index set `I ⊆ [0, n]`: the
/// vectors `v_i` for `i ∈ I`, with the rest of the periodic family
/// reconstructed from `v_{j+2n} = v_j − 1` and `v_{−j} = d·1 − (v_j)*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    indices: Vec<usize>,
    vectors: BTreeMap<usize, Vec<i64>>,
    dual_const: i64,
    n: usize,
}

impl Face {
    /// Build a face from its stored vectors, validating every invariant:
    /// consistent duality constant, self-duality at the endpoints, and
    /// entrywise monotonicity around one period of the chain.
    pub fn new(entries: &[(usize, Vec<i64>)], n: usize) -> Result<Self> {
        validate_rank(n)?;
        if entries.is_empty() {
            return Err(Error::InvalidFace("a face needs at least one index".into()));
        }
        let mut vectors = BTreeMap::new();
        for (i, v) in entries {
            if *i > n {
                return Err(Error::InvalidFace(format!("index {i} out of range 0..={n}")));
            }
            if v.len() != 2 * n {
                return Err(Error::VectorLength { expected: 2 * n, got: v.len() });
            }
            if vectors.insert(*i, v.clone()).is_some() {
                return Err(Error::InvalidFace(format!("index {i} listed twice")));
            }
        }
        let indices: Vec<usize> = vectors.keys().copied().collect();

        // The duality constant is pinned by the entry-sum normalization
        // Σ v_i = n·d − i, and must agree across the stored indices.
        let mut dual_const = None;
        for (&i, v) in &vectors {
            let total: i64 = v.iter().sum();
            let d_num = total + i as i64;
            if d_num.rem_euclid(n as i64) != 0 {
                return Err(Error::InvalidFace(format!(
                    "entry sum {total} at index {i} admits no duality constant"
                )));
            }
            let d = d_num / n as i64;
            if *dual_const.get_or_insert(d) != d {
                return Err(Error::InvalidFace(
                    "stored vectors disagree on the duality constant".into(),
                ));
            }
        }
        let d = dual_const.expect("nonempty");

        let face = Face { indices, vectors, dual_const: d, n };

        // Self-duality at the fixed positions of the star.
        if let Some(v0) = face.vectors.get(&0) {
            for j in 0..2 * n {
                if v0[j] + v0[2 * n - 1 - j] != d {
                    return Err(Error::InvalidFace("index 0 vector is not self-dual".into()));
                }
            }
        }
        if let Some(vn) = face.vectors.get(&n) {
            for j in 0..2 * n {
                if vn[j] + vn[2 * n - 1 - j] != d - 1 {
                    return Err(Error::InvalidFace(format!(
                        "index {n} vector is not self-dual"
                    )));
                }
            }
        }

        // Entrywise monotonicity along one period, wrapping around with the
        // shift v_{j+2n} = v_j − 1.
        let chain = face.period_chain();
        for pair in chain.windows(2) {
            let (ra, va) = &pair[0];
            let (rb, vb) = &pair[1];
            if va.iter().zip(vb.iter()).any(|(a, b)| a < b) {
                return Err(Error::InvalidFace(format!(
                    "chain members at positions {ra} and {rb} are not nested"
                )));
            }
        }
        let (_, first) = &chain[0];
        let (rl, last) = &chain[chain.len() - 1];
        if last.iter().zip(first.iter()).any(|(a, b)| *a < *b - 1) {
            return Err(Error::InvalidFace(format!(
                "chain member at position {rl} is not nested over the period shift"
            )));
        }
        Ok(face)
    }

    /// The standard face over `I`: `v_i = ω_i`.
    pub fn standard(indices: &[usize], n: usize) -> Result<Self> {
        let entries: Vec<(usize, Vec<i64>)> = indices
            .iter()
            .map(|&i| Ok((i, omega(i as i64, n)?)))
            .collect::<Result<_>>()?;
        Face::new(&entries, n)
    }

    /// The face of `w` over `I`: `v_i = wω_i`.
    pub fn from_element(w: &AffineElement, indices: &[usize], n: usize) -> Result<Self> {
        let entries: Vec<(usize, Vec<i64>)> = indices
            .iter()
            .map(|&i| Ok((i, w.act(&omega(i as i64, n)?))))
            .collect::<Result<_>>()?;
        Face::new(&entries, n)
    }

    /// The sorted stored indices.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Half-rank `n`.
    pub fn rank(&self) -> usize {
        self.n
    }

    /// The duality constant `d` with `v_j + (v_{−j})* = d·1`.
    pub fn dual_const(&self) -> i64 {
        self.dual_const
    }

    /// The stored vector `v_i`.
    pub fn vector(&self, i: usize) -> Result<&Vec<i64>> {
        self.vectors
            .get(&i)
            .ok_or_else(|| Error::InvalidIndex(format!("face has no stored vector at {i}")))
    }

    /// The reconstructed dual vector `v_{−i} = d·1 − (v_i)*`.
    pub fn dual_vector(&self, i: usize) -> Result<Vec<i64>> {
        let v = self.vector(i)?;
        Ok(v.iter().rev().map(|x| self.dual_const - x).collect())
    }

    /// Apply a group element componentwise; the result is validated as a
    /// face (its duality constant shifts by the similitude of `w`).
    pub fn transform(&self, w: &AffineElement) -> Result<Face> {
        let entries: Vec<(usize, Vec<i64>)> =
            self.vectors.iter().map(|(&i, v)| (i, w.act(v))).collect();
        Face::new(&entries, self.n)
    }

    /// The reps of one period in chain order: `(position, vector)` with the
    /// duals of the stored indices reconstructed at positions `2n − i`.
    fn period_chain(&self) -> Vec<(usize, Vec<i64>)> {
        let n = self.n;
        let mut chain: BTreeMap<usize, Vec<i64>> = BTreeMap::new();
        for (&i, v) in &self.vectors {
            chain.insert(i, v.clone());
            if i != 0 && i != n {
                // v_{2n−i} = v_{−i} − 1.
                let dual = self.dual_vector(i).expect("stored index");
                chain.insert(2 * n - i, dual.iter().map(|x| x - 1).collect());
            }
        }
        chain.into_iter().collect()
    }
}

/// The difference vector `μ_j^w = wω_j − ω_j` at one chain position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuVector {
    mu: Vec<i64>,
    n: usize,
}

impl MuVector {
    /// Wrap a raw difference vector.
    pub fn from_vec(mu: Vec<i64>, n: usize) -> Result<Self> {
        validate_rank(n)?;
        if mu.len() != 2 * n {
            return Err(Error::VectorLength { expected: 2 * n, got: mu.len() });
        }
        Ok(MuVector { mu, n })
    }

    /// The entries.
    pub fn entries(&self) -> &[i64] {
        &self.mu
    }

    /// Whether all entries lie in `{0, 1}` (the naive box condition).
    pub fn is_zero_one(&self) -> bool {
        self.mu.iter().all(|&x| x == 0 || x == 1)
    }

    /// The zero set `E = {j : μ(j) = 0}`, 1-based.
    pub fn zeros(&self) -> BTreeSet<usize> {
        self.mu
            .iter()
            .enumerate()
            .filter(|(_, &x)| x == 0)
            .map(|(slot, _)| slot + 1)
            .collect()
    }

    /// Whether `μ + μ* = 1` entrywise (the totally isotropic case).
    pub fn is_totally_isotropic(&self) -> bool {
        let d = 2 * self.n;
        (0..d).all(|j| self.mu[j] + self.mu[d - 1 - j] == 1)
    }

    /// The spin parity `Σ_{j ≤ n} μ(j) mod 2`.
    pub fn epsilon(&self) -> bool {
        self.mu.iter().take(self.n).sum::<i64>() % 2 != 0
    }
}

/// The difference vector `μ_j^w = wω_j − ω_j`.
pub fn mu_vector(w: &AffineElement, j: i64) -> Result<MuVector> {
    let n = w.rank();
    let om = omega(j, n)?;
    let moved = w.act(&om);
    MuVector::from_vec(moved.iter().zip(&om).map(|(a, b)| a - b).collect(), n)
}

/// Whether a totally isotropic 0/1 vector lies in the `S°_{2n}`-orbit of the
/// cocharacter of the given sign, decided by the parity criterion
/// `Σ_{j≤n} μ(j) ≡ Σ_{j≤n} μ_sign(j) (mod 2)`.
pub fn spin_orbit_member(mu: &MuVector, sign: Sign, n: usize) -> Result<bool> {
    validate_rank(n)?;
    if mu.entries().len() != 2 * n {
        return Err(Error::VectorLength { expected: 2 * n, got: mu.entries().len() });
    }
    if !mu.is_zero_one() || !mu.is_totally_isotropic() {
        return Err(Error::NotTotallyIsotropic);
    }
    Ok(mu.epsilon() == sign.epsilon(n))
}

/// Brute-force oracle for [`spin_orbit_member`]: enumerate the full orbit of
/// the sign's cocharacter and test membership directly.
pub fn spin_orbit_member_brute(mu: &MuVector, sign: Sign, n: usize) -> Result<bool> {
    validate_rank(n)?;
    if !mu.is_zero_one() || !mu.is_totally_isotropic() {
        return Err(Error::NotTotallyIsotropic);
    }
    let target = TransVec::from_vec(mu.entries().to_vec())?;
    Ok(weyl_orbit(&sign.cochar(n)?).contains(&target))
}

/// One period of chain positions for an index set: `{i, 2n − i : i ∈ I}`,
/// reduced mod `2n`.
fn period_reps(indices: &BTreeSet<usize>, n: usize) -> Result<Vec<i64>> {
    if indices.is_empty() {
        return Err(Error::InvalidIndex("permissibility needs a nonempty index set".into()));
    }
    let mut reps = BTreeSet::new();
    for &i in indices {
        if i > n {
            return Err(Error::InvalidIndex(format!("chain index {i} out of range 0..={n}")));
        }
        reps.insert(i);
        reps.insert((2 * n - i) % (2 * n));
    }
    Ok(reps.into_iter().map(|r| r as i64).collect())
}

/// Naive permissibility: at every chain position of one period, the face of
/// `w` stays in the unit box over the standard chain (`ω_j ≤ wω_j ≤ ω_j + 1`)
/// and the difference vector sums to `n` (similitude one).
pub fn is_naively_permissible(
    w: &AffineElement,
    indices: &BTreeSet<usize>,
) -> Result<bool> {
    let n = w.rank();
    for j in period_reps(indices, n)? {
        let mu = mu_vector(w, j)?;
        if !mu.is_zero_one() {
            return Ok(false);
        }
        if mu.entries().iter().sum::<i64>() != n as i64 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Signed permissibility: naive permissibility plus the spin condition at
/// every chain position whose difference vector is totally isotropic.
pub fn is_pm_permissible(
    w: &AffineElement,
    indices: &BTreeSet<usize>,
    sign: Sign,
) -> Result<bool> {
    let n = w.rank();
    if !is_naively_permissible(w, indices)? {
        return Ok(false);
    }
    for j in period_reps(indices, n)? {
        let mu = mu_vector(w, j)?;
        if mu.is_totally_isotropic() && !spin_orbit_member(&mu, sign, n)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Build a group element of `W′` carrying the standard face at a single
/// vertex onto the given face, following the transitivity construction: a
/// pair permutation matching the support of `v_{−i} − v_i`, an optional
/// `(1, 2n)` parity fix, the translation `v_i − w₀ω_i`, and an optional
/// spin-parity correction by `τ₁`.
///
/// The `τ₁` correction moves the chain lattices at the extreme vertices, so
/// a face at `i ∈ {0, n}` whose element ends up with nontrivial spin parity
/// is rejected with [`Error::ParityFixUnavailable`].
pub fn face_to_element(face: &Face) -> Result<AffineElement> {
    let n = face.rank();
    if face.indices().len() != 1 {
        return Err(Error::InvalidFace(
            "the constructive map is defined for single-index faces".into(),
        ));
    }
    let i = face.indices()[0];
    let v = face.vector(i)?.clone();
    let dual = face.dual_vector(i)?;
    let r: Vec<i64> = dual.iter().zip(&v).map(|(a, b)| a - b).collect();

    // The support of r must be a star-closed 2i-element set: the image of
    // A_i = [1, i] ∪ [i*, 2n] under the permutation part.
    if r.iter().any(|&x| x != 0 && x != 1) {
        return Err(Error::InvalidFace("dual gap is not a 0/1 vector".into()));
    }
    let d = 2 * n;
    if (0..d).any(|j| r[j] != r[d - 1 - j]) {
        return Err(Error::InvalidFace("dual gap support is not star-closed".into()));
    }
    let support: Vec<usize> = (1..=n).filter(|&j| r[j - 1] == 1).collect();
    if support.len() != i {
        return Err(Error::InvalidFace(format!(
            "dual gap support has {} pairs, expected {i}",
            support.len()
        )));
    }

    // Pair permutation: A_i-pairs onto support pairs, B_i-pairs onto the
    // complement, both in ascending order.
    let complement: Vec<usize> = (1..=n).filter(|&j| r[j - 1] == 0).collect();
    let mut images = vec![0usize; d];
    for (k, &s) in (1..=i).zip(&support) {
        images[k - 1] = s;
        images[star(k, n) - 1] = star(s, n);
    }
    for (k, &c) in (i + 1..=n).zip(&complement) {
        images[k - 1] = c;
        images[star(k, n) - 1] = star(c, n);
    }
    let mut w0 = SignedPerm::from_images(images)?;
    if !w0.is_even() {
        // Precompose with the star swap (1, 2n); it preserves A_i since i ≥ 1
        // (for i = 0 the construction above is the identity, which is even).
        assert!(i >= 1, "parity fix for an empty pair block");
        w0 = w0.compose(&SignedPerm::star_swap(n, 1)?);
    }

    let om = omega(i as i64, n)?;
    let moved = w0.permute_vec(&om);
    let t = TransVec::from_vec(v.iter().zip(&moved).map(|(a, b)| a - b).collect())?;
    let mut w = AffineElement::from_parts(t, w0)?;
    if epsilon(&w)? {
        if i == 0 || i == n {
            return Err(Error::ParityFixUnavailable { i });
        }
        w = w.multiply(&special_elements(n)?.tau1);
    }
    debug_assert_eq!(w.act(&om), v, "constructed element misses the face");
    debug_assert_eq!(
        w.act(&omega(-(i as i64), n)?),
        face.dual_vector(i)?,
        "constructed element misses the dual vector"
    );
    Ok(w)
}

/// An `n`-element subset `E ⊆ [1, 2n]` attached to a vertex `i`, the zero
/// set of a difference vector. Permissibility partitions the index pairs
/// `{j, j*}` through the blocks `A_i = [1, i] ∪ [i*, 2n]` and
/// `B_i = [i+1, i* − 1]`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IsoSubset {
    i: usize,
    elems: BTreeSet<usize>,
    n: usize,
}

impl IsoSubset {
    /// Wrap and validate a subset: `n` elements inside `[1, 2n]`.
    pub fn new(elems: BTreeSet<usize>, i: usize, n: usize) -> Result<Self> {
        validate_rank(n)?;
        if i > n {
            return Err(Error::InvalidIndex(format!("chain index {i} out of range 0..={n}")));
        }
        if elems.len() != n {
            return Err(Error::InvalidStratum(format!(
                "subset has {} elements, expected {n}",
                elems.len()
            )));
        }
        if elems.iter().any(|&j| j == 0 || j > 2 * n) {
            return Err(Error::InvalidStratum("subset entries must lie in [1, 2n]".into()));
        }
        Ok(IsoSubset { i, elems, n })
    }

    /// The subset.
    pub fn elements(&self) -> &BTreeSet<usize> {
        &self.elems
    }

    /// The attached vertex index.
    pub fn vertex(&self) -> usize {
        self.i
    }

    /// Half-rank `n`.
    pub fn rank(&self) -> usize {
        self.n
    }

    /// Whether `j` belongs to the extreme block `A_i`.
    fn in_a_block(&self, j: usize) -> bool {
        j <= self.i || j >= star(self.i, self.n)
    }

    /// Naive permissibility: no pair inside `A_i` is wholly contained in the
    /// subset, and every pair inside `B_i` meets it.
    pub fn is_naively_permissible(&self) -> bool {
        let n = self.n;
        for j in 1..=n {
            let both = self.elems.contains(&j) && self.elems.contains(&star(j, n));
            let neither = !self.elems.contains(&j) && !self.elems.contains(&star(j, n));
            if self.in_a_block(j) && both {
                return false;
            }
            if !self.in_a_block(j) && neither {
                return false;
            }
        }
        true
    }

    /// `a₁(E) = #(E ∩ A_i)`: the number of `A_i`-pairs contributing exactly
    /// one element (no pair contributes two, for permissible subsets).
    pub fn a1(&self) -> usize {
        self.elems.iter().filter(|&&j| self.in_a_block(j)).count()
    }

    /// `r₁(E) = #(E ∩ [1, i])`.
    pub fn r1(&self) -> usize {
        self.elems.iter().filter(|&&j| j <= self.i).count()
    }

    /// `r₂(E) = #(E ∩ [i+1, n])`.
    pub fn r2(&self) -> usize {
        self.elems.iter().filter(|&&j| j > self.i && j <= self.n).count()
    }

    /// The dual subset `E^⊥`: the complement of `{j* : j ∈ E}`.
    pub fn perp(&self) -> BTreeSet<usize> {
        let starred: BTreeSet<usize> = self.elems.iter().map(|&j| star(j, self.n)).collect();
        (1..=2 * self.n).filter(|j| !starred.contains(j)).collect()
    }

    /// The difference vector with this zero set: `μ = 1 − 1_E`.
    pub fn mu(&self) -> MuVector {
        let mu: Vec<i64> =
            (1..=2 * self.n).map(|j| if self.elems.contains(&j) { 0 } else { 1 }).collect();
        MuVector::from_vec(mu, self.n).expect("constructed with the right length")
    }

    /// The four top-type representatives `E^i_d` (`d ∈ 1..=4`), defined for
    /// `0 < i < n`.
    pub fn top_representative(i: usize, d: usize, n: usize) -> Result<IsoSubset> {
        validate_rank(n)?;
        if i == 0 || i >= n {
            return Err(Error::InvalidIndex(format!(
                "top representatives require 0 < i < n, got i = {i}"
            )));
        }
        let elems: BTreeSet<usize> = match d {
            1 => (1..=n).collect(),
            2 => (1..i)
                .chain(i + 1..n)
                .chain([n + 1, 2 * n + 1 - i])
                .collect(),
            3 => (1..n).chain([n + 1]).collect(),
            4 => (1..i).chain(i + 1..=n).chain([2 * n + 1 - i]).collect(),
            _ => {
                return Err(Error::InvalidStratum(format!("class label {d} out of range 1..=4")))
            }
        };
        IsoSubset::new(elems, i, n)
    }

    /// The lower-type representative `E^ℓ_1 = [i+1−ℓ, n+i−ℓ]`, defined for
    /// `max{0, 2i−n} ≤ ℓ ≤ i`.
    pub fn lower_representative(i: usize, ell: usize, n: usize) -> Result<IsoSubset> {
        validate_rank(n)?;
        if i > n {
            return Err(Error::InvalidIndex(format!("chain index {i} out of range 0..={n}")));
        }
        let min_ell = (2 * i).saturating_sub(n);
        if ell < min_ell || ell > i {
            return Err(Error::InvalidStratum(format!(
                "rank {ell} out of range {min_ell}..={i}"
            )));
        }
        IsoSubset::new((i + 1 - ell..=n + i - ell).collect(), i, n)
    }

    /// All naively permissible subsets at a vertex, enumerated by pair
    /// patterns and returned sorted.
    pub fn enumerate_permissible(i: usize, n: usize) -> Result<Vec<IsoSubset>> {
        validate_rank(n)?;
        if i > n {
            return Err(Error::InvalidIndex(format!("chain index {i} out of range 0..={n}")));
        }
        let mut out = Vec::new();
        // Per pair {j, j*}: an A_i-pair contributes one element or none, a
        // B_i-pair contributes one element or both.
        let mut stack: Vec<(usize, BTreeSet<usize>)> = vec![(1, BTreeSet::new())];
        while let Some((j, partial)) = stack.pop() {
            if j > n {
                if partial.len() == n {
                    out.push(IsoSubset { i, elems: partial, n });
                }
                continue;
            }
            let in_a = j <= i || j >= star(i, n);
            let js = star(j, n);
            let mut push = |members: &[usize]| {
                let mut next = partial.clone();
                next.extend(members.iter().copied());
                stack.push((j + 1, next));
            };
            push(&[j]);
            push(&[js]);
            if in_a {
                push(&[]);
            } else {
                push(&[j, js]);
            }
        }
        out.sort();
        for e in &out {
            debug_assert!(e.is_naively_permissible());
        }
        Ok(out)
    }
}

/// The odd-spin-parity automorphism of the lattice chain over the given
/// indices: an element of similitude zero and odd spin parity stabilizing
/// every chain point `(ω_i, ω_{−i})` for `i` in the set. It exists exactly
/// when the index set avoids the endpoints `0` and `n`, whose chain members
/// are self-dual and admit no odd-parity stabilizer.
///
/// Right multiplication by this element preserves every difference vector
/// `μ_j^w` at the stabilized positions, so it identifies the two spin-parity
/// slices of the permissible set without changing any face. Classes indexing
/// Schubert cells are double cosets *up to this identification*.
pub fn odd_parity_stabilizer(
    indices: &BTreeSet<usize>,
    n: usize,
) -> Result<Option<AffineElement>> {
    validate_rank(n)?;
    period_reps(indices, n)?;
    if indices.contains(&0) || indices.contains(&n) {
        return Ok(None);
    }
    let eta = special_elements(n)?.tau1;
    debug_assert!(epsilon(&eta).expect("even element"));
    Ok(Some(eta))
}

/// Partition a finite element set into the classes indexing Schubert cells
/// over the given chain indices: ordinary double cosets of the joint
/// stabilizer, except that when [`odd_parity_stabilizer`] exists, every
/// element is first normalized into the even spin-parity slice, merging the
/// pairs of cosets it identifies.
pub fn cell_classes(
    set: &[AffineElement],
    indices: &BTreeSet<usize>,
    n: usize,
) -> Result<Vec<DoubleCoset>> {
    let eta = odd_parity_stabilizer(indices, n)?;
    let idx: Vec<usize> = indices.iter().copied().collect();
    let stab = StabilizerGroup::for_chain_indices(&idx, n)?;
    let mut normalized: Vec<AffineElement> = match &eta {
        None => set.to_vec(),
        Some(eta) => set
            .iter()
            .map(|w| Ok(if epsilon(w)? { w.multiply(eta) } else { w.clone() }))
            .collect::<Result<_>>()?,
    };
    normalized.sort();
    normalized.dedup();
    Ok(double_cosets(&normalized, &stab))
}

/// Classify a naively permissible subset into its vertex-group orbit: the
/// pair `(ℓ, d)` with `ℓ = a₁(E)` and, in the top case `ℓ = i`, the class
/// `d ∈ 1..=4` determined by the parities of `(r₁, r₂)`; lower types form a
/// single class `d = 1`.
pub fn orbit_classify(e: &IsoSubset) -> Result<(usize, usize)> {
    if !e.is_naively_permissible() {
        return Err(Error::NotPermissible);
    }
    let (i, n) = (e.vertex(), e.rank());
    let ell = e.a1();
    if ell < i {
        return Ok((ell, 1));
    }
    let pattern = (e.r1() % 2, e.r2() % 2);
    let targets = [
        (1, (i % 2, (n - i) % 2)),
        (2, ((i + 1) % 2, (n - i + 1) % 2)),
        (3, (i % 2, (n - i + 1) % 2)),
        (4, ((i + 1) % 2, (n - i) % 2)),
    ];
    let (d, _) = targets
        .into_iter()
        .find(|(_, t)| *t == pattern)
        .expect("the four parity patterns cover all cases");
    Ok((i, d))
}

/// The stratum rank of a subset: `#(E ∩ A_i)`, the rank of the natural map
/// between the paired coordinate subspaces. Meaningful for naively
/// permissible subsets, where it equals the orbit type `ℓ`.
pub fn stratum_rank(e: &IsoSubset) -> usize {
    e.a1()
}

/// All signed-permissible elements for an index set, as sorted compact keys:
/// for each even permutation part, the translation is confined to the box
/// forced by the unit-box condition at every chain position of one period.
pub(crate) fn perm_element_keys(
    indices: &BTreeSet<usize>,
    sign: Sign,
    n: usize,
) -> Result<Vec<u128>> {
    validate_rank(n)?;
    let reps = period_reps(indices, n)?;
    let omegas: Vec<Vec<i64>> = reps.iter().map(|&j| omega(j, n)).collect::<Result<_>>()?;
    let d = 2 * n;
    let mut out = Vec::new();
    for sigma in enumerate_circ(n) {
        // Intersect the per-position boxes ω_j − σω_j + {0,1}^{2n}.
        let mut lo = vec![i64::MIN; d];
        let mut hi = vec![i64::MAX; d];
        for om in &omegas {
            let moved = sigma.permute_vec(om);
            for k in 0..d {
                let base = om[k] - moved[k];
                lo[k] = lo[k].max(base);
                hi[k] = hi[k].min(base + 1);
            }
        }
        if (0..d).any(|k| lo[k] > hi[k]) {
            continue;
        }
        // Enumerate translations in the box with pair sums 1 (forced by the
        // entry-sum condition).
        let mut choices: Vec<Vec<i64>> = Vec::with_capacity(n);
        let mut feasible = true;
        for k in 0..n {
            let ks = d - 1 - k;
            let opts: Vec<i64> = (lo[k]..=hi[k])
                .filter(|&x| 1 - x >= lo[ks] && 1 - x <= hi[ks])
                .collect();
            if opts.is_empty() {
                feasible = false;
                break;
            }
            choices.push(opts);
        }
        if !feasible {
            continue;
        }
        let mut assignment = vec![0usize; n];
        loop {
            let mut v = vec![0i64; d];
            for k in 0..n {
                let x = choices[k][assignment[k]];
                v[k] = x;
                v[d - 1 - k] = 1 - x;
            }
            let w = AffineElement::from_parts(TransVec::from_vec(v)?, sigma.clone())?;
            if is_pm_permissible(&w, indices, sign)? {
                out.push(w.encode());
            }
            // Advance the mixed-radix counter.
            let mut pos = 0;
            loop {
                if pos == n {
                    break;
                }
                assignment[pos] += 1;
                if assignment[pos] < choices[pos].len() {
                    break;
                }
                assignment[pos] = 0;
                pos += 1;
            }
            if pos == n {
                break;
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// The permissible classes at one vertex, as canonical double cosets of the
/// vertex stabilizer — representatives taken in the even spin-parity slice,
/// which indexes the Schubert cells (see [`odd_parity_stabilizer`]).
///
/// For `0 < i < n` this walks the face route: enumerate the permissible
/// subsets, keep those compatible with the sign (top-type subsets must match
/// the sign's spin parity; lower types always qualify), take the canonical
/// representative subset of each orbit, map it through [`face_to_element`]
/// (which lands in the even slice by construction), and canonicalize. At the
/// extreme vertices no parity identification exists and the constructive map
/// can fail, so the classes are computed instead by partitioning the full
/// brute-force element set.
pub fn enumerate_perm(i: usize, sign: Sign, n: usize) -> Result<Vec<DoubleCoset>> {
    validate_rank(n)?;
    if i > n {
        return Err(Error::InvalidIndex(format!("chain index {i} out of range 0..={n}")));
    }
    let stab = StabilizerGroup::for_chain_indices(&[i], n)?;
    if i == 0 || i == n {
        let keys = perm_element_keys(&BTreeSet::from([i]), sign, n)?;
        return Ok(double_cosets_stable_keys(&keys, &stab));
    }
    let mut classes = BTreeSet::new();
    for e in IsoSubset::enumerate_permissible(i, n)? {
        let class = orbit_classify(&e)?;
        if class.0 == i && !spin_orbit_member(&e.mu(), sign, n)? {
            continue;
        }
        classes.insert(class);
    }
    let mut out = Vec::new();
    for (ell, dd) in classes {
        let rep_subset = if ell == i {
            IsoSubset::top_representative(i, dd, n)?
        } else {
            IsoSubset::lower_representative(i, ell, n)?
        };
        let mu = rep_subset.mu();
        let v: Vec<i64> =
            omega(i as i64, n)?.iter().zip(mu.entries()).map(|(a, b)| a + b).collect();
        let face = Face::new(&[(i, v)], n)?;
        let w = face_to_element(&face)?;
        debug_assert!(is_pm_permissible(&w, &BTreeSet::from([i]), sign)?);
        out.push(DoubleCoset {
            index: stab.labels().to_vec(),
            rep: canonical_rep(&w, &stab),
            complete: true,
        });
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// The permissible classes for a general index set: the partition of the
/// brute-force permissible element set into cell classes of the joint
/// stabilizer (double cosets, with the even/odd spin-parity slices merged
/// when [`odd_parity_stabilizer`] exists). This realizes the intersection of
/// the per-vertex pullbacks, since signed permissibility for `I` is exactly
/// the conjunction of the per-vertex conditions.
pub fn enumerate_perm_general(
    indices: &BTreeSet<usize>,
    sign: Sign,
    n: usize,
) -> Result<Vec<DoubleCoset>> {
    let mut keys = perm_element_keys(indices, sign, n)?;
    if let Some(eta) = odd_parity_stabilizer(indices, n)? {
        let mut normalized: Vec<u128> = Vec::with_capacity(keys.len());
        for key in keys {
            let w = AffineElement::decode(key, n);
            normalized.push(if epsilon(&w)? { w.multiply(&eta).encode() } else { key });
        }
        normalized.sort_unstable();
        normalized.dedup();
        keys = normalized;
    }
    let stab = {
        let idx: Vec<usize> = indices.iter().copied().collect();
        StabilizerGroup::for_chain_indices(&idx, n)?
    };
    Ok(double_cosets_stable_keys(&keys, &stab))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alcove::{admissible_set, double_cosets, length_ball_bfs, project_coset};
    use crate::weyl::kottwitz;

    fn t_mu(sign: Sign, n: usize) -> AffineElement {
        AffineElement::translation(sign.cochar(n).unwrap().vec().clone())
    }

    #[test]
    fn omega_closed_forms() {
        assert_eq!(omega(0, 4).unwrap(), vec![0; 8]);
        assert_eq!(omega(2, 4).unwrap(), vec![-1, -1, 0, 0, 0, 0, 0, 0]);
        assert_eq!(omega(-2, 4).unwrap(), vec![0, 0, 0, 0, 0, 0, 1, 1]);
        assert_eq!(omega(8, 4).unwrap(), vec![-1; 8]);
    }

    #[test]
    fn standard_faces_validate() {
        for n in [4usize, 5] {
            for indices in [vec![0], vec![n], vec![2], vec![0, 2, n]] {
                let f = Face::standard(&indices, n).unwrap();
                assert_eq!(f.dual_const(), 0);
            }
        }
        // A broken entry sum is rejected.
        let mut v = omega(2, 4).unwrap();
        v[0] += 1;
        assert!(Face::new(&[(2, v)], 4).is_err());
        // Non-nested vectors are rejected.
        let bad = Face::new(
            &[(0, omega(0, 4).unwrap()), (2, omega(2, 4).map(|v| v.iter().map(|x| x + 1).collect()).unwrap())],
            4,
        );
        assert!(bad.is_err());
    }

    #[test]
    fn faces_transform_under_the_group() {
        let n = 4;
        let s = special_elements(n).unwrap();
        let f = Face::standard(&[0, 2, 4], n).unwrap();
        let moved = f.transform(&t_mu(Sign::Plus, n)).unwrap();
        assert_eq!(moved.dual_const(), 1);
        let moved = moved.transform(&s.tau2).unwrap();
        assert_eq!(moved.dual_const(), 2);
        let back = moved
            .transform(&s.tau2.inverse())
            .unwrap()
            .transform(&t_mu(Sign::Plus, n).inverse())
            .unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn translation_by_mu_is_naively_permissible_everywhere() {
        for n in [4usize, 5] {
            let w = t_mu(Sign::Plus, n);
            for i in 0..=n {
                assert!(is_naively_permissible(&w, &BTreeSet::from([i])).unwrap());
            }
            assert!(is_naively_permissible(&w, &(0..=n).collect()).unwrap());
        }
        // The identity fails the entry-sum condition.
        let e = AffineElement::identity(4);
        assert!(!is_naively_permissible(&e, &BTreeSet::from([2])).unwrap());
    }

    #[test]
    fn permissible_faces_satisfy_duality() {
        let n = 4;
        let keys = perm_element_keys(&BTreeSet::from([2]), Sign::Plus, n).unwrap();
        for key in keys.iter().step_by(9) {
            let w = AffineElement::decode(*key, n);
            for j in [2i64, 6] {
                let vj = w.act(&omega(j, n).unwrap());
                let vmj = w.act(&omega(-j, n).unwrap());
                for k in 0..2 * n {
                    assert_eq!(vj[k] + vmj[2 * n - 1 - k], 1, "duality fails at {w}");
                }
            }
        }
    }

    #[test]
    fn mu_vector_of_the_distinguished_translation() {
        let n = 4;
        let w = t_mu(Sign::Plus, n);
        let mu = mu_vector(&w, 2).unwrap();
        assert_eq!(mu.entries(), Sign::Plus.cochar(n).unwrap().vec().as_slice());
        assert!(mu.is_totally_isotropic());
        let zeros = mu.zeros();
        assert_eq!(zeros, (n + 1..=2 * n).collect::<BTreeSet<_>>());
    }

    #[test]
    fn spin_membership_examples() {
        let n = 4;
        let plus = MuVector::from_vec(
            Sign::Plus.cochar(n).unwrap().vec().as_slice().to_vec(),
            n,
        )
        .unwrap();
        let minus = MuVector::from_vec(
            Sign::Minus.cochar(n).unwrap().vec().as_slice().to_vec(),
            n,
        )
        .unwrap();
        assert!(spin_orbit_member(&plus, Sign::Plus, n).unwrap());
        assert!(!spin_orbit_member(&minus, Sign::Plus, n).unwrap());
        assert!(spin_orbit_member(&minus, Sign::Minus, n).unwrap());
        // Non-isotropic input is rejected.
        let bad = MuVector::from_vec(vec![1, 1, 0, 0, 0, 0, 1, 1], n).unwrap();
        assert!(spin_orbit_member(&bad, Sign::Plus, n).is_err());
    }

    #[test]
    fn parity_criterion_matches_brute_force_orbits() {
        let n = 4;
        // All totally isotropic 0/1 vectors: one free bit per pair.
        for mask in 0..(1u32 << n) {
            let mut v = vec![0i64; 2 * n];
            for k in 0..n {
                let bit = (mask >> k) & 1;
                v[k] = bit as i64;
                v[2 * n - 1 - k] = 1 - bit as i64;
            }
            let mu = MuVector::from_vec(v, n).unwrap();
            for sign in Sign::ALL {
                assert_eq!(
                    spin_orbit_member(&mu, sign, n).unwrap(),
                    spin_orbit_member_brute(&mu, sign, n).unwrap(),
                    "criterion mismatch at mask {mask} sign {sign}"
                );
            }
        }
    }

    #[test]
    fn signed_permissibility_of_the_distinguished_translations() {
        for n in [4usize, 5] {
            for i in 0..=n {
                let idx = BTreeSet::from([i]);
                assert!(is_pm_permissible(&t_mu(Sign::Plus, n), &idx, Sign::Plus).unwrap());
                assert!(!is_pm_permissible(&t_mu(Sign::Plus, n), &idx, Sign::Minus).unwrap());
                assert!(is_pm_permissible(&t_mu(Sign::Minus, n), &idx, Sign::Minus).unwrap());
            }
        }
    }

    #[test]
    fn face_to_element_round_trips() {
        let n = 4;
        // The standard face maps to a stabilizer element.
        for i in 1..n {
            let w = face_to_element(&Face::standard(&[i], n).unwrap()).unwrap();
            let om = omega(i as i64, n).unwrap();
            assert_eq!(w.act(&om), om);
        }
        // Random faces produced by group elements round-trip.
        let s = special_elements(n).unwrap();
        let ball = length_ball_bfs(n, 3).unwrap();
        for (u, _) in ball.iter().step_by(37) {
            for shift in [AffineElement::identity(n), s.tau1.multiply(&s.tau1)] {
                let w = u.multiply(&shift);
                if kottwitz(&w).unwrap().parity {
                    continue; // stay inside the spin kernel
                }
                for i in 1..n {
                    let face = Face::from_element(&w, &[i], n).unwrap();
                    let rebuilt = face_to_element(&face).unwrap();
                    let om = omega(i as i64, n).unwrap();
                    assert_eq!(rebuilt.act(&om), w.act(&om));
                    assert!(!epsilon(&rebuilt).unwrap());
                }
            }
        }
    }

    #[test]
    fn face_stabilizer_matches_the_vertex_group_on_a_ball() {
        let n = 4;
        let i = 2;
        let stab = StabilizerGroup::for_chain_indices(&[i], n).unwrap();
        let om = omega(i as i64, n).unwrap();
        let om_dual = omega(-(i as i64), n).unwrap();
        for (u, _) in length_ball_bfs(n, 4).unwrap() {
            let fixes = u.act(&om) == om && u.act(&om_dual) == om_dual;
            assert_eq!(fixes, stab.contains(&u), "stabilizer mismatch at {u}");
        }
    }

    #[test]
    fn zero_sets_of_permissible_elements_are_permissible() {
        let n = 4;
        let i = 2;
        let keys = perm_element_keys(&BTreeSet::from([i]), Sign::Plus, n).unwrap();
        assert!(!keys.is_empty());
        for key in keys.iter().step_by(7) {
            let w = AffineElement::decode(*key, n);
            let e = IsoSubset::new(mu_vector(&w, i as i64).unwrap().zeros(), i, n).unwrap();
            assert!(e.is_naively_permissible(), "E^w fails at {w}");
        }
    }

    #[test]
    fn orbit_classification_of_the_representatives() {
        let n = 5;
        for i in 1..n {
            for d in 1..=4 {
                let e = IsoSubset::top_representative(i, d, n).unwrap();
                assert!(e.is_naively_permissible(), "E^{i}_{d} not permissible");
                assert_eq!(orbit_classify(&e).unwrap(), (i, d));
                assert_eq!(stratum_rank(&e), i);
                // Top types are totally isotropic: E^⊥ = E.
                assert_eq!(&e.perp(), e.elements());
            }
            let min_ell = (2 * i).saturating_sub(n);
            for ell in min_ell..i {
                let e = IsoSubset::lower_representative(i, ell, n).unwrap();
                assert_eq!(orbit_classify(&e).unwrap(), (ell, 1));
                assert_eq!(stratum_rank(&e), ell);
                assert_ne!(&e.perp(), e.elements());
            }
        }
    }

    #[test]
    fn orbit_count_matches_the_closed_form() {
        for n in [4usize, 5] {
            for i in 1..n {
                let mut classes = BTreeSet::new();
                for e in IsoSubset::enumerate_permissible(i, n).unwrap() {
                    classes.insert(orbit_classify(&e).unwrap());
                }
                assert_eq!(classes.len(), i.min(n - i) + 4, "class count at n={n}, i={i}");
            }
        }
    }

    #[test]
    fn permissible_class_counts() {
        let n = 4;
        for i in 1..n {
            let plus = enumerate_perm(i, Sign::Plus, n).unwrap();
            let minus = enumerate_perm(i, Sign::Minus, n).unwrap();
            let expected = i.min(n - i);
            assert_eq!(plus.len(), expected + 2);
            assert_eq!(minus.len(), expected + 2);
            let union: BTreeSet<_> = plus.iter().chain(&minus).cloned().collect();
            assert_eq!(union.len(), expected + 4, "union count at i={i}");
        }
        for i in [0, n] {
            assert_eq!(enumerate_perm(i, Sign::Plus, n).unwrap().len(), 1);
            assert_eq!(enumerate_perm(i, Sign::Minus, n).unwrap().len(), 1);
        }
    }

    #[test]
    fn face_route_matches_the_brute_route() {
        let n = 4;
        for i in 0..=n {
            for sign in Sign::ALL {
                let face_route = enumerate_perm(i, sign, n).unwrap();
                let brute = enumerate_perm_general(&BTreeSet::from([i]), sign, n).unwrap();
                assert_eq!(face_route, brute, "route mismatch at i={i}, sign={sign}");
            }
        }
    }

    #[test]
    fn permissible_equals_admissible_at_a_vertex() {
        let n = 4;
        for i in 0..=n {
            for sign in Sign::ALL {
                let adm = admissible_set(&sign.cochar(n).unwrap(), n).unwrap();
                let adm_cells: BTreeSet<_> =
                    cell_classes(&adm, &BTreeSet::from([i]), n).unwrap().into_iter().collect();
                let perm: BTreeSet<_> =
                    enumerate_perm(i, sign, n).unwrap().into_iter().collect();
                assert_eq!(adm_cells, perm, "Perm ≠ Adm at i={i}, sign={sign}");
            }
        }
    }

    #[test]
    fn parity_identification_merges_exactly_the_lower_classes() {
        let n = 4;
        let i = 2;
        let idx = BTreeSet::from([i]);
        // The odd-parity stabilizer exists only away from the endpoints, and
        // it fixes the interior chain points while carrying odd parity.
        assert!(odd_parity_stabilizer(&BTreeSet::from([0usize]), n).unwrap().is_none());
        assert!(odd_parity_stabilizer(&BTreeSet::from([n]), n).unwrap().is_none());
        let eta = odd_parity_stabilizer(&idx, n).unwrap().unwrap();
        assert!(epsilon(&eta).unwrap());
        for j in 1..n {
            let om = omega(j as i64, n).unwrap();
            assert_eq!(eta.act(&om), om);
        }

        // Element-level admissible sets of opposite signs are disjoint (they
        // sit in different parity fibers), so their plain double cosets are
        // disjoint too; the cell classes nevertheless share exactly the
        // lower-rank classes.
        let stab = StabilizerGroup::for_chain_indices(&[i], n).unwrap();
        let adm_p = admissible_set(&Sign::Plus.cochar(n).unwrap(), n).unwrap();
        let adm_m = admissible_set(&Sign::Minus.cochar(n).unwrap(), n).unwrap();
        let plain_p: BTreeSet<_> = double_cosets(&adm_p, &stab).into_iter().collect();
        let plain_m: BTreeSet<_> = double_cosets(&adm_m, &stab).into_iter().collect();
        assert!(plain_p.is_disjoint(&plain_m));

        let cells_p: BTreeSet<_> =
            cell_classes(&adm_p, &idx, n).unwrap().into_iter().collect();
        let cells_m: BTreeSet<_> =
            cell_classes(&adm_m, &idx, n).unwrap().into_iter().collect();
        let shared: Vec<_> = cells_p.intersection(&cells_m).collect();
        assert_eq!(shared.len(), i.min(n - i));
        for c in shared {
            let e = IsoSubset::new(
                mu_vector(&c.rep, i as i64).unwrap().zeros(),
                i,
                n,
            )
            .unwrap();
            let (ell, _) = orbit_classify(&e).unwrap();
            assert!(ell < i, "shared cell has top rank");
        }
    }

    #[test]
    fn general_enumeration_is_contained_in_each_pullback() {
        let n = 4;
        let indices = BTreeSet::from([0usize, 2]);
        let joint = StabilizerGroup::for_chain_indices(&[0, 2], n).unwrap();
        let general = enumerate_perm_general(&indices, Sign::Plus, n).unwrap();
        assert!(!general.is_empty());
        for i in [0usize, 2] {
            let vertex = StabilizerGroup::for_chain_indices(&[i], n).unwrap();
            let perm_i: BTreeSet<_> = enumerate_perm(i, Sign::Plus, n)
                .unwrap()
                .into_iter()
                .map(|c| c.rep)
                .collect();
            for c in &general {
                let projected = project_coset(c, &joint, &vertex).unwrap();
                assert!(perm_i.contains(&projected.rep), "pullback violated at i={i}");
            }
        }
    }

    #[test]
    fn sign_split_of_the_top_classes() {
        // The four top classes pair off: d = 1,2 share one sign and d = 3,4
        // the other, decided by the spin parity of the class (at n even the
        // d = 1,2 pair is the plus side).
        for n in [4usize, 5] {
            let i = 2;
            let sign_of = |d: usize| {
                let e = IsoSubset::top_representative(i, d, n).unwrap();
                Sign::ALL
                    .into_iter()
                    .find(|&s| spin_orbit_member(&e.mu(), s, n).unwrap())
                    .unwrap()
            };
            assert_eq!(sign_of(1), sign_of(2));
            assert_eq!(sign_of(3), sign_of(4));
            assert_ne!(sign_of(1), sign_of(3));
            if n % 2 == 0 {
                assert_eq!(sign_of(1), Sign::Plus);
            }
        }
    }
}
