//! Exact arithmetic in the extended affine Weyl group of the even orthogonal
//! similitude group `GO_{2n}`.
//!
//! The group is realized concretely on `Z^{2n}`: an element is a pair
//! `t^v · σ` where
//!
//! * `σ` is a permutation of `[1, 2n]` commuting with the involution
//!   `i* := 2n + 1 − i` (a signed permutation of the `n` coordinate pairs,
//!   the group written `S*_{2n}` here), and
//! * `v ∈ Z^{2n}` is a translation subject to the similitude constraint
//!   `v_1 + v_{2n} = v_2 + v_{2n−1} = … = v_n + v_{n+1}`.
//!
//! Multiplication is the semidirect product law
//! `(t^v σ)(t^u ρ) = t^{v + σu} (σ ∘ ρ)` with `(σu)(i) = u(σ^{-1} i)` and
//! `(σ ∘ ρ)(i) = σ(ρ(i))`, and the affine action on `Z^{2n}` is
//! `w · x = σx + v`.
//!
//! The *neutral component* consists of the elements with even `σ`; the
//! Kottwitz invariant `κ(t^v σ) = (v_1 + v_{2n}, Σ_{j ≤ n} v_j mod 2)` is a
//! homomorphism on that component and detects the affine Weyl group
//! `W_aff = ker κ` inside it. The second component of `κ` is the character
//! `ε` whose kernel is the index-two subgroup `W′`.
//!
//! All coordinate indices in the public API are **one-based** (`1..=2n`),
//! matching the standard notation for these groups; vectors are stored with
//! coordinate `i` at slot `i − 1`.
//!
//! Integer arithmetic is 64-bit and checked: the supported ranks keep every
//! intermediate value far from the boundary, so an overflow is a bug and the
//! operations panic rather than return an error.
//!
//! All types in this module are immutable values and all operations are pure;
//! everything is safe for unrestricted parallel use.

use crate::error::{Error, Result};

/// Smallest supported half-rank.
pub const MIN_RANK: usize = 4;

/// Largest supported half-rank.
///
/// The group arithmetic itself is exact at any rank; this cap keeps the
/// compact 128-bit hash encoding of group elements sound (see
/// [`AffineElement::encode`]) and bounds the enumerative routines.
pub const MAX_RANK: usize = 12;

/// Largest half-rank at which elements can be packed into `u128` hash keys.
pub(crate) const MAX_ENCODABLE_RANK: usize = 8;

/// Validate the half-rank `n`.
pub fn validate_rank(n: usize) -> Result<()> {
    if (MIN_RANK..=MAX_RANK).contains(&n) {
        Ok(())
    } else {
        Err(Error::RankRange(n))
    }
}

/// The involution `i ↦ 2n + 1 − i` on one-based coordinates.
#[inline]
pub fn star(i: usize, n: usize) -> usize {
    2 * n + 1 - i
}

#[inline]
fn checked_add(a: i64, b: i64) -> i64 {
    a.checked_add(b).expect("i64 overflow in translation arithmetic")
}

/// A permutation of `[1, 2n]` commuting with `i ↦ 2n + 1 − i`.
///
/// Stored as the image sequence `images[i − 1] = σ(i)` with one-based values.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignedPerm {
    images: Vec<usize>,
}

impl SignedPerm {
    /// The identity permutation of `[1, 2n]`.
    pub fn identity(n: usize) -> Self {
        SignedPerm { images: (1..=2 * n).collect() }
    }

    /// Build from a one-based image sequence of length `2n`, validating that
    /// it is a permutation commuting with the star involution.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let d = images.len();
        if d == 0 || !d.is_multiple_of(2) {
            return Err(Error::NotAPermutation);
        }
        let mut seen = vec![false; d];
        for &img in &images {
            if img == 0 || img > d || seen[img - 1] {
                return Err(Error::NotAPermutation);
            }
            seen[img - 1] = true;
        }
        let n = d / 2;
        for i in 1..=d {
            if images[star(i, n) - 1] != star(images[i - 1], n) {
                return Err(Error::NotStarCompatible);
            }
        }
        Ok(SignedPerm { images })
    }

    /// The product of the pair transpositions `(a b)(a* b*)`, the basic
    /// star-compatible swap of two coordinate pairs. `a`, `b` and their stars
    /// must be four distinct indices.
    pub fn pair_swap(n: usize, a: usize, b: usize) -> Result<Self> {
        let d = 2 * n;
        if a == 0 || b == 0 || a > d || b > d || a == b || a == star(b, n) {
            return Err(Error::InvalidIndex(format!(
                "pair swap ({a} {b}) is not a product of two disjoint transpositions"
            )));
        }
        let mut images: Vec<usize> = (1..=d).collect();
        images.swap(a - 1, b - 1);
        images.swap(star(a, n) - 1, star(b, n) - 1);
        Ok(SignedPerm { images })
    }

    /// The transposition `(i i*)`, the basic sign flip of one coordinate pair.
    pub fn star_swap(n: usize, i: usize) -> Result<Self> {
        let d = 2 * n;
        if i == 0 || i > d {
            return Err(Error::InvalidIndex(format!("coordinate {i} out of range 1..={d}")));
        }
        let mut images: Vec<usize> = (1..=d).collect();
        images.swap(i - 1, star(i, n) - 1);
        Ok(SignedPerm { images })
    }

    /// Number of coordinates `2n`.
    #[inline]
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Half-rank `n`.
    #[inline]
    pub fn rank(&self) -> usize {
        self.images.len() / 2
    }

    /// Image `σ(i)` of a one-based coordinate.
    #[inline]
    pub fn image(&self, i: usize) -> usize {
        self.images[i - 1]
    }

    /// The full image sequence (one-based values, slot `i − 1` holds `σ(i)`).
    #[inline]
    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// Composition `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &SignedPerm) -> SignedPerm {
        assert_eq!(self.degree(), other.degree(), "degree mismatch in composition");
        SignedPerm {
            images: other.images.iter().map(|&j| self.images[j - 1]).collect(),
        }
    }

    /// Group inverse.
    pub fn inverse(&self) -> SignedPerm {
        let mut images = vec![0usize; self.degree()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j - 1] = i + 1;
        }
        SignedPerm { images }
    }

    /// Whether the permutation is even, i.e. lies in the index-two subgroup
    /// `S°_{2n}` of `S*_{2n}`.
    pub fn is_even(&self) -> bool {
        let mut inversions = 0usize;
        for i in 0..self.images.len() {
            for j in i + 1..self.images.len() {
                if self.images[i] > self.images[j] {
                    inversions += 1;
                }
            }
        }
        inversions.is_multiple_of(2)
    }

    /// Apply to a vector: `(σv)(i) = v(σ^{-1} i)`, i.e. the entry at slot
    /// `i` moves to slot `σ(i)`.
    pub fn permute_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(v.len(), self.degree(), "vector length mismatch");
        let mut out = vec![0i64; v.len()];
        for (i, &img) in self.images.iter().enumerate() {
            out[img - 1] = v[i];
        }
        out
    }
}

impl std::fmt::Display for SignedPerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for (k, img) in self.images.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{img}")?;
        }
        write!(f, "]")
    }
}

/// Enumerate all of `S*_{2n}` (order `2^n · n!`) in a deterministic order.
///
/// A star-compatible permutation is determined by a permutation `p` of the
/// `n` coordinate pairs together with a sign bit per pair; the enumeration
/// runs over exactly those choices.
pub fn enumerate_star(n: usize) -> Vec<SignedPerm> {
    use itertools::Itertools;
    let mut out = Vec::with_capacity((1usize << n) * (1..=n).product::<usize>());
    for p in (1..=n).permutations(n) {
        for mask in 0..(1usize << n) {
            let mut images = vec![0usize; 2 * n];
            for k in 1..=n {
                let target = p[k - 1];
                let flipped = mask & (1 << (k - 1)) != 0;
                let img = if flipped { star(target, n) } else { target };
                images[k - 1] = img;
                images[star(k, n) - 1] = star(img, n);
            }
            out.push(SignedPerm { images });
        }
    }
    out
}

/// Enumerate the even subgroup `S°_{2n}` (order `2^{n−1} · n!`).
pub fn enumerate_circ(n: usize) -> Vec<SignedPerm> {
    enumerate_star(n).into_iter().filter(SignedPerm::is_even).collect()
}

/// A translation vector of the lattice `X_*`, i.e. an integer vector of
/// length `2n` whose paired coordinate sums `v_i + v_{i*}` agree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TransVec {
    v: Vec<i64>,
}

impl TransVec {
    /// The zero translation.
    pub fn zero(n: usize) -> Self {
        TransVec { v: vec![0; 2 * n] }
    }

    /// Build from raw coordinates, validating the similitude constraint.
    pub fn from_vec(v: Vec<i64>) -> Result<Self> {
        let d = v.len();
        if d == 0 || !d.is_multiple_of(2) {
            return Err(Error::VectorLength { expected: 2, got: d });
        }
        let n = d / 2;
        let c = checked_add(v[0], v[d - 1]);
        for i in 1..=n {
            if checked_add(v[i - 1], v[star(i, n) - 1]) != c {
                return Err(Error::SimilitudeViolation);
            }
        }
        Ok(TransVec { v })
    }

    /// Number of coordinates `2n`.
    #[inline]
    pub fn degree(&self) -> usize {
        self.v.len()
    }

    /// Half-rank `n`.
    #[inline]
    pub fn rank(&self) -> usize {
        self.v.len() / 2
    }

    /// One-based coordinate access.
    #[inline]
    pub fn entry(&self, i: usize) -> i64 {
        self.v[i - 1]
    }

    /// The coordinates as a slice (slot `i − 1` holds coordinate `i`).
    #[inline]
    pub fn as_slice(&self) -> &[i64] {
        &self.v
    }

    /// The common pair sum `v_1 + v_{2n}` (the similitude factor exponent).
    #[inline]
    pub fn similitude(&self) -> i64 {
        checked_add(self.v[0], self.v[self.v.len() - 1])
    }

    /// Entrywise sum with another translation.
    pub fn add(&self, other: &TransVec) -> TransVec {
        assert_eq!(self.degree(), other.degree(), "degree mismatch in translation sum");
        TransVec {
            v: self.v.iter().zip(&other.v).map(|(&a, &b)| checked_add(a, b)).collect(),
        }
    }

    /// Entrywise negation.
    pub fn neg(&self) -> TransVec {
        TransVec { v: self.v.iter().map(|&a| -a).collect() }
    }

    /// The reversed vector `v*` with `(v*)_i = v_{2n+1−i}`.
    pub fn reversed(&self) -> TransVec {
        let mut v = self.v.clone();
        v.reverse();
        TransVec { v }
    }

    /// Parity of `Σ_{j ≤ n} v_j`, the quantity behind the character `ε`.
    pub fn half_sum_parity(&self) -> bool {
        let n = self.rank();
        self.v[..n].iter().sum::<i64>().rem_euclid(2) == 1
    }

    /// Whether the vector lies in the coroot lattice: pair sums zero with an
    /// even first-half sum.
    pub fn in_coroot_lattice(&self) -> bool {
        self.similitude() == 0 && !self.half_sum_parity()
    }
}

impl std::fmt::Display for TransVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (k, x) in self.v.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Connected component of the ambient group an element belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Component {
    /// The neutral component (even permutation part).
    Neutral,
    /// The non-neutral component (odd permutation part), the coset of the
    /// coordinate swap `(n, n+1)`.
    Swapped,
}

/// An element `t^v · σ` of the extended affine Weyl group.
///
/// The derived ordering (translation vector first, then permutation images,
/// both lexicographic) is the canonical order used for double-coset
/// representatives throughout the crate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AffineElement {
    t: TransVec,
    w0: SignedPerm,
}

impl AffineElement {
    /// The identity element.
    pub fn identity(n: usize) -> Self {
        AffineElement { t: TransVec::zero(n), w0: SignedPerm::identity(n) }
    }

    /// Build from a translation part and a permutation part.
    pub fn from_parts(t: TransVec, w0: SignedPerm) -> Result<Self> {
        if t.degree() != w0.degree() {
            return Err(Error::VectorLength { expected: w0.degree(), got: t.degree() });
        }
        Ok(AffineElement { t, w0 })
    }

    /// The pure translation `t^v`.
    pub fn translation(t: TransVec) -> Self {
        let n = t.rank();
        AffineElement { t, w0: SignedPerm::identity(n) }
    }

    /// The linear element `σ` (zero translation part).
    pub fn from_perm(w0: SignedPerm) -> Self {
        let n = w0.rank();
        AffineElement { t: TransVec::zero(n), w0 }
    }

    /// Translation part `t^v`.
    #[inline]
    pub fn t(&self) -> &TransVec {
        &self.t
    }

    /// Permutation part `σ`.
    #[inline]
    pub fn w0(&self) -> &SignedPerm {
        &self.w0
    }

    /// Number of coordinates `2n`.
    #[inline]
    pub fn degree(&self) -> usize {
        self.w0.degree()
    }

    /// Half-rank `n`.
    #[inline]
    pub fn rank(&self) -> usize {
        self.w0.rank()
    }

    /// Semidirect product `(t^v σ)(t^u ρ) = t^{v + σu} (σ ∘ ρ)`.
    pub fn multiply(&self, other: &AffineElement) -> AffineElement {
        assert_eq!(self.degree(), other.degree(), "degree mismatch in group product");
        let moved = self.w0.permute_vec(other.t.as_slice());
        let t = TransVec {
            v: self
                .t
                .as_slice()
                .iter()
                .zip(&moved)
                .map(|(&a, &b)| checked_add(a, b))
                .collect(),
        };
        AffineElement { t, w0: self.w0.compose(&other.w0) }
    }

    /// Group inverse `(t^v σ)^{-1} = t^{−σ^{-1}v} σ^{-1}`.
    pub fn inverse(&self) -> AffineElement {
        let w0_inv = self.w0.inverse();
        let t = TransVec { v: w0_inv.permute_vec(self.t.as_slice()) }.neg();
        AffineElement { t, w0: w0_inv }
    }

    /// Integer power (repeated multiplication; negative exponents invert).
    pub fn pow(&self, k: i64) -> AffineElement {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = AffineElement::identity(self.rank());
        for _ in 0..k.unsigned_abs() {
            acc = acc.multiply(&base);
        }
        acc
    }

    /// Affine action on `Z^{2n}`: `w · x = σx + v`.
    pub fn act(&self, x: &[i64]) -> Vec<i64> {
        let moved = self.w0.permute_vec(x);
        moved
            .iter()
            .zip(self.t.as_slice())
            .map(|(&a, &b)| checked_add(a, b))
            .collect()
    }

    /// Affine action on points stored at twice their value:
    /// `2(w · p) = σ(2p) + 2v`. Used for the half-integral alcove vertices.
    pub fn act_doubled(&self, doubled: &[i64]) -> Vec<i64> {
        let moved = self.w0.permute_vec(doubled);
        moved
            .iter()
            .zip(self.t.as_slice())
            .map(|(&a, &b)| checked_add(a, checked_add(b, b)))
            .collect()
    }

    /// Component of the ambient group this element lies in.
    pub fn component(&self) -> Component {
        if self.w0.is_even() {
            Component::Neutral
        } else {
            Component::Swapped
        }
    }

    /// Whether the element lies in the neutral component.
    #[inline]
    pub fn is_neutral(&self) -> bool {
        self.w0.is_even()
    }

    /// Whether the element lies in the affine Weyl group `W_aff`
    /// (neutral component, Kottwitz invariant zero).
    pub fn in_w_aff(&self) -> bool {
        self.is_neutral() && self.t.similitude() == 0 && !self.t.half_sum_parity()
    }

    /// Whether the element lies in `W′ = ker ε` (neutral component with
    /// trivial spin parity).
    pub fn in_w_prime(&self) -> bool {
        self.is_neutral() && !self.t.half_sum_parity()
    }

    /// Pack into a 128-bit key: 4 bits per translation entry (offset by 8)
    /// followed by 4 bits per permutation image, translation first so that
    /// numeric key order equals the derived element order. Sound for `n ≤ 8`
    /// and translation entries in `[−8, 7]`; both are asserted.
    pub(crate) fn encode(&self) -> u128 {
        let d = self.degree();
        assert!(
            self.rank() <= MAX_ENCODABLE_RANK,
            "compact encoding requires n <= {MAX_ENCODABLE_RANK}"
        );
        let mut key = 0u128;
        for i in 0..d {
            let e = self.t.v[i];
            assert!((-8..=7).contains(&e), "translation entry {e} outside the encodable range");
            key = (key << 4) | (e + 8) as u128;
        }
        for i in 0..d {
            key = (key << 4) | (self.w0.images[i] - 1) as u128;
        }
        key
    }

    /// Inverse of [`AffineElement::encode`] for the given half-rank.
    pub(crate) fn decode(key: u128, n: usize) -> AffineElement {
        let d = 2 * n;
        let mut fields = vec![0u8; 2 * d];
        let mut k = key;
        for slot in (0..2 * d).rev() {
            fields[slot] = (k & 0xf) as u8;
            k >>= 4;
        }
        debug_assert_eq!(k, 0, "key has stray high bits for rank {n}");
        let t: Vec<i64> = fields[..d].iter().map(|&f| f as i64 - 8).collect();
        let images: Vec<usize> = fields[d..].iter().map(|&f| f as usize + 1).collect();
        let out = AffineElement {
            t: TransVec { v: t },
            w0: SignedPerm { images },
        };
        debug_assert_eq!(out.encode(), key);
        out
    }
}

impl std::fmt::Display for AffineElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "t{}·{}", self.t, self.w0)
    }
}

/// Value of the Kottwitz invariant: an integer and a parity bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct KottwitzValue {
    /// The pair-sum component `v_1 + v_{2n}`.
    pub z: i64,
    /// The spin parity `Σ_{j ≤ n} v_j mod 2`.
    pub parity: bool,
}

impl std::ops::Add for KottwitzValue {
    type Output = KottwitzValue;

    /// Componentwise sum in `Z ⊕ Z/2`.
    fn add(self, other: KottwitzValue) -> KottwitzValue {
        KottwitzValue {
            z: checked_add(self.z, other.z),
            parity: self.parity != other.parity,
        }
    }
}

impl KottwitzValue {

    /// The zero value.
    pub fn zero() -> KottwitzValue {
        KottwitzValue { z: 0, parity: false }
    }
}

/// The Kottwitz invariant `κ(t^v σ) = (v_1 + v_{2n}, Σ_{j ≤ n} v_j mod 2)`.
///
/// Defined (and a homomorphism) on the neutral component only; elements with
/// odd permutation part are rejected.
pub fn kottwitz(w: &AffineElement) -> Result<KottwitzValue> {
    if !w.is_neutral() {
        return Err(Error::OddComponent);
    }
    Ok(KottwitzValue { z: w.t().similitude(), parity: w.t().half_sum_parity() })
}

/// The spin character `ε`, the parity component of the Kottwitz invariant.
pub fn epsilon(w: &AffineElement) -> Result<bool> {
    kottwitz(w).map(|k| k.parity)
}

/// The distinguished elements used throughout: alcove-stabilizing generators,
/// the central translation, and representatives of the non-neutral component.
#[derive(Debug, Clone)]
pub struct SpecialElements {
    /// `τ₁ = t^{(−1,0,…,0,1)} · (1 2n)(n n+1)`: Kottwitz value `(0, 1)`.
    pub tau1: AffineElement,
    /// `τ₂ = t^{(0^n,1^n)} · σ₂ · [(n n+1) if n is odd]`: Kottwitz value `(1, 0)`.
    pub tau2: AffineElement,
    /// The central translation `t^{(1,…,1)}`; equals `τ₂² · τ₁^{n mod 2}`.
    pub central: AffineElement,
    /// The block swap `σ₂` sending `(x_1,…,x_{2n})` to `(x_{n+1},…,x_{2n},x_1,…,x_n)`.
    pub sigma2: SignedPerm,
    /// The coordinate swap `(n n+1)`: the canonical representative of the
    /// non-neutral component.
    pub tau: AffineElement,
    /// `τ′ = t^{(−1,0,…,0,1)} · (1 2n)`: a second non-neutral representative.
    pub tau_prime: AffineElement,
}

/// Construct the distinguished elements at half-rank `n`.
pub fn special_elements(n: usize) -> Result<SpecialElements> {
    validate_rank(n)?;
    let d = 2 * n;

    let mut t1 = vec![0i64; d];
    t1[0] = -1;
    t1[d - 1] = 1;
    let t1 = TransVec::from_vec(t1)?;

    // (1 2n) and (n n+1) are each star-compatible transpositions (they swap a
    // coordinate with its own star), so their product is built directly.
    let tau1 = {
        let mut images: Vec<usize> = (1..=d).collect();
        images.swap(0, d - 1);
        images.swap(n - 1, n);
        AffineElement::from_parts(t1, SignedPerm::from_images(images)?)?
    };
    debug_assert!(tau1.is_neutral());

    // σ₂ sends the vector (x_1,…,x_{2n}) to (x_{n+1},…,x_{2n},x_1,…,x_n):
    // the entry at slot i moves to slot i − n (mod 2n), i.e. σ₂(i) = i ± n.
    let sigma2_images: Vec<usize> = (1..=d).map(|i| if i <= n { i + n } else { i - n }).collect();
    let sigma2 = SignedPerm::from_images(sigma2_images)?;

    let t2 = TransVec::from_vec(
        std::iter::repeat_n(0i64, n).chain(std::iter::repeat_n(1i64, n)).collect(),
    )?;
    let swap_mid = {
        let mut images: Vec<usize> = (1..=d).collect();
        images.swap(n - 1, n);
        SignedPerm::from_images(images)?
    };
    let tau2_perm = if n % 2 == 1 { sigma2.compose(&swap_mid) } else { sigma2.clone() };
    let tau2 = AffineElement::from_parts(t2, tau2_perm)?;

    let central = AffineElement::translation(TransVec::from_vec(vec![1i64; d])?);

    let tau = AffineElement::from_perm(swap_mid);

    let tau_prime = {
        let mut images: Vec<usize> = (1..=d).collect();
        images.swap(0, d - 1);
        let mut v = vec![0i64; d];
        v[0] = -1;
        v[d - 1] = 1;
        AffineElement::from_parts(TransVec::from_vec(v)?, SignedPerm::from_images(images)?)?
    };

    Ok(SpecialElements { tau1, tau2, central, sigma2, tau, tau_prime })
}

/// Label of a point of the closed base alcove: either a point `a_i` of the
/// lattice chain (`Chain(i)`, `0 ≤ i ≤ n`) or one of the two primed vertices
/// `a_{0′}`, `a_{n′}` (`Prime(0)`, `Prime(n)`).
///
/// The local Dynkin diagram vertex set consists of `Chain(0)`, `Prime(0)`,
/// `Chain(i)` for `2 ≤ i ≤ n−2`, `Chain(n)` and `Prime(n)`; the chain points
/// `a_1` and `a_{n−1}` are midpoints of the edges `[a_0, a_{0′}]` and
/// `[a_n, a_{n′}]` rather than vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexLabel {
    /// The lattice-chain point `a_i`, `0 ≤ i ≤ n`.
    Chain(usize),
    /// A primed vertex: `Prime(0) = a_{0′}` or `Prime(n) = a_{n′}`.
    Prime(usize),
}

impl VertexLabel {
    /// Whether the label is valid at half-rank `n`.
    pub fn is_valid(self, n: usize) -> bool {
        match self {
            VertexLabel::Chain(i) => i <= n,
            VertexLabel::Prime(i) => i == 0 || i == n,
        }
    }

    /// Whether the label is a vertex of the local Dynkin diagram.
    pub fn is_dynkin(self, n: usize) -> bool {
        match self {
            VertexLabel::Chain(i) => i == 0 || i == n || (2..=n - 2).contains(&i),
            VertexLabel::Prime(i) => i == 0 || i == n,
        }
    }
}

impl std::fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VertexLabel::Chain(i) => write!(f, "{i}"),
            VertexLabel::Prime(i) => write!(f, "{i}'"),
        }
    }
}

/// The `n + 1` vertex labels of the local Dynkin diagram, in canonical order.
pub fn dynkin_labels(n: usize) -> Vec<VertexLabel> {
    let mut out = vec![VertexLabel::Chain(0)];
    out.extend((2..=n - 2).map(VertexLabel::Chain));
    out.push(VertexLabel::Chain(n));
    out.push(VertexLabel::Prime(0));
    out.push(VertexLabel::Prime(n));
    out.sort();
    out
}

/// A vertex (or chain midpoint) of the closed base alcove, with coordinates
/// stored at twice their value so that the half-integral entries stay exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlcoveVertex {
    /// The point's label.
    pub label: VertexLabel,
    /// `2 · a_label` as an integer vector of length `2n`.
    pub doubled: Vec<i64>,
}

/// Doubled coordinates `2 · a_label` of a base-alcove point.
///
/// The chain points follow the uniform pattern
/// `a_i = ((−1/2)^{(i)}, 0^{(2n−2i)}, (1/2)^{(i)})`, the primed vertices are
/// `a_{0′} = (−1, 0^{(2n−2)}, 1)` and
/// `a_{n′} = ((−1/2)^{(n−1)}, 1/2, −1/2, (1/2)^{(n−1)})`.
pub fn vertex_doubled(label: VertexLabel, n: usize) -> Result<Vec<i64>> {
    validate_rank(n)?;
    if !label.is_valid(n) {
        return Err(Error::InvalidIndex(format!("vertex label {label} invalid at n = {n}")));
    }
    let d = 2 * n;
    Ok(match label {
        VertexLabel::Chain(i) => {
            let mut v = vec![0i64; d];
            for k in 0..i {
                v[k] = -1;
                v[d - 1 - k] = 1;
            }
            v
        }
        VertexLabel::Prime(0) => {
            let mut v = vec![0i64; d];
            v[0] = -2;
            v[d - 1] = 2;
            v
        }
        VertexLabel::Prime(_) => {
            let mut v = vec![-1i64; d];
            v[n..].fill(1);
            v[n - 1] = 1;
            v[n] = -1;
            v
        }
    })
}

/// The `n + 1` diagram vertices of the base alcove with doubled coordinates.
pub fn alcove_vertices(n: usize) -> Result<Vec<AlcoveVertex>> {
    dynkin_labels(n)
        .into_iter()
        .map(|label| Ok(AlcoveVertex { label, doubled: vertex_doubled(label, n)? }))
        .collect()
}

/// Where an alcove-stabilizing element sends the vertex *line*
/// `a_label + R·(1,…,1)`.
///
/// Returns the diagram label whose line contains the image of `a_label`
/// together with the offset `m` such that `2·w(a_label) = 2·a_image + m·(1,…,1)`,
/// or `None` if the image lies on no vertex line (i.e. `w` does not stabilize
/// the base alcove up to the central direction).
pub fn vertex_line_image(
    w: &AffineElement,
    label: VertexLabel,
    n: usize,
) -> Result<Option<(VertexLabel, i64)>> {
    let p = vertex_doubled(label, n)?;
    let image = w.act_doubled(&p);
    for target in dynkin_labels(n) {
        let q = vertex_doubled(target, n)?;
        let m = image[0] - q[0];
        if image.iter().zip(&q).all(|(&a, &b)| a - b == m) {
            return Ok(Some((target, m)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mu_plus(n: usize) -> TransVec {
        TransVec::from_vec(
            std::iter::repeat_n(1i64, n).chain(std::iter::repeat_n(0i64, n)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn identity_and_inverse_round_trip() {
        let n = 4;
        let e = AffineElement::identity(n);
        let s = special_elements(n).unwrap();
        for w in [&s.tau1, &s.tau2, &s.central, &s.tau, &s.tau_prime] {
            assert_eq!(e.multiply(w), *w);
            assert_eq!(w.multiply(&e), *w);
            assert_eq!(w.multiply(&w.inverse()), e);
            assert_eq!(w.inverse().multiply(w), e);
        }
    }

    #[test]
    fn translation_product_adds() {
        let n = 4;
        let t = AffineElement::translation(mu_plus(n));
        let square = t.multiply(&t);
        let expected = TransVec::from_vec(vec![2, 2, 2, 2, 0, 0, 0, 0]).unwrap();
        assert_eq!(square, AffineElement::translation(expected));
        assert_eq!(
            AffineElement::translation(mu_plus(n)).inverse(),
            AffineElement::translation(mu_plus(n).neg())
        );
    }

    #[test]
    fn rejects_malformed_parts() {
        assert_eq!(SignedPerm::from_images(vec![1, 1, 2, 3]), Err(Error::NotAPermutation));
        // (1 2) alone breaks the star symmetry at 2n = 4.
        assert_eq!(
            SignedPerm::from_images(vec![2, 1, 3, 4]),
            Err(Error::NotStarCompatible)
        );
        assert_eq!(
            TransVec::from_vec(vec![1, 0, 0, 0]),
            Err(Error::SimilitudeViolation)
        );
    }

    #[test]
    fn star_group_closure_and_parity() {
        let n = 4;
        let all = enumerate_star(n);
        assert_eq!(all.len(), 384); // 2^4 · 4!
        let even = enumerate_circ(n);
        assert_eq!(even.len(), 192);
        // Closure and multiplicativity of parity on a deterministic sample.
        for (k, a) in all.iter().step_by(17).enumerate() {
            let b = &all[(k * 31) % all.len()];
            let c = a.compose(b);
            assert!(SignedPerm::from_images(c.images().to_vec()).is_ok());
            assert_eq!(c.is_even(), a.is_even() == b.is_even());
        }
    }

    #[test]
    fn action_is_affine() {
        let n = 4;
        let s = special_elements(n).unwrap();
        let v = vec![3, -1, 0, 2, -1, 1, 4, 2];
        assert_eq!(AffineElement::identity(n).act(&v), v);
        let shifted = AffineElement::translation(mu_plus(n)).act(&v);
        assert_eq!(shifted, vec![4, 0, 1, 3, -1, 1, 4, 2]);
        let x = s.tau1.multiply(&s.tau2);
        assert_eq!(x.act(&v), s.tau1.act(&s.tau2.act(&v)));
    }

    #[test]
    fn sigma2_is_the_block_swap() {
        let n = 4;
        let s = special_elements(n).unwrap();
        let v = vec![1, 2, 3, 4, 5, 6, 7, 8];
        assert_eq!(s.sigma2.permute_vec(&v), vec![5, 6, 7, 8, 1, 2, 3, 4]);
    }

    #[test]
    fn kottwitz_values_of_special_elements() {
        for n in [4usize, 5, 6] {
            let s = special_elements(n).unwrap();
            assert_eq!(s.tau1.t().as_slice()[0], -1);
            assert_eq!(s.tau1.t().as_slice()[2 * n - 1], 1);
            assert!(s.tau1.t().as_slice()[1..2 * n - 1].iter().all(|&x| x == 0));
            assert_eq!(kottwitz(&s.tau1).unwrap(), KottwitzValue { z: 0, parity: true });
            assert_eq!(kottwitz(&s.tau2).unwrap(), KottwitzValue { z: 1, parity: false });
            assert!(epsilon(&s.tau1).unwrap());
            assert_eq!(
                kottwitz(&AffineElement::identity(n)).unwrap(),
                KottwitzValue::zero()
            );
            let tmu = AffineElement::translation(mu_plus(n));
            assert_eq!(epsilon(&tmu).unwrap(), n % 2 == 1);
            // κ rejects the non-neutral component.
            assert_eq!(kottwitz(&s.tau), Err(Error::OddComponent));
            assert_eq!(kottwitz(&s.tau_prime), Err(Error::OddComponent));
        }
    }

    #[test]
    fn central_translation_factors_through_the_stabilizer_generators() {
        for n in [4usize, 5, 6] {
            let s = special_elements(n).unwrap();
            let word = s.tau2.multiply(&s.tau2).multiply(&s.tau1.pow((n % 2) as i64));
            assert_eq!(word, s.central, "central translation normal form at n = {n}");
        }
    }

    #[test]
    fn kottwitz_is_a_homomorphism_on_the_neutral_component() {
        let n = 4;
        let s = special_elements(n).unwrap();
        let tmu = AffineElement::translation(mu_plus(n));
        let sample = [&s.tau1, &s.tau2, &s.central, &tmu];
        for a in sample {
            for b in sample {
                let prod = a.multiply(b);
                assert_eq!(
                    kottwitz(&prod).unwrap(),
                    kottwitz(a).unwrap() + kottwitz(b).unwrap()
                );
            }
        }
    }

    #[test]
    fn w_prime_is_closed_under_product_and_inverse() {
        let n = 4;
        let s = special_elements(n).unwrap();
        // τ₂ and the central translation lie in W′ at n = 4 (ε = 0); τ₁ does not.
        assert!(s.tau2.in_w_prime());
        assert!(s.central.in_w_prime());
        assert!(!s.tau1.in_w_prime());
        let prod = s.tau2.multiply(&s.central);
        assert!(prod.in_w_prime());
        assert!(prod.inverse().in_w_prime());
        assert!(!s.tau2.in_w_aff()); // κ(τ₂) = (1, 0) ≠ 0
    }

    #[test]
    fn vertex_tables_match_the_closed_forms() {
        let n = 4;
        assert_eq!(
            vertex_doubled(VertexLabel::Chain(0), n).unwrap(),
            vec![0, 0, 0, 0, 0, 0, 0, 0]
        );
        assert_eq!(
            vertex_doubled(VertexLabel::Prime(0), n).unwrap(),
            vec![-2, 0, 0, 0, 0, 0, 0, 2]
        );
        assert_eq!(
            vertex_doubled(VertexLabel::Chain(2), n).unwrap(),
            vec![-1, -1, 0, 0, 0, 0, 1, 1]
        );
        assert_eq!(
            vertex_doubled(VertexLabel::Chain(4), n).unwrap(),
            vec![-1, -1, -1, -1, 1, 1, 1, 1]
        );
        assert_eq!(
            vertex_doubled(VertexLabel::Prime(4), n).unwrap(),
            vec![-1, -1, -1, 1, -1, 1, 1, 1]
        );
        assert_eq!(dynkin_labels(n).len(), n + 1);
    }

    #[test]
    fn tau2_permutes_the_vertex_lines() {
        // Even case: τ₂ swaps 0 ↔ n and 0′ ↔ n′ and reverses the chain.
        let n = 4;
        let s = special_elements(n).unwrap();
        let image = |label| vertex_line_image(&s.tau2, label, n).unwrap().unwrap().0;
        assert_eq!(image(VertexLabel::Chain(0)), VertexLabel::Chain(4));
        assert_eq!(image(VertexLabel::Chain(4)), VertexLabel::Chain(0));
        assert_eq!(image(VertexLabel::Prime(0)), VertexLabel::Prime(4));
        assert_eq!(image(VertexLabel::Prime(4)), VertexLabel::Prime(0));
        assert_eq!(image(VertexLabel::Chain(2)), VertexLabel::Chain(2));

        // Odd case: τ₂ induces the 4-cycle (0, n, 0′, n′).
        let n = 5;
        let s = special_elements(n).unwrap();
        let image = |label| vertex_line_image(&s.tau2, label, n).unwrap().unwrap().0;
        assert_eq!(image(VertexLabel::Chain(0)), VertexLabel::Chain(5));
        assert_eq!(image(VertexLabel::Chain(5)), VertexLabel::Prime(0));
        assert_eq!(image(VertexLabel::Prime(0)), VertexLabel::Prime(5));
        assert_eq!(image(VertexLabel::Prime(5)), VertexLabel::Chain(0));
        assert_eq!(image(VertexLabel::Chain(2)), VertexLabel::Chain(3));
        assert_eq!(image(VertexLabel::Chain(3)), VertexLabel::Chain(2));
    }

    #[test]
    fn tau1_swaps_primed_and_unprimed_ends() {
        for n in [4usize, 5, 6] {
            let s = special_elements(n).unwrap();
            let image = |label| vertex_line_image(&s.tau1, label, n).unwrap().unwrap().0;
            assert_eq!(image(VertexLabel::Chain(0)), VertexLabel::Prime(0));
            assert_eq!(image(VertexLabel::Prime(0)), VertexLabel::Chain(0));
            assert_eq!(image(VertexLabel::Chain(n)), VertexLabel::Prime(n));
            assert_eq!(image(VertexLabel::Prime(n)), VertexLabel::Chain(n));
            for i in 2..=n - 2 {
                assert_eq!(image(VertexLabel::Chain(i)), VertexLabel::Chain(i));
            }
        }
    }

    #[test]
    fn non_stabilizing_elements_miss_the_vertex_lines() {
        let n = 4;
        let t = AffineElement::translation(mu_plus(n));
        // t^{μ+} moves a_{0′} off every vertex line even though it fixes a_0's.
        assert_eq!(vertex_line_image(&t, VertexLabel::Prime(0), n).unwrap(), None);
    }

    #[test]
    fn encode_is_injective_on_a_sample() {
        let n = 4;
        let s = special_elements(n).unwrap();
        let mut seen = std::collections::HashSet::new();
        let mut w = AffineElement::identity(n);
        for _ in 0..8 {
            w = w.multiply(&s.tau2);
            assert!(seen.insert(w.encode()), "collision in compact encoding");
        }
    }

    #[test]
    fn encode_round_trips_and_preserves_order() {
        let n = 4;
        let s = special_elements(n).unwrap();
        let mut elems = vec![AffineElement::identity(n)];
        for step in [&s.tau1, &s.tau2, &s.central, &s.tau] {
            let mut next = Vec::new();
            for w in &elems {
                next.push(w.multiply(step));
                next.push(step.multiply(w));
            }
            elems.extend(next);
        }
        let neutral: Vec<_> = elems.into_iter().filter(|w| w.is_neutral()).collect();
        assert!(neutral.len() > 8);
        for a in &neutral {
            assert_eq!(&AffineElement::decode(a.encode(), n), a);
            for b in &neutral {
                assert_eq!(a.cmp(b), a.encode().cmp(&b.encode()), "key order mismatch");
            }
        }
    }

    #[test]
    fn rank_validation() {
        assert!(validate_rank(3).is_err());
        assert!(validate_rank(4).is_ok());
        assert!(validate_rank(12).is_ok());
        assert!(validate_rank(13).is_err());
        assert!(special_elements(3).is_err());
    }
}
